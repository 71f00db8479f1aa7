#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlot/geodesic.hpp"
#include "nlot/semigroup.hpp"

namespace nlot {

// One verification outcome. `slack` is the signed margin in the check's own
// units: nonnegative means the assertion held, more positive means more room.
struct CheckReport {
    std::string name;
    bool pass = false;
    double slack = 0;
    double tolerance = 0;
    double runtime_ms = 0;
    std::map<std::string, double> measured;
    std::string note;
};

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// ---------------------------------------------------------------------------
// Exact 1d periodic W1 through cumulative differences: the optimal dual
// offset is a median of the cumulative sums.
// ---------------------------------------------------------------------------
inline double w1_periodic_1d(const StateSpace& sp, const Density& rho0, const Density& rho1) {
    if (!sp.is_lattice() || sp.d != 1)
        throw std::invalid_argument("w1_periodic_1d: 1d periodic lattice only");
    int n = sp.n();
    std::vector<double> G(n);
    double run = 0;
    for (int i = 0; i < n; ++i) {
        run += (rho0[i] - rho1[i]) * sp.m[i];
        G[i] = run;
    }
    if (std::abs(run) > 1e-9)
        throw std::invalid_argument("w1_periodic_1d: endpoint masses differ");
    std::vector<double> s = G;
    std::nth_element(s.begin(), s.begin() + n / 2, s.end());
    double med = s[n / 2];
    if (n % 2 == 0) {
        double lower = *std::max_element(s.begin(), s.begin() + n / 2);
        med = 0.5 * (med + lower);
    }
    double w = 0;
    for (int i = 0; i < n; ++i) w += std::abs(G[i] - med);
    return sp.h * w;
}

// ---------------------------------------------------------------------------
// A rigorous positive lower bound on the transport distance between distinct
// densities: pair the Kantorovich dual of W1 (test function +-dmin/2 on the
// sign pattern of rho0-rho1) with the W1 <= (M/sqrt(2)) W comparison.
// ---------------------------------------------------------------------------
inline double separation_lower_bound(const StateSpace& sp, const JumpKernel& k,
                                     const Density& rho0, const Density& rho1) {
    int n = sp.n();
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) dmin = std::min(dmin, sp.dist(i, j));
    double tv = 0;
    for (int i = 0; i < n; ++i) tv += std::abs(rho0[i] - rho1[i]) * sp.m[i];
    double M = std::sqrt(second_moment(sp, k));
    return dmin * tv / (std::sqrt(2.0) * M);
}

// ---------------------------------------------------------------------------
// Evolution variational inequality probe. For the heat flow P_t and a fixed
// target sigma the theorem gives, with D(h) the forward difference quotient
//   D(h) = [W^2(P_{t+h} mu, sigma) - W^2(P_t mu, sigma)]/(2h)
//          + H(P_t mu) - H(sigma),
// D <= 0 in the limit h -> 0+. Both h = dt and h = dt/2 are reported.
// ---------------------------------------------------------------------------
struct EviReport {
    double t = 0, dt = 0;
    double W2_base = 0;
    double D_full = 0, D_half = 0;
    double entropy_mu_t = 0, entropy_sigma = 0;
    bool solves_converged = false;
};

template <class Evolve>
EviReport evi_probe(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                    Evolve&& evolve, const Density& mu, const Density& sigma, double t, double dt,
                    const SolverConfig& cfg) {
    EviReport rep;
    rep.t = t;
    rep.dt = dt;
    Density rt = evolve(mu, t);
    Density rh = evolve(mu, t + 0.5 * dt);
    Density rf = evolve(mu, t + dt);
    auto g0 = solve_geodesic(sp, ew, mean, rt, sigma, cfg);
    auto gh = solve_geodesic(sp, ew, mean, rh, sigma, cfg);
    auto gf = solve_geodesic(sp, ew, mean, rf, sigma, cfg);
    rep.solves_converged = g0.converged && gh.converged && gf.converged;
    rep.W2_base = g0.W * g0.W;
    rep.entropy_mu_t = entropy(sp, rt);
    rep.entropy_sigma = entropy(sp, sigma);
    double gap = rep.entropy_mu_t - rep.entropy_sigma;
    rep.D_full = (gf.W * gf.W - rep.W2_base) / (2 * dt) + gap;
    rep.D_half = (gh.W * gh.W - rep.W2_base) / dt + gap;
    return rep;
}

// ---------------------------------------------------------------------------
// Entropy along a path against its chord: positive max_violation means the
// convexity inequality H(rho_s) <= (1-s) H0 + s H1 failed somewhere.
// ---------------------------------------------------------------------------
struct PathConvexityReport {
    double max_violation = -std::numeric_limits<double>::infinity();
    int arg_k = -1;
    double h0 = 0, h1 = 0;
};

inline PathConvexityReport entropy_convexity_along_path(const StateSpace& sp, const Path& p) {
    PathConvexityReport rep;
    int K = p.K();
    rep.h0 = entropy(sp, p.rho.front());
    rep.h1 = entropy(sp, p.rho.back());
    for (int k = 1; k < K; ++k) {
        double s = double(k) / K;
        Density clipped = p.rho[k];
        for (double& v : clipped) v = std::max(v, 0.0);
        double viol = entropy(sp, clipped) - ((1 - s) * rep.h0 + s * rep.h1);
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.arg_k = k;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Potential form of the action: recover a potential on every interval and
// re-evaluate sum_k dt sum_e (grad psi)^2 theta gamma. Agreement with the
// measure-form action is the tangency diagnostic.
// ---------------------------------------------------------------------------
struct PotentialFormReport {
    double action_measure = 0;
    double action_potential = 0;
    double max_residual = 0;           // worst per-interval least-squares misfit
    double max_residual_interior = 0;  // same, excluding the two boundary intervals
    double relative_gap = 0;
};

inline PotentialFormReport potential_form_report(const StateSpace& sp, const EdgeWeights& ew,
                                                 const Mean& mean, const Path& p) {
    PotentialFormReport rep;
    int K = p.K(), E = ew.m_edges();
    double dt = p.dt();
    rep.action_measure = path_action(sp, ew, mean, p);
    for (int k = 0; k < K; ++k) {
        Density mid(sp.n());
        for (int i = 0; i < sp.n(); ++i)
            mid[i] = std::max(0.5 * (p.rho[k][i] + p.rho[k + 1][i]), 0.0);
        auto rec = recover_potential(sp, ew, mean, mid, p.nu[k]);
        rep.max_residual = std::max(rep.max_residual, rec.residual);
        if (k > 0 && k < K - 1)
            rep.max_residual_interior = std::max(rep.max_residual_interior, rec.residual);
        double a = 0;
        for (int e = 0; e < E; ++e) {
            auto [i, j] = ew.edges[e];
            double grad = rec.psi[j] - rec.psi[i];
            a += grad * grad * mean.value(mid[i], mid[j]) * ew.w[e];
        }
        rep.action_potential += dt * a;
    }
    double scale = std::max({1e-300, std::abs(rep.action_measure), std::abs(rep.action_potential)});
    rep.relative_gap = std::abs(rep.action_measure - rep.action_potential) / scale;
    return rep;
}

// ---------------------------------------------------------------------------
// Fixture helpers shared by the verification suite, tests, and the CLI.
// ---------------------------------------------------------------------------
inline Density random_positive_density(const StateSpace& sp, Rng& rng, double floor = 0.5) {
    Density r(sp.n());
    for (double& v : r) v = floor + rng.uniform();
    return make_density(sp, r);
}

// dense reversible kernel: symmetric positive couplings divided by the masses
inline JumpKernel random_reversible_kernel(const StateSpace& sp, Rng& rng) {
    int n = sp.n();
    std::vector<double> J(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double s = rng.uniform(0.2, 1.0);
            J[static_cast<std::size_t>(i) * n + j] = s / sp.m[i];
            J[static_cast<std::size_t>(j) * n + i] = s / sp.m[j];
        }
    return make_dense_kernel(sp, J);
}

}  // namespace nlot
