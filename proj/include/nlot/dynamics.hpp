#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlot/action.hpp"
#include "nlot/kernel.hpp"
#include "nlot/means.hpp"
#include "nlot/state_space.hpp"

namespace nlot {

// Discrete-time path on [0, T]: K+1 density slices on the uniform grid
// t_k = k T / K and K momentum slices, nu[k] living on (t_{k-1}, t_k).
struct Path {
    double T = 1.0;
    std::vector<Density> rho;   // K+1
    std::vector<Momentum> nu;   // K

    int K() const { return static_cast<int>(nu.size()); }
    double dt() const { return T / K(); }
};

inline void validate_path(const StateSpace& sp, const EdgeWeights& ew, const Path& p) {
    if (p.rho.size() != p.nu.size() + 1 || p.nu.empty())
        throw std::invalid_argument("path: needs K momentum slices and K+1 density slices");
    if (!(p.T > 0)) throw std::invalid_argument("path: horizon must be positive");
    for (const auto& r : p.rho)
        if (static_cast<int>(r.size()) != sp.n()) throw std::invalid_argument("path: density size");
    for (const auto& v : p.nu)
        if (v.size() != ew.w.size()) throw std::invalid_argument("path: momentum size");
}

// div(nu)_i = sum_j nu_ij, the net outflux at state i
inline std::vector<double> divergence(const EdgeWeights& ew, const Momentum& nu) {
    std::vector<double> div(ew.n, 0.0);
    for (int e = 0; e < ew.m_edges(); ++e) {
        div[ew.edges[e].first] += nu[e];
        div[ew.edges[e].second] -= nu[e];
    }
    return div;
}

// max_{k,i} | (rho^k_i - rho^{k-1}_i) m_i + dt * div(nu^k)_i |
inline double ce_residual(const StateSpace& sp, const EdgeWeights& ew, const Path& p) {
    validate_path(sp, ew, p);
    double dt = p.dt(), worst = 0;
    for (int k = 1; k <= p.K(); ++k) {
        auto div = divergence(ew, p.nu[k - 1]);
        for (int i = 0; i < sp.n(); ++i) {
            double r = (p.rho[k][i] - p.rho[k - 1][i]) * sp.m[i] + dt * div[i];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

// action of interval k against the midpoint density (rho^{k-1} + rho^k)/2
inline double interval_action(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                              const Path& p, int k) {
    Density mid(sp.n());
    for (int i = 0; i < sp.n(); ++i) mid[i] = 0.5 * (p.rho[k][i] + p.rho[k + 1][i]);
    return action(sp, ew, mean, mid, p.nu[k]);
}

inline std::vector<double> per_interval_actions(const StateSpace& sp, const EdgeWeights& ew,
                                                const Mean& mean, const Path& p) {
    std::vector<double> a(p.K());
    for (int k = 0; k < p.K(); ++k) a[k] = interval_action(sp, ew, mean, p, k);
    return a;
}

// sum_k dt * A_k; pair k with K-1-k so the float sum is invariant under
// time reversal of the path
inline double path_action(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                          const Path& p) {
    validate_path(sp, ew, p);
    auto a = per_interval_actions(sp, ew, mean, p);
    int K = p.K();
    double s = 0;
    for (int k = 0; k < K / 2; ++k) s += a[k] + a[K - 1 - k];
    if (K % 2) s += a[K / 2];
    return p.dt() * s;
}

inline Path reverse_path(const Path& p) {
    Path q;
    q.T = p.T;
    q.rho.assign(p.rho.rbegin(), p.rho.rend());
    q.nu.resize(p.nu.size());
    for (int k = 0; k < p.K(); ++k) {
        q.nu[k] = p.nu[p.K() - 1 - k];
        for (double& v : q.nu[k]) v = -v;
    }
    return q;
}

// glue two paths with matching junction density and equal time step
inline Path concatenate(const Path& a, const Path& b, double tol = 1e-12) {
    if (std::abs(a.dt() - b.dt()) > 1e-15 * std::max(a.dt(), b.dt()))
        throw std::invalid_argument("concatenate: time steps differ");
    const Density &end = a.rho.back(), &start = b.rho.front();
    if (end.size() != start.size()) throw std::invalid_argument("concatenate: state count differs");
    for (std::size_t i = 0; i < end.size(); ++i)
        if (std::abs(end[i] - start[i]) > tol)
            throw std::invalid_argument("concatenate: junction densities differ");
    Path out;
    out.T = a.T + b.T;
    out.rho = a.rho;
    out.rho.insert(out.rho.end(), b.rho.begin() + 1, b.rho.end());
    out.nu = a.nu;
    out.nu.insert(out.nu.end(), b.nu.begin(), b.nu.end());
    return out;
}

}  // namespace nlot
