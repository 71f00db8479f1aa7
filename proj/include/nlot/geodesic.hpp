#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlot/action.hpp"
#include "nlot/dynamics.hpp"
#include "nlot/kernel.hpp"
#include "nlot/means.hpp"
#include "nlot/state_space.hpp"
#include "nlot/util.hpp"

namespace nlot {

// ---------------------------------------------------------------------------
// Two-state oracle: on states {0,1} with m = (1,1) and a single edge weight
// gamma, the continuity equation forces nu = p', so
//   W = (1/sqrt(gamma)) | int_{p0}^{p1} dp / sqrt(theta(1-p, p)) |.
// Evaluated with adaptive Gauss-Kronrod; the nodes are interior, which keeps
// the endpoint singularity of vanishing means out of reach.
// ---------------------------------------------------------------------------

namespace detail {

inline const double* gk_nodes() {
    static const double x[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
    return x;
}
inline const double* gk_wk() {
    static const double w[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    return w;
}
inline const double* gk_wg() {
    static const double w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                0.417959183673469};
    return w;
}

template <class F>
void gk15(const F& f, double a, double b, double& kres, double& err) {
    const double* x = gk_nodes();
    const double* wk = gk_wk();
    const double* wg = gk_wg();
    double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double fk = 0, fg = 0;
    for (int i = 0; i < 8; ++i) {
        double v;
        if (i == 7) {
            v = f(c);
            fk += wk[i] * v;
            fg += wg[3] * v;
        } else {
            double v1 = f(c - hw * x[i]), v2 = f(c + hw * x[i]);
            v = v1 + v2;
            fk += wk[i] * v;
            if (i % 2 == 1) fg += wg[i / 2] * v;
        }
    }
    kres = fk * hw;
    err = std::abs((fk - fg) * hw);
}

template <class F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth = 0) {
    double q, err;
    gk15(f, a, b, q, err);
    if (err <= tol || depth >= 60) return q;
    double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, 0.5 * tol, depth + 1) + adaptive_gk(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

inline double two_point_oracle(double p0, double p1, double gamma, const Mean& mean,
                               double tol = 1e-10) {
    if (!(gamma > 0)) throw std::invalid_argument("two_point_oracle: gamma must be positive");
    if (!(p0 >= 0 && p0 <= 1 && p1 >= 0 && p1 <= 1))
        throw std::invalid_argument("two_point_oracle: endpoints must lie in [0,1]");
    if (p0 == p1) return 0.0;
    // substitute p = sin^2 u: the sqrt-type endpoint singularity of vanishing
    // means turns into a bounded integrand
    auto g = [&](double u) {
        double su = std::sin(u), cu = std::cos(u);
        double p = su * su;
        if (p <= 0 || p >= 1) return 0.0;
        return 2.0 * su * cu / std::sqrt(mean.value(1.0 - p, p));
    };
    double u0 = std::asin(std::sqrt(std::min(p0, p1)));
    double u1 = std::asin(std::sqrt(std::max(p0, p1)));
    double q0, e0;
    detail::gk15(g, u0, u1, q0, e0);
    double I = detail::adaptive_gk(g, u0, u1, tol * std::max(1.0, std::abs(q0)));
    return std::abs(I) / std::sqrt(gamma);
}

// ---------------------------------------------------------------------------
// Potential recovery: weighted least squares of nu against gradient fields,
//   min_psi sum_e ((psi_j - psi_i) w_e - nu_e)^2 / w_e,   w_e = theta_e gamma_e,
// solved through the weighted graph Laplacian with the gauge
// sum_i psi_i m_i = 0 per connected component of the positive-weight support.
// ---------------------------------------------------------------------------

struct PotentialResult {
    std::vector<double> psi;
    double residual;  // weighted relative misfit in [0, 1]-ish; 1 for circulations
};

inline PotentialResult recover_potential(const StateSpace& sp, const EdgeWeights& ew,
                                         const Mean& mean, const Density& rho,
                                         const Momentum& nu) {
    int n = sp.n(), E = ew.m_edges();
    std::vector<double> w(E);
    for (int e = 0; e < E; ++e) {
        auto [i, j] = ew.edges[e];
        w[e] = mean.value(rho[i], rho[j]) * ew.w[e];
        if (w[e] <= 0 && nu[e] != 0)
            throw std::invalid_argument("recover_potential: flux across a vacuum edge");
    }
    // components of the positive-weight subgraph
    std::vector<int> comp(n, -1);
    {
        std::vector<std::vector<int>> adj(n);
        for (int e = 0; e < E; ++e)
            if (w[e] > 0) {
                adj[ew.edges[e].first].push_back(ew.edges[e].second);
                adj[ew.edges[e].second].push_back(ew.edges[e].first);
            }
        int c = 0;
        std::vector<int> stack;
        for (int s0 = 0; s0 < n; ++s0) {
            if (comp[s0] >= 0) continue;
            comp[s0] = c;
            stack.push_back(s0);
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (int v : adj[u])
                    if (comp[v] < 0) {
                        comp[v] = c;
                        stack.push_back(v);
                    }
            }
            ++c;
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + c, n + c);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + c);
        for (int e = 0; e < E; ++e) {
            if (w[e] <= 0) continue;
            auto [i, j] = ew.edges[e];
            M(i, i) += w[e];
            M(j, j) += w[e];
            M(i, j) -= w[e];
            M(j, i) -= w[e];
        }
        for (int i = 0; i < n; ++i) {
            M(i, n + comp[i]) = sp.m[i];
            M(n + comp[i], i) = sp.m[i];
        }
        auto div = divergence(ew, nu);
        for (int i = 0; i < n; ++i) rhs[i] = -div[i];
        Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        PotentialResult out;
        out.psi.assign(sol.data(), sol.data() + n);
        double num = 0, den = 0;
        for (int e = 0; e < E; ++e) {
            if (w[e] <= 0) continue;
            auto [i, j] = ew.edges[e];
            double r = nu[e] - (out.psi[j] - out.psi[i]) * w[e];
            num += r * r / w[e];
            den += nu[e] * nu[e] / w[e];
        }
        out.residual = den > 0 ? std::sqrt(num / den) : 0.0;
        return out;
    }
}

// ---------------------------------------------------------------------------
// Geodesic solver. Primal-dual (Chambolle-Pock type) iteration on
//   min  sum_k dt sum_e nu_{e,k}^2 / (theta(mid_i, mid_j) gamma_e)
//   s.t. (rho^k - rho^{k-1}) m + dt div(nu^k) = 0,  rho^0, rho^K fixed,
// where mid = (rho^{k-1} + rho^k)/2. The nonsmooth part acts on per-cell
// triples (nu_e, mid_i, mid_j); its prox reduces to a strictly convex 2d
// problem solved by safeguarded Newton. The affine continuity constraint is
// handled by a prefactorized least-squares projection, so every iterate is
// feasible and the primal objective can be monitored.
// ---------------------------------------------------------------------------

struct SolverConfig {
    int K = 32;
    int max_iter = 50000;
    double tol_res = 1e-7;    // fixed-point residual target
    double tol_gap = 1e-9;    // relative objective stall over stall_window iterations
    std::vector<double> delta_ladder = {1e-2, 1e-3, 1e-4};
    double step_scale = 0.95;  // tau sigma ||B||^2 = step_scale^2 < 1
    double step_ratio = 1.0;   // tau / sigma
    double horizon = 1.0;      // solve over [0, T]
    int check_every = 10;
    int stall_window = 100;
};

struct GeodesicResult {
    Path path;
    double W = std::numeric_limits<double>::infinity();
    std::vector<double> per_interval_action;
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0, dual_residual = 0, ce_res = 0;
    std::vector<double> delta_levels, delta_W;  // endpoint smoothing ladder, if used
    bool ladder_monotone = true;
    std::string message;
};

namespace detail {

// prox of (s,t,w) |-> c w^2/theta(s,t) over the closed quadrant. Eliminating w
// in closed form (w* = wt theta/(theta+2c)) leaves
//   Psi(s,t) = (s-st)^2/2 + (t-tt)^2/2 + q/(theta(s,t)+2c),  q = c wt^2,
// strictly convex and finite on the boundary. Newton with a PSD curvature
// model and step-halving; boundary faces of vanish-on-boundary means have the
// closed form value since theta == 0 there.
struct CellProx {
    const Mean* mean;
    double c;

    double psi(double s, double t, double st, double tt, double q) const {
        double th = mean->value(s, t);
        double ds = s - st, dtt = t - tt;
        return 0.5 * ds * ds + 0.5 * dtt * dtt + q / (th + 2 * c);
    }

    void solve(double wt, double st, double tt, double& warm_s, double& warm_t, double& w,
               double& s, double& t) const {
        if (wt == 0) {
            w = 0;
            s = std::max(st, 0.0);
            t = std::max(tt, 0.0);
            warm_s = s;
            warm_t = t;
            return;
        }
        const double q = c * wt * wt;
        const double scale = 1.0 + std::abs(st) + std::abs(tt);
        const double gtol = 1e-11 * scale;
        double cs = (warm_s > 0 && std::isfinite(warm_s)) ? warm_s : std::max(st, 0.0) + 1e-6 * scale;
        double ct = (warm_t > 0 && std::isfinite(warm_t)) ? warm_t : std::max(tt, 0.0) + 1e-6 * scale;
        if (cs <= 0) cs = 1e-6 * scale;
        if (ct <= 0) ct = 1e-6 * scale;
        double fcur = psi(cs, ct, st, tt, q);
        bool stationary = false;
        for (int it = 0; it < 60; ++it) {
            double es = std::max(cs, 1e-250), et = std::max(ct, 1e-250);
            double th = mean->value(es, et), gs, gt;
            mean->partials(es, et, gs, gt);
            gs = std::min(gs, 1e120);
            gt = std::min(gt, 1e120);
            double den = th + 2 * c;
            double grs = cs - st - q * gs / (den * den);
            double grt = ct - tt - q * gt / (den * den);
            bool ok_s = std::abs(grs) <= gtol || (cs <= 0 && grs > 0);
            bool ok_t = std::abs(grt) <= gtol || (ct <= 0 && grt > 0);
            if (ok_s && ok_t) {
                stationary = true;
                break;
            }
            double h11 = 1 + std::min(2 * q * gs * gs / (den * den * den), 1e120);
            double h22 = 1 + std::min(2 * q * gt * gt / (den * den * den), 1e120);
            double h12 = 2 * q * gs * gt / (den * den * den);
            if (!std::isfinite(h12)) h12 = 0;
            double det = h11 * h22 - h12 * h12;
            double ds = -(h22 * grs - h12 * grt) / det;
            double dt2 = -(h11 * grt - h12 * grs) / det;
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 50; ++ls) {
                double ns = std::max(cs + step * ds, 0.0);
                double nt = std::max(ct + step * dt2, 0.0);
                double fn = psi(ns, nt, st, tt, q);
                if (fn <= fcur + 1e-4 * (grs * (ns - cs) + grt * (nt - ct))) {
                    cs = ns;
                    ct = nt;
                    fcur = fn;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        s = cs;
        t = ct;
        double best = fcur;
        (void)stationary;
        // boundary faces: theta vanishes identically there for admissible means
        if (mean->zero_on_boundary()) {
            double t0 = std::max(tt, 0.0);
            double fs0 = 0.5 * st * st + 0.5 * (t0 - tt) * (t0 - tt) + q / (2 * c);
            if (fs0 < best) {
                best = fs0;
                s = 0;
                t = t0;
            }
            double s0 = std::max(st, 0.0);
            double ft0 = 0.5 * (s0 - st) * (s0 - st) + 0.5 * tt * tt + q / (2 * c);
            if (ft0 < best) {
                best = ft0;
                s = s0;
                t = 0;
            }
        } else {
            // faces where theta stays positive: 1d bisection on each
            for (int face = 0; face < 2; ++face) {
                double target = face == 0 ? tt : st;  // coordinate that stays free
                auto g1 = [&](double u) {
                    double eu = std::max(u, 1e-250);
                    double th, gs, gt, gu;
                    if (face == 0) {
                        th = mean->value(0.0, u);
                        mean->partials(1e-250, eu, gs, gt);
                        gu = gt;
                    } else {
                        th = mean->value(u, 0.0);
                        mean->partials(eu, 1e-250, gs, gt);
                        gu = gs;
                    }
                    double den = th + 2 * c;
                    return (u - target) - q * gu / (den * den);
                };
                double lo = 0, hi = std::max(target, 0.0) + std::sqrt(q) / (2 * c) + 1;
                while (g1(hi) < 0 && hi < 1e12) hi *= 2;
                for (int bi = 0; bi < 80; ++bi) {
                    double mid = 0.5 * (lo + hi);
                    if (g1(mid) < 0)
                        lo = mid;
                    else
                        hi = mid;
                }
                double u = 0.5 * (lo + hi);
                double fv = face == 0 ? psi(0.0, u, st, tt, q) : psi(u, 0.0, st, tt, q);
                if (fv < best) {
                    best = fv;
                    s = face == 0 ? 0.0 : u;
                    t = face == 0 ? u : 0.0;
                }
            }
        }
        double th = mean->value(s, t);
        w = wt * th / (th + 2 * c);
        warm_s = s > 0 ? s : 0.5 * scale * 1e-6;
        warm_t = t > 0 ? t : 0.5 * scale * 1e-6;
    }
};

using SpMat = Eigen::SparseMatrix<double>;

struct TransportProblem {
    const StateSpace& sp;
    const EdgeWeights& ew;
    Mean mean;
    int K, n, E, nx, ncells;
    double T, dt;
    Density r0, r1;
    std::vector<int> comp;
    int ncomp = 0;

    SpMat A, At;
    Eigen::VectorXd b;
    Eigen::SimplicialLDLT<SpMat> fac;
    SpMat D, Dt;  // reduced per-slice divergence for the final momentum fix
    Eigen::SimplicialLDLT<SpMat> divfac;
    std::vector<char> div_row_kept;

    int rho_idx(int k, int i) const { return (k - 1) * n + i; }
    int nu_idx(int k, int e) const { return (K - 1) * n + (k - 1) * E + e; }
    int cell(int k, int e) const { return (k - 1) * E + e; }

    TransportProblem(const StateSpace& space, const EdgeWeights& edges, const Mean& mn,
                     Density rho0, Density rho1, int Ksteps, double horizon)
        : sp(space), ew(edges), mean(mn), K(Ksteps), n(space.n()), E(edges.m_edges()),
          T(horizon), r0(std::move(rho0)), r1(std::move(rho1)) {
        if (K < 1) throw std::invalid_argument("solver: K must be >= 1");
        if (!(T > 0)) throw std::invalid_argument("solver: horizon must be positive");
        dt = T / K;
        nx = (K - 1) * n + K * E;
        ncells = K * E;
        comp = components(ew);
        for (int c : comp) ncomp = std::max(ncomp, c + 1);

        // continuity constraint rows, one redundant row dropped per component
        std::vector<int> last_of_comp(ncomp, -1);
        for (int i = 0; i < n; ++i) last_of_comp[comp[i]] = i;
        std::vector<char> dropped(static_cast<std::size_t>(K) * n, 0);
        for (int c = 0; c < ncomp; ++c)
            dropped[static_cast<std::size_t>(K - 1) * n + last_of_comp[c]] = 1;
        std::vector<int> rowmap(static_cast<std::size_t>(K) * n, -1);
        int nrows = 0;
        for (std::size_t r = 0; r < rowmap.size(); ++r)
            if (!dropped[r]) rowmap[r] = nrows++;

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(nrows) * 8);
        b.setZero(nrows);
        for (int k = 1; k <= K; ++k)
            for (int i = 0; i < n; ++i) {
                int r = rowmap[static_cast<std::size_t>(k - 1) * n + i];
                if (r < 0) continue;
                if (k <= K - 1) trips.emplace_back(r, rho_idx(k, i), sp.m[i]);
                if (k >= 2) trips.emplace_back(r, rho_idx(k - 1, i), -sp.m[i]);
                for (auto [e, sgn] : ew.incident[i])
                    trips.emplace_back(r, nu_idx(k, e), dt * sgn);
                if (k == 1) b[r] += sp.m[i] * r0[i];
                if (k == K) b[r] -= sp.m[i] * r1[i];
            }
        A.resize(nrows, nx);
        A.setFromTriplets(trips.begin(), trips.end());
        A.makeCompressed();
        At = A.transpose();
        SpMat AAt = (A * At).pruned();
        fac.compute(AAt);
        if (fac.info() != Eigen::Success)
            throw std::runtime_error("solver: projection factorization failed");

        // per-slice divergence with one node dropped per component
        div_row_kept.assign(n, 1);
        for (int c = 0; c < ncomp; ++c) div_row_kept[last_of_comp[c]] = 0;
        std::vector<int> dmap(n, -1);
        int dn = 0;
        for (int i = 0; i < n; ++i)
            if (div_row_kept[i]) dmap[i] = dn++;
        std::vector<Eigen::Triplet<double>> dtr;
        for (int e = 0; e < E; ++e) {
            auto [i, j] = ew.edges[e];
            if (dmap[i] >= 0) dtr.emplace_back(dmap[i], e, 1.0);
            if (dmap[j] >= 0) dtr.emplace_back(dmap[j], e, -1.0);
        }
        D.resize(dn, E);
        D.setFromTriplets(dtr.begin(), dtr.end());
        D.makeCompressed();
        Dt = D.transpose();
        SpMat DDt = (D * Dt).pruned();
        divfac.compute(DDt);
        if (divfac.info() != Eigen::Success)
            throw std::runtime_error("solver: divergence factorization failed");
    }

    void project(Eigen::VectorXd& x) const {
        Eigen::VectorXd r = A * x - b;
        x.noalias() -= At * fac.solve(r);
    }

    // centered cell values; endpoints contribute as constants when affine=true
    void apply_I(const Eigen::VectorXd& x, bool affine, Eigen::VectorXd& W, Eigen::VectorXd& S,
                 Eigen::VectorXd& Tt) const {
        for (int k = 1; k <= K; ++k) {
            for (int e = 0; e < E; ++e) {
                auto [i, j] = ew.edges[e];
                int c = cell(k, e);
                W[c] = x[nu_idx(k, e)];
                double sl = 0, tl = 0;
                if (k >= 2) {
                    sl += 0.5 * x[rho_idx(k - 1, i)];
                    tl += 0.5 * x[rho_idx(k - 1, j)];
                } else if (affine) {
                    sl += 0.5 * r0[i];
                    tl += 0.5 * r0[j];
                }
                if (k <= K - 1) {
                    sl += 0.5 * x[rho_idx(k, i)];
                    tl += 0.5 * x[rho_idx(k, j)];
                } else if (affine) {
                    sl += 0.5 * r1[i];
                    tl += 0.5 * r1[j];
                }
                S[c] = sl;
                Tt[c] = tl;
            }
        }
    }

    void apply_It(const Eigen::VectorXd& W, const Eigen::VectorXd& S, const Eigen::VectorXd& Tt,
                  Eigen::VectorXd& g) const {
        g.setZero();
        for (int k = 1; k <= K; ++k)
            for (int e = 0; e < E; ++e) {
                auto [i, j] = ew.edges[e];
                int c = cell(k, e);
                g[nu_idx(k, e)] += W[c];
                if (k >= 2) {
                    g[rho_idx(k - 1, i)] += 0.5 * S[c];
                    g[rho_idx(k - 1, j)] += 0.5 * Tt[c];
                }
                if (k <= K - 1) {
                    g[rho_idx(k, i)] += 0.5 * S[c];
                    g[rho_idx(k, j)] += 0.5 * Tt[c];
                }
            }
    }

    double op_norm() const {
        Eigen::VectorXd v(nx), W(ncells), S(ncells), Tt(ncells), g(nx);
        Rng rng(0x5eed);
        for (int i = 0; i < nx; ++i) v[i] = 0.5 + rng.uniform();
        v.normalize();
        double lam = 1;
        for (int it = 0; it < 50; ++it) {
            apply_I(v, false, W, S, Tt);
            apply_It(W, S, Tt, g);
            lam = g.norm();
            if (lam == 0) return 1.0;
            v = g / lam;
        }
        return std::sqrt(lam) * 1.01;
    }

    // objective of a feasible iterate; +inf across vacuum with flux
    double objective(const Eigen::VectorXd& x, Eigen::VectorXd& W, Eigen::VectorXd& S,
                     Eigen::VectorXd& Tt) const {
        apply_I(x, true, W, S, Tt);
        double total = 0;
        for (int k = 1; k <= K; ++k) {
            for (int e = 0; e < E; ++e) {
                int c = cell(k, e);
                double th = mean.value(std::max(S[c], 0.0), std::max(Tt[c], 0.0));
                double nu = W[c];
                if (th > 0)
                    total += nu * nu / (th * ew.w[e]);
                else if (nu != 0)
                    return std::numeric_limits<double>::infinity();
            }
        }
        return dt * total;
    }

    Path extract_path(const Eigen::VectorXd& x) const {
        Path p;
        p.T = T;
        p.rho.resize(K + 1);
        p.nu.assign(K, Momentum(E));
        p.rho[0] = r0;
        p.rho[K] = r1;
        for (int k = 1; k <= K - 1; ++k) {
            p.rho[k].resize(n);
            for (int i = 0; i < n; ++i) p.rho[k][i] = x[rho_idx(k, i)];
        }
        for (int k = 1; k <= K; ++k)
            for (int e = 0; e < E; ++e) p.nu[k - 1][e] = x[nu_idx(k, e)];
        return p;
    }

    // least-squares momentum correction: make each slice's divergence match
    // the density increments exactly
    void fix_momentum(Path& p) const {
        int dn = D.rows();
        if (dn == 0) return;
        Eigen::VectorXd target(dn), nu(E);
        for (int k = 1; k <= K; ++k) {
            int r = 0;
            for (int i = 0; i < n; ++i) {
                if (!div_row_kept[i]) continue;
                target[r++] = (p.rho[k - 1][i] - p.rho[k][i]) * sp.m[i] / dt;
            }
            for (int e = 0; e < E; ++e) nu[e] = p.nu[k - 1][e];
            Eigen::VectorXd resid = target - D * nu;
            nu.noalias() += Dt * divfac.solve(resid);
            for (int e = 0; e < E; ++e) p.nu[k - 1][e] = nu[e];
        }
    }
};

inline GeodesicResult solve_core(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                                 const Density& r0, const Density& r1, const SolverConfig& cfg) {
    TransportProblem P(sp, ew, mean, r0, r1, cfg.K, cfg.horizon);
    const int nc = P.ncells;
    const double Bnorm = P.op_norm();
    const double sigma = cfg.step_scale / (Bnorm * std::sqrt(cfg.step_ratio));
    const double tau = cfg.step_scale * std::sqrt(cfg.step_ratio) / Bnorm;

    CellProx prox{&P.mean, 0.0};
    std::vector<double> ci(P.E);
    for (int e = 0; e < P.E; ++e) ci[e] = P.dt / (sigma * ew.w[e]);

    Eigen::VectorXd x(P.nx), xn(P.nx), xbar(P.nx), g(P.nx);
    Eigen::VectorXd yw = Eigen::VectorXd::Zero(nc), ys = Eigen::VectorXd::Zero(nc),
                    yt = Eigen::VectorXd::Zero(nc);
    Eigen::VectorXd W(nc), S(nc), Tt(nc);
    std::vector<double> warm_s(nc), warm_t(nc);

    // init: linear interpolation, zero momentum
    for (int k = 1; k <= P.K - 1; ++k) {
        double a = double(k) / P.K;
        for (int i = 0; i < P.n; ++i) x[P.rho_idx(k, i)] = (1 - a) * r0[i] + a * r1[i];
    }
    for (int k = 1; k <= P.K; ++k)
        for (int e = 0; e < P.E; ++e) x[P.nu_idx(k, e)] = 0;
    P.project(x);
    xbar = x;
    P.apply_I(x, true, W, S, Tt);
    for (int c = 0; c < nc; ++c) {
        warm_s[c] = std::max(S[c], 1e-8);
        warm_t[c] = std::max(Tt[c], 1e-8);
    }

    GeodesicResult res;
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x;
    std::vector<double> obj_hist;
    bool monotone_ok = true;
    double pres = 0, dres = 0;
    int iter = 0;
    for (iter = 1; iter <= cfg.max_iter; ++iter) {
        P.apply_I(xbar, true, W, S, Tt);
        double dchange2 = 0;
        for (int k = 1; k <= P.K; ++k) {
            for (int e = 0; e < P.E; ++e) {
                int c = P.cell(k, e);
                double yw0 = yw[c], ys0 = ys[c], yt0 = yt[c];
                double aw = yw0 + sigma * W[c];
                double as = ys0 + sigma * S[c];
                double at = yt0 + sigma * Tt[c];
                prox.c = ci[e];
                double pw, ps, pt;
                prox.solve(aw / sigma, as / sigma, at / sigma, warm_s[c], warm_t[c], pw, ps, pt);
                yw[c] = aw - sigma * pw;
                ys[c] = as - sigma * ps;
                yt[c] = at - sigma * pt;
                double d0 = yw[c] - yw0, d1 = ys[c] - ys0, d2 = yt[c] - yt0;
                dchange2 += d0 * d0 + d1 * d1 + d2 * d2;
            }
        }
        P.apply_It(yw, ys, yt, g);
        xn = x - tau * g;
        P.project(xn);
        double pchange2 = (xn - x).squaredNorm();
        xbar = 2 * xn - x;
        x.swap(xn);

        double ynorm = std::sqrt(yw.squaredNorm() + ys.squaredNorm() + yt.squaredNorm());
        pres = std::sqrt(pchange2) / (tau * (1 + x.norm()));
        dres = std::sqrt(dchange2) / (sigma * (1 + ynorm));

        if (iter % cfg.check_every == 0) {
            double obj = P.objective(x, W, S, Tt);
            if (std::isnan(obj)) {
                res.message = "objective became NaN";
                monotone_ok = false;
                break;
            }
            if (obj < best_obj) {
                best_obj = obj;
                best_x = x;
            } else if (obj_hist.size() && best_obj > obj_hist.back() + 1e-12 * std::max(1.0, obj_hist.back())) {
                monotone_ok = false;  // best-so-far increased: bookkeeping failure
            }
            obj_hist.push_back(best_obj);
            int lag = std::max(1, cfg.stall_window / cfg.check_every);
            if (std::max(pres, dres) <= cfg.tol_res) {
                res.converged = true;
                break;
            }
            if (static_cast<int>(obj_hist.size()) > lag && std::isfinite(best_obj)) {
                double prev = obj_hist[obj_hist.size() - 1 - lag];
                if (std::isfinite(prev) &&
                    std::abs(prev - best_obj) <= cfg.tol_gap * std::max(1.0, std::abs(best_obj))) {
                    res.converged = true;
                    break;
                }
            }
        }
    }
    res.iterations = std::min(iter, cfg.max_iter);
    res.primal_residual = pres;
    res.dual_residual = dres;
    if (!monotone_ok) {
        res.converged = false;
        if (res.message.empty()) res.message = "objective monitor tripped";
    }

    double last_obj = P.objective(x, W, S, Tt);
    if (last_obj < best_obj) {
        best_obj = last_obj;
        best_x = x;
    }
    Path p = P.extract_path(best_x);
    P.fix_momentum(p);
    res.per_interval_action = per_interval_actions(sp, ew, mean, p);
    double act = path_action(sp, ew, mean, p);
    res.W = std::isfinite(act) ? std::sqrt(std::max(act * cfg.horizon, 0.0)) : act;
    res.ce_res = ce_residual(sp, ew, p);
    res.path = std::move(p);
    return res;
}

}  // namespace detail

// relative spread of the per-interval actions; 0 for a constant-speed path
inline double constant_speed_deviation(const std::vector<double>& per_interval) {
    if (per_interval.empty()) return 0;
    double mean = 0;
    for (double a : per_interval) mean += a;
    mean /= per_interval.size();
    if (mean == 0) return 0;
    double var = 0;
    for (double a : per_interval) var += (a - mean) * (a - mean);
    return std::sqrt(var / per_interval.size()) / mean;
}

inline GeodesicResult solve_geodesic(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                                     const Density& rho0, const Density& rho1,
                                     const SolverConfig& cfg = {}) {
    validate_density(sp, rho0, 1e-9);
    validate_density(sp, rho1, 1e-9);
    Density r0 = make_density(sp, rho0), r1 = make_density(sp, rho1);

    // endpoint mass must match on every component of the support graph
    auto comp = components(ew);
    int ncomp = 0;
    for (int c : comp) ncomp = std::max(ncomp, c + 1);
    std::vector<double> m0(ncomp, 0.0), m1(ncomp, 0.0);
    for (int i = 0; i < sp.n(); ++i) {
        m0[comp[i]] += r0[i] * sp.m[i];
        m1[comp[i]] += r1[i] * sp.m[i];
    }
    for (int c = 0; c < ncomp; ++c)
        if (std::abs(m0[c] - m1[c]) > 1e-12) {
            GeodesicResult res;
            res.W = std::numeric_limits<double>::infinity();
            res.converged = true;
            res.message = "endpoint mass differs on a support component: no admissible path";
            return res;
        }

    double mn = 1;
    for (int i = 0; i < sp.n(); ++i) mn = std::min({mn, r0[i], r1[i]});
    if (mn > 0 || !mean.zero_on_boundary()) return detail::solve_core(sp, ew, mean, r0, r1, cfg);

    // vacuum endpoints: solve along the smoothing ladder and extrapolate to 0
    GeodesicResult res;
    Density u = uniform_density(sp);
    bool all_conv = true;
    for (double del : cfg.delta_ladder) {
        Density a(sp.n()), b2(sp.n());
        for (int i = 0; i < sp.n(); ++i) {
            a[i] = (1 - del) * r0[i] + del * u[i];
            b2[i] = (1 - del) * r1[i] + del * u[i];
        }
        GeodesicResult step = detail::solve_core(sp, ew, mean, a, b2, cfg);
        all_conv = all_conv && step.converged;
        res.delta_levels.push_back(del);
        res.delta_W.push_back(step.W);
        res.path = std::move(step.path);
        res.per_interval_action = std::move(step.per_interval_action);
        res.iterations += step.iterations;
        res.primal_residual = step.primal_residual;
        res.dual_residual = step.dual_residual;
        res.ce_res = step.ce_res;
    }
    std::size_t L = res.delta_W.size();
    if (L >= 2) {
        double dl = res.delta_levels[L - 1], dp = res.delta_levels[L - 2];
        double wl = res.delta_W[L - 1], wp = res.delta_W[L - 2];
        res.W = wl + (wl - wp) * dl / (dp - dl);
        for (std::size_t q = 0; q + 1 < L; ++q)
            if (res.delta_W[q] > res.delta_W[q + 1] + 1e-9) res.ladder_monotone = false;
        if (L >= 3) {
            double inc1 = res.delta_W[L - 2] - res.delta_W[L - 3];
            double inc2 = res.delta_W[L - 1] - res.delta_W[L - 2];
            if (inc2 > inc1 + 1e-9) res.ladder_monotone = false;
        }
        if (!res.ladder_monotone) res.message = "smoothing ladder did not contract";
    } else if (L == 1) {
        res.W = res.delta_W[0];
    }
    res.converged = all_conv && res.ladder_monotone;
    return res;
}

inline double distance(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                       const Density& rho0, const Density& rho1, const SolverConfig& cfg = {}) {
    return solve_geodesic(sp, ew, mean, rho0, rho1, cfg).W;
}

// ---------------------------------------------------------------------------
// Reference solver: accelerated projected gradient on the delta-floored
// smooth objective sum_k dt sum_e nu^2 / (max(theta, delta) gamma). Slower and
// less exact than the primal-dual path; used for cross-validation.
// ---------------------------------------------------------------------------

struct ReferenceResult {
    double W;
    double objective;
    int iterations;
};

inline ReferenceResult reference_apg_solve(const StateSpace& sp, const EdgeWeights& ew,
                                           const Mean& mean, const Density& rho0,
                                           const Density& rho1, int K, double delta,
                                           int max_iter = 20000, double horizon = 1.0) {
    Density r0 = make_density(sp, rho0), r1 = make_density(sp, rho1);
    detail::TransportProblem P(sp, ew, mean, r0, r1, K, horizon);
    const int nc = P.ncells;
    Eigen::VectorXd x(P.nx), v(P.nx), xprev(P.nx), grad(P.nx), W(nc), S(nc), Tt(nc);
    Eigen::VectorXd gw(nc), gs(nc), gt(nc);
    for (int k = 1; k <= P.K - 1; ++k) {
        double a = double(k) / P.K;
        for (int i = 0; i < P.n; ++i) x[P.rho_idx(k, i)] = (1 - a) * r0[i] + a * r1[i];
    }
    for (int k = 1; k <= P.K; ++k)
        for (int e = 0; e < P.E; ++e) x[P.nu_idx(k, e)] = 0;
    P.project(x);

    auto fval = [&](const Eigen::VectorXd& z) {
        P.apply_I(z, true, W, S, Tt);
        double total = 0;
        for (int k = 1; k <= P.K; ++k)
            for (int e = 0; e < P.E; ++e) {
                int c = P.cell(k, e);
                double th = std::max(P.mean.value(std::max(S[c], 0.0), std::max(Tt[c], 0.0)), delta);
                total += W[c] * W[c] / (th * ew.w[e]);
            }
        return P.dt * total;
    };
    auto fgrad = [&](const Eigen::VectorXd& z) {
        P.apply_I(z, true, W, S, Tt);
        double total = 0;
        for (int k = 1; k <= P.K; ++k)
            for (int e = 0; e < P.E; ++e) {
                int c = P.cell(k, e);
                double su = std::max(S[c], 0.0), tu = std::max(Tt[c], 0.0);
                double th = P.mean.value(su, tu);
                double nu = W[c];
                if (th > delta) {
                    double ds, dtt;
                    P.mean.partials(std::max(su, 1e-250), std::max(tu, 1e-250), ds, dtt);
                    double common = -P.dt * nu * nu / (th * th * ew.w[e]);
                    gs[c] = (S[c] > 0) ? common * ds : 0.0;
                    gt[c] = (Tt[c] > 0) ? common * dtt : 0.0;
                    gw[c] = 2 * P.dt * nu / (th * ew.w[e]);
                    total += P.dt * nu * nu / (th * ew.w[e]);
                } else {
                    gs[c] = gt[c] = 0.0;
                    gw[c] = 2 * P.dt * nu / (delta * ew.w[e]);
                    total += P.dt * nu * nu / (delta * ew.w[e]);
                }
            }
        P.apply_It(gw, gs, gt, grad);
        return total;
    };

    double Lest = 1.0;
    {
        double gmin = ew.w[0];
        for (double g0 : ew.w) gmin = std::min(gmin, g0);
        Lest = 2 * P.dt / (delta * gmin);
    }
    v = x;
    double tk = 1;
    double fx = fval(x);
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        double fv2 = fgrad(v);
        Eigen::VectorXd xnew;
        double fn = 0;
        for (int bt = 0; bt < 60; ++bt) {
            xnew = v - grad / Lest;
            P.project(xnew);
            fn = fval(xnew);
            double quad = fv2 + grad.dot(xnew - v) + 0.5 * Lest * (xnew - v).squaredNorm();
            if (fn <= quad + 1e-14 * std::max(1.0, std::abs(quad))) break;
            Lest *= 2;
        }
        double tnext = 0.5 * (1 + std::sqrt(1 + 4 * tk * tk));
        if (fn > fx) {  // restart
            v = x;
            tk = 1;
            Lest *= 0.9;
            continue;
        }
        Eigen::VectorXd xold = x;
        x = xnew;
        v = x + ((tk - 1) / tnext) * (x - xold);
        tk = tnext;
        if (std::abs(fx - fn) <= 1e-12 * std::max(1.0, fx) && it > 100) {
            fx = fn;
            break;
        }
        fx = fn;
    }
    ReferenceResult out;
    out.objective = fx;
    out.W = std::sqrt(std::max(fx * horizon, 0.0));
    out.iterations = it;
    return out;
}

}  // namespace nlot
