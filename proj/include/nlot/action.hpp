#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nlot/kernel.hpp"
#include "nlot/means.hpp"
#include "nlot/state_space.hpp"

namespace nlot {

// Antisymmetric momentum per unordered pair: v[e] is the flux oriented from
// the lower to the higher state index of edge e.
using Momentum = std::vector<double>;

// A(rho, nu) = sum_{i<j} nu_ij^2 / (theta(rho_i, rho_j) gamma_ij), which equals
// the symmetrized ordered-pair form by antisymmetry. Vacuum edges (theta = 0)
// contribute 0 for zero flux and +inf otherwise.
inline double action(const StateSpace& sp, const EdgeWeights& ew, const Mean& mean,
                     const Density& rho, const Momentum& nu) {
    if (static_cast<int>(rho.size()) != sp.n() || nu.size() != ew.w.size())
        throw std::invalid_argument("action: size mismatch");
    double total = 0;
    for (int e = 0; e < ew.m_edges(); ++e) {
        auto [i, j] = ew.edges[e];
        double th = mean.value(rho[i], rho[j]);
        if (th > 0) {
            total += nu[e] * nu[e] / (th * ew.w[e]);
        } else if (nu[e] != 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return total;
}

struct ConvexityWitness {
    double lhs, rhs, gap;  // gap = lhs - rhs <= 0 up to rounding
};

inline ConvexityWitness action_convexity_witness(const StateSpace& sp, const EdgeWeights& ew,
                                                 const Mean& mean, const Density& rho0,
                                                 const Momentum& nu0, const Density& rho1,
                                                 const Momentum& nu1, double lambda) {
    Density rho(sp.n());
    Momentum nu(nu0.size());
    for (int i = 0; i < sp.n(); ++i) rho[i] = lambda * rho0[i] + (1 - lambda) * rho1[i];
    for (std::size_t e = 0; e < nu0.size(); ++e) nu[e] = lambda * nu0[e] + (1 - lambda) * nu1[e];
    ConvexityWitness wit;
    wit.lhs = action(sp, ew, mean, rho, nu);
    wit.rhs = lambda * action(sp, ew, mean, rho0, nu0) +
              (1 - lambda) * action(sp, ew, mean, rho1, nu1);
    wit.gap = wit.lhs - wit.rhs;
    return wit;
}

namespace detail {
inline int site_sub(const StateSpace& sp, int i, int z) {
    auto ci = sp.coords(i), cz = sp.coords(z);
    for (int a = 0; a < sp.d; ++a) ci[a] -= cz[a];
    return sp.site(ci);
}
}  // namespace detail

inline void validate_convolution_kernel(const StateSpace& sp, const std::vector<double>& k) {
    if (!sp.is_lattice())
        throw std::invalid_argument("convolve: needs a periodic lattice");
    if (static_cast<int>(k.size()) != sp.n())
        throw std::invalid_argument("convolve: kernel size mismatch");
    double s = 0;
    for (double v : k) {
        if (!(v >= 0)) throw std::invalid_argument("convolve: kernel weights must be nonnegative");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("convolve: kernel weights must sum to 1");
}

// (rho * k)_i = sum_z k(z) rho_{i-z}  (group convolution; m is uniform on lattices)
inline Density convolve(const StateSpace& sp, const Density& rho, const std::vector<double>& k) {
    validate_convolution_kernel(sp, k);
    Density out(sp.n(), 0.0);
    for (int z = 0; z < sp.n(); ++z) {
        if (k[z] == 0) continue;
        for (int i = 0; i < sp.n(); ++i) out[i] += k[z] * rho[detail::site_sub(sp, i, z)];
    }
    return out;
}

// (nu * k)_{ij} = sum_z k(z) nu_{i-z, j-z}, the diagonal-shift convolution.
// Requires a shift-invariant support (translation-invariant kernels have one).
inline Momentum convolve(const StateSpace& sp, const EdgeWeights& ew, const Momentum& nu,
                         const std::vector<double>& k) {
    validate_convolution_kernel(sp, k);
    Momentum out(nu.size(), 0.0);
    for (int z = 0; z < sp.n(); ++z) {
        if (k[z] == 0) continue;
        for (int e = 0; e < ew.m_edges(); ++e) {
            auto [i, j] = ew.edges[e];
            int a = detail::site_sub(sp, i, z), b = detail::site_sub(sp, j, z);
            int f = ew.edge_of(a, b);
            if (f < 0) throw std::runtime_error("convolve: edge support is not shift-invariant");
            out[e] += k[z] * EdgeWeights::oriented(nu, f, a, b);
        }
    }
    return out;
}

// sum over ordered pairs of (1 ^ |x_i - x_j|) |nu_ij|; bounded by C sqrt(A)
inline double truncated_flux_norm(const StateSpace& sp, const EdgeWeights& ew, const Momentum& nu) {
    double s = 0;
    for (int e = 0; e < ew.m_edges(); ++e) {
        auto [i, j] = ew.edges[e];
        s += 2.0 * std::min(1.0, sp.dist(i, j)) * std::abs(nu[e]);
    }
    return s;
}

}  // namespace nlot
