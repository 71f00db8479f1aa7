#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "nlot/kernel.hpp"
#include "nlot/state_space.hpp"

namespace nlot {

namespace detail {

// Contract shared by both backends: total mass conserved to 1e-12 relative,
// negatives no deeper than rounding noise get clipped, anything worse is an
// error; renormalize to the input mass after clipping.
inline void enforce_evolution_contract(const StateSpace& sp, std::vector<double>& rho,
                                       double target_mass) {
    double s = 0, amax = 0;
    for (int i = 0; i < sp.n(); ++i) {
        s += rho[i] * sp.m[i];
        amax = std::max(amax, std::abs(rho[i]));
    }
    double mscale = std::max(1.0, std::abs(target_mass));
    if (std::abs(s - target_mass) > 1e-12 * mscale)
        throw std::runtime_error("evolve: mass drift " + std::to_string(s - target_mass));
    double floor = -1e-12 * std::max(1.0, amax);
    for (double& v : rho) {
        if (v < 0) {
            if (v < floor) throw std::runtime_error("evolve: negative density " + std::to_string(v));
            v = 0;
        }
    }
    double s2 = 0;
    for (int i = 0; i < sp.n(); ++i) s2 += rho[i] * sp.m[i];
    if (s2 > 0)
        for (double& v : rho) v *= target_mass / s2;
}

// evolution input: any nonnegative finite function (not necessarily mass 1)
inline double validate_evolution_input(const StateSpace& sp, const Density& rho) {
    if (static_cast<int>(rho.size()) != sp.n())
        throw std::invalid_argument("evolve: density size mismatch");
    double s = 0;
    for (int i = 0; i < sp.n(); ++i) {
        if (!std::isfinite(rho[i]) || rho[i] < 0)
            throw std::invalid_argument("evolve: input entries must be finite and nonnegative");
        s += rho[i] * sp.m[i];
    }
    return s;
}

}  // namespace detail

// exp(tL) through scaling-and-squaring on the dense generator matrix
struct DenseSemigroup {
    const StateSpace* sp = nullptr;
    Eigen::MatrixXd L;

    DenseSemigroup(const StateSpace& space, const JumpKernel& k) : sp(&space) {
        int n = space.n();
        if (n > 512) throw std::invalid_argument("dense semigroup: more than 512 states");
        L.setZero(n, n);
        if (k.form == KernelForm::Dense) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) L(i, j) = k.J[i * n + j];
        } else {
            for (int i = 0; i < n; ++i)
                for (std::size_t e = 0; e < k.disp.size(); ++e)
                    L(i, space.shift_site(i, k.disp[e])) += k.nu[e];
        }
        for (int i = 0; i < n; ++i) {
            double row = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) row += L(i, j);
            L(i, i) = -row;
        }
    }

    Eigen::MatrixXd heat_kernel(double t) const { return (t * L).exp(); }

    Density evolve(const Density& rho0, double t) const {
        double mass0 = detail::validate_evolution_input(*sp, rho0);
        if (t < 0) throw std::invalid_argument("evolve: negative time");
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(rho0.data(), sp->n());
        Eigen::VectorXd out = heat_kernel(t) * v;
        Density rho(out.data(), out.data() + sp->n());
        detail::enforce_evolution_contract(*sp, rho, mass0);
        return rho;
    }
};

// Diagonalization by the lattice Fourier transform. The symbol is
// eta(k) = sum_z nu(z) (cos(2 pi <k/N, z>) - 1) <= 0, eta(0) = 0.
struct SpectralSemigroup {
    const StateSpace* sp = nullptr;
    std::vector<double> eta;

    SpectralSemigroup(const StateSpace& space, const JumpKernel& k) : sp(&space) {
        if (!space.is_lattice() || k.form != KernelForm::TranslationInvariant)
            throw std::invalid_argument(
                "spectral semigroup: needs a periodic lattice and a translation-invariant kernel");
        if (check_reversibility(space, k) > 1e-10)
            throw std::invalid_argument("spectral semigroup: kernel is not reversible");
        int n = space.n();
        eta.assign(n, 0.0);
        for (int f = 0; f < n; ++f) {
            auto kc = space.coords(f);
            double s = 0;
            for (std::size_t e = 0; e < k.disp.size(); ++e) {
                double phase = 0;
                for (int a = 0; a < space.d; ++a)
                    phase += 2.0 * M_PI * double(kc[a]) * k.disp[e][a] / space.extents[a];
                s += k.nu[e] * (std::cos(phase) - 1.0);
            }
            eta[f] = s;
        }
    }

    const std::vector<double>& symbol() const { return eta; }

    // separable DFT along each lattice axis; sign = -1 forward, +1 inverse
    void transform(std::vector<std::complex<double>>& a, int sign) const {
        int n = sp->n();
        std::vector<std::complex<double>> line, out;
        int stride = 1;
        for (int axis = 0; axis < sp->d; ++axis) {
            int N = sp->extents[axis];
            line.resize(N);
            out.resize(N);
            std::vector<std::complex<double>> tw(N);
            for (int r = 0; r < N; ++r) {
                double ang = sign * 2.0 * M_PI * r / N;
                tw[r] = {std::cos(ang), std::sin(ang)};
            }
            int nlines = n / N;
            for (int l = 0; l < nlines; ++l) {
                // base index of this line: decompose l over the other axes
                int lo = l % stride;
                int hi = l / stride;
                int base = lo + hi * stride * N;
                for (int j = 0; j < N; ++j) line[j] = a[base + j * stride];
                for (int kk = 0; kk < N; ++kk) {
                    std::complex<double> s = 0;
                    for (int j = 0; j < N; ++j) s += line[j] * tw[(j * kk) % N];
                    out[kk] = s;
                }
                for (int kk = 0; kk < N; ++kk) a[base + kk * stride] = out[kk];
            }
            stride *= N;
        }
        if (sign > 0)
            for (auto& v : a) v /= double(n);
    }

    Density evolve(const Density& rho0, double t) const {
        double mass0 = detail::validate_evolution_input(*sp, rho0);
        if (t < 0) throw std::invalid_argument("evolve: negative time");
        int n = sp->n();
        std::vector<std::complex<double>> a(n);
        for (int i = 0; i < n; ++i) a[i] = rho0[i];
        transform(a, -1);
        for (int f = 0; f < n; ++f) a[f] *= std::exp(t * eta[f]);
        transform(a, +1);
        Density rho(n);
        for (int i = 0; i < n; ++i) rho[i] = a[i].real();
        detail::enforce_evolution_contract(*sp, rho, mass0);
        return rho;
    }
};

// H(rho) = sum rho_i log(rho_i) m_i with 0 log 0 = 0
inline double entropy(const StateSpace& sp, const Density& rho) {
    double s = 0;
    for (int i = 0; i < sp.n(); ++i) {
        double v = rho[i];
        if (v < 0) {
            if (v < -1e-9) throw std::invalid_argument("entropy: negative density");
            v = 0;
        }
        if (v > 0) s += v * std::log(v) * sp.m[i];
    }
    return s;
}

// I(rho) = sum_{i<j} (rho_j - rho_i)(log rho_j - log rho_i) gamma_ij.
// One-sided zeros across a positive edge give +inf; two-sided zeros give 0.
inline double fisher_information(const StateSpace& sp, const EdgeWeights& ew, const Density& rho) {
    double s = 0;
    for (int e = 0; e < ew.m_edges(); ++e) {
        auto [i, j] = ew.edges[e];
        double a = rho[i], b = rho[j];
        if (a == 0 && b == 0) continue;
        if (a == 0 || b == 0) return std::numeric_limits<double>::infinity();
        if (a != b) s += (b - a) * (std::log(b) - std::log(a)) * ew.w[e];
    }
    return s;
}

struct DissipationReport {
    double entropy_change;    // H(rho_t) - H(rho_s)
    double dissipated;        // integral of I over [s, t], composite Simpson
    double gap;               // |entropy_change + dissipated|
};

inline DissipationReport entropy_dissipation_check(const StateSpace& sp, const JumpKernel& k,
                                                   const Density& rho0, double s, double t,
                                                   int steps = 200) {
    if (!(0 <= s && s < t)) throw std::invalid_argument("dissipation check: need 0 <= s < t");
    if (steps < 2 || steps % 2) throw std::invalid_argument("dissipation check: steps must be even >= 2");
    DenseSemigroup sg(sp, k);
    EdgeWeights ew = build_edge_weights(sp, k);
    double hstep = (t - s) / steps;
    double integral = 0;
    for (int q = 0; q <= steps; ++q) {
        double fi = fisher_information(sp, ew, sg.evolve(rho0, s + q * hstep));
        double wgt = (q == 0 || q == steps) ? 1.0 : (q % 2 ? 4.0 : 2.0);
        integral += wgt * fi;
    }
    integral *= hstep / 3.0;
    DissipationReport rep;
    rep.entropy_change = entropy(sp, sg.evolve(rho0, t)) - entropy(sp, sg.evolve(rho0, s));
    rep.dissipated = integral;
    rep.gap = std::abs(rep.entropy_change + rep.dissipated);
    return rep;
}

struct PositivityReport {
    bool structurally_positive;  // support graph connected
    bool numerically_positive;   // min entry of exp(tL) > 0
    double min_entry;
    bool agree;
};

inline PositivityReport heat_kernel_positivity(const StateSpace& sp, const JumpKernel& k, double t) {
    EdgeWeights ew = build_edge_weights(sp, k);
    auto comp = components(ew);
    bool connected = true;
    for (int c : comp)
        if (c != 0) { connected = false; break; }
    DenseSemigroup sg(sp, k);
    Eigen::MatrixXd P = sg.heat_kernel(t);
    double mn = P.minCoeff();
    PositivityReport rep;
    rep.structurally_positive = connected;
    rep.numerically_positive = mn > 0;
    rep.min_entry = mn;
    rep.agree = (rep.structurally_positive == rep.numerically_positive);
    return rep;
}

}  // namespace nlot
