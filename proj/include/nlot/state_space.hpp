#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlot {

enum class Topology { General, PeriodicLattice };

// Finite state space: points x_i with positive reference weights m_i.
// Periodic lattices know their extents and spacing; distances use the
// minimum image convention there.
struct StateSpace {
    Topology topology = Topology::General;
    int d = 1;
    std::vector<int> extents;              // lattice only
    double h = 1.0;                        // lattice spacing
    std::vector<std::vector<double>> x;    // positions, n rows of length d
    std::vector<double> m;                 // reference weights

    int n() const { return static_cast<int>(m.size()); }

    double total_mass() const {
        double s = 0;
        for (double w : m) s += w;
        return s;
    }

    bool is_lattice() const { return topology == Topology::PeriodicLattice; }

    // lattice coordinate helpers (row-major, axis 0 fastest)
    int site(const std::vector<int>& c) const {
        int idx = 0, stride = 1;
        for (int a = 0; a < d; ++a) {
            int ca = c[a] % extents[a];
            if (ca < 0) ca += extents[a];
            idx += ca * stride;
            stride *= extents[a];
        }
        return idx;
    }
    std::vector<int> coords(int idx) const {
        std::vector<int> c(d);
        for (int a = 0; a < d; ++a) {
            c[a] = idx % extents[a];
            idx /= extents[a];
        }
        return c;
    }
    int shift_site(int idx, const std::vector<int>& z) const {
        auto c = coords(idx);
        for (int a = 0; a < d; ++a) c[a] += z[a];
        return site(c);
    }

    double dist2(int i, int j) const {
        if (topology == Topology::PeriodicLattice) {
            double s = 0;
            int ii = i, jj = j;
            for (int a = 0; a < d; ++a) {
                int ci = ii % extents[a], cj = jj % extents[a];
                ii /= extents[a];
                jj /= extents[a];
                int delta = ci - cj;
                if (delta < 0) delta = -delta;
                if (delta > extents[a] - delta) delta = extents[a] - delta;
                double dx = h * delta;
                s += dx * dx;
            }
            return s;
        }
        double s = 0;
        for (int a = 0; a < d; ++a) {
            double dx = x[i][a] - x[j][a];
            s += dx * dx;
        }
        return s;
    }
    double dist(int i, int j) const { return std::sqrt(dist2(i, j)); }
};

inline StateSpace make_lattice(const std::vector<int>& extents, double h) {
    if (extents.empty() || extents.size() > 2)
        throw std::invalid_argument("make_lattice: dimension must be 1 or 2");
    if (h <= 0) throw std::invalid_argument("make_lattice: spacing must be positive");
    for (int N : extents)
        if (N < 2) throw std::invalid_argument("make_lattice: extents must be >= 2");
    StateSpace sp;
    sp.topology = Topology::PeriodicLattice;
    sp.d = static_cast<int>(extents.size());
    sp.extents = extents;
    sp.h = h;
    int n = 1;
    for (int N : extents) n *= N;
    double md = std::pow(h, sp.d);
    sp.m.assign(n, md);
    sp.x.resize(n);
    for (int i = 0; i < n; ++i) {
        auto c = sp.coords(i);
        sp.x[i].resize(sp.d);
        for (int a = 0; a < sp.d; ++a) sp.x[i][a] = h * c[a];
    }
    return sp;
}

inline StateSpace make_general(const std::vector<std::vector<double>>& positions,
                               const std::vector<double>& m) {
    if (positions.empty() || positions.size() != m.size())
        throw std::invalid_argument("make_general: positions and m must have equal nonzero size");
    StateSpace sp;
    sp.topology = Topology::General;
    sp.d = static_cast<int>(positions[0].size());
    if (sp.d < 1) throw std::invalid_argument("make_general: empty position vectors");
    for (const auto& p : positions)
        if (static_cast<int>(p.size()) != sp.d)
            throw std::invalid_argument("make_general: inconsistent position dimension");
    for (double w : m)
        if (!(w > 0)) throw std::invalid_argument("make_general: weights must be positive");
    sp.x = positions;
    sp.m = m;
    return sp;
}

// Densities are plain vectors rho with rho_i >= 0 and sum rho_i m_i = 1.
using Density = std::vector<double>;

inline double mass(const StateSpace& sp, const Density& rho) {
    double s = 0;
    for (int i = 0; i < sp.n(); ++i) s += rho[i] * sp.m[i];
    return s;
}

inline void validate_density(const StateSpace& sp, const Density& rho, double tol = 1e-12) {
    if (static_cast<int>(rho.size()) != sp.n())
        throw std::invalid_argument("density: size mismatch with state space");
    for (double v : rho)
        if (!(v >= 0) || !std::isfinite(v))
            throw std::invalid_argument("density: entries must be finite and nonnegative");
    double s = mass(sp, rho);
    if (std::abs(s - 1.0) > tol)
        throw std::invalid_argument("density: total mass " + std::to_string(s) +
                                    " deviates from 1 beyond tolerance");
}

// Validates within tol, then renormalizes exactly.
// normalize a nonnegative vector to a unit-mass density
inline Density make_density(const StateSpace& sp, std::vector<double> values) {
    if (static_cast<int>(values.size()) != sp.n())
        throw std::invalid_argument("density: size mismatch");
    for (double v : values)
        if (!std::isfinite(v) || v < 0)
            throw std::invalid_argument("density: entries must be finite and nonnegative");
    double s = mass(sp, values);
    if (!(s > 0)) throw std::invalid_argument("density: total mass must be positive");
    for (double& v : values) v /= s;
    return values;
}

inline Density uniform_density(const StateSpace& sp) {
    double tot = sp.total_mass();
    return Density(sp.n(), 1.0 / tot);
}

inline Density delta_density(const StateSpace& sp, int i) {
    if (i < 0 || i >= sp.n()) throw std::invalid_argument("delta_density: index out of range");
    Density rho(sp.n(), 0.0);
    rho[i] = 1.0 / sp.m[i];
    return rho;
}

// smooth strictly positive bump on a 1d periodic lattice (von Mises profile)
inline Density bump_density(const StateSpace& sp, double center, double concentration) {
    if (!sp.is_lattice() || sp.d != 1)
        throw std::invalid_argument("bump_density: 1d periodic lattice only");
    double L = sp.extents[0] * sp.h;
    double two_pi = 8 * std::atan(1.0);
    std::vector<double> v(sp.n());
    for (int i = 0; i < sp.n(); ++i) {
        double x = i * sp.h;
        v[i] = std::exp(concentration * std::cos(two_pi * (x - center) / L));
    }
    return make_density(sp, std::move(v));
}

}  // namespace nlot
