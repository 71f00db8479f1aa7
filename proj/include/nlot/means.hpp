#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "nlot/util.hpp"

namespace nlot {

enum class MeanKind { Logarithmic, Geometric, Harmonic, Arithmetic };

namespace detail {

// theta = (s-t)/(log s - log t), continuously extended by theta(s,s)=s and
// theta(0,t)=theta(s,0)=0. Near the diagonal the quotient cancels badly, so
// switch to the expansion in r=(s-t)/(s+t):   theta = a * r/atanh(r),
// r/atanh(r) = 1/(1 + r^2/3 + r^4/5 + ...).
inline double log_mean(double s, double t) {
    if (s == t) return s;
    if (s == 0.0 || t == 0.0) return 0.0;
    const double a = 0.5 * (s + t);
    const double r = (s - t) / (s + t);
    const double r2 = r * r;
    if (std::abs(r) < 1e-4) return a / (1.0 + r2 / 3.0 + r2 * r2 / 5.0);
    if (std::abs(r) < 0.5) return (s - t) / (2.0 * std::atanh(r));
    return (s - t) / (std::log(s) - std::log(t));
}

// Partials for s,t > 0. Away from the diagonal:
//   theta_s = (1/L)(1 - theta/s),  theta_t = (1/L)(theta/t - 1),  L = log s - log t.
// Near it, differentiate theta = a*g(r):  theta_s = (g + (1-r) g')/2, ditto t.
inline void log_mean_partials(double s, double t, double& gs, double& gt) {
    const double r = (s - t) / (s + t);
    if (std::abs(r) < 1e-4) {
        const double r2 = r * r;
        const double g = 1.0 - r2 / 3.0 - r2 * r2 * (4.0 / 45.0);
        const double gp = -2.0 * r / 3.0 - r2 * r * (16.0 / 45.0);
        gs = 0.5 * (g + (1.0 - r) * gp);
        gt = 0.5 * (g - (1.0 + r) * gp);
        return;
    }
    const double L = (std::abs(r) < 0.5) ? 2.0 * std::atanh(r) : std::log(s) - std::log(t);
    const double th = (s - t) / L;
    gs = (1.0 - th / s) / L;
    gt = (th / t - 1.0) / L;
}

}  // namespace detail

// Admissible mean on the closed quadrant. All four kinds are symmetric,
// normalized and 1-homogeneous; the arithmetic mean deliberately violates
// the vanish-on-boundary axiom and ships as a negative control.
struct Mean {
    MeanKind kind = MeanKind::Logarithmic;

    double operator()(double s, double t) const { return value(s, t); }

    double value(double s, double t) const {
        if (!(s >= 0) || !(t >= 0))
            throw std::invalid_argument("mean: negative or NaN input");
        switch (kind) {
            case MeanKind::Logarithmic: return detail::log_mean(s, t);
            case MeanKind::Geometric: return std::sqrt(s * t);
            case MeanKind::Harmonic: return (s == 0 || t == 0) ? 0.0 : 2.0 * s * t / (s + t);
            case MeanKind::Arithmetic: return 0.5 * (s + t);
        }
        return 0.0;
    }

    // d theta / ds, d theta / dt for s, t > 0.
    void partials(double s, double t, double& gs, double& gt) const {
        switch (kind) {
            case MeanKind::Logarithmic: detail::log_mean_partials(s, t, gs, gt); return;
            case MeanKind::Geometric: {
                double q = std::sqrt(s * t);
                gs = 0.5 * q / s;
                gt = 0.5 * q / t;
                return;
            }
            case MeanKind::Harmonic: {
                double u = s + t;
                gs = 2.0 * t * t / (u * u);
                gt = 2.0 * s * s / (u * u);
                return;
            }
            case MeanKind::Arithmetic: gs = gt = 0.5; return;
        }
    }

    // true when theta(0,t) == 0 for all t (the vanish-on-boundary axiom)
    bool zero_on_boundary() const { return kind != MeanKind::Arithmetic; }

    std::string name() const {
        switch (kind) {
            case MeanKind::Logarithmic: return "logarithmic";
            case MeanKind::Geometric: return "geometric";
            case MeanKind::Harmonic: return "harmonic";
            case MeanKind::Arithmetic: return "arithmetic";
        }
        return "?";
    }

    static Mean from_string(const std::string& s) {
        if (s == "logarithmic") return {MeanKind::Logarithmic};
        if (s == "geometric") return {MeanKind::Geometric};
        if (s == "harmonic") return {MeanKind::Harmonic};
        if (s == "arithmetic") return {MeanKind::Arithmetic};
        throw std::invalid_argument("unknown mean: " + s);
    }
};

// Worst observed violation per mean axiom over seeded samples in (0,10]^2.
struct MeanPropertyReport {
    std::map<std::string, double> violation;

    double worst() const {
        double w = 0;
        for (const auto& [k, v] : violation) w = std::max(w, v);
        return w;
    }
    bool pass(double tol) const { return worst() <= tol; }
};

template <class Theta>
MeanPropertyReport check_mean_properties(const Theta& theta, int n_samples, std::uint64_t seed) {
    Rng rng(seed);
    auto draw = [&] { return 10.0 * (1.0 - rng.uniform()); };  // (0, 10]
    MeanPropertyReport rep;
    auto& v = rep.violation;
    v["A2_symmetry"] = 0;
    v["A3_normalization"] = std::abs(theta(1.0, 1.0) - 1.0);
    v["A3_positivity"] = 0;
    v["A4_boundary"] = 0;
    v["A5_monotone"] = 0;
    v["A6_homogeneous"] = 0;
    v["A7_concave_midpoint"] = 0;
    v["upper_bound_arithmetic"] = 0;
    for (int it = 0; it < n_samples; ++it) {
        double s = draw(), t = draw();
        double th = theta(s, t);
        v["A2_symmetry"] = std::max(v["A2_symmetry"], std::abs(th - theta(t, s)));
        if (!(th > 0)) v["A3_positivity"] = std::max(v["A3_positivity"], std::max(-th, 1e-300));
        v["A4_boundary"] = std::max(v["A4_boundary"], std::abs(theta(0.0, t)));
        double s2 = s + draw();  // s2 >= s
        v["A5_monotone"] = std::max(v["A5_monotone"], th - theta(s2, t));
        double lam = draw();
        v["A6_homogeneous"] = std::max(v["A6_homogeneous"], std::abs(theta(lam * s, lam * t) - lam * th));
        double s3 = draw(), t3 = draw();
        double mid = theta(0.5 * (s + s3), 0.5 * (t + t3));
        v["A7_concave_midpoint"] =
            std::max(v["A7_concave_midpoint"], 0.5 * (th + theta(s3, t3)) - mid);
        v["upper_bound_arithmetic"] = std::max(v["upper_bound_arithmetic"], th - 0.5 * (s + t));
    }
    for (auto& [k, val] : v) val = std::max(val, 0.0);
    return rep;
}

inline MeanPropertyReport check_mean_properties(const Mean& mean, int n_samples, std::uint64_t seed) {
    return check_mean_properties([&](double s, double t) { return mean.value(s, t); }, n_samples, seed);
}

// Action density: alpha(w,s,t) = w^2 / (2 theta(s,t)), with alpha = 0 when
// theta = 0 and w = 0, and +inf when theta = 0 and w != 0. Lower semicontinuous,
// jointly convex, positively 1-homogeneous.
inline double action_density(double w, double s, double t, const Mean& mean) {
    double th = mean.value(s, t);
    if (th > 0) return w * w / (2.0 * th);
    return (w == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace nlot
