#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nlot/state_space.hpp"

namespace nlot {

enum class KernelForm { Dense, TranslationInvariant };

// Jump rates J(x_i, x_j). Dense kernels store the full matrix; translation
// invariant kernels store rates nu(z) over lattice displacements z != 0.
struct JumpKernel {
    KernelForm form = KernelForm::Dense;
    int n = 0;
    std::vector<double> J;               // dense, row-major, zero diagonal
    std::vector<std::vector<int>> disp;  // TI displacements
    std::vector<double> nu;              // TI rates, aligned with disp
};

inline JumpKernel make_dense_kernel(const StateSpace& sp, const std::vector<double>& J) {
    int n = sp.n();
    if (n > 512) throw std::invalid_argument("dense kernel: more than 512 states");
    if (static_cast<int>(J.size()) != n * n)
        throw std::invalid_argument("dense kernel: matrix size mismatch");
    for (int i = 0; i < n; ++i) {
        if (J[i * n + i] != 0.0)
            throw std::invalid_argument("dense kernel: diagonal must be zero");
        for (int j = 0; j < n; ++j)
            if (!(J[i * n + j] >= 0) || !std::isfinite(J[i * n + j]))
                throw std::invalid_argument("dense kernel: rates must be finite and nonnegative");
    }
    JumpKernel k;
    k.form = KernelForm::Dense;
    k.n = n;
    k.J = J;
    return k;
}

inline JumpKernel make_translation_invariant(const StateSpace& sp,
                                             const std::vector<std::vector<int>>& disp,
                                             const std::vector<double>& nu) {
    if (!sp.is_lattice())
        throw std::invalid_argument("translation-invariant kernel needs a periodic lattice");
    if (disp.size() != nu.size() || disp.empty())
        throw std::invalid_argument("translation-invariant kernel: displacement/rate size mismatch");
    std::unordered_map<std::int64_t, int> seen;
    auto key = [&](const std::vector<int>& z) {
        std::int64_t k = 0;
        for (int a = 0; a < sp.d; ++a) k = k * 4096 + (z[a] + 2048);
        return k;
    };
    for (std::size_t e = 0; e < disp.size(); ++e) {
        const auto& z = disp[e];
        if (static_cast<int>(z.size()) != sp.d)
            throw std::invalid_argument("translation-invariant kernel: displacement dimension mismatch");
        bool zero = true;
        for (int a = 0; a < sp.d; ++a) {
            if (z[a] != 0) zero = false;
            if (2 * std::abs(z[a]) >= sp.extents[a])
                throw std::invalid_argument(
                    "translation-invariant kernel: displacement reaches half the extent");
        }
        if (zero) throw std::invalid_argument("translation-invariant kernel: zero displacement");
        if (!(nu[e] >= 0) || !std::isfinite(nu[e]))
            throw std::invalid_argument("translation-invariant kernel: rates must be finite and nonnegative");
        if (!seen.emplace(key(z), static_cast<int>(e)).second)
            throw std::invalid_argument("translation-invariant kernel: duplicate displacement");
    }
    JumpKernel k;
    k.form = KernelForm::TranslationInvariant;
    k.n = sp.n();
    k.disp = disp;
    k.nu = nu;
    return k;
}

// nu(z) = c (h|z|)^(-alpha-d) h^d on 0 < |z| <= R, truncated fractional rates.
inline JumpKernel build_fractional(const StateSpace& sp, double alpha, double R, double c) {
    if (!sp.is_lattice()) throw std::invalid_argument("build_fractional: needs a periodic lattice");
    if (!(alpha > 0 && alpha < 2)) throw std::invalid_argument("build_fractional: alpha must be in (0,2)");
    if (!(c > 0)) throw std::invalid_argument("build_fractional: c must be positive");
    int min_ext = *std::min_element(sp.extents.begin(), sp.extents.end());
    if (!(R >= 1) || !(2 * R < min_ext))
        throw std::invalid_argument("build_fractional: need 1 <= R < min extent / 2");
    std::vector<std::vector<int>> disp;
    std::vector<double> nu;
    int rmax = static_cast<int>(std::floor(R));
    double hd = std::pow(sp.h, sp.d);
    auto push = [&](const std::vector<int>& z) {
        double z2 = 0;
        for (int a : z) z2 += double(a) * a;
        if (z2 == 0 || z2 > R * R) return;
        disp.push_back(z);
        nu.push_back(c * std::pow(sp.h * std::sqrt(z2), -alpha - sp.d) * hd);
    };
    if (sp.d == 1) {
        for (int z = -rmax; z <= rmax; ++z) push({z});
    } else {
        for (int z0 = -rmax; z0 <= rmax; ++z0)
            for (int z1 = -rmax; z1 <= rmax; ++z1) push({z0, z1});
    }
    return make_translation_invariant(sp, disp, nu);
}

inline double kernel_rate(const StateSpace& sp, const JumpKernel& k, int i, int j) {
    if (k.form == KernelForm::Dense) return k.J[i * k.n + j];
    double r = 0;
    for (std::size_t e = 0; e < k.disp.size(); ++e)
        if (sp.shift_site(i, k.disp[e]) == j) r += k.nu[e];
    return r;
}

// max_{i,j} |J_ij m_i - J_ji m_j| relative to max_{i,j} J_ij m_i.
inline double check_reversibility(const StateSpace& sp, const JumpKernel& k) {
    double defect = 0, scale = 0;
    if (k.form == KernelForm::Dense) {
        int n = k.n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double a = k.J[i * n + j] * sp.m[i], b = k.J[j * n + i] * sp.m[j];
                defect = std::max(defect, std::abs(a - b));
                scale = std::max({scale, a, b});
            }
    } else {
        // uniform m on lattices: reversibility == symmetry of nu under z -> -z
        for (std::size_t e = 0; e < k.disp.size(); ++e) {
            double back = 0;
            for (std::size_t f = 0; f < k.disp.size(); ++f) {
                bool neg = true;
                for (int a = 0; a < sp.d; ++a)
                    if (k.disp[f][a] != -k.disp[e][a]) { neg = false; break; }
                if (neg) { back = k.nu[f]; break; }
            }
            defect = std::max(defect, std::abs(k.nu[e] - back) * sp.m[0]);
            scale = std::max(scale, k.nu[e] * sp.m[0]);
        }
    }
    return scale > 0 ? defect / scale : 0.0;
}

// Symmetric edge weights gamma_ij = J_ij m_i over unordered pairs, positive
// entries only. Construction is a hard error if the kernel is not reversible.
struct EdgeWeights {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // i < j, lexicographic
    std::vector<double> w;                   // gamma > 0
    std::vector<std::vector<std::pair<int, int>>> incident;  // node -> (edge, +1 if node==i else -1)
    std::unordered_map<std::uint64_t, int> index;

    int m_edges() const { return static_cast<int>(edges.size()); }

    // index of unordered pair {a,b}, or -1
    int edge_of(int a, int b) const {
        if (a > b) std::swap(a, b);
        auto it = index.find(static_cast<std::uint64_t>(a) * n + b);
        return it == index.end() ? -1 : it->second;
    }
    // value of an antisymmetric field oriented a -> b
    static double oriented(const std::vector<double>& v, int idx, int a, int b) {
        return a < b ? v[idx] : -v[idx];
    }
};

inline EdgeWeights build_edge_weights(const StateSpace& sp, const JumpKernel& k,
                                      double tol_rev = 1e-10) {
    double defect = check_reversibility(sp, k);
    if (defect > tol_rev)
        throw std::runtime_error("edge weights: kernel is not reversible (relative defect " +
                                 std::to_string(defect) + ")");
    EdgeWeights ew;
    ew.n = sp.n();
    std::vector<std::pair<std::pair<int, int>, double>> tmp;
    if (k.form == KernelForm::Dense) {
        for (int i = 0; i < k.n; ++i)
            for (int j = i + 1; j < k.n; ++j) {
                double g = k.J[i * k.n + j] * sp.m[i];
                double g2 = k.J[j * k.n + i] * sp.m[j];
                g = 0.5 * (g + g2);  // symmetrize within tolerance
                if (g > 0) tmp.push_back({{i, j}, g});
            }
    } else {
        for (int i = 0; i < sp.n(); ++i)
            for (std::size_t e = 0; e < k.disp.size(); ++e) {
                int j = sp.shift_site(i, k.disp[e]);
                if (i < j && k.nu[e] > 0) tmp.push_back({{i, j}, k.nu[e] * sp.m[i]});
            }
        std::sort(tmp.begin(), tmp.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        // z and -z both land on the same unordered pair once each when i < j
        // from exactly one endpoint, so entries are already unique
    }
    ew.incident.resize(ew.n);
    for (const auto& [pr, g] : tmp) {
        int idx = static_cast<int>(ew.edges.size());
        ew.edges.push_back(pr);
        ew.w.push_back(g);
        ew.index.emplace(static_cast<std::uint64_t>(pr.first) * ew.n + pr.second, idx);
        ew.incident[pr.first].push_back({idx, +1});
        ew.incident[pr.second].push_back({idx, -1});
    }
    return ew;
}

// (L rho)_i = (1/m_i) sum_j gamma_ij (rho_j - rho_i) = sum_j J_ij (rho_j - rho_i)
inline std::vector<double> generator_apply(const StateSpace& sp, const JumpKernel& k,
                                           const std::vector<double>& rho) {
    int n = sp.n();
    if (static_cast<int>(rho.size()) != n)
        throw std::invalid_argument("generator_apply: size mismatch");
    std::vector<double> out(n, 0.0);
    if (k.form == KernelForm::Dense) {
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += k.J[i * n + j] * (rho[j] - rho[i]);
            out[i] = s;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t e = 0; e < k.disp.size(); ++e)
                s += k.nu[e] * (rho[sp.shift_site(i, k.disp[e])] - rho[i]);
            out[i] = s;
        }
    }
    return out;
}

// M^2 = max_i sum_j |x_i - x_j|^2 J_ij  (minimum-image distances on lattices)
inline double second_moment(const StateSpace& sp, const JumpKernel& k) {
    if (k.form == KernelForm::TranslationInvariant) {
        double s = 0;
        for (std::size_t e = 0; e < k.disp.size(); ++e) {
            double z2 = 0;
            for (int a : k.disp[e]) z2 += double(a) * a;
            s += sp.h * sp.h * z2 * k.nu[e];
        }
        return s;
    }
    double best = 0;
    for (int i = 0; i < k.n; ++i) {
        double s = 0;
        for (int j = 0; j < k.n; ++j) s += sp.dist2(i, j) * k.J[i * k.n + j];
        best = std::max(best, s);
    }
    return best;
}

// C = sqrt(2 max_i sum_j (1 ^ |x_i - x_j|^2) J_ij), the truncated-flux constant
inline double integrability_constant(const StateSpace& sp, const JumpKernel& k) {
    double best = 0;
    if (k.form == KernelForm::TranslationInvariant) {
        double s = 0;
        for (std::size_t e = 0; e < k.disp.size(); ++e) {
            double z2 = 0;
            for (int a : k.disp[e]) z2 += double(a) * a;
            s += std::min(1.0, sp.h * sp.h * z2) * k.nu[e];
        }
        best = s;
    } else {
        for (int i = 0; i < k.n; ++i) {
            double s = 0;
            for (int j = 0; j < k.n; ++j) s += std::min(1.0, sp.dist2(i, j)) * k.J[i * k.n + j];
            best = std::max(best, s);
        }
    }
    return std::sqrt(2.0 * best);
}

// connected components of the positive-weight support graph
inline std::vector<int> components(const EdgeWeights& ew) {
    std::vector<int> comp(ew.n, -1);
    std::vector<int> stack;
    int c = 0;
    for (int s = 0; s < ew.n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = c;
        stack.push_back(s);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [e, sgn] : ew.incident[u]) {
                int v = ew.edges[e].first == u ? ew.edges[e].second : ew.edges[e].first;
                if (comp[v] < 0) {
                    comp[v] = c;
                    stack.push_back(v);
                }
            }
        }
        ++c;
    }
    return comp;
}

}  // namespace nlot
