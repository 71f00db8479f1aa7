#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nlot/geodesic.hpp"
#include "nlot/util.hpp"

using namespace nlot;

namespace {
struct TwoState {
    StateSpace sp = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    JumpKernel k = make_dense_kernel(sp, {0.0, 1.0, 1.0, 0.0});
    EdgeWeights ew = build_edge_weights(sp, k);
};

struct Ring {
    StateSpace sp;
    JumpKernel k;
    EdgeWeights ew;
    Ring(int n, double alpha, int R, double c = 1.0, double h = 1.0)
        : sp(make_lattice({n}, h)), k(build_fractional(sp, alpha, R, c)),
          ew(build_edge_weights(sp, k)) {}
};

Density bump(const StateSpace& sp, double center, double conc) {
    // von Mises style bump on a ring, normalized
    int n = sp.n();
    Density r(n);
    double L = n * sp.h;
    for (int i = 0; i < n; ++i) {
        double x = sp.x[i][0];
        r[i] = std::exp(conc * std::cos(2 * M_PI * (x - center) / L));
    }
    return make_density(sp, r);
}
}  // namespace

TEST_CASE("quadrature oracle closed forms", "[geodesic]") {
    // harmonic mean: theta(1-p, p) = 2p(1-p), the integral is an arcsine
    Mean hm{MeanKind::Harmonic};
    double w = two_point_oracle(0.1, 0.9, 1.0, hm);
    CHECK(w == Catch::Approx(std::sqrt(2.0) * std::asin(0.8)).epsilon(1e-10));
    // full sweep has an integrable endpoint singularity
    CHECK(two_point_oracle(0.0, 1.0, 1.0, hm) ==
          Catch::Approx(M_PI / std::sqrt(2.0)).margin(1e-7));

    // arithmetic mean: theta = 1/2 constant
    Mean am{MeanKind::Arithmetic};
    CHECK(two_point_oracle(0.15, 0.75, 1.0, am) ==
          Catch::Approx(0.6 * std::sqrt(2.0)).epsilon(1e-12));

    // scaling in gamma, orientation invariance, degenerate interval
    Mean lm{MeanKind::Logarithmic};
    double a = two_point_oracle(0.2, 0.8, 1.0, lm);
    CHECK(two_point_oracle(0.2, 0.8, 4.0, lm) == Catch::Approx(a / 2.0).epsilon(1e-12));
    CHECK(two_point_oracle(0.8, 0.2, 1.0, lm) == Catch::Approx(a).epsilon(1e-14));
    CHECK(two_point_oracle(0.5, 0.5, 1.0, lm) == 0.0);
    CHECK_THROWS_AS(two_point_oracle(-0.1, 0.5, 1.0, lm), std::invalid_argument);
}

TEST_CASE("solver matches the oracle on two states", "[geodesic]") {
    TwoState f;
    SolverConfig cfg;
    cfg.K = 16;
    for (auto kind : {MeanKind::Logarithmic, MeanKind::Harmonic}) {
        Mean mean{kind};
        auto res = solve_geodesic(f.sp, f.ew, mean, {0.9, 0.1}, {0.1, 0.9}, cfg);
        double ref = two_point_oracle(0.1, 0.9, 1.0, mean);
        INFO(mean.name() << ": W=" << res.W << " oracle=" << ref
                         << " iters=" << res.iterations);
        CHECK(res.converged);
        CHECK(res.W == Catch::Approx(ref).epsilon(2e-2));
        CHECK(res.ce_res < 1e-10);
    }
}

TEST_CASE("identical endpoints give zero distance", "[geodesic]") {
    Ring f(8, 1.0, 3);
    auto r = bump(f.sp, 2.0, 1.0);
    SolverConfig cfg;
    cfg.K = 8;
    auto res = solve_geodesic(f.sp, f.ew, Mean{MeanKind::Logarithmic}, r, r, cfg);
    CHECK(res.converged);
    CHECK(res.W == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("basic metric behaviour on a ring", "[geodesic]") {
    Ring f(8, 1.0, 3);
    Mean lm{MeanKind::Logarithmic};
    auto a = bump(f.sp, 1.0, 1.5), b = bump(f.sp, 5.0, 1.5), c = bump(f.sp, 3.0, 0.7);
    SolverConfig cfg;
    cfg.K = 16;
    auto rab = solve_geodesic(f.sp, f.ew, lm, a, b, cfg);
    auto rba = solve_geodesic(f.sp, f.ew, lm, b, a, cfg);
    auto rac = solve_geodesic(f.sp, f.ew, lm, a, c, cfg);
    auto rcb = solve_geodesic(f.sp, f.ew, lm, c, b, cfg);
    REQUIRE(rab.converged);
    CHECK(rab.W > 0.05);
    CHECK(std::abs(rab.W - rba.W) <= 1e-4 * rab.W);
    CHECK(rab.W <= rac.W + rcb.W + 1e-6);
    CHECK(static_cast<int>(rab.per_interval_action.size()) == cfg.K);
    CHECK(constant_speed_deviation(rab.per_interval_action) < 0.05);
    CHECK(rab.ce_res < 1e-10);
    // path endpoints are the inputs
    for (int i = 0; i < f.sp.n(); ++i) {
        CHECK(rab.path.rho.front()[i] == Catch::Approx(a[i]).margin(1e-12));
        CHECK(rab.path.rho.back()[i] == Catch::Approx(b[i]).margin(1e-12));
    }
}

TEST_CASE("disconnected supports", "[geodesic]") {
    auto sp = make_general({{0.0}, {1.0}, {5.0}, {6.0}}, {1.0, 1.0, 1.0, 1.0});
    std::vector<double> J(16, 0.0);
    J[0 * 4 + 1] = J[1 * 4 + 0] = 1.0;
    J[2 * 4 + 3] = J[3 * 4 + 2] = 1.0;
    auto k = make_dense_kernel(sp, J);
    auto ew = build_edge_weights(sp, k);
    Mean lm{MeanKind::Logarithmic};
    SolverConfig cfg;
    cfg.K = 8;

    // different mass per component: no admissible path
    auto bad = solve_geodesic(sp, ew, lm, {0.6, 0.2, 0.1, 0.1}, {0.2, 0.2, 0.3, 0.3}, cfg);
    CHECK(std::isinf(bad.W));
    CHECK_FALSE(bad.message.empty());

    // matching component masses: finite, decouples into two blocks
    auto ok = solve_geodesic(sp, ew, lm, {0.6, 0.2, 0.1, 0.1}, {0.2, 0.6, 0.15, 0.05}, cfg);
    CHECK(std::isfinite(ok.W));
    CHECK(ok.W > 0);
}

TEST_CASE("vacuum endpoints use the smoothing ladder", "[geodesic]") {
    Ring f(8, 1.0, 3);
    Mean lm{MeanKind::Logarithmic};
    SolverConfig cfg;
    cfg.K = 8;
    auto d = delta_density(f.sp, 0);
    auto u = uniform_density(f.sp);
    auto res = solve_geodesic(f.sp, f.ew, lm, d, u, cfg);
    REQUIRE(res.delta_levels.size() == 3);
    CHECK(res.ladder_monotone);
    CHECK(res.converged);
    CHECK(std::isfinite(res.W));
    // smoothing toward uniform only shrinks the distance
    CHECK(res.delta_W[0] <= res.W + 1e-6);
    CHECK(res.W > 0.1);
}

TEST_CASE("reparametrized horizon leaves the distance unchanged", "[geodesic]") {
    Ring f(8, 1.0, 3);
    Mean lm{MeanKind::Logarithmic};
    auto a = bump(f.sp, 1.0, 1.2), b = bump(f.sp, 5.0, 1.2);
    SolverConfig cfg;
    cfg.K = 16;
    auto r1 = solve_geodesic(f.sp, f.ew, lm, a, b, cfg);
    cfg.horizon = 2.0;
    auto r2 = solve_geodesic(f.sp, f.ew, lm, a, b, cfg);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    CHECK(std::abs(r1.W - r2.W) <= 2e-4 * r1.W);
    CHECK(r2.path.T == Catch::Approx(2.0));
}

TEST_CASE("accelerated reference solver agrees", "[geodesic]") {
    Ring f(4, 1.0, 1);
    Mean lm{MeanKind::Logarithmic};
    auto a = bump(f.sp, 0.5, 0.8), b = bump(f.sp, 2.5, 0.8);
    SolverConfig cfg;
    cfg.K = 8;
    auto res = solve_geodesic(f.sp, f.ew, lm, a, b, cfg);
    auto ref = reference_apg_solve(f.sp, f.ew, lm, a, b, cfg.K, 1e-9, 40000);
    REQUIRE(res.converged);
    INFO("cp W=" << res.W << " apg W=" << ref.W << " apg iters=" << ref.iterations);
    CHECK(res.W == Catch::Approx(ref.W).epsilon(5e-3));
    // the primal-dual optimum can only undercut the floored reference objective
    CHECK(res.W <= ref.W * (1 + 5e-3));
}

TEST_CASE("potential recovery", "[geodesic]") {
    Ring f(8, 1.0, 3);
    Mean lm{MeanKind::Logarithmic};
    Rng rng(9);
    int n = f.sp.n(), E = f.ew.m_edges();
    Density rho(n);
    double tot = 0;
    for (int i = 0; i < n; ++i) tot += (rho[i] = 0.4 + rng.uniform()) * f.sp.m[i];
    for (auto& v : rho) v /= tot;
    std::vector<double> psi(n);
    double pm = 0;
    for (int i = 0; i < n; ++i) pm += (psi[i] = rng.uniform(-1.0, 1.0)) * f.sp.m[i];
    for (auto& v : psi) v -= pm / f.sp.total_mass();

    Momentum nu(E);
    for (int e = 0; e < E; ++e) {
        auto [i, j] = f.ew.edges[e];
        nu[e] = lm(rho[i], rho[j]) * f.ew.w[e] * (psi[j] - psi[i]);
    }
    auto rec = recover_potential(f.sp, f.ew, lm, rho, nu);
    CHECK(rec.residual < 1e-10);
    for (int i = 0; i < n; ++i) CHECK(rec.psi[i] == Catch::Approx(psi[i]).margin(1e-9));

    // pure circulation has no gradient part at all
    auto sp3 = make_general({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0});
    std::vector<double> J3 = {0, 1, 1, 1, 0, 1, 1, 1, 0};
    auto k3 = make_dense_kernel(sp3, J3);
    auto ew3 = build_edge_weights(sp3, k3);
    // cycle 0 -> 1 -> 2 -> 0 in edge order (0,1), (0,2), (1,2)
    Momentum circ = {1.0, -1.0, 1.0};
    auto rc = recover_potential(sp3, ew3, lm, uniform_density(sp3), circ);
    for (double v : rc.psi) CHECK(v == Catch::Approx(0.0).margin(1e-12));
    CHECK(rc.residual == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant speed deviation helper", "[geodesic]") {
    CHECK(constant_speed_deviation({2.0, 2.0, 2.0}) == 0.0);
    CHECK(constant_speed_deviation({}) == 0.0);
    CHECK(constant_speed_deviation({1.0, 3.0}) == Catch::Approx(0.5));
}
