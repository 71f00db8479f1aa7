#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nlot/analysis.hpp"
#include "nlot/geodesic.hpp"
#include "nlot/semigroup.hpp"
#include "nlot/suite.hpp"

using namespace nlot;

TEST_CASE("periodic W1 closed cases", "[analysis]") {
    auto sp = make_lattice({12}, 1.0);
    // deltas transport all mass along the shorter arc
    for (int j : {1, 3, 5, 6, 7, 11}) {
        double expect = std::min(j, 12 - j) * sp.h;
        CHECK(w1_periodic_1d(sp, delta_density(sp, 0), delta_density(sp, j)) ==
              Catch::Approx(expect).margin(1e-12));
    }
    auto a = bump_density(sp, 0.0, 1.5), b = bump_density(sp, 4.0, 0.7);
    CHECK(w1_periodic_1d(sp, a, a) == Catch::Approx(0.0).margin(1e-15));
    CHECK(w1_periodic_1d(sp, a, b) == Catch::Approx(w1_periodic_1d(sp, b, a)).epsilon(1e-12));
    CHECK(w1_periodic_1d(sp, a, b) > 0);

    // lattice spacing scales the distance linearly
    auto sp2 = make_lattice({12}, 0.5);
    CHECK(w1_periodic_1d(sp2, delta_density(sp2, 0), delta_density(sp2, 3)) ==
          Catch::Approx(1.5).margin(1e-12));

    auto grid = make_lattice({4, 4}, 1.0);
    CHECK_THROWS_AS(w1_periodic_1d(grid, uniform_density(grid), uniform_density(grid)),
                    std::invalid_argument);
}

TEST_CASE("separation lower bound is positive and below the distance", "[analysis]") {
    auto sp = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    auto k = make_dense_kernel(sp, {0.0, 1.0, 1.0, 0.0});
    Density r0 = {0.9, 0.1}, r1 = {0.1, 0.9};
    double lb = separation_lower_bound(sp, k, r0, r1);
    CHECK(lb > 0);
    double w = two_point_oracle(0.1, 0.9, 1.0, Mean{MeanKind::Logarithmic});
    CHECK(lb <= w);
    CHECK(separation_lower_bound(sp, k, r0, r0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("entropy along a linear interpolation is convex", "[analysis]") {
    auto sp = make_lattice({16}, 1.0);
    Path p;
    p.T = 1.0;
    Density a = bump_density(sp, 0.0, 2.0), b = bump_density(sp, 8.0, 2.0);
    int K = 10;
    for (int s = 0; s <= K; ++s) {
        Density mid(sp.n());
        for (int i = 0; i < sp.n(); ++i)
            mid[i] = (1.0 - double(s) / K) * a[i] + double(s) / K * b[i];
        p.rho.push_back(mid);
    }
    p.nu.assign(K, std::vector<double>{});
    auto rep = entropy_convexity_along_path(sp, p);
    CHECK(rep.max_violation <= 1e-12);
    CHECK(rep.h0 == Catch::Approx(entropy(sp, a)).epsilon(1e-12));
    CHECK(rep.h1 == Catch::Approx(entropy(sp, b)).epsilon(1e-12));
}

TEST_CASE("evi probe vanishes at the fixed point", "[analysis]") {
    auto sp = make_lattice({8}, 1.0);
    auto k = build_fractional(sp, 1.0, 3.0, 1.0);
    auto ew = build_edge_weights(sp, k);
    SpectralSemigroup sg(sp, k);
    auto evolve = [&](const Density& r, double t) { return sg.evolve(r, t); };
    Density u = uniform_density(sp);
    SolverConfig cfg;
    cfg.K = 8;
    cfg.tol_res = 1e-9;
    auto rep = evi_probe(sp, ew, Mean{MeanKind::Logarithmic}, evolve, u, u, 0.3, 0.03, cfg);
    CHECK(rep.solves_converged);
    CHECK(std::abs(rep.W2_base) <= 1e-10);
    CHECK(std::abs(rep.D_half) <= 1e-8);
    CHECK(std::abs(rep.entropy_mu_t - rep.entropy_sigma) <= 1e-13);
}

TEST_CASE("recovered potentials reproduce geodesic momenta on two states", "[analysis]") {
    auto sp = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    auto k = make_dense_kernel(sp, {0.0, 1.0, 1.0, 0.0});
    auto ew = build_edge_weights(sp, k);
    SolverConfig cfg;
    cfg.K = 16;
    cfg.tol_res = 1e-9;
    cfg.max_iter = 200000;
    auto res = solve_geodesic(sp, ew, Mean{MeanKind::Logarithmic}, {0.7, 0.3}, {0.3, 0.7}, cfg);
    REQUIRE(res.converged);
    auto rep = potential_form_report(sp, ew, Mean{MeanKind::Logarithmic}, res.path);
    // with one edge every momentum field is a gradient, so recovery is exact
    CHECK(rep.max_residual <= 1e-8);
    CHECK(rep.relative_gap <= 1e-6);
}

TEST_CASE("fast criteria pass at full scale", "[analysis]") {
    auto P = default_suite();
    for (const char* name : {"mean_axioms", "action_density_convexity", "integrability_bound"}) {
        for (const auto& [n, fn] : suite_registry())
            if (n == name) {
                auto rep = fn(P);
                INFO(rep.name << " slack=" << rep.slack);
                CHECK(rep.pass);
            }
    }
}
