#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nlot/kernel.hpp"

using namespace nlot;

TEST_CASE("dense kernel and reversibility", "[kernels]") {
    auto sp = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    auto k = make_dense_kernel(sp, {0.0, 1.0, 1.0, 0.0});
    CHECK(check_reversibility(sp, k) == Catch::Approx(0.0).margin(1e-15));
    CHECK(kernel_rate(sp, k, 0, 1) == Catch::Approx(1.0));

    auto bad = make_dense_kernel(sp, {0.0, 1.0, 2.0, 0.0});
    CHECK(check_reversibility(sp, bad) > 0.3);

    CHECK_THROWS_AS(make_dense_kernel(sp, {1.0, 1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_dense_kernel(sp, {0.0, -1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("translation-invariant kernel on a ring", "[kernels]") {
    auto sp = make_lattice({8}, 1.0);
    auto k = make_translation_invariant(sp, {{1}, {-1}, {2}, {-2}}, {1.0, 1.0, 0.25, 0.25});
    CHECK(check_reversibility(sp, k) == Catch::Approx(0.0).margin(1e-15));
    CHECK(kernel_rate(sp, k, 0, 1) == Catch::Approx(1.0));
    CHECK(kernel_rate(sp, k, 0, 6) == Catch::Approx(0.25));
    CHECK(kernel_rate(sp, k, 0, 4) == 0.0);
    CHECK(second_moment(sp, k) == Catch::Approx(4.0));

    // displacement must stay under half the extent
    CHECK_THROWS_AS(make_translation_invariant(sp, {{4}, {-4}}, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_translation_invariant(sp, {{0}}, {1.0}), std::invalid_argument);
}

TEST_CASE("fractional kernel weights", "[kernels]") {
    auto sp = make_lattice({8}, 1.0);
    auto k1 = build_fractional(sp, 1.0, 1, 1.0);
    CHECK(kernel_rate(sp, k1, 0, 1) == Catch::Approx(1.0));
    CHECK(kernel_rate(sp, k1, 0, 2) == 0.0);

    auto k2 = build_fractional(sp, 1.0, 2, 1.0);
    CHECK(kernel_rate(sp, k2, 0, 1) == Catch::Approx(1.0));
    CHECK(kernel_rate(sp, k2, 0, 2) == Catch::Approx(0.25));

    // refined lattice: nu(z) = (h|z|)^(-alpha-d) h^d
    auto sph = make_lattice({8}, 0.5);
    auto kh = build_fractional(sph, 1.0, 1, 1.0);
    CHECK(kernel_rate(sph, kh, 0, 1) == Catch::Approx(std::pow(0.5, -2.0) * 0.5));

    CHECK_THROWS_AS(build_fractional(sp, 2.5, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_fractional(sp, 1.0, 4, 1.0), std::invalid_argument);
}

TEST_CASE("generator and comparison constants", "[kernels]") {
    auto sp = make_lattice({4}, 1.0);
    auto k = make_translation_invariant(sp, {{1}, {-1}}, {1.0, 1.0});
    Density rho = {2.0, 0.0, 0.0, 0.0};
    auto L = generator_apply(sp, k, rho);
    CHECK(L[0] == Catch::Approx(-4.0));  // loses 2 to each neighbour
    CHECK(L[1] == Catch::Approx(2.0));
    CHECK(L[3] == Catch::Approx(2.0));
    CHECK(L[2] == Catch::Approx(0.0).margin(1e-15));

    CHECK(second_moment(sp, k) == Catch::Approx(2.0));
    CHECK(integrability_constant(sp, k) == Catch::Approx(2.0));

    auto sph = make_lattice({8}, 0.5);
    auto kh = make_translation_invariant(sph, {{1}, {-1}}, {1.0, 1.0});
    CHECK(integrability_constant(sph, kh) == Catch::Approx(1.0));
}

TEST_CASE("edge weights and components", "[kernels]") {
    auto sp = make_lattice({4}, 1.0);
    auto k = make_translation_invariant(sp, {{1}, {-1}}, {1.0, 1.0});
    auto ew = build_edge_weights(sp, k);
    REQUIRE(ew.m_edges() == 4);
    CHECK(ew.edges[0] == std::pair<int, int>(0, 1));
    CHECK(ew.edges[1] == std::pair<int, int>(0, 3));
    CHECK(ew.edges[2] == std::pair<int, int>(1, 2));
    CHECK(ew.edges[3] == std::pair<int, int>(2, 3));
    for (double g : ew.w) CHECK(g == Catch::Approx(1.0));
    CHECK(ew.edge_of(1, 0) == 0);
    CHECK(ew.edge_of(0, 2) == -1);
    std::vector<double> vals = {2.0, 0.0, 0.0, 0.0};
    CHECK(EdgeWeights::oriented(vals, 0, 0, 1) == 2.0);
    CHECK(EdgeWeights::oriented(vals, 0, 1, 0) == -2.0);

    auto comps = components(ew);
    CHECK(comps == std::vector<int>{0, 0, 0, 0});

    // two disconnected pairs
    auto sp2 = make_general({{0.0}, {1.0}, {10.0}, {11.0}}, {1.0, 1.0, 1.0, 1.0});
    std::vector<double> J(16, 0.0);
    J[0 * 4 + 1] = J[1 * 4 + 0] = 1.0;
    J[2 * 4 + 3] = J[3 * 4 + 2] = 1.0;
    auto k2 = make_dense_kernel(sp2, J);
    auto ew2 = build_edge_weights(sp2, k2);
    auto c2 = components(ew2);
    CHECK(c2[0] == c2[1]);
    CHECK(c2[2] == c2[3]);
    CHECK(c2[0] != c2[2]);

    // non-reversible kernels are rejected at edge-building time
    auto badk = make_dense_kernel(sp2, std::vector<double>{
        0, 1, 0, 0,
        2, 0, 0, 0,
        0, 0, 0, 1,
        0, 0, 1, 0});
    CHECK_THROWS_AS(build_edge_weights(sp2, badk), std::runtime_error);
}
