#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nlot/dynamics.hpp"

using namespace nlot;

namespace {
struct TwoState {
    StateSpace sp = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    JumpKernel k = make_dense_kernel(sp, {0.0, 1.0, 1.0, 0.0});
    EdgeWeights ew = build_edge_weights(sp, k);
    Mean lm{MeanKind::Logarithmic};
};
}  // namespace

TEST_CASE("divergence orientation", "[dynamics]") {
    auto sp = make_lattice({4}, 1.0);
    auto k = make_translation_invariant(sp, {{1}, {-1}}, {1.0, 1.0});
    auto ew = build_edge_weights(sp, k);
    // unit flow on edge (0,1): leaves 0, enters 1
    auto div = divergence(ew, {1.0, 0.0, 0.0, 0.0});
    CHECK(div[0] == Catch::Approx(1.0));
    CHECK(div[1] == Catch::Approx(-1.0));
    CHECK(div[2] == 0.0);
    CHECK(div[3] == 0.0);
}

TEST_CASE("hand-built transfer path", "[dynamics]") {
    TwoState f;
    Path p;
    p.T = 1.0;
    p.rho = {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
    p.nu = {{1.0}, {1.0}};  // constant unit flux moves all mass across
    CHECK(ce_residual(f.sp, f.ew, p) == Catch::Approx(0.0).margin(1e-15));

    auto per = per_interval_actions(f.sp, f.ew, f.lm, p);
    REQUIRE(per.size() == 2);
    // midpoint densities (3/4,1/4) and (1/4,3/4); 1/theta = log 3 / (1/2)
    CHECK(per[0] == Catch::Approx(2.0 * std::log(3.0)).epsilon(1e-14));
    CHECK(per[1] == Catch::Approx(per[0]).epsilon(1e-14));
    CHECK(path_action(f.sp, f.ew, f.lm, p) == Catch::Approx(2.0 * std::log(3.0)).epsilon(1e-14));

    // flux across an interval with a vacuum midpoint costs infinity
    Path bad = p;
    bad.rho[1] = {1.0, 0.0};
    bad.rho[2] = {1.0, 0.0};
    CHECK(std::isinf(path_action(f.sp, f.ew, f.lm, bad)));
}

TEST_CASE("time reversal preserves the action exactly", "[dynamics]") {
    TwoState f;
    Path p;
    p.T = 1.0;
    p.rho = {{1.0, 0.0}, {0.7, 0.3}, {0.2, 0.8}, {0.0, 1.0}};
    p.nu = {{0.9}, {1.5}, {0.6}};
    auto r = reverse_path(p);
    CHECK(ce_residual(f.sp, f.ew, r) == Catch::Approx(ce_residual(f.sp, f.ew, p)).margin(1e-15));
    // bitwise equality, not just approximate: summation order is palindromic
    CHECK(path_action(f.sp, f.ew, f.lm, r) == path_action(f.sp, f.ew, f.lm, p));
    CHECK(r.rho.front()[0] == 0.0);
    CHECK(r.nu[0][0] == -0.6);
}

TEST_CASE("concatenation glues and validates", "[dynamics]") {
    TwoState f;
    Path a, b;
    a.T = 0.5;
    a.rho = {{1.0, 0.0}, {0.5, 0.5}};
    a.nu = {{1.0}};
    b.T = 0.5;
    b.rho = {{0.5, 0.5}, {0.0, 1.0}};
    b.nu = {{1.0}};
    auto c = concatenate(a, b);
    CHECK(c.K() == 2);
    CHECK(c.T == Catch::Approx(1.0));
    CHECK(ce_residual(f.sp, f.ew, c) == Catch::Approx(0.0).margin(1e-15));

    b.rho[0] = {0.4, 0.6};
    CHECK_THROWS_AS(concatenate(a, b), std::invalid_argument);
}

TEST_CASE("path validation", "[dynamics]") {
    TwoState f;
    Path p;
    p.T = 1.0;
    p.rho = {{1.0, 0.0}, {0.0, 1.0}};
    p.nu = {{1.0}, {1.0}};  // K mismatch: 2 momenta, 1 interval of densities
    CHECK_THROWS_AS(validate_path(f.sp, f.ew, p), std::invalid_argument);
}
