#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nlot/means.hpp"
#include "nlot/util.hpp"

using namespace nlot;

TEST_CASE("logarithmic mean values", "[means]") {
    Mean lm{MeanKind::Logarithmic};
    CHECK(lm(1.0, 1.0) == Catch::Approx(1.0));
    CHECK(lm(4.0, 2.0) == Catch::Approx(2.0 / std::log(2.0)).epsilon(1e-14));
    CHECK(lm(std::exp(1.0), 1.0) == Catch::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(lm(2.0, 3.0) == lm(3.0, 2.0));
    CHECK(lm(0.0, 5.0) == 0.0);
    CHECK(lm(0.0, 0.0) == 0.0);
    // near-diagonal continuity: theta(s,s+eps) ~ s + eps/2
    double v = lm(1.0, 1.0 + 1e-13);
    CHECK(v == Catch::Approx(1.0 + 5e-14).margin(1e-15));
    // homogeneity
    CHECK(lm(7.0 * 2.0, 7.0 * 3.0) == Catch::Approx(7.0 * lm(2.0, 3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(lm.value(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("other means", "[means]") {
    Mean gm{MeanKind::Geometric}, hm{MeanKind::Harmonic}, am{MeanKind::Arithmetic};
    CHECK(gm(4.0, 9.0) == Catch::Approx(6.0));
    CHECK(hm(2.0, 6.0) == Catch::Approx(3.0));
    CHECK(am(2.0, 6.0) == Catch::Approx(4.0));
    CHECK(gm(0.0, 3.0) == 0.0);
    CHECK(hm(0.0, 3.0) == 0.0);
    CHECK(am(0.0, 3.0) == Catch::Approx(1.5));
    CHECK(gm.zero_on_boundary());
    CHECK(hm.zero_on_boundary());
    CHECK_FALSE(am.zero_on_boundary());
    CHECK(Mean::from_string("logarithmic").kind == MeanKind::Logarithmic);
    CHECK_THROWS_AS(Mean::from_string("median"), std::invalid_argument);
}

TEST_CASE("logarithmic mean partials", "[means]") {
    Mean lm{MeanKind::Logarithmic};
    Rng rng(7);
    for (int it = 0; it < 200; ++it) {
        double s = rng.uniform(1e-3, 10.0), t = rng.uniform(1e-3, 10.0);
        double gs, gt;
        lm.partials(s, t, gs, gt);
        // Euler identity for 1-homogeneous functions
        CHECK(s * gs + t * gt == Catch::Approx(lm(s, t)).epsilon(1e-11));
        // central differences
        double h = 1e-6 * std::max(s, 1.0);
        double fd_s = (lm(s + h, t) - lm(s - h, t)) / (2 * h);
        double fd_t = (lm(s, t + h) - lm(s, t - h)) / (2 * h);
        CHECK(gs == Catch::Approx(fd_s).margin(1e-7).epsilon(1e-7));
        CHECK(gt == Catch::Approx(fd_t).margin(1e-7).epsilon(1e-7));
    }
    // near the diagonal both partials approach 1/2
    double gs, gt;
    lm.partials(1.0, 1.0 + 1e-13, gs, gt);
    CHECK(gs == Catch::Approx(0.5).margin(1e-9));
    CHECK(gt == Catch::Approx(0.5).margin(1e-9));
    // crossing the representation switch stays smooth
    for (double r : {0.9e-4, 1.1e-4, 0.49, 0.51}) {
        double s = 1.0 + r, t = 1.0 - r;
        lm.partials(s, t, gs, gt);
        CHECK(s * gs + t * gt == Catch::Approx(lm(s, t)).epsilon(1e-11));
    }
}

TEST_CASE("mean axioms hold for admissible means", "[means]") {
    for (auto kind : {MeanKind::Logarithmic, MeanKind::Geometric, MeanKind::Harmonic}) {
        auto rep = check_mean_properties(Mean{kind}, 20000, 101);
        INFO(Mean{kind}.name() << " worst " << rep.worst());
        CHECK(rep.pass(1e-10));
    }
}

TEST_CASE("arithmetic mean fails the boundary axiom", "[means]") {
    auto rep = check_mean_properties(Mean{MeanKind::Arithmetic}, 20000, 101);
    CHECK(rep.violation.at("A4_boundary") > 0.1);
    CHECK_FALSE(rep.pass(1e-10));
}

TEST_CASE("action density conventions", "[means]") {
    Mean lm{MeanKind::Logarithmic};
    CHECK(action_density(2.0, 1.0, 1.0, lm) == Catch::Approx(2.0));
    CHECK(action_density(0.0, 0.0, 0.0, lm) == 0.0);
    CHECK(std::isinf(action_density(1.0, 0.0, 0.0, lm)));
    CHECK(std::isinf(action_density(1e-9, 0.0, 5.0, lm)));
    // arithmetic mean keeps the boundary finite
    Mean am{MeanKind::Arithmetic};
    CHECK(std::isfinite(action_density(1.0, 0.0, 4.0, am)));
}
