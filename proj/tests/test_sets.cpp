#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gctail/sets.hpp"

using namespace gctail;

TEST_CASE("membership respects closed boundaries", "[sets]") {
    const ConstraintSet half = make_halfspace(2, 2.0);
    REQUIRE(membership(half, {2.0, 0.0}));   // boundary point belongs
    REQUIRE(membership(half, {2.5, -3.0}));
    REQUIRE_FALSE(membership(half, {1.999999, 0.0}));

    const ConstraintSet quad = make_quadratic(3, 3.0);  // z1 >= 3 + ||zt||^2
    REQUIRE(membership(quad, {3.5, 0.5, 0.5}));         // 3.5 >= 3 + 0.5 (boundary)
    REQUIRE_FALSE(membership(quad, {3.4, 0.5, 0.5}));   // 3.4 < 3.5
    REQUIRE(membership(quad, {3.0, 0.0, 0.0}));         // vertex

    REQUIRE_THROWS_AS(membership(half, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("quadratic curvature matrix is validated", "[sets]") {
    REQUIRE_THROWS_AS(make_quadratic(3, 1.0, Mat(3, 3)), std::invalid_argument);
    // general curvature: A = diag(4, 2) gives z1 >= z1* + 2 z2^2 + z3^2
    Mat A(2, 2);
    A(0, 0) = 4.0;
    A(1, 1) = 2.0;
    const ConstraintSet s = make_quadratic(3, 1.0, A);
    REQUIRE(membership(s, {1.0 + 2.0 * 0.25 + 0.09, 0.5, 0.3}));
    REQUIRE_FALSE(membership(s, {1.0 + 2.0 * 0.25 + 0.09 - 1e-9, 0.5, 0.3}));
}

TEST_CASE("cross sections of translating sets", "[sets]") {
    const ConstraintSet quad = make_quadratic(3, 3.0);
    SECTION("slice at zero contains only the trailing origin") {
        auto sec = cross_section(quad, 0.0);
        REQUIRE(sec({0.0, 0.0}));
        REQUIRE_FALSE(sec({1e-6, 0.0}));
    }
    SECTION("slice at one is the unit ball of the trailing space") {
        auto sec = cross_section(quad, 1.0);
        REQUIRE(sec({0.0, 0.0}));
        REQUIRE(sec({1.0, 0.0}));                              // boundary
        REQUIRE(sec({std::sqrt(0.5), std::sqrt(0.5) - 1e-9}));  // inside
        REQUIRE_FALSE(sec({0.8, 0.7}));                         // 1.13 > 1
    }
    SECTION("halfspace slices are everything") {
        const ConstraintSet half = make_halfspace(3, 2.0);
        auto sec = cross_section(half, 4.2);
        REQUIRE(sec({100.0, -100.0}));
    }
    SECTION("negative offsets and non-translating sets are rejected") {
        REQUIRE_THROWS_AS(cross_section(quad, -0.1), std::invalid_argument);
        REQUIRE_THROWS_AS(cross_section(make_two_lobe(), 1.0), std::invalid_argument);
    }
    SECTION("slice predicate validates trailing dimension") {
        auto sec = cross_section(quad, 1.0);
        REQUIRE_THROWS_AS(sec({1.0, 2.0, 3.0}), std::invalid_argument);
    }
}

TEST_CASE("translation-regime identity", "[sets]") {
    const ConstraintSet at_z = make_quadratic(3, 4.0);
    const ConstraintSet at_0 = make_quadratic(3, 0.0);
    RngStream rng(11, 0);
    for (int i = 0; i < 1000; ++i) {
        Vec z = {4.0 + 2.0 * rng.normal(), rng.normal(), rng.normal()};
        Vec shifted = {z[0] - 4.0, z[1], z[2]};
        REQUIRE(membership(at_z, z) == membership(at_0, shifted));
    }
}

TEST_CASE("scaling-regime identity", "[sets]") {
    BoundaryDescriptor g;  // g(zt) = zt1^2 + zt2^4
    g.terms.push_back({1.0, {2, 0}});
    g.terms.push_back({1.0, {0, 4}});
    const ConstraintSet at_z = make_scaled_poly(3, 3.0, g);
    const ConstraintSet at_1 = make_scaled_poly(3, 1.0, g);
    RngStream rng(12, 0);
    for (int i = 0; i < 1000; ++i) {
        Vec z = {3.0 + 3.0 * rng.normal(), 2.0 * rng.normal(), 2.0 * rng.normal()};
        Vec scaled = {z[0] / 3.0, z[1] / 3.0, z[2] / 3.0};
        REQUIRE(membership(at_z, z) == membership(at_1, scaled));
    }
    REQUIRE_THROWS_AS(make_scaled_poly(3, 0.0, g), std::invalid_argument);
}

TEST_CASE("polynomial cost evaluation and leading power", "[sets]") {
    // h(z) = 2 z1^3 z2 + z3^2
    PolynomialCost h;
    h.dim = 3;
    h.terms.push_back({2.0, {3, 1, 0}});
    h.terms.push_back({1.0, {0, 0, 2}});
    REQUIRE(h.eval({2.0, 0.5, 3.0}) == Catch::Approx(2.0 * 8.0 * 0.5 + 9.0));
    REQUIRE(h.leading_power() == 3);
    REQUIRE_THROWS_AS(h.eval({1.0, 2.0}), std::invalid_argument);

    REQUIRE(PolynomialCost::one(4).eval({1.0, 2.0, 3.0, 4.0}) == 1.0);
    REQUIRE(PolynomialCost::one(4).leading_power() == 0);
    const auto mono = PolynomialCost::monomial(2, {2, 0}, 3.0);
    REQUIRE(mono.eval({2.0, 99.0}) == Catch::Approx(12.0));
    REQUIRE(mono.leading_power() == 2);
    REQUIRE_THROWS_AS(PolynomialCost::monomial(2, {1}), std::invalid_argument);
    REQUIRE_THROWS_AS(PolynomialCost::monomial(2, {1, -1}), std::invalid_argument);
}

TEST_CASE("supporting hyperplane audits", "[sets]") {
    RngStream rng(77, 3);
    SECTION("halfspace holds definitionally") {
        const ConstraintSet half = make_halfspace(3, 2.0);
        auto chk = supporting_hyperplane_holds(half, {2.0, 0.0, 0.0}, 500, rng);
        REQUIRE(chk.holds);
        REQUIRE(chk.feasible_tested == 500);
    }
    SECTION("quadratic set holds by convexity") {
        const ConstraintSet quad = make_quadratic(3, 2.0);
        auto chk = supporting_hyperplane_holds(quad, {2.0, 0.0, 0.0}, 500, rng);
        REQUIRE(chk.holds);
    }
    SECTION("ball through the origin fails with a violator") {
        const ConstraintSet ball = make_ball({0.0, 0.0}, 1.0);
        auto chk = supporting_hyperplane_holds(ball, {1.0, 0.0}, 500, rng);
        REQUIRE_FALSE(chk.holds);
        REQUIRE(chk.counterexample.has_value());
        // the violator is feasible but on the wrong side of the hyperplane
        REQUIRE(membership(ball, *chk.counterexample));
        REQUIRE(dot({1.0, 0.0}, *chk.counterexample) < 1.0);
    }
    SECTION("two-lobe set fails at either minimizer") {
        const ConstraintSet lobes = make_two_lobe();
        auto chk = supporting_hyperplane_holds(lobes, {0.0, 1.0}, 500, rng);
        REQUIRE_FALSE(chk.holds);
    }
    SECTION("infeasible anchor is rejected") {
        const ConstraintSet half = make_halfspace(2, 2.0);
        REQUIRE_THROWS_AS(supporting_hyperplane_holds(half, {1.0, 0.0}, 10, rng),
                          std::invalid_argument);
    }
}

TEST_CASE("two-lobe geometry", "[sets]") {
    const ConstraintSet lobes = make_two_lobe();
    REQUIRE(membership(lobes, {0.0, 1.0}));
    REQUIRE(membership(lobes, {0.0, -1.0}));
    REQUIRE(membership(lobes, {0.5, 1.25}));        // boundary: 1.25 = 1 + 0.25
    REQUIRE_FALSE(membership(lobes, {0.5, 1.24}));
    REQUIRE_FALSE(membership(lobes, {0.0, 0.0}));
    REQUIRE(lobes.z1star == 1.0);
}

TEST_CASE("two-sided demo set", "[sets]") {
    const ConstraintSet s = make_two_sided_demo();
    REQUIRE(membership(s, {2.0, 5.0}));      // halfspace lobe
    REQUIRE(membership(s, {-2.75, 0.0}));    // box lobe
    REQUIRE(membership(s, {-3.0, -1.0}));    // box corner
    REQUIRE_FALSE(membership(s, {0.0, 0.0}));
    REQUIRE_FALSE(membership(s, {-2.75, 1.5}));  // above the box
    REQUIRE_FALSE(membership(s, {-3.2, 0.0}));   // left of the box
    REQUIRE(s.analytic_nearest.has_value());
    REQUIRE((*s.analytic_nearest)[0] == 2.0);
}

TEST_CASE("ball factory", "[sets]") {
    const ConstraintSet ball = make_ball({5.0, 0.0}, 1.0);
    REQUIRE(membership(ball, {4.0, 0.0}));  // boundary
    REQUIRE(membership(ball, {5.0, 0.9}));
    REQUIRE_FALSE(membership(ball, {3.9, 0.0}));
    REQUIRE(ball.single_dominating_halfspace);
    REQUIRE(ball.analytic_nearest.has_value());
    REQUIRE((*ball.analytic_nearest)[0] == Catch::Approx(4.0));
    REQUIRE_THROWS_AS(make_ball({0.0}, -1.0), std::invalid_argument);
}

TEST_CASE("standardization rewrites membership in whitened coordinates", "[sets]") {
    SECTION("identity transform leaves membership unchanged") {
        const ConstraintSet s = make_quadratic(3, 1.0);
        const ConstraintSet sz = standardize(s, {0.0, 0.0, 0.0}, Mat::identity(3));
        RngStream rng(5, 0);
        for (int i = 0; i < 1000; ++i) {
            Vec z = {1.0 + rng.normal(), rng.normal(), rng.normal()};
            REQUIRE(membership(sz, z) == membership(s, z));
        }
    }
    SECTION("halfspace x1 >= 5 with mean (1,0), covariance 4I becomes z1 >= 2") {
        const ConstraintSet sx = make_halfspace(2, 5.0);
        const ConstraintSet sz = standardize(sx, {1.0, 0.0}, Mat::scaled_identity(2, 4.0));
        REQUIRE(membership(sz, {2.0, 0.0}));
        REQUIRE(membership(sz, {2.1, -7.0}));
        REQUIRE_FALSE(membership(sz, {1.999, 0.0}));
    }
    SECTION("round trip point maps") {
        Mat sigma(2, 2);
        sigma(0, 0) = 4.0; sigma(0, 1) = 2.0;
        sigma(1, 0) = 2.0; sigma(1, 1) = 5.0;
        const Mat A = cholesky(sigma);
        const Vec mu = {1.0, -2.0};
        RngStream rng(6, 0);
        for (int i = 0; i < 200; ++i) {
            Vec x = {10.0 * rng.normal(), 10.0 * rng.normal()};
            const Vec z = standardize_point(A, mu, x);
            const Vec back = unstandardize_point(A, mu, z);
            REQUIRE(back[0] == Catch::Approx(x[0]).margin(1e-10));
            REQUIRE(back[1] == Catch::Approx(x[1]).margin(1e-10));
        }
    }
    SECTION("cost transforms consistently") {
        Mat sigma = Mat::scaled_identity(2, 4.0);
        const Mat A = cholesky(sigma);
        const Vec mu = {1.0, 0.0};
        auto hz = standardize_cost([](const Vec& x) { return x[0] * x[0] + x[1]; }, A, mu);
        // z = (1, 2): x = (2*1+1, 2*2) = (3, 4): h = 9 + 4
        REQUIRE(hz({1.0, 2.0}) == Catch::Approx(13.0));
    }
    SECTION("dimension mismatches and indefinite covariances propagate") {
        const ConstraintSet s = make_halfspace(2, 1.0);
        REQUIRE_THROWS_AS(standardize(s, {0.0, 0.0, 0.0}, Mat::identity(3)),
                          std::invalid_argument);
        Mat bad(2, 2);
        bad(0, 0) = 1.0; bad(0, 1) = 2.0;
        bad(1, 0) = 2.0; bad(1, 1) = 1.0;
        REQUIRE_THROWS_AS(standardize(s, {0.0, 0.0}, bad), std::runtime_error);
    }
}

TEST_CASE("general halfspace factory", "[sets]") {
    const ConstraintSet s = make_halfspace_general({3.0, 4.0}, 10.0);
    REQUIRE(membership(s, {2.0, 1.0}));       // 6 + 4 = 10 boundary
    REQUIRE_FALSE(membership(s, {1.9, 1.0}));
    REQUIRE(s.z1star == Catch::Approx(2.0));  // distance 10/5
    REQUIRE(s.analytic_nearest.has_value());
    REQUIRE((*s.analytic_nearest)[0] == Catch::Approx(1.2));
    REQUIRE((*s.analytic_nearest)[1] == Catch::Approx(1.6));
    REQUIRE_THROWS_AS(make_halfspace_general({0.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("configure-to-order feasibility and lost-sales cost", "[sets]") {
    const Vec means = {12.0, 9.181687423997608, 9.0};
    SECTION("worked fulfillment example") {
        // X = (4, 20, 10) with caps U2 = 15, U3 = 8: product 3 is limited by
        // the component budget (f3 = 6), which then exhausts the budget for
        // product 2 (f2 = 0), so h = 20 + 3 * 4 = 32 exactly
        REQUIRE(cto_cost({4.0, 20.0, 10.0}, 15.0, 8.0) == 32.0);
    }
    SECTION("filled demand costs nothing") {
        // X3 <= min(1.5 X1, U3) and X2 <= min(3 X1 - 2 X3, U2): both mins
        // bind at the demand itself
        REQUIRE(cto_cost({10.0, 10.0, 9.0}, 12.0, 9.5) == 0.0);
    }
    SECTION("cost is never negative") {
        RngStream rng(61, 0);
        for (int k = 0; k < 20000; ++k) {
            const Vec x = {30.0 * rng.uniform01(), 30.0 * rng.uniform01(),
                           30.0 * rng.uniform01()};
            const double u2 = 20.0 * rng.uniform01();
            const double u3 = 20.0 * rng.uniform01();
            REQUIRE(cto_cost(x, u2, u3) >= 0.0);
        }
    }
    SECTION("feasibility splits on each inequality") {
        // component budget: 14 + 2 * 7 = 28 < 30
        REQUIRE_FALSE(cto_feasible({10.0, 14.0, 7.0}, 1.0, means));
        REQUIRE(cto_feasible({4.0, 20.0, 10.0}, 1.0, means));
        // cap on product 2
        REQUIRE_FALSE(cto_feasible({4.0, 9.0, 10.0}, 1.0, means));
        // cap on product 3
        REQUIRE_FALSE(cto_feasible({4.0, 20.0, 8.9}, 1.0, means));
    }
    SECTION("the set factory agrees with the predicate") {
        const ConstraintSet s = make_cto_set(1.63, means);
        REQUIRE(s.dim == 3);
        REQUIRE(s.name == "cto");
        REQUIRE(s.constraints.size() == 3);
        RngStream rng(62, 0);
        for (int k = 0; k < 5000; ++k) {
            const Vec x = {25.0 * rng.uniform01(), 25.0 * rng.uniform01(),
                           25.0 * rng.uniform01()};
            REQUIRE(membership(s, x) == cto_feasible(x, 1.63, means));
        }
    }
    SECTION("factory validation") {
        REQUIRE_THROWS_AS(make_cto_set(0.0, means), std::invalid_argument);
        REQUIRE_THROWS_AS(make_cto_set(-1.0, means), std::invalid_argument);
        REQUIRE_THROWS_AS(make_cto_set(1.0, {1.0, 2.0}), std::invalid_argument);
    }
}
