#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gctail/accumulators.hpp"
#include "gctail/philox.hpp"

using namespace gctail;

TEST_CASE("accumulator moments on small exact inputs", "[accumulators]") {
    EstimateAccumulator a;
    for (double x : {1.0, 2.0, 3.0, 4.0}) a.add(x);
    REQUIRE(a.n == 4);
    REQUIRE(a.mean() == 2.5);
    REQUIRE(a.second_moment() == 7.5);  // (1+4+9+16)/4
    REQUIRE(a.variance() == Catch::Approx(1.25).epsilon(1e-15));
    // RE of the mean: sqrt(1.25/4)/2.5
    REQUIRE(a.relative_error() == Catch::Approx(std::sqrt(1.25 / 4.0) / 2.5).epsilon(1e-15));

    EstimateAccumulator empty;
    REQUIRE_THROWS_AS(empty.mean(), std::logic_error);
    REQUIRE_THROWS_AS(empty.second_moment(), std::logic_error);

    EstimateAccumulator zeros;
    zeros.add(0.0);
    zeros.add(0.0);
    REQUIRE(zeros.mean() == 0.0);
    REQUIRE(std::isnan(zeros.relative_error()));
}

TEST_CASE("compensated summation keeps tiny increments", "[accumulators]") {
    // 1 followed by 1e7 copies of 1e-16: naive double addition loses every
    // increment (1 + 1e-16 == 1); the compensated sum keeps them all.
    EstimateAccumulator a;
    a.add(1.0);
    for (int i = 0; i < 10000000; ++i) a.add(1e-16);
    REQUIRE(a.mean() * static_cast<double>(a.n) == Catch::Approx(1.0 + 1e-9).epsilon(1e-12));
    double naive = 1.0;
    for (int i = 0; i < 1000; ++i) naive += 1e-16;
    REQUIRE(naive == 1.0);  // demonstrates why compensation is needed
}

TEST_CASE("merge is field-wise, commutative, and order-stable", "[accumulators]") {
    RngStream rng(77, 0);
    EstimateAccumulator a, b, c;
    for (int i = 0; i < 1000; ++i) a.add(std::exp(4.0 * rng.normal()));
    for (int i = 0; i < 500; ++i) b.add(std::exp(4.0 * rng.normal()));
    for (int i = 0; i < 250; ++i) c.add(std::exp(4.0 * rng.normal()));

    SECTION("commutativity is exact") {
        const auto ab = merge(a, b);
        const auto ba = merge(b, a);
        REQUIRE(ab.n == ba.n);
        REQUIRE(ab.sum == ba.sum);
        REQUIRE(ab.sum_sq == ba.sum_sq);
        REQUIRE(ab.sum_comp == ba.sum_comp);
        REQUIRE(ab.sum_sq_comp == ba.sum_sq_comp);
    }
    SECTION("associativity is exact on integer-valued sums") {
        EstimateAccumulator x, y, z;
        for (int i = 0; i < 7; ++i) x.add(1.0);
        for (int i = 0; i < 9; ++i) y.add(1.0);
        for (int i = 0; i < 11; ++i) z.add(0.0);
        const auto l = merge(merge(x, y), z);
        const auto r = merge(x, merge(y, z));
        REQUIRE(l.n == r.n);
        REQUIRE(l.sum == r.sum);
        REQUIRE(l.sum_sq == r.sum_sq);
    }
    SECTION("associativity on heavy-tailed sums holds to the last bits") {
        const auto l = merge(merge(a, b), c);
        const auto r = merge(a, merge(b, c));
        REQUIRE(l.n == r.n);
        REQUIRE(l.sum == Catch::Approx(r.sum).epsilon(1e-15));
        REQUIRE(l.sum_sq == Catch::Approx(r.sum_sq).epsilon(1e-15));
    }
    SECTION("merged batches match one sequential accumulator") {
        RngStream replay(77, 0);
        EstimateAccumulator total;
        for (int i = 0; i < 1750; ++i) total.add(std::exp(4.0 * replay.normal()));
        const auto merged = merge(merge(a, b), c);
        REQUIRE(merged.n == total.n);
        REQUIRE(merged.mean() == Catch::Approx(total.mean()).epsilon(1e-13));
        REQUIRE(merged.second_moment() == Catch::Approx(total.second_moment()).epsilon(1e-13));
    }
}

TEST_CASE("batch-means summary", "[accumulators]") {
    SECTION("known batch means give the textbook interval") {
        // four batches with means 1, 2, 3, 4 (constant within batch):
        // mean 2.5, batch variance 5/3, SE sqrt(5/12)
        std::vector<EstimateAccumulator> parts(4);
        for (int b = 0; b < 4; ++b) {
            for (int i = 0; i < 10; ++i) parts[b].add(static_cast<double>(b + 1));
        }
        const BatchSummary s = summarize_batches(parts);
        REQUIRE(s.n == 40);
        REQUIRE(s.batches == 4);
        REQUIRE(s.mean == Catch::Approx(2.5).epsilon(1e-15));
        const double se = std::sqrt((5.0 / 3.0) / 4.0);
        REQUIRE(s.std_err == Catch::Approx(se).epsilon(1e-12));
        REQUIRE(s.ci_lo == Catch::Approx(2.5 - 1.959964 * se).epsilon(1e-12));
        REQUIRE(s.ci_hi == Catch::Approx(2.5 + 1.959964 * se).epsilon(1e-12));
        // second moment: mean of squares = (1+4+9+16)/4 = 7.5, exact per batch;
        // sample variance of the per-batch second moments {1,4,9,16} is 43,
        // so its SE is sqrt(43/4)
        REQUIRE(s.second_moment == Catch::Approx(7.5).epsilon(1e-15));
        REQUIRE(s.second_moment_std_err == Catch::Approx(std::sqrt(43.0 / 4.0)).epsilon(1e-12));
    }
    SECTION("input validation") {
        std::vector<EstimateAccumulator> one(1);
        one[0].add(1.0);
        REQUIRE_THROWS_AS(summarize_batches(one), std::invalid_argument);
        std::vector<EstimateAccumulator> holed(3);
        holed[0].add(1.0);
        holed[2].add(1.0);
        REQUIRE_THROWS_AS(summarize_batches(holed), std::invalid_argument);
    }
    SECTION("batch-means interval covers a Gaussian mean at the right rate") {
        // 200 replications of 32 batches x 250 N(0,1) draws: the 95% CI
        // should miss 0 roughly 10 times; allow wide slack [0, 25].
        int misses = 0;
        for (int rep = 0; rep < 200; ++rep) {
            RngStream rng(900 + rep, 0);
            std::vector<EstimateAccumulator> parts(32);
            for (auto& p : parts) {
                for (int i = 0; i < 250; ++i) p.add(rng.normal());
            }
            const BatchSummary s = summarize_batches(parts);
            if (s.ci_lo > 0.0 || s.ci_hi < 0.0) ++misses;
        }
        REQUIRE(misses <= 25);
    }
}
