#pragma once

// Streaming estimate accumulation. IS weights span many orders of magnitude,
// so sums are compensated (Kahan); merging is plain field-wise addition,
// which keeps parallel reduction deterministic for a fixed merge order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gctail {

namespace detail {
inline void kahan_add(double& sum, double& comp, double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}
}  // namespace detail

struct EstimateAccumulator {
    std::int64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double sum_comp = 0.0;     // Kahan compensation for `sum`
    double sum_sq_comp = 0.0;  // Kahan compensation for `sum_sq`

    void add(double x) {
        detail::kahan_add(sum, sum_comp, x);
        detail::kahan_add(sum_sq, sum_sq_comp, x * x);
        ++n;
    }

    // The compensation term holds the running overshoot of the raw sum, so
    // the best available total is sum - comp.
    double mean() const {
        if (n == 0) throw std::logic_error("accumulator: mean of zero samples");
        return (sum - sum_comp) / static_cast<double>(n);
    }

    double second_moment() const {
        if (n == 0) throw std::logic_error("accumulator: second moment of zero samples");
        return (sum_sq - sum_sq_comp) / static_cast<double>(n);
    }

    double variance() const {
        const double m = mean();
        return std::max(0.0, second_moment() - m * m);
    }

    // Relative error of the sample-mean estimate: sqrt(Var/n) / mean.
    double relative_error() const {
        const double m = mean();
        if (m == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(variance() / static_cast<double>(n)) / std::fabs(m);
    }
};

// Field-wise addition (counts, sums, and their compensation terms). Exactly
// commutative; associative up to the last bit of the double sums.
inline EstimateAccumulator merge(const EstimateAccumulator& a, const EstimateAccumulator& b) {
    EstimateAccumulator out;
    out.n = a.n + b.n;
    out.sum = a.sum + b.sum;
    out.sum_sq = a.sum_sq + b.sum_sq;
    out.sum_comp = a.sum_comp + b.sum_comp;
    out.sum_sq_comp = a.sum_sq_comp + b.sum_sq_comp;
    return out;
}

// 97.5% standard-normal quantile used for two-sided 95% intervals.
inline constexpr double kCiQuantile = 1.959964;

struct BatchSummary {
    std::int64_t n = 0;
    int batches = 0;
    double mean = 0.0;
    double std_err = 0.0;  // batch-means standard error of `mean`
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double relative_error = 0.0;  // sqrt(Var/n)/mean from the pooled moments
    double second_moment = 0.0;
    double second_moment_std_err = 0.0;  // batch-means SE of the second moment
};

// Batch-means confidence summary: per-batch means are treated as (nearly)
// iid draws of the batch-level estimator, which is robust to the heavy tails
// of individual IS weights.
inline BatchSummary summarize_batches(const std::vector<EstimateAccumulator>& parts) {
    const int B = static_cast<int>(parts.size());
    if (B < 2) throw std::invalid_argument("summarize_batches: need at least 2 batches");
    EstimateAccumulator total;
    for (const auto& p : parts) {
        if (p.n == 0) throw std::invalid_argument("summarize_batches: empty batch");
        total = merge(total, p);
    }
    BatchSummary s;
    s.n = total.n;
    s.batches = B;
    s.mean = total.mean();
    s.relative_error = total.relative_error();
    s.second_moment = total.second_moment();

    double mbar = 0.0, m2bar = 0.0;
    for (const auto& p : parts) {
        mbar += p.mean();
        m2bar += p.second_moment();
    }
    mbar /= B;
    m2bar /= B;
    double v_mean = 0.0, v_m2 = 0.0;
    for (const auto& p : parts) {
        v_mean += (p.mean() - mbar) * (p.mean() - mbar);
        v_m2 += (p.second_moment() - m2bar) * (p.second_moment() - m2bar);
    }
    v_mean /= (B - 1);
    v_m2 /= (B - 1);
    s.std_err = std::sqrt(v_mean / B);
    s.second_moment_std_err = std::sqrt(v_m2 / B);
    s.ci_lo = s.mean - kCiQuantile * s.std_err;
    s.ci_hi = s.mean + kCiQuantile * s.std_err;
    return s;
}

}  // namespace gctail
