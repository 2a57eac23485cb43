#pragma once

// The six tail estimators. Each draw function produces one IS-weighted
// sample whose expectation is the target integral (exactly for the unbiased
// designs, asymptotically for the scalar tilt). run_estimator spreads draws
// across deterministic per-batch RNG streams, merges the accumulators in
// batch order, and reports a batch-means confidence interval.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <stdexcept>
#include <vector>

#include "accumulators.hpp"
#include "dominating.hpp"
#include "normal.hpp"
#include "oracles.hpp"
#include "philox.hpp"
#include "sets.hpp"
#include "structural.hpp"

namespace gctail {

// ------------------------------------------------------------ single draws --

// Plain acceptance-rejection: h(Z) 1{Z in S}, Z ~ N(0, I).
template <class CostFn>
double draw_crude(const ConstraintSet& S, const CostFn& h, RngStream& rng) {
    Vec z(S.dim);
    for (auto& v : z) v = rng.normal();
    if (!membership(S, z)) return 0.0;
    return h(z);
}

// Mean-shifted sampling: Z ~ N(mu, I), weight phi(Z)/phi(Z - mu)
// = exp(-<Z, mu> + |mu|^2/2).
template <class CostFn>
double draw_mean_shift(const ConstraintSet& S, const CostFn& h, const Vec& mu, RngStream& rng) {
    if (static_cast<int>(mu.size()) != S.dim) {
        throw std::invalid_argument("mean-shift draw: shift vector dimension mismatch");
    }
    Vec z(S.dim);
    double z_dot_mu = 0.0, mu2 = 0.0;
    for (int j = 0; j < S.dim; ++j) {
        z[j] = mu[j] + rng.normal();
        z_dot_mu += z[j] * mu[j];
        mu2 += mu[j] * mu[j];
    }
    if (!membership(S, z)) return 0.0;
    return h(z) * std::exp(-z_dot_mu + 0.5 * mu2);
}

// Fully-reduced scalar tilt: every coordinate but the tail direction is
// integrated out analytically into eta and the (2 pi) power, leaving one
// shifted-exponential draw W ~ z1* + Exp(theta z1*). The trailing power
// (W - z1*)^s carries the boundary's cross-section growth; z1*^p carries the
// cost's leading power at the dominating point.
inline double draw_scalar_tilt(double z1star, double theta, double eta, double s, double p,
                               int dim, RngStream& rng) {
    if (!(z1star > 0.0)) throw std::domain_error("scalar tilt: z1* must be positive");
    if (!(theta > 0.0 && theta < 2.0)) {
        throw std::domain_error("scalar tilt: theta must lie in (0, 2)");
    }
    if (!(eta > 0.0)) throw std::domain_error("scalar tilt: eta must be positive");
    if (!(s >= 0.0)) throw std::domain_error("scalar tilt: s must be nonnegative");
    if (dim < 1) throw std::domain_error("scalar tilt: dimension must be >= 1");
    const double lambda = theta * z1star;
    const double w = z1star + rng.exponential(lambda);
    const double f = lambda * std::exp(-lambda * (w - z1star));
    return std::pow(2.0 * M_PI, -0.5 * (dim - 1)) * (norm_pdf(w) / f) * eta *
           std::pow(z1star, p) * std::pow(w - z1star, s);
}

// One-coordinate exponential tilt: W1 ~ z1* + Exp(lambda), the rest standard
// normal. The trailing coordinates' densities cancel between target and
// proposal, so the weight is the first coordinate's ratio only. Requires the
// set to lie in {w1 >= z1*} (supporting hyperplane); mass behind the shift
// is unreachable and would bias the estimate low.
template <class CostFn>
double draw_exp_coordinate(const ConstraintSet& S, const CostFn& h, double z1star,
                           RngStream& rng, double lambda = 0.0) {
    if (!(z1star > 0.0)) throw std::domain_error("exp-coordinate draw: z1* must be positive");
    if (lambda == 0.0) lambda = z1star;
    if (!(lambda > 0.0)) throw std::domain_error("exp-coordinate draw: rate must be positive");
    Vec w(S.dim);
    w[0] = z1star + rng.exponential(lambda);
    for (int j = 1; j < S.dim; ++j) w[j] = rng.normal();
    if (!membership(S, w)) return 0.0;
    const double ratio = norm_pdf(w[0]) / (lambda * std::exp(-lambda * (w[0] - z1star)));
    return ratio * h(w);
}

// One-coordinate Laplace proposal: full support on the tail axis, so no
// hyperplane condition is needed — unbiased for any set.
template <class CostFn>
double draw_laplace_coordinate(const ConstraintSet& S, const CostFn& h, double z1star,
                               RngStream& rng, double lambda = 0.0) {
    if (!(z1star > 0.0)) throw std::domain_error("laplace draw: z1* must be positive");
    if (lambda == 0.0) lambda = z1star;
    if (!(lambda > 0.0)) throw std::domain_error("laplace draw: rate must be positive");
    Vec w(S.dim);
    w[0] = rng.laplace(z1star, lambda);
    for (int j = 1; j < S.dim; ++j) w[j] = rng.normal();
    if (!membership(S, w)) return 0.0;
    const double ratio =
        norm_pdf(w[0]) / (0.5 * lambda * std::exp(-lambda * std::fabs(w[0] - z1star)));
    return ratio * h(w);
}

// Mixture of axis-aligned Laplace proposals, one per dominating point:
// pick component K ~ nu, draw W1 ~ Laplace(r_K, r_K) along the component's
// direction (trailing coordinates standard normal), rotate into place, and
// weight by the first coordinate's density ratio. Each component is
// individually unbiased (rotational invariance of the Gaussian plus full
// Laplace support), so no 1/nu_K reweighting appears.
template <class CostFn>
double draw_laplace_mixture(const ConstraintSet& S, const CostFn& h, const DominatingSet& dom,
                            RngStream& rng) {
    if (dom.size() == 0) {
        throw std::invalid_argument("mixture draw: dominating set is empty");
    }
    if (dom.dim != S.dim) throw std::invalid_argument("mixture draw: dimension mismatch");
    const std::size_t k = rng.categorical(dom.weights);
    const double r = dom.radii[k];
    Vec w(S.dim);
    w[0] = rng.laplace(r, r);
    for (int j = 1; j < S.dim; ++j) w[j] = rng.normal();
    const Vec z = dom.rotations[k].apply(w);
    if (!membership(S, z)) return 0.0;
    const double ratio = norm_pdf(w[0]) / (0.5 * r * std::exp(-r * std::fabs(w[0] - r)));
    return ratio * h(z);
}

// ------------------------------------------------------------ run plumbing --

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::crude;
    ConstraintSet set;
    std::function<double(const Vec&)> cost;  // empty => h == 1
    double theta = 0.0;                      // scalar tilt; 0 => optimal for constants.s
    std::optional<double> lambda_override;   // explicit intensity for the 1-D tilts
    std::optional<Vec> mean_shift;           // mean-shift vector; default dominating point
    std::optional<StructuralConstants> constants;  // scalar tilt: s and eta
    double cost_leading_power = 0.0;               // p in the scalar-tilt prefactor
    std::optional<DominatingSet> dominating;       // mixture components
};

struct RunResult {
    EstimatorKind kind = EstimatorKind::crude;
    BatchSummary stats;
    double wall_seconds = 0.0;  // diagnostic only; never serialized
    std::uint64_t seed = 0;
    std::uint64_t row = 0;
};

namespace detail {

// Validates the configuration for its estimator kind and returns the
// per-draw sampler. Configuration defects throw std::invalid_argument;
// parameter-domain defects throw std::domain_error.
inline std::function<double(RngStream&)> make_drawer(const EstimatorConfig& cfg) {
    const ConstraintSet S = cfg.set;
    std::function<double(const Vec&)> h =
        cfg.cost ? cfg.cost : [](const Vec&) { return 1.0; };
    switch (cfg.kind) {
        case EstimatorKind::crude:
            return [S, h](RngStream& rng) { return draw_crude(S, h, rng); };
        case EstimatorKind::mean_shift: {
            Vec mu;
            if (cfg.mean_shift) {
                mu = *cfg.mean_shift;
            } else {
                mu.assign(S.dim, 0.0);
                mu[0] = S.z1star;  // default shift: the aligned dominating point
            }
            if (static_cast<int>(mu.size()) != S.dim) {
                throw std::invalid_argument("config: mean-shift vector dimension mismatch");
            }
            return [S, h, mu](RngStream& rng) { return draw_mean_shift(S, h, mu, rng); };
        }
        case EstimatorKind::scalar_tilt: {
            if (!cfg.constants) {
                throw std::invalid_argument("config: scalar tilt requires structural constants");
            }
            if (!S.single_dominating_halfspace) {
                throw std::invalid_argument(
                    "config: scalar tilt requires a unique dominating point whose hyperplane "
                    "supports the set");
            }
            const double s = cfg.constants->s;
            const double eta = cfg.constants->eta;
            double theta = cfg.theta != 0.0 ? cfg.theta : optimal_tilt(s);
            if (cfg.lambda_override) theta = *cfg.lambda_override / S.z1star;
            const double z1star = S.z1star;
            const double p = cfg.cost_leading_power;
            const int dim = S.dim;
            // validate now rather than on the first draw
            if (!(z1star > 0.0)) throw std::domain_error("config: scalar tilt needs z1* > 0");
            if (!(theta > 0.0 && theta < 2.0)) {
                throw std::domain_error("config: scalar tilt needs theta in (0, 2)");
            }
            return [z1star, theta, eta, s, p, dim](RngStream& rng) {
                return draw_scalar_tilt(z1star, theta, eta, s, p, dim, rng);
            };
        }
        case EstimatorKind::exp_coordinate: {
            if (!S.single_dominating_halfspace) {
                throw std::invalid_argument(
                    "config: the exponential coordinate tilt requires the supporting-hyperplane "
                    "condition; use the laplace variant for two-sided sets");
            }
            const double lambda = cfg.lambda_override.value_or(0.0);
            return [S, h, lambda](RngStream& rng) {
                return draw_exp_coordinate(S, h, S.z1star, rng, lambda);
            };
        }
        case EstimatorKind::laplace_coordinate: {
            const double lambda = cfg.lambda_override.value_or(0.0);
            return [S, h, lambda](RngStream& rng) {
                return draw_laplace_coordinate(S, h, S.z1star, rng, lambda);
            };
        }
        case EstimatorKind::laplace_mixture: {
            if (!cfg.dominating || cfg.dominating->size() == 0) {
                throw std::invalid_argument("config: mixture estimator needs dominating points");
            }
            const DominatingSet dom = *cfg.dominating;
            return [S, h, dom](RngStream& rng) {
                return draw_laplace_mixture(S, h, dom, rng);
            };
        }
    }
    throw std::invalid_argument("config: unknown estimator kind");
}

}  // namespace detail

// Runs n draws split over `batches` deterministic substreams (stream id =
// row * 2^20 + batch), one task per batch, merged in batch order. The same
// (seed, row, n, batches) always reproduces the identical result bit for bit
// regardless of thread scheduling.
inline RunResult run_estimator(const EstimatorConfig& cfg, std::int64_t n, int batches,
                               std::uint64_t seed, std::uint64_t row = 0) {
    if (n < 1) throw std::invalid_argument("run: sample count must be >= 1");
    if (batches < 2 || static_cast<std::int64_t>(batches) > n) {
        throw std::invalid_argument("run: need 2 <= batches <= n");
    }
    if (batches >= (1 << 20)) {
        throw std::invalid_argument("run: batch count exceeds the stream-id packing limit");
    }
    const auto drawer = detail::make_drawer(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t base = n / batches, rem = n % batches;
    std::vector<std::future<EstimateAccumulator>> futures;
    futures.reserve(batches);
    for (int b = 0; b < batches; ++b) {
        const std::int64_t nb = base + (b < rem ? 1 : 0);
        futures.push_back(std::async(std::launch::async, [&drawer, seed, row, b, nb] {
            RngStream rng(seed, stream_id_for(row, static_cast<std::uint64_t>(b)));
            EstimateAccumulator acc;
            for (std::int64_t i = 0; i < nb; ++i) acc.add(drawer(rng));
            return acc;
        }));
    }
    std::vector<EstimateAccumulator> parts;
    parts.reserve(batches);
    for (auto& f : futures) parts.push_back(f.get());

    RunResult out;
    out.kind = cfg.kind;
    out.stats = summarize_batches(parts);
    out.seed = seed;
    out.row = row;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace gctail
