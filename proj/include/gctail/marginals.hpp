#pragma once

// One-dimensional marginal distribution families used by the correlated
// non-Gaussian model: normal(mu, variance), exponential(rate),
// weibull(shape, scale), triangular(lower, mode, upper), pareto(shape, scale).
// Every family exposes pdf/cdf/quantile plus numerically careful maps
// to and from a standard-normal coordinate (used by the transform sampler),
// routed through log-survival functions so deep tails never round to 0 or 1.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "normal.hpp"

namespace gctail {

struct NormalMarginal {
    double mu = 0.0, variance = 1.0, sigma = 1.0;
    NormalMarginal() = default;
    NormalMarginal(double mu_, double variance_) : mu(mu_), variance(variance_) {
        if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mu)) {
            throw std::invalid_argument("normal marginal: variance must be positive");
        }
        sigma = std::sqrt(variance);
    }
};

struct ExponentialMarginal {
    double rate = 1.0;
    ExponentialMarginal() = default;
    explicit ExponentialMarginal(double rate_) : rate(rate_) {
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("exponential marginal: rate must be positive");
        }
    }
};

struct WeibullMarginal {
    double shape = 1.0, scale = 1.0;
    WeibullMarginal() = default;
    WeibullMarginal(double shape_, double scale_) : shape(shape_), scale(scale_) {
        if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
            throw std::invalid_argument("weibull marginal: shape and scale must be positive");
        }
    }
};

struct TriangularMarginal {
    double lower = 0.0, mode = 0.5, upper = 1.0;
    TriangularMarginal() = default;
    TriangularMarginal(double lower_, double mode_, double upper_)
        : lower(lower_), mode(mode_), upper(upper_) {
        if (!(lower < upper) || !(lower <= mode) || !(mode <= upper)) {
            throw std::invalid_argument(
                "triangular marginal: requires lower <= mode <= upper and lower < upper");
        }
    }
};

struct ParetoMarginal {
    double shape = 1.0, scale = 1.0;
    ParetoMarginal() = default;
    ParetoMarginal(double shape_, double scale_) : shape(shape_), scale(scale_) {
        if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
            throw std::invalid_argument("pareto marginal: shape and scale must be positive");
        }
    }
};

using Marginal = std::variant<NormalMarginal, ExponentialMarginal, WeibullMarginal,
                              TriangularMarginal, ParetoMarginal>;

namespace detail {
inline void check_prob(double p, const char* who) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": probability must lie in (0, 1)");
    }
}
}  // namespace detail

// ---------------------------------------------------------------- pdf/cdf --

inline double marginal_pdf(const Marginal& m, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return norm_pdf((x - d.mu) / d.sigma) / d.sigma;
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return x < 0.0 ? 0.0 : d.rate * std::exp(-d.rate * x);
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                if (x <= 0.0) return 0.0;
                const double t = x / d.scale;
                return (d.shape / d.scale) * std::pow(t, d.shape - 1.0) *
                       std::exp(-std::pow(t, d.shape));
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                if (x < d.lower || x > d.upper) return 0.0;
                const double span = d.upper - d.lower;
                if (x <= d.mode) {
                    if (d.mode == d.lower) return 2.0 / span;
                    return 2.0 * (x - d.lower) / (span * (d.mode - d.lower));
                }
                if (d.mode == d.upper) return 2.0 / span;
                return 2.0 * (d.upper - x) / (span * (d.upper - d.mode));
            } else {
                if (x < d.scale) return 0.0;
                return d.shape * std::pow(d.scale, d.shape) / std::pow(x, d.shape + 1.0);
            }
        },
        m);
}

inline double marginal_cdf(const Marginal& m, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return norm_cdf((x - d.mu) / d.sigma);
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x);
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / d.scale, d.shape));
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                if (x <= d.lower) return 0.0;
                if (x >= d.upper) return 1.0;
                const double span = d.upper - d.lower;
                if (x <= d.mode) {
                    return (x - d.lower) * (x - d.lower) / (span * (d.mode - d.lower));
                }
                return 1.0 - (d.upper - x) * (d.upper - x) / (span * (d.upper - d.mode));
            } else {
                return x <= d.scale ? 0.0 : 1.0 - std::pow(d.scale / x, d.shape);
            }
        },
        m);
}

// log of the survival function 1 - F(x); -inf above bounded support.
inline double marginal_log_sf(const Marginal& m, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return log_norm_sf((x - d.mu) / d.sigma);
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return x <= 0.0 ? 0.0 : -d.rate * x;
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                return x <= 0.0 ? 0.0 : -std::pow(x / d.scale, d.shape);
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                if (x <= d.lower) return 0.0;
                if (x >= d.upper) return -std::numeric_limits<double>::infinity();
                const double span = d.upper - d.lower;
                if (x > d.mode) {
                    return 2.0 * std::log(d.upper - x) - std::log(span * (d.upper - d.mode));
                }
                const double F =
                    (x - d.lower) * (x - d.lower) / (span * (d.mode - d.lower));
                return std::log1p(-F);
            } else {
                return x <= d.scale ? 0.0 : -d.shape * std::log(x / d.scale);
            }
        },
        m);
}

// ---------------------------------------------------------------- quantile --

inline double marginal_quantile(const Marginal& m, double p) {
    detail::check_prob(p, "marginal_quantile");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return d.mu + d.sigma * norm_quantile(p);
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return -std::log1p(-p) / d.rate;
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                return d.scale * std::pow(-std::log1p(-p), 1.0 / d.shape);
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                const double span = d.upper - d.lower;
                const double split = (d.mode - d.lower) / span;
                if (p <= split) {
                    return d.lower + std::sqrt(p * span * (d.mode - d.lower));
                }
                return d.upper - std::sqrt((1.0 - p) * span * (d.upper - d.mode));
            } else {
                return d.scale * std::exp(-std::log1p(-p) / d.shape);
            }
        },
        m);
}

inline double marginal_mean(const Marginal& m) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return d.mu;
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return 1.0 / d.rate;
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                return d.scale * std::tgamma(1.0 + 1.0 / d.shape);
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                return (d.lower + d.mode + d.upper) / 3.0;
            } else {
                if (!(d.shape > 1.0)) {
                    throw std::domain_error("pareto marginal: mean requires shape > 1");
                }
                return d.shape * d.scale / (d.shape - 1.0);
            }
        },
        m);
}

// ------------------------------------------------- standard-normal bridge --

// F^{-1}(Phi(y)): pushes a standard-normal coordinate through the marginal.
// Unbounded families route through log survival functions and never
// saturate; the triangular family saturates to its support endpoint once
// the normal cdf underflows (|y| > ~38.5) and then throws.
inline double marginal_from_gauss(const Marginal& m, double y) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return d.mu + d.sigma * y;
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                return -log_norm_sf(y) / d.rate;
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                return d.scale * std::pow(-log_norm_sf(y), 1.0 / d.shape);
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                const double span = d.upper - d.lower;
                const double split = (d.mode - d.lower) / span;
                const double F = norm_cdf(y);
                if (F <= split) {
                    if (F <= 0.0) {
                        throw std::domain_error(
                            "marginal_from_gauss: triangular quantile saturated at lower "
                            "support boundary (normal coordinate too negative)");
                    }
                    return d.lower + std::sqrt(F * span * (d.mode - d.lower));
                }
                const double sf = norm_sf(y);
                if (sf <= 0.0) {
                    throw std::domain_error(
                        "marginal_from_gauss: triangular quantile saturated at upper "
                        "support boundary (normal coordinate too large)");
                }
                return d.upper - std::sqrt(sf * span * (d.upper - d.mode));
            } else {
                return d.scale * std::exp(-log_norm_sf(y) / d.shape);
            }
        },
        m);
}

// Phi^{-1}(F(x)): pulls a marginal coordinate back to the standard-normal
// scale. Throws std::domain_error when x sits on or outside the support
// boundary (where the normal coordinate would be infinite).
inline double marginal_to_gauss(const Marginal& m, double x) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) {
                return (x - d.mu) / d.sigma;
            } else if constexpr (std::is_same_v<T, ExponentialMarginal>) {
                if (x <= 0.0) {
                    throw std::domain_error(
                        "marginal_to_gauss: exponential support boundary at x <= 0");
                }
                return norm_isf_from_log(-d.rate * x);
            } else if constexpr (std::is_same_v<T, WeibullMarginal>) {
                if (x <= 0.0) {
                    throw std::domain_error(
                        "marginal_to_gauss: weibull support boundary at x <= 0");
                }
                return norm_isf_from_log(-std::pow(x / d.scale, d.shape));
            } else if constexpr (std::is_same_v<T, TriangularMarginal>) {
                if (x <= d.lower || x >= d.upper) {
                    throw std::domain_error(
                        "marginal_to_gauss: triangular support boundary at x = " +
                        std::to_string(x));
                }
                const double span = d.upper - d.lower;
                if (x <= d.mode) {
                    const double F =
                        (x - d.lower) * (x - d.lower) / (span * (d.mode - d.lower));
                    return norm_quantile(F);
                }
                const double log_sf = 2.0 * std::log(d.upper - x) -
                                      std::log(span * (d.upper - d.mode));
                return norm_isf_from_log(log_sf);
            } else {
                if (x <= d.scale) {
                    throw std::domain_error(
                        "marginal_to_gauss: pareto support boundary at x <= scale");
                }
                return norm_isf_from_log(-d.shape * std::log(x / d.scale));
            }
        },
        m);
}

// True when the marginal's upper tail decays no faster than any exponential
// (power-law families); used by the tail-compatibility probe.
inline bool marginal_tail_is_power_law(const Marginal& m) {
    return std::holds_alternative<ParetoMarginal>(m);
}

inline std::string marginal_family_name(const Marginal& m) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NormalMarginal>) return "normal";
            else if constexpr (std::is_same_v<T, ExponentialMarginal>) return "exponential";
            else if constexpr (std::is_same_v<T, WeibullMarginal>) return "weibull";
            else if constexpr (std::is_same_v<T, TriangularMarginal>) return "triangular";
            else return "pareto";
        },
        m);
}

}  // namespace gctail
