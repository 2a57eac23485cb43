#pragma once

// Scalar standard-normal machinery: density, CDF, tail CDF, log tail CDF,
// quantile, Gaussian upper partial moments, and the inverse of the log tail.
// Accuracy targets: Phi/Phibar to ~1e-15 relative in the erfc range,
// log_phibar to ~1e-12 relative everywhere, quantile to better than 1e-9.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gctail {

inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811;
inline constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

inline double log_norm_pdf(double x) {
    return -0.5 * x * x - std::log(kSqrt2Pi);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

inline double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// log Phibar(y). erfc underflows around y ~ 37.6, and loses nothing before
// y = 30, so the asymptotic Mills expansion takes over there:
//   Phibar(y) = phi(y)/y * (1 - 1/y^2 + 3/y^4 - 15/y^6 + 105/y^8 - ...)
inline double log_norm_sf(double y) {
    if (y < 0.0) {
        // Survival close to 1: compute via the opposite (small) tail so the
        // tiny deficit from 1 is preserved exactly.
        return std::log1p(-norm_sf(-y));
    }
    if (y <= 30.0) {
        return std::log(norm_sf(y));
    }
    const double w = 1.0 / (y * y);
    const double series = -w * (1.0 - w * (3.0 - w * (15.0 - 105.0 * w)));
    return log_norm_pdf(y) - std::log(y) + std::log1p(series);
}

namespace detail {

// Rational lower-region quantile approximation (abs error ~1e-8), refined
// below by one Halley step to full double precision.
inline double quantile_seed(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse standard-normal CDF on (0,1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
    }
    if (p > 0.5) return -norm_quantile(1.0 - p);  // 1-p exact for p in [0.5,1)
    double x = detail::quantile_seed(p);
    // One Halley step against the high-accuracy CDF.
    const double e = norm_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

// y such that log Phibar(y) = L, valid for any L < 0 (deep tails included).
inline double norm_isf_from_log(double L) {
    if (!(L < 0.0)) {
        if (L == 0.0) throw std::invalid_argument("norm_isf_from_log: L must be < 0");
        throw std::invalid_argument("norm_isf_from_log: L must be < 0");
    }
    if (L > -0.6931471805599453) {
        // Survival above 1/2: the point lies in the left tail. Recover the
        // (small) cdf exactly as -expm1(L) so no precision is lost near L=0.
        return norm_quantile(-std::expm1(L));
    }
    if (L > -600.0) {
        return -norm_quantile(std::exp(L));
    }
    // Asymptotic seed: solve y^2/2 + log(y sqrt(2pi)) = -L by fixed point,
    // then polish with Newton on log_norm_sf.
    double y = std::sqrt(-2.0 * L);
    for (int i = 0; i < 4; ++i) {
        y = std::sqrt(2.0 * (-L - std::log(y * kSqrt2Pi)));
    }
    for (int i = 0; i < 4; ++i) {
        const double f = log_norm_sf(y) - L;
        const double dlog = -std::exp(log_norm_pdf(y) - log_norm_sf(y));
        y -= f / dlog;
    }
    return y;
}

// Gaussian upper partial moment M_i(a) = int_a^inf u^i phi(u) du, via
// M_0 = Phibar, M_1 = phi, M_i = a^{i-1} phi(a) + (i-1) M_{i-2}.
inline double gauss_upper_moment(int i, double a) {
    if (i < 0) throw std::invalid_argument("gauss_upper_moment: order must be >= 0");
    if (i == 0) return norm_sf(a);
    if (i == 1) return norm_pdf(a);
    return std::pow(a, i - 1) * norm_pdf(a) + (i - 1) * gauss_upper_moment(i - 2, a);
}

}  // namespace gctail
