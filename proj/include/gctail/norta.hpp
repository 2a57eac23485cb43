#pragma once

// Gaussian-copula transform sampler (NORTA: NORmal To Anything) and the
// pullback of x-space constraint sets into the standard-normal z space.
//
// The model couples arbitrary continuous marginals F_i through a Gaussian
// copula with correlation matrix Sigma = A A^T (A lower triangular, so the
// driving normals y = A z carry exactly the covariance Sigma):
//   forward:  x_i = F_i^{-1}(Phi((A z)_i))
//   inverse:  z = A^{-1} Phi^{-1}(F(x))   (componentwise Phi^{-1} of F)
// Marginal quantile composition routes through log-survival functions
// (marginals.hpp), so unbounded families stay exact deep into the tails;
// genuine saturation at a support boundary raises with the offending
// coordinate index.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "marginals.hpp"
#include "sets.hpp"

namespace gctail {

struct NortaModel {
    std::vector<Marginal> marginals;
    Mat a;      // lower-triangular Cholesky factor of the correlation matrix
    Mat sigma;  // the correlation matrix itself (kept for reporting)

    int dim() const { return static_cast<int>(marginals.size()); }
};

// Validates and factors the correlation matrix. Sigma must be symmetric
// positive definite with a unit diagonal and match the marginal count.
inline NortaModel make_norta_model(std::vector<Marginal> marginals, const Mat& sigma) {
    const int d = static_cast<int>(marginals.size());
    if (d < 1) throw std::invalid_argument("norta model: needs at least one marginal");
    if (sigma.rows != d || sigma.cols != d) {
        throw std::invalid_argument("norta model: correlation matrix is " +
                                    std::to_string(sigma.rows) + "x" +
                                    std::to_string(sigma.cols) + ", expected " +
                                    std::to_string(d) + "x" + std::to_string(d));
    }
    for (int i = 0; i < d; ++i) {
        if (std::fabs(sigma(i, i) - 1.0) > 1e-12) {
            throw std::invalid_argument(
                "norta model: correlation matrix needs a unit diagonal, entry " +
                std::to_string(i) + " is " + std::to_string(sigma(i, i)));
        }
    }
    NortaModel m;
    m.marginals = std::move(marginals);
    m.a = cholesky(sigma);  // rejects asymmetric or non-PD input
    m.sigma = sigma;
    return m;
}

// x = F^{-1}(Phi(A z)). Throws std::domain_error naming the coordinate
// when a quantile saturates at a marginal's support boundary (bounded
// families at extreme normal coordinates, unbounded families once Phi
// underflows to exactly 0).
inline Vec norta_forward(const NortaModel& m, const Vec& z) {
    const int d = m.dim();
    if (static_cast<int>(z.size()) != d) {
        throw std::invalid_argument("norta forward: dimension mismatch (got " +
                                    std::to_string(z.size()) + ", expected " +
                                    std::to_string(d) + ")");
    }
    const Vec y = matvec(m.a, z);
    Vec x(d);
    for (int i = 0; i < d; ++i) {
        try {
            x[i] = marginal_from_gauss(m.marginals[i], y[i]);
        } catch (const std::domain_error& e) {
            throw std::domain_error("norta forward: coordinate " + std::to_string(i) +
                                    ": " + e.what());
        }
        // log sf >= 0 means x landed on or below the lower support boundary
        if (!std::isfinite(x[i]) || marginal_log_sf(m.marginals[i], x[i]) >= 0.0) {
            throw std::domain_error("norta forward: coordinate " + std::to_string(i) +
                                    " saturated at a support boundary (normal coordinate " +
                                    std::to_string(y[i]) + ")");
        }
    }
    return x;
}

// z = A^{-1} Phi^{-1}(F(x)). Throws std::domain_error naming the
// coordinate when x sits on or outside a marginal's open support.
inline Vec norta_inverse(const NortaModel& m, const Vec& x) {
    const int d = m.dim();
    if (static_cast<int>(x.size()) != d) {
        throw std::invalid_argument("norta inverse: dimension mismatch (got " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(d) + ")");
    }
    Vec u(d);
    for (int i = 0; i < d; ++i) {
        try {
            u[i] = marginal_to_gauss(m.marginals[i], x[i]);
        } catch (const std::domain_error& e) {
            throw std::domain_error("norta inverse: coordinate " + std::to_string(i) +
                                    ": " + e.what());
        }
    }
    return solve_lower(m.a, u);
}

namespace detail {
// Feasibility sentinel for constraint wrappers when the forward transform
// saturates: very negative, but squarable without overflowing so penalty
// methods can still walk away from the region.
constexpr double kSaturatedConstraint = -1e100;
}  // namespace detail

// Rewrites an x-space constraint set over the z coordinates:
// membership_z(z) = membership_x(forward(z)), with forward saturation
// counted as infeasible. Constraint structure is preserved one-to-one.
inline ConstraintSet pullback_set(const NortaModel& m, const ConstraintSet& sx) {
    if (sx.dim != m.dim()) {
        throw std::invalid_argument("pullback_set: set dimension " + std::to_string(sx.dim) +
                                    " does not match model dimension " +
                                    std::to_string(m.dim()));
    }
    ConstraintSet sz;
    sz.dim = sx.dim;
    sz.regime = Regime::fixed;
    sz.z1star = 0.0;
    for (const auto& c : sx.constraints) {
        sz.constraints.push_back([m, c](const Vec& z) -> double {
            try {
                return c(norta_forward(m, z));
            } catch (const std::domain_error&) {
                return detail::kSaturatedConstraint;
            }
        });
    }
    sz.single_dominating_halfspace = false;
    sz.name = sx.name + "-pullback";
    return sz;
}

// Cost in the z coordinates: h_z(z) = h_x(forward(z)). Saturated points are
// almost surely infeasible, so their cost is booked as zero (matching the
// cost-times-indicator use in the estimators).
inline std::function<double(const Vec&)> pullback_cost(const NortaModel& m,
                                                       std::function<double(const Vec&)> h) {
    return [m, h = std::move(h)](const Vec& z) -> double {
        try {
            return h(norta_forward(m, z));
        } catch (const std::domain_error&) {
            return 0.0;
        }
    };
}

// ------------------------------------------------------ tail growth probe --

enum class TailGrowth { regularly_varying_compatible, super_exponential };

inline std::string tail_growth_name(TailGrowth g) {
    return g == TailGrowth::super_exponential ? "super-exponential"
                                              : "regularly-varying-compatible";
}

struct TailGrowthReport {
    TailGrowth classification = TailGrowth::regularly_varying_compatible;
    double loglog_slope = 0.0;  // fitted d log h / d log r on the steepest ray
    double quad_coef = 0.0;     // fitted d log h / d r^2 on the steepest ray
    std::string warning;        // non-empty when growth is super-exponential
};

namespace detail {
struct LineFit {
    double slope = 0.0, sse = 0.0;
    long n = 0;
};

inline LineFit fit_line(const std::vector<double>& t, const std::vector<double>& v) {
    LineFit f;
    f.n = static_cast<long>(t.size());
    if (f.n < 2) return f;
    double tm = 0.0, vm = 0.0;
    for (long k = 0; k < f.n; ++k) {
        tm += t[k];
        vm += v[k];
    }
    tm /= static_cast<double>(f.n);
    vm /= static_cast<double>(f.n);
    double stv = 0.0, stt = 0.0;
    for (long k = 0; k < f.n; ++k) {
        stv += (t[k] - tm) * (v[k] - vm);
        stt += (t[k] - tm) * (t[k] - tm);
    }
    f.slope = stt > 0.0 ? stv / stt : 0.0;
    for (long k = 0; k < f.n; ++k) {
        const double r = (v[k] - vm) - f.slope * (t[k] - tm);
        f.sse += r * r;
    }
    return f;
}
}  // namespace detail

// Samples the transformed cost h(forward(r*u)) along each ray u and decides
// whether log-cost grows like a multiple of log r (polynomial growth; the
// asymptotic-rate analysis applies) or like a multiple of r^2
// (super-exponential growth in z, the power-law-marginal signature; the
// polynomial-growth rate guarantees do not apply). Diagnostic: rays with
// fewer than three usable (finite, positive-cost) samples are skipped.
inline TailGrowthReport tail_growth_probe(const NortaModel& m,
                                          const std::function<double(const Vec&)>& cost,
                                          const std::vector<Vec>& directions,
                                          const std::vector<double>& radii) {
    if (!cost) throw std::invalid_argument("tail_growth_probe: cost function required");
    if (directions.empty() || radii.size() < 3) {
        throw std::invalid_argument(
            "tail_growth_probe: needs at least one direction and three radii");
    }
    TailGrowthReport report;
    bool any_ray = false;
    for (const Vec& u : directions) {
        if (static_cast<int>(u.size()) != m.dim() || !(norm2(u) > 0.0)) {
            throw std::invalid_argument(
                "tail_growth_probe: directions must be nonzero vectors of the model dimension");
        }
        std::vector<double> logr, r2, logh;
        for (double r : radii) {
            if (!(r > 0.0)) {
                throw std::invalid_argument("tail_growth_probe: radii must be positive");
            }
            Vec z(u);
            for (auto& c : z) c *= r;
            double h;
            try {
                h = cost(norta_forward(m, z));
            } catch (const std::domain_error&) {
                continue;
            }
            if (!std::isfinite(h) || !(h > 0.0)) continue;
            logr.push_back(std::log(r));
            r2.push_back(r * r);
            logh.push_back(std::log(h));
        }
        if (logh.size() < 3) continue;
        any_ray = true;
        const detail::LineFit in_logr = detail::fit_line(logr, logh);
        const detail::LineFit in_r2 = detail::fit_line(r2, logh);
        const bool super = in_r2.sse < in_logr.sse && in_r2.slope > 0.0;
        if (super) {
            if (report.classification != TailGrowth::super_exponential ||
                in_r2.slope > report.quad_coef) {
                report.classification = TailGrowth::super_exponential;
                report.loglog_slope = in_logr.slope;
                report.quad_coef = in_r2.slope;
            }
        } else if (report.classification != TailGrowth::super_exponential &&
                   in_logr.slope >= report.loglog_slope) {
            report.loglog_slope = in_logr.slope;
            report.quad_coef = in_r2.slope;
        }
    }
    if (!any_ray) {
        report.warning =
            "no ray produced three finite positive cost samples; classification defaulted";
        return report;
    }
    if (report.classification == TailGrowth::super_exponential) {
        report.warning =
            "cost grows like exp(c r^2) along at least one ray; the polynomial-growth "
            "efficiency rates do not apply to this model";
    }
    return report;
}

// --------------------------------------------- configure-to-order model ----

// Demand marginals of the three-product scenario: product 1 demand is
// normal(12, 9), product 2 is weibull(shape 5, scale 10), product 3 is
// triangular(3, 8, 16).
inline std::vector<Marginal> cto_marginals() {
    return {Marginal{NormalMarginal(12.0, 9.0)}, Marginal{WeibullMarginal(5.0, 10.0)},
            Marginal{TriangularMarginal(3.0, 8.0, 16.0)}};
}

inline Vec cto_means() {
    const auto ms = cto_marginals();
    return {marginal_mean(ms[0]), marginal_mean(ms[1]), marginal_mean(ms[2])};
}

// The two published correlation scenarios: rho23 = 0.747 in both; product 1
// is either positively (rho12 = 0.499, rho13 = 0.497) or negatively
// (rho12 = -0.499, rho13 = -0.497) correlated with products 2 and 3.
inline NortaModel make_cto_model(bool positive_correlation) {
    const double s = positive_correlation ? 1.0 : -1.0;
    Mat sigma = Mat::identity(3);
    sigma(0, 1) = sigma(1, 0) = s * 0.499;
    sigma(0, 2) = sigma(2, 0) = s * 0.497;
    sigma(1, 2) = sigma(2, 1) = 0.747;
    return make_norta_model(cto_marginals(), sigma);
}

// Minimum-norm feasible demand vector: the caps bind (X2 = U2, X3 = U3) and
// X1 = 0 both minimizes its own square and loosens the component constraint.
inline Vec cto_nearest_x(double gamma) {
    const Vec means = cto_means();
    return {0.0, gamma * means[1], gamma * means[2]};
}

}  // namespace gctail
