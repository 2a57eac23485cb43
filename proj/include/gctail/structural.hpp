#pragma once

// Structural constants of a polynomial-boundary set: the scaling exponents
// x*_j and volume exponent s from an exact linear program, the limit set
// spanned by the LP-tight boundary terms, and the volume constant eta
// obtained by integrating the cost monomial over that limit set.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "philox.hpp"
#include "rational.hpp"
#include "sets.hpp"

namespace gctail {

struct LpStructural {
    std::vector<Fraction> x_star;  // per trailing coordinate
    Fraction s;                    // objective value
    std::vector<int> tight;        // indices into the boundary term list
};

// Minimize sum_j (c_j + 1) x_j subject to sum_j nu_j x_j >= 1 for every
// boundary exponent vector nu, x >= 0. `boundary_expos` and `cost_expos`
// index the trailing coordinates (length d - 1).
inline LpStructural solve_structural_lp(const std::vector<std::vector<int>>& boundary_expos,
                                        const std::vector<int>& cost_expos) {
    if (boundary_expos.empty()) {
        throw std::invalid_argument("solve_structural_lp: no boundary terms");
    }
    const int n = static_cast<int>(cost_expos.size());
    std::vector<std::vector<Fraction>> A;
    std::vector<Fraction> b;
    for (const auto& nu : boundary_expos) {
        if (static_cast<int>(nu.size()) != n) {
            throw std::invalid_argument("solve_structural_lp: exponent vector width mismatch");
        }
        bool has_positive = false;
        for (int v : nu) {
            if (v > 0) has_positive = true;
            if (v < 0) throw std::invalid_argument("solve_structural_lp: negative exponent");
        }
        if (!has_positive) {
            std::string msg = "solve_structural_lp: boundary term with no positive exponent (";
            for (std::size_t j = 0; j < nu.size(); ++j) {
                msg += (j ? "," : "") + std::to_string(nu[j]);
            }
            throw std::invalid_argument(msg + ") makes the program infeasible");
        }
        std::vector<Fraction> row(n);
        for (int j = 0; j < n; ++j) row[j] = Fraction(nu[j]);
        A.push_back(std::move(row));
        b.push_back(Fraction(1));
    }
    std::vector<Fraction> c(n);
    for (int j = 0; j < n; ++j) {
        if (cost_expos[j] < 0) {
            throw std::invalid_argument("solve_structural_lp: negative cost exponent");
        }
        c[j] = Fraction(cost_expos[j] + 1);
    }
    const LpSolution sol = simplex_min(A, b, c);
    LpStructural out;
    out.x_star = sol.x;
    out.s = sol.objective;
    for (std::size_t i = 0; i < boundary_expos.size(); ++i) {
        Fraction lhs(0);
        for (int j = 0; j < n; ++j) lhs = lhs + Fraction(boundary_expos[i][j]) * sol.x[j];
        if (lhs == Fraction(1)) out.tight.push_back(static_cast<int>(i));
    }
    return out;
}

// Complementary-slackness audit: every strictly positive x*_j must touch at
// least one tight constraint with nu_j > 0.
inline bool lp_complementary_slackness(const std::vector<std::vector<int>>& boundary_expos,
                                       const LpStructural& lp) {
    for (std::size_t j = 0; j < lp.x_star.size(); ++j) {
        if (lp.x_star[j] > Fraction(0)) {
            bool touched = false;
            for (int ti : lp.tight) {
                if (boundary_expos[ti][j] > 0) touched = true;
            }
            if (!touched) return false;
        }
    }
    return true;
}

// Limit set of a polynomial boundary: after the LP scaling, exactly the
// tight terms survive, and the slice settles to
//   { zt : sum_{tight i} coeff_i prod_j zt_j^{nu_ij} <= 1 }.
inline std::function<bool(const Vec&)> limit_set_predicate(const BoundaryDescriptor& g,
                                                           const LpStructural& lp) {
    std::vector<PolyTerm> tight_terms;
    for (int ti : lp.tight) tight_terms.push_back(g.terms[ti]);
    if (tight_terms.empty()) {
        throw std::invalid_argument("limit_set_predicate: no tight boundary terms");
    }
    return [tight_terms](const Vec& zt) {
        double s = 0.0;
        for (const auto& t : tight_terms) {
            double v = t.coeff;
            for (std::size_t j = 0; j < zt.size(); ++j) {
                for (int k = 0; k < t.expo[j]; ++k) v *= zt[j];
            }
            s += v;
        }
        return s <= 1.0;
    };
}

// ------------------------------------------------------- region integrals --

struct RegionIntegral {
    double value = 0.0;
    double std_err = 0.0;  // statistical or discretization half-width
    double box_halfwidth = 0.0;
    bool bounded = true;
};

namespace detail {

inline double monomial(const Vec& zt, const std::vector<int>& expo) {
    double v = 1.0;
    for (std::size_t j = 0; j < zt.size(); ++j) {
        for (int k = 0; k < expo[j]; ++k) v *= zt[j];
    }
    return v;
}

// Finds a centered box [-B, B]^k that contains the region: inflates until
// the shell between B/2 and B holds no member points (probed with a fixed
// lattice plus random samples). Throws if growth never stops.
inline double bounding_halfwidth(const std::function<bool(const Vec&)>& pred, int k,
                                 RngStream& rng) {
    double B = 2.0;
    int clean = 0;
    for (int iter = 0; iter < 12; ++iter) {
        long shell_hits = 0;
        const long probes = 40000;
        Vec zt(k);
        for (long i = 0; i < probes; ++i) {
            double maxc = 0.0;
            for (int j = 0; j < k; ++j) {
                zt[j] = B * (2.0 * rng.uniform01() - 1.0);
                maxc = std::max(maxc, std::fabs(zt[j]));
            }
            if (maxc <= 0.5 * B) continue;  // only probe the outer shell
            if (pred(zt)) ++shell_hits;
        }
        if (shell_hits == 0) {
            if (++clean == 2) return B;  // two consecutive clean shells
        } else {
            clean = 0;
            B *= 2.0;
        }
        if (clean == 1) B *= 2.0;  // confirm at the doubled box before accepting
    }
    throw std::runtime_error(
        "region integral: set appears unbounded (membership persists at box half-width " +
        std::to_string(B) + ")");
}

// Corner-classified midpoint grid over [-B, B]^k for k in {1, 2}: cells with
// all corners inside contribute fully, mixed cells contribute half with the
// other half reported as uncertainty.
inline RegionIntegral grid_integral(const std::function<bool(const Vec&)>& pred,
                                    const std::vector<int>& cost_expo, int k, double B,
                                    int cells_per_axis) {
    RegionIntegral out;
    out.box_halfwidth = B;
    const int M = cells_per_axis;
    const double h = 2.0 * B / M;
    double sure = 0.0, fuzzy = 0.0;
    if (k == 1) {
        std::vector<char> corner(M + 1);
        for (int i = 0; i <= M; ++i) corner[i] = pred({-B + i * h}) ? 1 : 0;
        for (int i = 0; i < M; ++i) {
            const int c = corner[i] + corner[i + 1];
            if (c == 0) continue;
            const double w = monomial({-B + (i + 0.5) * h}, cost_expo) * h;
            if (c == 2) {
                sure += w;
            } else {
                fuzzy += w;
            }
        }
    } else {
        std::vector<char> below(M + 1), here(M + 1);
        for (int j = 0; j <= M; ++j) below[j] = pred({-B, -B + j * h}) ? 1 : 0;
        for (int i = 1; i <= M; ++i) {
            const double zi = -B + i * h;
            for (int j = 0; j <= M; ++j) here[j] = pred({zi, -B + j * h}) ? 1 : 0;
            for (int j = 0; j < M; ++j) {
                const int c = below[j] + below[j + 1] + here[j] + here[j + 1];
                if (c == 0) continue;
                const double w =
                    monomial({zi - 0.5 * h, -B + (j + 0.5) * h}, cost_expo) * h * h;
                if (c == 4) {
                    sure += w;
                } else {
                    fuzzy += w;
                }
            }
            std::swap(below, here);
        }
    }
    out.value = sure + 0.5 * fuzzy;
    out.std_err = 0.5 * std::fabs(fuzzy);
    return out;
}

// Stratified Monte Carlo for k >= 3: strata along the first axis.
inline RegionIntegral mc_integral(const std::function<bool(const Vec&)>& pred,
                                  const std::vector<int>& cost_expo, int k, double B,
                                  RngStream& rng, long n) {
    RegionIntegral out;
    out.box_halfwidth = B;
    const int K = 64;
    const long per = std::max<long>(n / K, 2);
    const double vol = std::pow(2.0 * B, k);
    double mean_acc = 0.0, var_acc = 0.0;
    Vec zt(k);
    for (int s = 0; s < K; ++s) {
        const double lo = -B + 2.0 * B * s / K;
        const double hi = -B + 2.0 * B * (s + 1) / K;
        double m1 = 0.0, m2 = 0.0;
        for (long i = 0; i < per; ++i) {
            zt[0] = lo + (hi - lo) * rng.uniform01();
            for (int j = 1; j < k; ++j) zt[j] = B * (2.0 * rng.uniform01() - 1.0);
            const double v = pred(zt) ? monomial(zt, cost_expo) : 0.0;
            m1 += v;
            m2 += v * v;
        }
        m1 /= per;
        m2 /= per;
        mean_acc += m1;
        var_acc += std::max(0.0, m2 - m1 * m1) / per;
    }
    out.value = vol * mean_acc / K;
    out.std_err = vol * std::sqrt(var_acc) / K;
    return out;
}

}  // namespace detail

// Integral of the cost monomial over a bounded region given by a membership
// predicate on the trailing coordinates. Dispatches to a classification
// grid (k <= 2) or stratified Monte Carlo, after establishing a bounding
// box (throws if the region keeps growing).
inline RegionIntegral weighted_region_integral(const std::function<bool(const Vec&)>& pred,
                                               const std::vector<int>& cost_expo, int k,
                                               RngStream& rng, long n = 2000000) {
    const double B = detail::bounding_halfwidth(pred, k, rng);
    if (k <= 2) {
        const int cells = (k == 1) ? 200000 : 2400;
        return detail::grid_integral(pred, cost_expo, k, B, cells);
    }
    RegionIntegral out = detail::mc_integral(pred, cost_expo, k, B, rng, n);
    // refine until the 1% relative target or the sample budget is exhausted
    long budget = n;
    while (out.std_err > 0.01 * std::fabs(out.value) && budget < 64000000) {
        budget *= 2;
        out = detail::mc_integral(pred, cost_expo, k, B, rng, budget);
    }
    return out;
}

struct StructuralConstants {
    double s = 0.0;
    double eta = 0.0;
    double eta_std_err = 0.0;
    std::vector<int> cost_expo;      // trailing cost exponents c_2..c_d
    std::vector<double> x_star;      // LP scalings
    std::vector<Fraction> x_star_exact;
    Fraction s_exact{0};
};

// Full pipeline for a polynomial-boundary translating set: exact LP for the
// exponents, then eta over the tight-term limit set.
inline StructuralConstants compute_structural_constants(const ConstraintSet& S,
                                                        const std::vector<int>& cost_expo,
                                                        RngStream& rng) {
    if (!S.boundary.has_value()) {
        throw std::invalid_argument(
            "compute_structural_constants: set has no polynomial boundary descriptor");
    }
    std::vector<std::vector<int>> expos;
    for (const auto& t : S.boundary->terms) {
        if (t.coeff == 0.0) continue;
        bool all_zero = true;
        for (int e : t.expo) {
            if (e != 0) all_zero = false;
        }
        if (all_zero) continue;  // constant terms do not shape the limit set
        if (t.coeff < 0.0) {
            throw std::invalid_argument(
                "compute_structural_constants: boundary terms must have positive "
                "coefficients");
        }
        expos.push_back(t.expo);
    }
    BoundaryDescriptor active;
    for (const auto& t : S.boundary->terms) {
        if (t.coeff == 0.0) continue;
        bool all_zero = true;
        for (int e : t.expo) {
            if (e != 0) all_zero = false;
        }
        if (!all_zero) active.terms.push_back(t);
    }
    const LpStructural lp = solve_structural_lp(expos, cost_expo);
    const auto limit = limit_set_predicate(active, lp);
    const RegionIntegral eta =
        weighted_region_integral(limit, cost_expo, S.dim - 1, rng);

    StructuralConstants out;
    out.s = lp.s.to_double();
    out.s_exact = lp.s;
    out.eta = eta.value;
    out.eta_std_err = eta.std_err;
    out.cost_expo = cost_expo;
    for (const auto& f : lp.x_star) {
        out.x_star.push_back(f.to_double());
        out.x_star_exact.push_back(f);
    }
    return out;
}

// --------------------------------------------------- volume expansion fit --

struct VolumeExpansionReport {
    bool failed = false;           // set when a cross-section is unbounded
    double max_rel_deviation = 0.0;
    std::vector<double> t_values;
    std::vector<double> volumes;   // cost-weighted cross-section volumes
    double fitted_slope = 0.0;     // log-log regression slope
};

inline double fitted_log_slope(const std::vector<double>& ts, const std::vector<double>& vs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(ts[i]), y = std::log(vs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline VolumeExpansionReport volume_expansion_check(const ConstraintSet& S,
                                                    const StructuralConstants& constants,
                                                    const std::vector<double>& t_grid,
                                                    RngStream& rng) {
    if (S.regime != Regime::translation) {
        throw std::invalid_argument("volume_expansion_check: set must be in translation form");
    }
    VolumeExpansionReport rep;
    for (double t : t_grid) {
        auto section = cross_section(S, t);
        RegionIntegral vi;
        try {
            vi = weighted_region_integral(section, constants.cost_expo, S.dim - 1, rng);
        } catch (const std::runtime_error&) {
            rep.failed = true;  // unbounded cross-section
            return rep;
        }
        rep.t_values.push_back(t);
        rep.volumes.push_back(vi.value);
        const double predicted = constants.eta * std::pow(t, constants.s);
        if (predicted > 0.0) {
            rep.max_rel_deviation =
                std::max(rep.max_rel_deviation, std::fabs(vi.value / predicted - 1.0));
        }
    }
    if (rep.t_values.size() >= 2) {
        rep.fitted_slope = fitted_log_slope(rep.t_values, rep.volumes);
    }
    return rep;
}

}  // namespace gctail
