#pragma once

// Constrained rare-event sets and polynomial cost functions.
//
// A set is described by smooth constraint functions l_i; a point belongs to
// the set iff every l_i is >= 0 (sets are closed: boundary points belong).
// Sets carry a regime tag describing how they move as the tail parameter
// grows: `translation` sets are a fixed shape shifted along the first axis,
// `scaling` sets are a fixed shape dilated by the tail parameter, and
// `fixed` sets do not move at all.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "philox.hpp"

namespace gctail {

// ---------------------------------------------------------------- costs ----

// One monomial: coeff * prod_j z_j^{expo[j]}.
struct PolyTerm {
    double coeff = 1.0;
    std::vector<int> expo;
};

// Polynomial cost h(z) with nonnegative integer exponents. The leading
// power p is the largest exponent of the first coordinate across terms.
struct PolynomialCost {
    int dim = 0;
    std::vector<PolyTerm> terms;

    double eval(const Vec& z) const {
        if (static_cast<int>(z.size()) != dim) {
            throw std::invalid_argument("polynomial cost: dimension mismatch");
        }
        double s = 0.0;
        for (const auto& t : terms) {
            double v = t.coeff;
            for (int j = 0; j < dim; ++j) {
                for (int k = 0; k < t.expo[j]; ++k) v *= z[j];
            }
            s += v;
        }
        return s;
    }

    int leading_power() const {
        int p = 0;
        for (const auto& t : terms) p = std::max(p, t.expo.empty() ? 0 : t.expo[0]);
        return p;
    }

    static PolynomialCost one(int dim) {
        PolynomialCost h;
        h.dim = dim;
        h.terms.push_back({1.0, std::vector<int>(dim, 0)});
        return h;
    }

    static PolynomialCost monomial(int dim, std::vector<int> expo, double coeff = 1.0) {
        if (static_cast<int>(expo.size()) != dim) {
            throw std::invalid_argument("polynomial cost: exponent vector has wrong length");
        }
        for (int e : expo) {
            if (e < 0) throw std::invalid_argument("polynomial cost: negative exponent");
        }
        PolynomialCost h;
        h.dim = dim;
        h.terms.push_back({coeff, std::move(expo)});
        return h;
    }
};

// ----------------------------------------------------------------- sets ----

enum class Regime { translation, scaling, fixed };

// Optional structured boundary for translating sets of the form
//   { z : z_1 >= z1star + g(z_2, ..., z_d) },
// where g is a polynomial in the trailing coordinates with g >= 0, g(0) = 0.
// The terms' exponent vectors index the trailing coordinates only.
struct BoundaryDescriptor {
    std::vector<PolyTerm> terms;  // expo vectors of length dim - 1

    double eval_trailing(const Vec& zt) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double v = t.coeff;
            for (std::size_t j = 0; j < zt.size(); ++j) {
                for (int k = 0; k < t.expo[j]; ++k) v *= zt[j];
            }
            s += v;
        }
        return s;
    }
};

struct ConstraintSet {
    int dim = 0;
    Regime regime = Regime::fixed;
    double z1star = 0.0;  // tail parameter (translation offset or scale factor)
    std::vector<std::function<double(const Vec&)>> constraints;
    std::optional<BoundaryDescriptor> boundary;  // translating graph form, if known
    bool single_dominating_halfspace = false;    // hyperplane through the dominating
                                                 // point supports the whole set
    std::optional<Vec> analytic_nearest;         // known closest point to the origin
    std::string name;
};

inline double min_constraint(const ConstraintSet& s, const Vec& z) {
    if (static_cast<int>(z.size()) != s.dim) {
        throw std::invalid_argument("constraint set '" + s.name + "': dimension mismatch (got " +
                                    std::to_string(z.size()) + ", expected " +
                                    std::to_string(s.dim) + ")");
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : s.constraints) m = std::min(m, c(z));
    return m;
}

inline bool membership(const ConstraintSet& s, const Vec& z) {
    return min_constraint(s, z) >= 0.0;
}

// Membership predicate of the slice { zt : (z1star + t, zt) in S } for a
// translating set, as a function of the trailing coordinates.
inline std::function<bool(const Vec&)> cross_section(const ConstraintSet& s, double t) {
    if (s.regime != Regime::translation) {
        throw std::invalid_argument("cross_section: set '" + s.name +
                                    "' is not in the translation regime");
    }
    if (t < 0.0) {
        throw std::invalid_argument("cross_section: slice offset must be nonnegative");
    }
    const double z1 = s.z1star + t;
    const ConstraintSet* sp = &s;
    return [sp, z1](const Vec& zt) {
        if (static_cast<int>(zt.size()) != sp->dim - 1) {
            throw std::invalid_argument("cross_section: trailing coordinate dimension mismatch");
        }
        Vec z(sp->dim);
        z[0] = z1;
        for (int j = 1; j < sp->dim; ++j) z[j] = zt[j - 1];
        return membership(*sp, z);
    };
}

// ------------------------------------------------ hyperplane diagnostics ---

struct HyperplaneCheck {
    bool holds = true;
    long feasible_tested = 0;
    std::optional<Vec> counterexample;
};

// Randomized audit of <zstar, z> >= ||zstar||^2 over feasible samples drawn
// around zstar at several scales. `zstar` must itself be feasible.
inline HyperplaneCheck supporting_hyperplane_holds(const ConstraintSet& s, const Vec& zstar,
                                                   long n_feasible, RngStream& rng) {
    if (!membership(s, zstar)) {
        throw std::invalid_argument("supporting_hyperplane_holds: anchor point is not feasible");
    }
    const double r2 = norm2(zstar);
    static const double scales[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    HyperplaneCheck out;
    long attempts = 0;
    const long max_attempts = 400 * std::max<long>(n_feasible, 1);
    Vec z(s.dim);
    while (out.feasible_tested < n_feasible && attempts < max_attempts) {
        const double sc = scales[attempts % 5];
        ++attempts;
        for (int j = 0; j < s.dim; ++j) z[j] = zstar[j] + sc * rng.normal();
        if (!membership(s, z)) continue;
        ++out.feasible_tested;
        if (dot(zstar, z) < r2 - 1e-9 * std::max(1.0, r2)) {
            out.holds = false;
            out.counterexample = z;
            return out;
        }
    }
    return out;
}

// --------------------------------------------------------- standardization --

// Rewrites a set over x in the standard-normal coordinates z with
// x = A z + mu, A A^T = Sigma: membership_z(z) = membership_x(A z + mu).
inline ConstraintSet standardize(const ConstraintSet& sx, const Vec& mu, const Mat& sigma) {
    if (static_cast<int>(mu.size()) != sx.dim || sigma.rows != sx.dim || sigma.cols != sx.dim) {
        throw std::invalid_argument("standardize: mean/covariance dimension mismatch");
    }
    const Mat A = cholesky(sigma);
    ConstraintSet sz;
    sz.dim = sx.dim;
    sz.regime = Regime::fixed;
    sz.z1star = 0.0;
    ConstraintSet sx_copy = sx;
    Vec mu_copy = mu;
    sz.constraints.push_back([sx_copy, A, mu_copy](const Vec& z) {
        Vec x = matvec(A, z);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += mu_copy[j];
        return min_constraint(sx_copy, x);
    });
    sz.single_dominating_halfspace = false;
    sz.name = sx.name + "-standardized";
    return sz;
}

// Cost in the standard coordinates: h_z(z) = h_x(A z + mu).
inline std::function<double(const Vec&)> standardize_cost(std::function<double(const Vec&)> h,
                                                          const Mat& A, const Vec& mu) {
    return [h = std::move(h), A, mu](const Vec& z) {
        Vec x = matvec(A, z);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += mu[j];
        return h(x);
    };
}

// Inverse standardization map: z = A^{-1}(x - mu) for lower-triangular A.
inline Vec unstandardize_point(const Mat& A, const Vec& mu, const Vec& z) {
    Vec x = matvec(A, z);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += mu[j];
    return x;
}

inline Vec standardize_point(const Mat& A, const Vec& mu, const Vec& x) {
    Vec r(x);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= mu[j];
    return solve_lower(A, r);
}

// -------------------------------------------------------------- factories --

// { z : z_1 >= z1star } in dimension d.
inline ConstraintSet make_halfspace(int dim, double z1star) {
    if (dim < 1) throw std::invalid_argument("make_halfspace: dimension must be >= 1");
    ConstraintSet s;
    s.dim = dim;
    s.regime = Regime::translation;
    s.z1star = z1star;
    s.constraints.push_back([z1star](const Vec& z) { return z[0] - z1star; });
    BoundaryDescriptor b;  // g == 0
    b.terms.push_back({0.0, std::vector<int>(dim - 1, 0)});
    s.boundary = b;
    s.single_dominating_halfspace = true;
    Vec zs(dim, 0.0);
    zs[0] = z1star;
    s.analytic_nearest = zs;
    s.name = "halfspace";
    return s;
}

// General halfspace { z : <a, z> >= c } (fixed regime; used for tests and
// for pulled-back linear constraints).
inline ConstraintSet make_halfspace_general(const Vec& a, double c) {
    ConstraintSet s;
    s.dim = static_cast<int>(a.size());
    s.regime = Regime::fixed;
    const double a2 = norm2(a);
    if (!(a2 > 0.0)) throw std::invalid_argument("make_halfspace_general: zero normal vector");
    s.z1star = c / std::sqrt(a2);  // distance from origin when c > 0
    Vec aa = a;
    s.constraints.push_back([aa, c](const Vec& z) { return dot(aa, z) - c; });
    s.single_dominating_halfspace = true;
    if (c > 0.0) {
        Vec zs(a);
        for (auto& v : zs) v *= c / a2;
        s.analytic_nearest = zs;
    }
    s.name = "halfspace-general";
    return s;
}

// { z : z_1 >= z1star + (1/2) zt' A zt } with A symmetric positive
// semidefinite over the trailing coordinates. A = 2 I gives the paraboloid
// z_1 >= z1star + ||zt||^2.
inline ConstraintSet make_quadratic(int dim, double z1star, const Mat& A) {
    if (dim < 2) throw std::invalid_argument("make_quadratic: dimension must be >= 2");
    if (A.rows != dim - 1 || A.cols != dim - 1) {
        throw std::invalid_argument("make_quadratic: curvature matrix must be (d-1) x (d-1)");
    }
    ConstraintSet s;
    s.dim = dim;
    s.regime = Regime::translation;
    s.z1star = z1star;
    Mat Ac = A;
    s.constraints.push_back([z1star, Ac, dim](const Vec& z) {
        double q = 0.0;
        for (int i = 1; i < dim; ++i) {
            for (int j = 1; j < dim; ++j) q += z[i] * Ac(i - 1, j - 1) * z[j];
        }
        return z[0] - z1star - 0.5 * q;
    });
    BoundaryDescriptor b;
    for (int i = 1; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const double coeff = (i == j) ? 0.5 * Ac(i - 1, j - 1) : Ac(i - 1, j - 1);
            if (coeff == 0.0) continue;
            std::vector<int> e(dim - 1, 0);
            e[i - 1] += 1;
            e[j - 1] += 1;
            b.terms.push_back({coeff, e});
        }
    }
    if (b.terms.empty()) b.terms.push_back({0.0, std::vector<int>(dim - 1, 0)});
    s.boundary = b;
    s.single_dominating_halfspace = true;
    Vec zs(dim, 0.0);
    zs[0] = z1star;
    s.analytic_nearest = zs;
    s.name = "quadratic";
    return s;
}

inline ConstraintSet make_quadratic(int dim, double z1star) {
    return make_quadratic(dim, z1star, Mat::scaled_identity(dim - 1, 2.0));
}

// Translating set { z : z_1 >= z1star + g(zt) } for a caller-supplied
// polynomial boundary g >= 0 with g(0) = 0.
inline ConstraintSet make_poly_boundary(int dim, double z1star, BoundaryDescriptor g,
                                        const std::string& label = "poly-boundary") {
    ConstraintSet s;
    s.dim = dim;
    s.regime = Regime::translation;
    s.z1star = z1star;
    BoundaryDescriptor gc = g;
    s.constraints.push_back([z1star, gc, dim](const Vec& z) {
        Vec zt(z.begin() + 1, z.end());
        return z[0] - z1star - gc.eval_trailing(zt);
    });
    s.boundary = std::move(g);
    s.single_dominating_halfspace = true;
    Vec zs(dim, 0.0);
    zs[0] = z1star;
    s.analytic_nearest = zs;
    s.name = label;
    return s;
}

// Scaling-regime set z1star * S1 where S1 = { z : z_1 >= 1 + g(zt) }:
// membership(z) <=> membership_base(z / z1star).
inline ConstraintSet make_scaled_poly(int dim, double z1star, BoundaryDescriptor g,
                                      const std::string& label = "scaled-poly") {
    if (!(z1star > 0.0)) {
        throw std::invalid_argument("make_scaled_poly: scale factor must be positive");
    }
    ConstraintSet s;
    s.dim = dim;
    s.regime = Regime::scaling;
    s.z1star = z1star;
    BoundaryDescriptor gc = g;
    s.constraints.push_back([z1star, gc, dim](const Vec& z) {
        Vec zt(dim - 1);
        for (int j = 1; j < dim; ++j) zt[j - 1] = z[j] / z1star;
        return z[0] / z1star - 1.0 - gc.eval_trailing(zt);
    });
    s.boundary = std::move(g);
    s.single_dominating_halfspace = true;
    Vec zs(dim, 0.0);
    zs[0] = z1star;
    s.analytic_nearest = zs;
    s.name = label;
    return s;
}

// Closed ball of radius r around `center`.
inline ConstraintSet make_ball(const Vec& center, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("make_ball: radius must be positive");
    ConstraintSet s;
    s.dim = static_cast<int>(center.size());
    s.regime = Regime::fixed;
    Vec c = center;
    const double cn = norm(center);
    s.z1star = std::max(0.0, cn - r);
    s.constraints.push_back([c, r](const Vec& z) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) d2 += (z[j] - c[j]) * (z[j] - c[j]);
        return r * r - d2;
    });
    s.single_dominating_halfspace = cn > r;  // origin outside => nearest point supports
    if (cn > r) {
        Vec zs = center;
        for (auto& v : zs) v *= (cn - r) / cn;
        s.analytic_nearest = zs;
    }
    s.name = "ball";
    return s;
}

// Two-lobe set { (z1, z2) : |z2| >= c + z1^2 } in the plane. Its two closest
// points to the origin are (0, +-c); no single hyperplane supports it.
inline ConstraintSet make_two_lobe(double c = 1.0) {
    if (!(c > 0.0)) throw std::invalid_argument("make_two_lobe: offset must be positive");
    ConstraintSet s;
    s.dim = 2;
    s.regime = Regime::fixed;
    s.z1star = c;
    s.constraints.push_back(
        [c](const Vec& z) { return std::fabs(z[1]) - c - z[0] * z[0]; });
    s.single_dominating_halfspace = false;
    s.analytic_nearest = Vec{0.0, c};
    s.name = "two-lobe";
    return s;
}

// ------------------------------------------- configure-to-order scenario --
//
// Three-product demand model: a common component is consumed at per-unit
// rates (3, 1, 2) by products 1..3, product 1 is always filled first, and
// products 2 and 3 carry demand caps U2, U3. Demand X = (X1, X2, X3) goes
// (partially) unmet exactly when
//   X2 + 2*X3 >= 3*X1,   X2 >= U2,   X3 >= U3,
// with U_i = gamma * E[X_i] tying rarity to the cap factor gamma.

inline bool cto_feasible(const Vec& X, double gamma, const Vec& means) {
    return X[1] + 2.0 * X[2] >= 3.0 * X[0] && X[1] >= gamma * means[1] &&
           X[2] >= gamma * means[2];
}

// Lost sales under the optimal fulfillment split when product 3's price is
// three times product 2's: fill product 3 first up to its cap and the
// component budget, then product 2 with what remains.
inline double cto_cost(const Vec& X, double U2, double U3) {
    const double f3 = std::min(std::min(X[2], 1.5 * X[0]), U3);
    const double f2 = std::min(std::min(3.0 * X[0] - 2.0 * f3, X[1]), U2);
    return X[1] - f2 + 3.0 * (X[2] - f3);
}

// The unmet-demand set above as a ConstraintSet over x, with one constraint
// per inequality (their boundaries are the meaningful facets).
inline ConstraintSet make_cto_set(double gamma, const Vec& means) {
    if (!(gamma > 0.0)) throw std::invalid_argument("make_cto_set: gamma must be positive");
    if (means.size() != 3) {
        throw std::invalid_argument("make_cto_set: needs the three marginal means");
    }
    ConstraintSet s;
    s.dim = 3;
    s.regime = Regime::fixed;
    s.z1star = 0.0;
    const double u2 = gamma * means[1];
    const double u3 = gamma * means[2];
    s.constraints.push_back(
        [](const Vec& x) { return x[1] + 2.0 * x[2] - 3.0 * x[0]; });
    s.constraints.push_back([u2](const Vec& x) { return x[1] - u2; });
    s.constraints.push_back([u3](const Vec& x) { return x[2] - u3; });
    s.single_dominating_halfspace = false;
    s.name = "cto";
    return s;
}

// Union of { z1 >= 2 } and the box [-3, -2.5] x [-1, 1] in the plane: a set
// whose dominating point (2, 0) carries a supporting hyperplane for only
// part of the mass. Encoded as a single max-of-mins constraint.
inline ConstraintSet make_two_sided_demo() {
    ConstraintSet s;
    s.dim = 2;
    s.regime = Regime::fixed;
    s.z1star = 2.0;
    s.constraints.push_back([](const Vec& z) {
        const double right = z[0] - 2.0;
        const double box = std::min(std::min(z[0] + 3.0, -2.5 - z[0]),
                                    std::min(z[1] + 1.0, 1.0 - z[1]));
        return std::max(right, box);
    });
    s.single_dominating_halfspace = false;
    s.analytic_nearest = Vec{2.0, 0.0};
    s.name = "two-sided-demo";
    return s;
}

}  // namespace gctail
