#pragma once

// Small dense linear algebra: vectors, row-major matrices, Cholesky,
// triangular solves, determinants, and the axis-alignment rotation used to
// put a dominating point on the first coordinate axis. Dimensions here are
// tiny (d <= ~9), so everything is straightforward dense code.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gctail {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat scaled_identity(int n, double s) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return dot(x, x); }
inline double norm(const Vec& x) { return std::sqrt(norm2(x)); }

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec mat_t_vec(const Mat& m, const Vec& x) {
    Vec y(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) y[j] += m(i, j) * x[i];
    }
    return y;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double v = a(i, k);
            for (int j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
        }
    }
    return c;
}

inline Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    }
    return t;
}

inline double frobenius_distance(const Mat& a, const Mat& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) s += (a.a[i] - b.a[i]) * (a.a[i] - b.a[i]);
    return std::sqrt(s);
}

// Lower-triangular Cholesky factor A with A A^T = sigma. Requires symmetry
// to 1e-12 (relative) and strictly positive pivots; failures name the pivot.
inline Mat cholesky(const Mat& sigma) {
    const int n = sigma.rows;
    if (n != sigma.cols) throw std::invalid_argument("cholesky: matrix not square");
    double maxabs = 0.0, maxdiag = 0.0;
    for (int i = 0; i < n; ++i) {
        maxdiag = std::max(maxdiag, std::fabs(sigma(i, i)));
        for (int j = 0; j < n; ++j) maxabs = std::max(maxabs, std::fabs(sigma(i, j)));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (std::fabs(sigma(i, j) - sigma(j, i)) > 1e-12 * std::max(1.0, maxabs)) {
                throw std::invalid_argument("cholesky: matrix not symmetric");
            }
        }
    }
    Mat L(n, n);
    for (int j = 0; j < n; ++j) {
        double diag = sigma(j, j);
        for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (diag <= 1e-12 * std::max(1.0, maxdiag)) {
            throw std::runtime_error("cholesky: non-positive-definite input, pivot " +
                                     std::to_string(j));
        }
        L(j, j) = std::sqrt(diag);
        for (int i = j + 1; i < n; ++i) {
            double s = sigma(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

inline Vec solve_lower(const Mat& L, const Vec& b) {
    const int n = L.rows;
    Vec x(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= L(i, j) * x[j];
        x[i] = s / L(i, i);
    }
    return x;
}

// Solves L^T x = b for lower-triangular L.
inline Vec solve_lower_transposed(const Mat& L, const Vec& b) {
    const int n = L.rows;
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= L(j, i) * x[j];
        x[i] = s / L(i, i);
    }
    return x;
}

// Determinant via LU with partial pivoting (diagnostic use only).
inline double det(Mat m) {
    const int n = m.rows;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            d = -d;
        }
        if (m(k, k) == 0.0) return 0.0;
        d *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

// Orthogonal map with R z* = (||z*||, 0, ..., 0). Built as a sign-fixed
// Householder reflection; the resulting matrix is symmetric and involutory,
// so the same `apply` also maps (||z*||, 0, ..., 0) back to z*.
struct Rotation {
    int dim = 0;
    Vec anchor;        // the point this rotation aligns
    bool identity = true;
    double sign = 1.0;
    Vec v;             // Householder vector
    double vtv = 1.0;

    Vec apply(const Vec& w) const {
        if (static_cast<int>(w.size()) != dim) {
            throw std::invalid_argument("rotation: dimension mismatch");
        }
        if (identity) return w;
        const double c = 2.0 * dot(v, w) / vtv;
        Vec out(dim);
        for (int i = 0; i < dim; ++i) out[i] = -sign * (w[i] - c * v[i]);
        return out;
    }

    Mat matrix() const {
        Mat R(dim, dim);
        Vec e(dim, 0.0);
        for (int j = 0; j < dim; ++j) {
            e[j] = 1.0;
            const Vec col = apply(e);
            for (int i = 0; i < dim; ++i) R(i, j) = col[i];
            e[j] = 0.0;
        }
        return R;
    }
};

inline Rotation make_rotation(const Vec& zstar) {
    const double r = norm(zstar);
    if (!(r > 0.0)) throw std::invalid_argument("make_rotation: zero anchor vector");
    Rotation rot;
    rot.dim = static_cast<int>(zstar.size());
    rot.anchor = zstar;
    Vec u(zstar);
    for (auto& c : u) c /= r;
    if (u[0] > 1.0 - 1e-14) {
        rot.identity = true;  // already aligned with e1
        return rot;
    }
    rot.identity = false;
    rot.sign = (u[0] >= 0.0) ? 1.0 : -1.0;
    rot.v = u;
    rot.v[0] += rot.sign;
    rot.vtv = norm2(rot.v);
    return rot;
}

}  // namespace gctail
