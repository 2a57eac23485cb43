#pragma once

// Exact rational arithmetic over 128-bit integers and a small two-phase
// simplex solver with Bland's rule. The linear programs solved here are
// tiny (tens of variables and constraints at most), so exact pivoting is
// cheap and gives bit-reproducible, provably optimal vertices.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gctail {

struct Fraction {
    __int128 num = 0;
    __int128 den = 1;

    Fraction() = default;
    Fraction(__int128 n) : num(n), den(1) {}
    Fraction(__int128 n, __int128 d) : num(n), den(d) { normalize(); }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den == 0) throw std::domain_error("fraction: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            den = 1;
            return;
        }
        const __int128 g = gcd128(num, den);
        num /= g;
        den /= g;
    }

    Fraction operator+(const Fraction& o) const { return Fraction(num * o.den + o.num * den, den * o.den); }
    Fraction operator-(const Fraction& o) const { return Fraction(num * o.den - o.num * den, den * o.den); }
    Fraction operator*(const Fraction& o) const { return Fraction(num * o.num, den * o.den); }
    Fraction operator/(const Fraction& o) const {
        if (o.num == 0) throw std::domain_error("fraction: division by zero");
        return Fraction(num * o.den, den * o.num);
    }
    Fraction operator-() const { return Fraction(-num, den); }

    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Fraction& o) const { return !(*this == o); }
    bool operator<(const Fraction& o) const { return num * o.den < o.num * den; }
    bool operator<=(const Fraction& o) const { return num * o.den <= o.num * den; }
    bool operator>(const Fraction& o) const { return o < *this; }
    bool operator>=(const Fraction& o) const { return o <= *this; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        auto i128_str = [](__int128 v) {
            if (v == 0) return std::string("0");
            const bool neg = v < 0;
            if (neg) v = -v;
            std::string s;
            while (v > 0) {
                s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
                v /= 10;
            }
            return neg ? "-" + s : s;
        };
        return den == 1 ? i128_str(num) : i128_str(num) + "/" + i128_str(den);
    }
};

// Minimize c'x subject to A x >= b, x >= 0, with everything rational.
// Exact two-phase tableau simplex; Bland's rule prevents cycling and makes
// the pivot sequence deterministic.
struct LpSolution {
    std::vector<Fraction> x;
    Fraction objective;
};

namespace detail {

struct Tableau {
    // columns: [0, n) structural, [n, n+m) surplus, [n+m, n+2m) artificial
    int m = 0, n = 0;
    std::vector<std::vector<Fraction>> row;  // m rows, width n + 2m
    std::vector<Fraction> rhs;               // length m, kept >= 0
    std::vector<int> basis;                  // length m, column index of basic var

    int width() const { return n + 2 * m; }
};

inline void pivot(Tableau& t, int r, int c) {
    const Fraction piv = t.row[r][c];
    for (auto& v : t.row[r]) v = v / piv;
    t.rhs[r] = t.rhs[r] / piv;
    for (int i = 0; i < t.m; ++i) {
        if (i == r) continue;
        const Fraction f = t.row[i][c];
        if (f.num == 0) continue;
        for (int j = 0; j < t.width(); ++j) t.row[i][j] = t.row[i][j] - f * t.row[r][j];
        t.rhs[i] = t.rhs[i] - f * t.rhs[r];
    }
    t.basis[r] = c;
}

// Runs Bland-rule simplex minimizing `cost` (a full-width cost vector),
// with columns >= col_limit barred from entering. Returns objective value.
inline Fraction run_simplex(Tableau& t, const std::vector<Fraction>& cost, int col_limit) {
    for (;;) {
        // reduced costs r_j = c_j - c_B' B^{-1} A_j (tableau rows are B^{-1} A)
        int enter = -1;
        for (int j = 0; j < col_limit; ++j) {
            Fraction r = cost[j];
            for (int i = 0; i < t.m; ++i) {
                if (cost[t.basis[i]].num != 0) r = r - cost[t.basis[i]] * t.row[i][j];
            }
            if (r < Fraction(0)) {
                enter = j;
                break;  // Bland: smallest improving index
            }
        }
        if (enter < 0) break;
        int leave = -1;
        Fraction best_ratio;
        for (int i = 0; i < t.m; ++i) {
            if (t.row[i][enter] > Fraction(0)) {
                const Fraction ratio = t.rhs[i] / t.row[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && t.basis[i] < t.basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) throw std::runtime_error("simplex: objective unbounded below");
        pivot(t, leave, enter);
    }
    Fraction obj(0);
    for (int i = 0; i < t.m; ++i) {
        if (cost[t.basis[i]].num != 0) obj = obj + cost[t.basis[i]] * t.rhs[i];
    }
    return obj;
}

}  // namespace detail

inline LpSolution simplex_min(const std::vector<std::vector<Fraction>>& A,
                              const std::vector<Fraction>& b, const std::vector<Fraction>& c) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    detail::Tableau t;
    t.m = m;
    t.n = n;
    t.row.assign(m, std::vector<Fraction>(n + 2 * m, Fraction(0)));
    t.rhs.assign(m, Fraction(0));
    t.basis.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(A[i].size()) != n) {
            throw std::invalid_argument("simplex_min: constraint row width mismatch");
        }
        // A x - s + a = b with b >= 0 (flip rows with negative rhs)
        const bool flip = b[i] < Fraction(0);
        for (int j = 0; j < n; ++j) t.row[i][j] = flip ? -A[i][j] : A[i][j];
        t.row[i][n + i] = Fraction(flip ? 1 : -1);  // surplus
        t.row[i][n + m + i] = Fraction(1);          // artificial
        t.rhs[i] = flip ? -b[i] : b[i];
        t.basis[i] = n + m + i;
    }

    // Phase 1: minimize the artificial sum.
    std::vector<Fraction> phase1(t.width(), Fraction(0));
    for (int i = 0; i < m; ++i) phase1[n + m + i] = Fraction(1);
    const Fraction infeas = detail::run_simplex(t, phase1, t.width());
    if (infeas > Fraction(0)) {
        throw std::runtime_error("simplex_min: infeasible constraint system");
    }
    // Drive any degenerate artificial out of the basis.
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] >= n + m) {
            int c2 = -1;
            for (int j = 0; j < n + m; ++j) {
                if (t.row[i][j].num != 0) {
                    c2 = j;
                    break;
                }
            }
            if (c2 >= 0) detail::pivot(t, i, c2);
            // else: redundant row, harmless to leave (artificial stays at 0)
        }
    }

    // Phase 2: original objective, artificials barred.
    std::vector<Fraction> phase2(t.width(), Fraction(0));
    for (int j = 0; j < n; ++j) phase2[j] = c[j];
    const Fraction obj = detail::run_simplex(t, phase2, n + m);

    LpSolution sol;
    sol.x.assign(n, Fraction(0));
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] < n) sol.x[t.basis[i]] = t.rhs[i];
    }
    sol.objective = obj;
    return sol;
}

}  // namespace gctail
