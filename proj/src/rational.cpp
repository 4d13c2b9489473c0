#include "declab/rational.hpp"

#include "declab/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace declab {

using boost::multiprecision::cpp_int;

Rational rational_of(double x) {
    if (!std::isfinite(x)) throw Error("cannot convert non-finite double to rational");
    return Rational(x);
}

Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

std::optional<Rational> parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) return std::nullopt;

    auto is_int = [](const std::string& v) {
        std::size_t i = (v[0] == '+' || v[0] == '-') ? 1 : 0;
        if (i >= v.size()) return false;
        for (; i < v.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
        return true;
    };

    auto slash = t.find('/');
    if (slash != std::string::npos) {
        std::string num = t.substr(0, slash), den = t.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        cpp_int d(den);
        if (d == 0) return std::nullopt;
        return Rational(cpp_int(num), d);
    }
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        std::string whole = t.substr(0, dot), frac = t.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '+' || whole[0] == '-')) whole = whole.substr(1);
        if (whole.empty()) whole = "0";
        if (frac.empty()) frac = "0";
        if (!is_int(whole) || !is_int(frac)) return std::nullopt;
        cpp_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        cpp_int num = cpp_int(whole) * scale + cpp_int(frac);
        Rational r(num, scale);
        return neg ? Rational(-r) : r;
    }
    if (!is_int(t)) return std::nullopt;
    return Rational(cpp_int(t));
}

RatMat RatMat::identity(int n) {
    RatMat m;
    m.n = n;
    m.a.assign(static_cast<std::size_t>(n) * n, Rational(0));
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Rational rat_det(const RatMat& m) {
    switch (m.n) {
    case 1:
        return m.at(0, 0);
    case 2:
        return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    case 3:
        return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
               m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
               m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    default:
        throw Error("matrix dimension must be 1..3");
    }
}

RatMat rat_inverse_transpose(const RatMat& m) {
    Rational det = rat_det(m);
    if (det == 0) throw Error("degenerate lattice");
    RatMat r;
    r.n = m.n;
    r.a.assign(m.a.size(), Rational(0));
    if (m.n == 1) {
        r.at(0, 0) = Rational(1) / det;
        return r;
    }
    if (m.n == 2) {
        // inv = adj/det; inv^T laid out directly
        r.at(0, 0) = m.at(1, 1) / det;
        r.at(1, 0) = -m.at(0, 1) / det;
        r.at(0, 1) = -m.at(1, 0) / det;
        r.at(1, 1) = m.at(0, 0) / det;
        return r;
    }
    auto cof = [&](int i, int j) {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
        int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        return m.at(r0, c0) * m.at(r1, c1) - m.at(r0, c1) * m.at(r1, c0);
    };
    // inverse-transpose = cofactor matrix / det (no extra transpose needed)
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = cof(i, j) / det;
    return r;
}

RatMat rat_transpose(const RatMat& m) {
    RatMat r;
    r.n = m.n;
    r.a.assign(m.a.size(), Rational(0));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) r.at(i, j) = m.at(j, i);
    return r;
}

RatMat rat_mul(const RatMat& a, const RatMat& b) {
    if (a.n != b.n) throw Error("matrix dimension mismatch");
    RatMat r;
    r.n = a.n;
    r.a.assign(a.a.size(), Rational(0));
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k)
            for (int j = 0; j < a.n; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
    return r;
}

int rat_rank(std::vector<std::vector<Rational>> rows) {
    if (rows.empty()) return 0;
    std::size_t cols = rows[0].size();
    int rank = 0;
    std::size_t pivot_col = 0;
    for (std::size_t r = 0; r < rows.size() && pivot_col < cols; ++pivot_col) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][pivot_col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][pivot_col] == 0) continue;
            Rational f = rows[i][pivot_col] / rows[r][pivot_col];
            for (std::size_t j = pivot_col; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
        ++rank;
    }
    return rank;
}

std::vector<Rational> rat_nullspace_vector(std::vector<std::vector<Rational>> rows, int dim) {
    // Reduce to row echelon form, then back-substitute one free variable.
    std::size_t cols = static_cast<std::size_t>(dim);
    std::vector<int> pivot_of_col(cols, -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][c] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Rational f = rows[i][c] / rows[r][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        pivot_of_col[c] = static_cast<int>(r);
        ++r;
    }
    int free_col = -1;
    for (std::size_t c = 0; c < cols; ++c)
        if (pivot_of_col[c] < 0) {
            free_col = static_cast<int>(c);
            break;
        }
    if (free_col < 0) return {};
    std::vector<Rational> v(cols, Rational(0));
    v[static_cast<std::size_t>(free_col)] = 1;
    for (std::size_t c = 0; c < cols; ++c) {
        int p = pivot_of_col[c];
        if (p < 0) continue;
        // pivot row: rows[p][c]*v[c] + rows[p][free]*v[free] = 0
        v[c] = -rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(free_col)] /
               rows[static_cast<std::size_t>(p)][c];
    }
    return v;
}

} // namespace declab
