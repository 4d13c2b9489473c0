#include "declab/lattice.hpp"

#include "declab/error.hpp"

#include <algorithm>
#include <cmath>

namespace declab {

double LatticeSpec::max_dual_generator_norm() const {
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = to_double(dual_generators.at(i, j));
            s += v * v;
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

RatMat dual_lattice(const RatMat& B) {
    if (B.n < 1 || B.n > 3) throw Error("lattice dimension must be 1..3");
    return rat_inverse_transpose(B);
}

LatticeSpec make_lattice(const RatMat& B, bool exact) {
    LatticeSpec spec;
    spec.n = B.n;
    spec.generators = B;
    spec.exact = exact;
    if (!exact && std::abs(to_double(rat_det(B))) <= 1e-12) throw Error("degenerate lattice");
    spec.dual_generators = dual_lattice(B); // throws on exact zero det
    return spec;
}

double default_truncation_radius(const LatticeSpec& lattice) {
    return 8.0 * lattice.max_dual_generator_norm();
}

namespace {

Rational norm_sq(const std::vector<Rational>& v) {
    Rational s = 0;
    for (const auto& c : v) s += c * c;
    return s;
}

bool lex_greater(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

} // namespace

std::vector<DualVector> enumerate_dual(const LatticeSpec& lattice, double radius, std::size_t cap) {
    if (!(radius > 0.0)) throw Error("enumeration radius must be positive");
    const int n = lattice.n;
    const Rational r2 = rational_of(radius) * rational_of(radius);

    // xi = D m  =>  m = B^T xi, so |m_i| <= |column_i(B)| * R. That box bound
    // makes the integer scan exhaustive within the ball.
    std::vector<long long> bound(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double colnorm = 0.0;
        for (int k = 0; k < n; ++k) {
            double v = to_double(lattice.generators.at(k, i));
            colnorm += v * v;
        }
        bound[static_cast<std::size_t>(i)] =
            static_cast<long long>(std::floor(std::sqrt(colnorm) * radius + 1e-9)) + 1;
    }

    std::vector<DualVector> out;
    std::vector<long long> m(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = -bound[static_cast<std::size_t>(i)];

    while (true) {
        bool all_zero = true;
        for (int i = 0; i < n; ++i)
            if (m[static_cast<std::size_t>(i)] != 0) all_zero = false;
        if (!all_zero) {
            std::vector<Rational> xi(static_cast<std::size_t>(n), Rational(0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    xi[static_cast<std::size_t>(i)] +=
                        lattice.dual_generators.at(i, j) * Rational(m[static_cast<std::size_t>(j)]);
            if (norm_sq(xi) <= r2) {
                DualVector dv;
                dv.norm = std::sqrt(to_double(norm_sq(xi)));
                dv.xi = std::move(xi);
                dv.coeffs = m;
                out.push_back(std::move(dv));
                if (out.size() > cap) throw Error("enumeration cap exceeded");
            }
        }
        // odometer over the coefficient box
        int d = 0;
        for (; d < n; ++d) {
            auto di = static_cast<std::size_t>(d);
            if (m[di] < bound[di]) {
                ++m[di];
                break;
            }
            m[di] = -bound[di];
        }
        if (d == n) break;
    }

    std::sort(out.begin(), out.end(), [](const DualVector& a, const DualVector& b) {
        Rational na = norm_sq(a.xi), nb = norm_sq(b.xi);
        if (na != nb) return na < nb;
        return lex_greater(a.xi, b.xi);
    });
    return out;
}

} // namespace declab
