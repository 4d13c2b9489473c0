#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "declab/error.hpp"
#include "declab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace declab;

namespace {

RatMat mat(int n, std::vector<Rational> entries) {
    RatMat m;
    m.n = n;
    m.a = std::move(entries);
    return m;
}

// Independent oracle: integer-coefficient grid scan with double arithmetic.
std::set<std::vector<double>> brute_enumerate(const RatMat& D, double R, int coeff_box) {
    std::set<std::vector<double>> out;
    int n = D.n;
    std::vector<int> m(static_cast<std::size_t>(n), -coeff_box);
    while (true) {
        bool all_zero = true;
        for (int v : m)
            if (v != 0) all_zero = false;
        if (!all_zero) {
            std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
            double norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    xi[static_cast<std::size_t>(i)] +=
                        to_double(D.at(i, j)) * m[static_cast<std::size_t>(j)];
            }
            for (double c : xi) norm2 += c * c;
            if (std::sqrt(norm2) <= R + 1e-12) out.insert(xi);
        }
        int d = 0;
        for (; d < n; ++d) {
            if (m[static_cast<std::size_t>(d)] < coeff_box) {
                ++m[static_cast<std::size_t>(d)];
                break;
            }
            m[static_cast<std::size_t>(d)] = -coeff_box;
        }
        if (d == n) break;
    }
    return out;
}

std::set<std::vector<double>> as_set(const std::vector<DualVector>& vs) {
    std::set<std::vector<double>> out;
    for (const auto& v : vs) {
        std::vector<double> xi;
        for (const auto& c : v.xi) xi.push_back(to_double(c));
        out.insert(xi);
    }
    return out;
}

} // namespace

TEST_CASE("dual lattice of the identity is the identity") {
    RatMat D = dual_lattice(RatMat::identity(2));
    CHECK(D.at(0, 0) == 1);
    CHECK(D.at(0, 1) == 0);
    CHECK(D.at(1, 0) == 0);
    CHECK(D.at(1, 1) == 1);
}

TEST_CASE("dual lattice of diag(2,1)") {
    RatMat B = mat(2, {Rational(2), Rational(0), Rational(0), Rational(1)});
    RatMat D = dual_lattice(B);
    CHECK(D.at(0, 0) == Rational(1, 2));
    CHECK(D.at(1, 1) == 1);
    CHECK(D.at(0, 1) == 0);
    CHECK(D.at(1, 0) == 0);
}

TEST_CASE("dual lattice of a shear generator matrix") {
    // columns (1,0), (1,1)
    RatMat B = mat(2, {Rational(1), Rational(1), Rational(0), Rational(1)});
    RatMat D = dual_lattice(B);
    // brute-force pairing check: D^T B must be the identity
    RatMat P = rat_mul(rat_transpose(D), B);
    CHECK(P.at(0, 0) == 1);
    CHECK(P.at(0, 1) == 0);
    CHECK(P.at(1, 0) == 0);
    CHECK(P.at(1, 1) == 1);
    CHECK(D.at(0, 0) == 1);
    CHECK(D.at(1, 0) == -1);
    CHECK(D.at(0, 1) == 0);
    CHECK(D.at(1, 1) == 1);

    // no finer lattice satisfies the pairing: proper fractions of dual
    // coefficients must break integrality against some generator
    for (int k0 = -3; k0 <= 3; ++k0)
        for (int k1 = -3; k1 <= 3; ++k1) {
            if ((k0 % 2 == 0) && (k1 % 2 == 0)) continue;
            std::vector<Rational> xi(2, Rational(0));
            for (int i = 0; i < 2; ++i)
                xi[static_cast<std::size_t>(i)] =
                    D.at(i, 0) * Rational(k0, 2) + D.at(i, 1) * Rational(k1, 2);
            bool integral = true;
            for (int col = 0; col < 2; ++col) {
                Rational dot = xi[0] * B.at(0, col) + xi[1] * B.at(1, col);
                if (denominator(dot) != 1) integral = false;
            }
            CHECK_FALSE(integral);
        }
}

TEST_CASE("singular generators are rejected") {
    RatMat B = mat(2, {Rational(1), Rational(2), Rational(2), Rational(4)});
    CHECK_THROWS_WITH_AS(make_lattice(B), "degenerate lattice", Error);
}

TEST_CASE("1-D enumeration order: positive first within equal norm") {
    auto lattice = make_lattice(RatMat::identity(1));
    auto vs = enumerate_dual(lattice, 2.5);
    REQUIRE(vs.size() == 4);
    CHECK(vs[0].xi[0] == 1);
    CHECK(vs[1].xi[0] == -1);
    CHECK(vs[2].xi[0] == 2);
    CHECK(vs[3].xi[0] == -2);
}

TEST_CASE("unit ball of the 2-D integer lattice") {
    auto lattice = make_lattice(RatMat::identity(2));
    auto vs = enumerate_dual(lattice, 1.0);
    REQUIRE(vs.size() == 4);
    for (const auto& v : vs) CHECK(v.norm == doctest::Approx(1.0));
}

TEST_CASE("rectangular dual lattice ball, brute-force oracle") {
    RatMat B = mat(2, {Rational(2), Rational(0), Rational(0), Rational(1)});
    auto lattice = make_lattice(B);
    // |(1/2, +-1)| = sqrt(5)/2 = 1.118..., outside R = 1.1
    auto inner = enumerate_dual(lattice, 1.1);
    CHECK(inner.size() == 6);
    CHECK(as_set(inner) == brute_enumerate(lattice.dual_generators, 1.1, 4));
    // and inside R = 1.12
    auto outer = enumerate_dual(lattice, 1.12);
    CHECK(outer.size() == 10);
    CHECK(as_set(outer) == brute_enumerate(lattice.dual_generators, 1.12, 4));
}

TEST_CASE("enumeration cap") {
    auto lattice = make_lattice(RatMat::identity(2));
    CHECK_THROWS_WITH_AS(enumerate_dual(lattice, 1000.0, 100), "enumeration cap exceeded", Error);
    CHECK_THROWS_AS(enumerate_dual(lattice, 0.0), Error);
    CHECK_THROWS_AS(enumerate_dual(lattice, -1.0), Error);
}

TEST_CASE("double dual returns the original generators") {
    RatMat B = mat(2, {Rational(1), Rational(1, 3), Rational(-2, 5), Rational(1)});
    RatMat DD = dual_lattice(dual_lattice(B));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(DD.at(i, j) == B.at(i, j));
}

TEST_CASE("every enumerated vector pairs integrally with the lattice") {
    RatMat B = mat(2, {Rational(3, 2), Rational(1, 2), Rational(0), Rational(5, 4)});
    auto lattice = make_lattice(B);
    auto vs = enumerate_dual(lattice, 3.0);
    CHECK(vs.size() > 4);
    for (const auto& v : vs) {
        for (int m0 = -3; m0 <= 3; ++m0)
            for (int m1 = -3; m1 <= 3; ++m1) {
                double dot = 0.0;
                for (int i = 0; i < 2; ++i) {
                    double xi = to_double(v.xi[static_cast<std::size_t>(i)]);
                    dot += xi * (to_double(B.at(i, 0)) * m0 + to_double(B.at(i, 1)) * m1);
                }
                CHECK(std::abs(dot - std::round(dot)) < 1e-10);
            }
    }
}

TEST_CASE("enumeration is monotone in the radius") {
    RatMat B = mat(2, {Rational(1), Rational(1, 2), Rational(0), Rational(2)});
    auto lattice = make_lattice(B);
    auto small = as_set(enumerate_dual(lattice, 1.7));
    auto large = as_set(enumerate_dual(lattice, 2.9));
    for (const auto& v : small) CHECK(large.count(v) == 1);
    CHECK(large.size() > small.size());
}

TEST_CASE("3-D lattice round trip") {
    RatMat B = mat(3, {Rational(1), Rational(0), Rational(1, 2), Rational(0), Rational(2),
                       Rational(0), Rational(0), Rational(0), Rational(1)});
    auto lattice = make_lattice(B);
    RatMat P = rat_mul(rat_transpose(lattice.dual_generators), B);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(P.at(i, j) == (i == j ? 1 : 0));
    auto vs = enumerate_dual(lattice, 1.0);
    CHECK(!vs.empty());
}
