#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace declab {

// Exact rational scalar. Doubles convert exactly (they are dyadic rationals),
// so every input has an exact representation; whether *comparisons* are exact
// or tolerance-based is decided by the provenance flag carried on the
// containing object (lattice / flux), not by the scalar type.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_of(double x);

// Accepts "p/q", plain integers ("-3"), and decimal literals ("0.25").
std::optional<Rational> parse_rational(const std::string& s);

// |r| as a rational.
Rational rat_abs(const Rational& r);

// Small dense rational matrix, row-major, n x n with n <= 3 in practice.
struct RatMat {
    int n = 0;
    std::vector<Rational> a; // a[i*n + j]

    const Rational& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    Rational& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    static RatMat identity(int n);
};

Rational rat_det(const RatMat& m);

// Transpose of the inverse, computed via the adjugate. Throws on det == 0.
RatMat rat_inverse_transpose(const RatMat& m);

RatMat rat_transpose(const RatMat& m);
RatMat rat_mul(const RatMat& a, const RatMat& b);

// Rank of an arbitrary list of row vectors over Q (exact Gaussian elimination).
int rat_rank(std::vector<std::vector<Rational>> rows);

// A nonzero rational vector orthogonal to all given rows, or empty when the
// rows span the full space. `dim` is the ambient dimension.
std::vector<Rational> rat_nullspace_vector(std::vector<std::vector<Rational>> rows, int dim);

} // namespace declab
