#pragma once

#include "declab/rational.hpp"

#include <cstddef>
#include <vector>

namespace declab {

/// Period lattice L (columns of `generators`) together with its dual L'
/// (columns of `dual_generators`); the dual satisfies D^T B = I exactly.
struct LatticeSpec {
    int n = 1;
    RatMat generators;      // B
    RatMat dual_generators; // D = B^{-T}
    bool exact = true;      // inputs were rational-born

    double max_dual_generator_norm() const;
};

/// D = B^{-T}. Columns of D generate {xi : xi . x in Z for all x in L}.
/// Throws "degenerate lattice" when det B = 0.
RatMat dual_lattice(const RatMat& B);

LatticeSpec make_lattice(const RatMat& B, bool exact = true);

/// Nonzero dual vector xi = D m together with its integer coefficients m.
struct DualVector {
    std::vector<Rational> xi;
    std::vector<long long> coeffs;
    double norm = 0.0;
};

inline constexpr std::size_t kDualEnumerationCap = 200000;

/// All xi in L' \ {0} with |xi| <= R, sorted by |xi| and, among equal norms,
/// lexicographically larger first (so in 1-D: 1, -1, 2, -2, ...).
/// The radius comparison is exact (R enters as a dyadic rational).
std::vector<DualVector> enumerate_dual(const LatticeSpec& lattice, double radius,
                                       std::size_t cap = kDualEnumerationCap);

/// Default truncation radius for criterion checks: 8 x largest dual generator norm.
double default_truncation_radius(const LatticeSpec& lattice);

} // namespace declab
