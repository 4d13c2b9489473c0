#pragma once

#include "declab/lattice.hpp"
#include "declab/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace declab {

/// Continuous piecewise-linear scalar function with exact breakpoint algebra.
/// Outside [bp.front(), bp.back()] it continues affinely with the boundary
/// slopes. Cached double arrays serve the solver hot path; the rationals are
/// authoritative for affinity decisions.
struct ScalarPL {
    std::vector<Rational> bp;  // strictly increasing
    std::vector<Rational> val; // same length
    bool exact = true;

    // caches (built by finalize)
    std::vector<double> bp_d;
    std::vector<double> val_d;
    std::vector<double> slope_d; // slope_d[j] on [bp[j], bp[j+1]]

    void finalize();
    double eval(double u) const;
    /// Max |slope| over the state interval [lo, hi] (affine extension included).
    double max_abs_slope(double lo, double hi) const;
    Rational slope_exact(std::size_t piece) const;
};

/// Piecewise-linear flux R -> R^n sharing one breakpoint list across components.
struct FluxPL {
    int n = 1;
    std::vector<Rational> bp;
    std::vector<std::vector<Rational>> val; // val[j] in R^n
    bool exact = true;
    bool sampled = false; // sampled from a smooth flux: affinity verdicts carry a caveat
    double sample_resolution = 0.0;

    ScalarPL component(int d) const;
    ScalarPL directional(const std::vector<Rational>& xi) const; // xi . phi
    std::vector<double> eval(double u) const;
};

FluxPL make_flux(std::vector<Rational> breakpoints, std::vector<std::vector<Rational>> values,
                 bool exact = true);

/// Maximal closed interval on which a scalar PL function is affine.
struct AffineInterval {
    std::optional<Rational> lo; // nullopt = -infinity
    std::optional<Rational> hi; // nullopt = +infinity
    Rational slope;
    Rational intercept; // g(u) = slope*u + intercept on the interval
};

/// Maximal affine intervals covering R; adjacent intervals share their kink
/// point and have distinct slopes (exact for rational-born data, 1e-12 otherwise).
std::vector<AffineInterval> affine_intervals(const ScalarPL& g);

/// True when `u` lies strictly inside one of the intervals.
std::optional<AffineInterval> affine_vicinity(const std::vector<AffineInterval>& intervals,
                                              const Rational& u);

enum class Nd2Verdict { holds, violated };

struct Nd2Witness {
    DualVector xi;
    AffineInterval interval; // xi.phi is affine here and mean lies strictly inside
};

struct Nd2Report {
    Nd2Verdict verdict = Nd2Verdict::holds;
    std::vector<Nd2Witness> witnesses; // all violating xi within the ball, sorted
    double truncation_radius = 0.0;
    Rational mean_state;   // the level the criterion was checked at
    bool sampled_flux = false;
    double sample_resolution = 0.0;
};

/// Decay criterion: violated iff some nonzero dual vector with |xi| <= R makes
/// xi.phi affine on an open interval containing I. Exact for PL fluxes.
Nd2Report check_nd2(const FluxPL& flux, const LatticeSpec& lattice, const Rational& I,
                    double radius, std::size_t cap = kDualEnumerationCap);

struct NondegReport {
    bool nondegenerate = true;
    std::vector<double> witness; // unit xi with xi.phi locally constant, when degenerate
};

/// Pointwise non-degeneracy at state u: degenerate iff the slopes of the
/// pieces meeting u fail to span R^n.
NondegReport nondeg_at(const FluxPL& flux, const Rational& u);

/// Exact primitive of the depth-k Cantor-function approximation, sampled to PL
/// on the stair's breakpoint set. depth = 0 is the primitive of the identity
/// stair. Guarded to depth <= 12.
FluxPL cantor_flux(int depth);

FluxPL abs_flux();
FluxPL affine_flux(const std::vector<Rational>& c);

/// Burgers flux u^2/2 sampled to PL at resolution h on [lo, hi]; carries the
/// sampled-flux caveat.
FluxPL burgers_sampled(const Rational& h, const Rational& lo, const Rational& hi);

std::string interval_to_string(const AffineInterval& iv);

} // namespace declab
