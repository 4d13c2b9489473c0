#pragma once

#include "declab/flux.hpp"
#include "declab/lattice.hpp"
#include "declab/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace declab {

enum class DecayClass { decays, stalls, inconclusive };

std::string to_string(DecayClass c);

struct DecayReport {
    double mean_state = 0.0;       // I
    std::vector<double> times;
    std::vector<double> e_values;  // e(t) = normalized integral of |u - I|
    DecayClass classification = DecayClass::inconclusive;
    int cells = 0;                 // finest dimension size, refinement metadata
};

/// e(t) per sampled time with I = mean(fields[0]); classification left inconclusive.
DecayReport decay_curve(const Trajectory& trajectory);

struct ClassifyOptions {
    double theta_decay = 0.2;
    double theta_stall = 0.8;
    double trend_slack = 1.02; // multiplicative slack for the cross-grid trend
};

/// Refinement-coupled terminal-ratio classifier. Reports must share sample
/// times and be ordered by increasing resolution.
DecayClass classify_decay(const std::vector<DecayReport>& refinements,
                          const ClassifyOptions& options = {});

/// Exact non-decaying entropy solution u = I + delta sin(2 pi (xi.x - a t)),
/// valid because xi.phi is affine (slope a) on the wave's range.
struct TravelingWave {
    std::vector<Rational> xi;      // dual vector, true coordinates
    std::vector<long long> coeffs; // integer frequency in lattice coordinates (B^T xi)
    Rational mean_state;           // I
    Rational delta;
    Rational slope;                // a
    Rational intercept;            // b
    AffineInterval interval;

    /// Value at lattice coordinates y in [0,1)^n (the solver's frame).
    double eval_lattice(double t, const std::vector<double>& y) const;
};

/// Constructs the wave from the first (smallest |xi|) ND2 witness; nullopt
/// when the criterion holds. delta = 0.9 x distance from I to the nearest
/// interval endpoint (1 when the interval is the whole line).
std::optional<TravelingWave> traveling_wave(const FluxPL& flux, const LatticeSpec& lattice,
                                            const Rational& I, double radius,
                                            std::size_t cap = kDualEnumerationCap);

PeriodicField sample_wave(const TravelingWave& wave, const LatticeSpec& lattice,
                          std::vector<int> dims, double t = 0.0);

struct ComparisonResult {
    bool ordered = true;
    double max_violation = 0.0; // max over sampled times/cells of solve(u0a) - solve(u0b)
};

/// Monotone dependence on initial data; both runs use a common time step.
/// Requires u0a <= u0b pointwise.
ComparisonResult comparison_check(const FluxPL& flux, const PeriodicField& u0a,
                                  const PeriodicField& u0b, double T,
                                  const std::vector<double>& sample_times,
                                  const SolveOptions& options = {});

struct SqueezeReport {
    std::vector<double> times;           // integer multiples of h
    std::vector<double> lower_violation; // max over x of v_-(x) - u(t, x - t)
    std::vector<double> upper_violation; // max over x of u(t, x + t) - v_+(x)
    double eps_h = 0.0;                  // scheme tolerance C sqrt(h)
    bool pass = false;
};

struct SqueezeOptions {
    int num_samples = 8;
    double C = 1.5; // frozen envelope constant for eps_h = C sqrt(h)
    SolveOptions solve;
};

/// For the absolute-value flux and sign-changing u0: checks
/// u(t, x - t) >= v_-(x) - eps_h and u(t, x + t) <= v_+(x) + eps_h at sample
/// times chosen as integer multiples of h (exact index shifts).
SqueezeReport squeeze_check(const FluxPL& flux, const PeriodicField& u0, double T,
                            const SqueezeOptions& options = {});

} // namespace declab
