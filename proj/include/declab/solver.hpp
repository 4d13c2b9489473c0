#pragma once

#include "declab/flux.hpp"
#include "declab/lattice.hpp"

#include <functional>
#include <vector>

namespace declab {

/// Cell-average grid function on the torus, stored in lattice coordinates
/// (unit torus, C-order with the last dimension fastest). Periodicity is
/// structural: all index arithmetic wraps.
struct PeriodicField {
    std::vector<int> dims;
    std::vector<double> data;
    LatticeSpec lattice;

    std::size_t size() const { return data.size(); }
    int dim() const { return static_cast<int>(dims.size()); }
    double h(int d) const { return 1.0 / dims[static_cast<std::size_t>(d)]; }
};

PeriodicField make_field(const LatticeSpec& lattice, std::vector<int> dims, double fill = 0.0);

/// Fill from a callable of the lattice-coordinate cell center y in [0,1)^n.
PeriodicField make_field_from(const LatticeSpec& lattice, std::vector<int> dims,
                              const std::function<double(const std::vector<double>&)>& f);

/// Arithmetic average of cell values = exact normalized integral of the
/// piecewise-constant representative (compensated, index-ordered summation).
double mean(const PeriodicField& field);

double min_value(const PeriodicField& field);
double max_value(const PeriodicField& field);

/// Normalized L1 distance between two fields on the same grid.
double l1_distance(const PeriodicField& a, const PeriodicField& b);

/// Per-sweep snapshot retained when diagnostics are enabled; enough to replay
/// the sweep exactly for the entropy residual.
struct SweepRecord {
    int dim = 0;
    double dt = 0.0;
    std::vector<double> before;
};

struct Trajectory {
    std::vector<double> times; // starts at 0, strictly increasing
    std::vector<PeriodicField> fields;
    FluxPL flux;
    LatticeSpec lattice;
    std::vector<ScalarPL> effective; // per-dimension directional flux in lattice coordinates
    double cfl = 0.0;
    bool diagnostics = false;
    std::vector<SweepRecord> sweeps;
};

struct SolveOptions {
    double cfl = 0.45;      // fraction of the monotonicity bound; scenarios enforce <= 0.5
    bool diagnostics = false;
    double dt_cap = 0.0;    // optional hard cap (0 = none); used by comparison runs
};

/// phi pushed forward to lattice coordinates: component d is (column d of D) . phi.
std::vector<ScalarPL> effective_flux(const FluxPL& flux, const LatticeSpec& lattice);

/// Largest stable time step (the monotonicity bound cfl = 1): min_d h_d / alpha_d
/// with alpha_d the max |slope| of the effective directional flux over the data range.
double cfl_limit(const PeriodicField& field, const FluxPL& flux);

/// One full dimension-split step: a local Lax-Friedrichs sweep per dimension,
/// order cycled by `parity`. Throws "CFL violation" when dt exceeds the
/// monotonicity bound.
PeriodicField step(const PeriodicField& field, const FluxPL& flux, double dt, int parity = 0);

/// March to T, landing exactly on every requested sample time. fields[0] is u0
/// at t = 0 regardless of the sample list.
Trajectory solve(const FluxPL& flux, const PeriodicField& u0, double T,
                 std::vector<double> sample_times, const SolveOptions& options = {});

/// Max positive part of the per-sweep discrete Kruzhkov residual for entropy
/// level k, in rate units (divided by dt). Needs diagnostics-enabled trajectories.
double entropy_residual(const Trajectory& trajectory, double k);

} // namespace declab
