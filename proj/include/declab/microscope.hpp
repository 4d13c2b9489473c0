#pragma once

#include "declab/decay.hpp"
#include "declab/lattice.hpp"
#include "declab/solver.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace declab {

/// Uniform cell-centered grid over the unit cell [0,1]^D (C-order, last
/// dimension fastest). For space-time analyses D = 1 + n with time first.
struct GridField {
    std::vector<int> dims;
    std::vector<double> data;

    std::size_t size() const { return data.size(); }
    int dim() const { return static_cast<int>(dims.size()); }
};

GridField make_grid_field(std::vector<int> dims,
                          const std::function<double(const std::vector<double>&)>& f);

/// Uniform level grid spanning the sample range with a margin; levels that
/// collide exactly with sample values (atoms) are nudged by half a grid step.
std::vector<double> make_p_grid(const std::vector<GridField>& fields, int levels = 17,
                                double margin_fraction = 0.05);

/// Empirical Young-measure distribution table: u0(w, p) estimates
/// nu_x((p, +inf)) as the fraction of samples above p in spatial window w,
/// pooled over the top half of the oscillation indices.
struct YoungMeasureEstimate {
    std::vector<double> p_grid;
    std::vector<int> field_dims;
    std::vector<int> windows_per_dim; // each divides the matching field dim
    std::vector<double> u0;           // [window][level], window index C-ordered
    std::vector<int> pooled_r;        // r values actually pooled

    std::size_t window_count() const;
    std::size_t window_of_cell(std::size_t cell_linear) const;
    std::size_t window_of_point(const std::vector<double>& x) const;
    double value(std::size_t window, std::size_t level) const;
    int level_of(double p) const; // exact match against p_grid, -1 if absent
};

YoungMeasureEstimate young_estimate(const std::vector<GridField>& fields,
                                    const std::vector<int>& r_list,
                                    const std::vector<double>& p_grid,
                                    const std::vector<int>& windows_per_dim);

/// U_r(x, p) = theta(u_r(x) - p) - u0(window(x), p) with theta(0) = 0.
GridField distribution_field(const GridField& u_r, const YoungMeasureEstimate& young, double p);

/// Angular partition of the unit sphere in frequency space:
///   dim 1 -> the two points +-1; dim 2 -> equal arcs; dim 3 -> 80 faces of a
///   once-subdivided icosahedron (approximately equal area).
struct SphereBinning {
    int dim = 1;
    std::vector<std::vector<double>> centers; // unit vectors

    int count() const { return static_cast<int>(centers.size()); }
    int bin_of(const std::vector<double>& k) const;
};

SphereBinning make_binning(int dim, int arcs = 64);

/// Smooth compactly supported window: K(z) = exp(1 - 1/(1 - |z|^2)) on |z| < 1,
/// scaled to K_m(x) = m^D K(m(x - center)) and normalized to unit discrete mass.
/// Phi_m = sqrt(K_m).
struct WindowSpec {
    std::vector<double> center;
    int m = 4;
};

struct HMeasureMatrix {
    std::vector<double> p_grid;
    SphereBinning bins;
    bool spacetime = false; // first field dimension is time
    int spatial_dim = 1;
    std::vector<double> window_center;
    int m = 0;
    int r = 0;
    std::vector<std::complex<double>> entries; // [(p * P + q) * bins + b]

    std::complex<double> at(int p, int q, int bin) const;
    double total_mass() const;      // sum of diagonal entries (real parts)
    double total_variation() const; // sum of |entries| over all pairs and bins
};

struct LadderLevel {
    int m = 0;
    int r = 0;
    double total_mass = 0.0;
    double max_delta = 0.0; // max entry change vs previous level
};

struct HMeasureResult {
    HMeasureMatrix matrix; // top ladder level
    std::vector<LadderLevel> ladder;
    std::vector<HMeasureMatrix> per_level;
};

struct HMeasureOptions {
    std::vector<int> m_list = {4, 8, 16};
    std::vector<int> r_list = {8, 16, 32, 64}; // parallel to the field list
    std::vector<double> center;                // defaults to the domain midpoint
    int arcs = 64;
    int pad_factor = 4;
    bool spacetime = false;
};

/// Windowed-DFT realization of the quadratic H-measure expression: at each
/// ladder level (m, r), mu^{pq}(bin) = sum over nonzero padded-window
/// frequencies kappa in the bin of F(Phi_m U_r(.,p)) conj F(Phi_m U_r(.,q)).
/// The zero frequency is excluded; padding samples the spectrum off the
/// integer lattice so directional mass is meaningful on periodic data.
HMeasureResult hmeasure_estimate(const std::vector<GridField>& fields,
                                 const YoungMeasureEstimate& young,
                                 const HMeasureOptions& options);

struct HMeasureProperties {
    double psd_floor = 0.0;     // most negative min-eigenvalue / trace over bins, subsets
    double var_worst = 0.0;     // largest total variation over (p,q)
    double cs_excess = 0.0;     // worst |mu_pq| - sqrt(mu_pp mu_qq)
    double cont_excess = 0.0;   // worst Var(mu_p'q - mu_pq) - 2 sqrt(nu((p,p')))
    bool psd_ok = false, var_ok = false, cs_ok = false, cont_ok = false;
    bool pass() const { return psd_ok && var_ok && cs_ok && cont_ok; }
};

struct HMeasurePropertyOptions {
    double psd_tol = 1e-6;
    double var_slack = 0.1;
    double cs_tol = 1e-6;
    double cont_slack = 0.1;
    int max_subset = 4;
};

HMeasureProperties check_hmeasure_properties(const HMeasureMatrix& H,
                                             const YoungMeasureEstimate& nu,
                                             const HMeasurePropertyOptions& options = {});

struct LocalizationReport {
    double fraction = 0.0;      // total-variation mass within angular_tol of S0
    double pole_fraction = 0.0; // mass in bins whose center is within tol of a pole
    double baseline = 0.0;      // sphere-area fraction of the S0 neighborhood
    double angular_tol = 0.0;
    double dual_radius = 0.0;
};

/// Mass fraction of the H-measure near S0 = directions (tau, xi)/|(tau, xi)|
/// with xi in L' \ {0}. Pole bins count through the closure of those rays and
/// are also reported separately. In one space dimension S0 covers the whole
/// circle, so the fraction is 1 by construction; n = 2 runs discriminate.
LocalizationReport localization_mass(const HMeasureMatrix& H, const LatticeSpec& lattice,
                                     double angular_tol, double dual_radius);

/// u_k(t, x) = u(k t, k x) sampled on a fixed space-time evaluation grid
/// (eval_dims = [M_t, M_x...], cell centers, nearest source sample in time,
/// containing source cell in space). Errors when the trajectory cannot
/// resolve the requested k.
std::vector<GridField> rescale_sequence(const Trajectory& trajectory,
                                        const std::vector<int>& k_list,
                                        const std::vector<int>& eval_dims);

/// Same evaluation grid, but from the closed-form wave: u_k is the same wave
/// with frequency k (xi, -a).
std::vector<GridField> rescale_wave(const TravelingWave& wave, const std::vector<int>& k_list,
                                    const std::vector<int>& eval_dims);

} // namespace declab
