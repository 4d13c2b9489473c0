#include "declab/decay.hpp"

#include "declab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace declab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

std::string to_string(DecayClass c) {
    switch (c) {
    case DecayClass::decays: return "decays";
    case DecayClass::stalls: return "stalls";
    default: return "inconclusive";
    }
}

DecayReport decay_curve(const Trajectory& trajectory) {
    DecayReport rep;
    rep.mean_state = mean(trajectory.fields.front());
    rep.cells = *std::max_element(trajectory.fields.front().dims.begin(),
                                  trajectory.fields.front().dims.end());
    rep.times = trajectory.times;
    rep.e_values.reserve(trajectory.fields.size());
    PeriodicField constant = trajectory.fields.front();
    std::fill(constant.data.begin(), constant.data.end(), rep.mean_state);
    for (const auto& f : trajectory.fields) rep.e_values.push_back(l1_distance(f, constant));
    return rep;
}

DecayClass classify_decay(const std::vector<DecayReport>& refinements,
                          const ClassifyOptions& options) {
    if (refinements.size() < 2) throw Error("classify_decay needs >= 2 refinement levels");
    const auto& times0 = refinements.front().times;
    for (const auto& r : refinements) {
        if (r.times.size() != times0.size()) throw Error("inconsistent sample grids");
        for (std::size_t i = 0; i < times0.size(); ++i)
            if (std::abs(r.times[i] - times0[i]) > 1e-12) throw Error("inconsistent sample grids");
    }
    for (std::size_t i = 1; i < refinements.size(); ++i)
        if (refinements[i].cells <= refinements[i - 1].cells)
            throw Error("refinements must have increasing resolution");

    std::vector<double> ratio;
    for (const auto& r : refinements) {
        double e0 = r.e_values.front(), eT = r.e_values.back();
        ratio.push_back(e0 <= 1e-14 ? 0.0 : eT / e0);
    }
    bool all_below = true, non_increasing = true, increasing = true;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        if (ratio[i] > options.theta_decay) all_below = false;
        if (i > 0) {
            if (ratio[i] > ratio[i - 1] * options.trend_slack) non_increasing = false;
            if (ratio[i] * options.trend_slack < ratio[i - 1]) increasing = false;
        }
    }
    if (all_below || non_increasing) return DecayClass::decays;
    if (increasing && ratio.back() >= options.theta_stall) return DecayClass::stalls;
    return DecayClass::inconclusive;
}

double TravelingWave::eval_lattice(double t, const std::vector<double>& y) const {
    double phase = -to_double(slope) * t;
    for (std::size_t d = 0; d < coeffs.size(); ++d)
        phase += static_cast<double>(coeffs[d]) * y[d];
    return to_double(mean_state) + to_double(delta) * std::sin(kTwoPi * phase);
}

std::optional<TravelingWave> traveling_wave(const FluxPL& flux, const LatticeSpec& lattice,
                                            const Rational& I, double radius, std::size_t cap) {
    Nd2Report report = check_nd2(flux, lattice, I, radius, cap);
    if (report.verdict == Nd2Verdict::holds) return std::nullopt;
    const Nd2Witness& w = report.witnesses.front();
    TravelingWave wave;
    wave.xi = w.xi.xi;
    wave.coeffs = w.xi.coeffs;
    wave.mean_state = I;
    wave.slope = w.interval.slope;
    wave.intercept = w.interval.intercept;
    wave.interval = w.interval;
    // Stay strictly inside the affine interval so the wave's range never
    // touches a kink of the flux.
    Rational room(0);
    bool bounded = false;
    if (w.interval.lo) {
        room = I - *w.interval.lo;
        bounded = true;
    }
    if (w.interval.hi) {
        Rational right = *w.interval.hi - I;
        room = bounded ? std::min(room, right) : right;
        bounded = true;
    }
    wave.delta = bounded ? Rational(room * Rational(9, 10)) : Rational(1);
    return wave;
}

PeriodicField sample_wave(const TravelingWave& wave, const LatticeSpec& lattice,
                          std::vector<int> dims, double t) {
    return make_field_from(lattice, std::move(dims),
                           [&](const std::vector<double>& y) { return wave.eval_lattice(t, y); });
}

ComparisonResult comparison_check(const FluxPL& flux, const PeriodicField& u0a,
                                  const PeriodicField& u0b, double T,
                                  const std::vector<double>& sample_times,
                                  const SolveOptions& options) {
    if (u0a.dims != u0b.dims) throw Error("comparison fields must share the grid");
    for (std::size_t i = 0; i < u0a.size(); ++i)
        if (u0a.data[i] > u0b.data[i]) throw Error("comparison requires u0a <= u0b pointwise");
    // The discrete comparison principle needs both runs on the same dt sequence.
    SolveOptions common = options;
    common.dt_cap = std::min(cfl_limit(u0a, flux), cfl_limit(u0b, flux)) * options.cfl;
    Trajectory a = solve(flux, u0a, T, sample_times, common);
    Trajectory b = solve(flux, u0b, T, sample_times, common);
    ComparisonResult res;
    res.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.fields.size(); ++k)
        for (std::size_t i = 0; i < a.fields[k].size(); ++i)
            res.max_violation = std::max(res.max_violation,
                                         a.fields[k].data[i] - b.fields[k].data[i]);
    res.ordered = res.max_violation <= 1e-12;
    return res;
}

namespace {

bool is_abs_flux(const FluxPL& flux) {
    if (flux.n != 1) return false;
    auto intervals = affine_intervals(flux.component(0));
    if (intervals.size() != 2) return false;
    const auto& l = intervals[0];
    const auto& r = intervals[1];
    return !l.lo && l.hi && *l.hi == 0 && l.slope == -1 && l.intercept == 0 && r.lo &&
           *r.lo == 0 && !r.hi && r.slope == 1 && r.intercept == 0;
}

} // namespace

SqueezeReport squeeze_check(const FluxPL& flux, const PeriodicField& u0, double T,
                            const SqueezeOptions& options) {
    if (!is_abs_flux(flux)) throw Error("squeeze check requires the absolute-value flux");
    if (u0.dim() != 1) throw Error("squeeze check is one-dimensional");
    if (!(min_value(u0) < 0.0 && max_value(u0) > 0.0))
        throw Error("squeeze check requires sign-changing initial data");

    const int N = u0.dims[0];
    const double h = 1.0 / N;
    // Sample times must be integer multiples of h so that x -> x -+ t is an
    // exact index shift.
    const long total_cells = std::lround(T / h);
    if (total_cells < options.num_samples) throw Error("T too small for requested squeeze samples");
    const long stride = total_cells / options.num_samples;
    std::vector<double> samples;
    std::vector<long> shifts;
    for (int i = 1; i <= options.num_samples; ++i) {
        long m = stride * i;
        samples.push_back(static_cast<double>(m) * h);
        shifts.push_back(m);
    }

    Trajectory traj = solve(flux, u0, samples.back(), samples, options.solve);

    std::vector<double> vminus(u0.size()), vplus(u0.size());
    for (std::size_t j = 0; j < u0.size(); ++j) {
        vminus[j] = std::min(u0.data[j], 0.0);
        vplus[j] = std::max(u0.data[j], 0.0);
    }

    SqueezeReport rep;
    rep.eps_h = options.C * std::sqrt(h);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        long m = shifts[k - 1] % N;
        const auto& u = traj.fields[k].data;
        double lower = 0.0, upper = 0.0;
        for (long j = 0; j < N; ++j) {
            long jm = (j - m % N + N) % N;
            long jp = (j + m) % N;
            lower = std::max(lower, vminus[static_cast<std::size_t>(j)] -
                                        u[static_cast<std::size_t>(jm)]);
            upper = std::max(upper, u[static_cast<std::size_t>(jp)] -
                                        vplus[static_cast<std::size_t>(j)]);
        }
        rep.times.push_back(traj.times[k]);
        rep.lower_violation.push_back(lower);
        rep.upper_violation.push_back(upper);
    }
    rep.pass = true;
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        if (rep.lower_violation[i] > rep.eps_h || rep.upper_violation[i] > rep.eps_h)
            rep.pass = false;
    return rep;
}

} // namespace declab
