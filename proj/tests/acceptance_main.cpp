// Acceptance suite: each criterion prints exactly one [PASS]/[FAIL] line with
// the measured quantities and its tolerance. Run with no arguments for the
// whole suite or with a criterion number (1..10) for a single one.

#include "declab/corpus.hpp"
#include "declab/decay.hpp"
#include "declab/flux.hpp"
#include "declab/lattice.hpp"
#include "declab/microscope.hpp"
#include "declab/solver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace declab;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Frozen scheme-envelope constant for sqrt(h) error bounds (criteria 4-6),
// calibrated once on the finest grids of this suite.
constexpr double kEnvelopeC = 1.5;

LatticeSpec unit_lattice(int n) { return make_lattice(RatMat::identity(n)); }

PeriodicField sine_field(int N, double offset, double amplitude) {
    return make_field_from(unit_lattice(1), {N}, [&](const std::vector<double>& y) {
        return offset + amplitude * std::sin(kTwoPi * y[0]);
    });
}

FluxPL burgers() { return burgers_sampled(Rational(1, 50), Rational(-2), Rational(2)); }

struct TrajectoryCase {
    std::string name;
    Trajectory trajectory;
};

// Shared scenario corpus for the conservation / entropy / contraction criteria.
std::vector<TrajectoryCase> solver_corpus(bool diagnostics) {
    SolveOptions opt;
    opt.diagnostics = diagnostics;
    std::vector<TrajectoryCase> cases;
    std::vector<double> samples = {0.25, 0.5, 0.75, 1.0};

    cases.push_back({"abs sign-changing N=400",
                     solve(abs_flux(), sine_field(400, 0.0, 1.0), 1.0, samples, opt)});
    cases.push_back({"abs translating N=400",
                     solve(abs_flux(), sine_field(400, 0.5, 0.3), 1.0, samples, opt)});
    cases.push_back(
        {"burgers sine N=200", solve(burgers(), sine_field(200, 0.0, 1.0), 1.0, samples, opt)});
    cases.push_back(
        {"burgers offset N=200", solve(burgers(), sine_field(200, 0.2, 0.8), 1.0, samples, opt)});

    auto lattice2 = unit_lattice(2);
    FluxPL flux2 = make_flux({Rational(-2), Rational(0), Rational(2)},
                             {{Rational(2), Rational(-2)}, {Rational(0), Rational(0)},
                              {Rational(2), Rational(2)}});
    auto u2 = make_field_from(lattice2, {96, 96}, [&](const std::vector<double>& y) {
        return 0.4 * std::sin(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]) + 0.1;
    });
    cases.push_back({"2-D kinked flux 96x96", solve(flux2, u2, 0.5, {0.25, 0.5}, opt)});

    auto wave = traveling_wave(abs_flux(), unit_lattice(1), Rational(1), 1.0);
    auto w0 = sample_wave(*wave, unit_lattice(1), {300}, 0.0);
    cases.push_back({"injected wave N=300", solve(abs_flux(), w0, 1.0, samples, opt)});
    return cases;
}

bool criterion1() {
    double worst = 0.0;
    for (const auto& c : solver_corpus(false)) {
        double m0 = mean(c.trajectory.fields.front());
        for (const auto& f : c.trajectory.fields)
            worst = std::max(worst, std::abs(mean(f) - m0));
    }
    bool pass = worst <= 1e-12;
    std::printf("[%s] criterion 1: conservation of the mean (worst drift %.3e <= 1e-12)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion2() {
    SolveOptions opt;
    opt.diagnostics = true;
    double worst = 0.0;
    auto check = [&](const FluxPL& flux, const PeriodicField& u0, double T) {
        auto traj = solve(flux, u0, T, {T}, opt);
        double lo = min_value(u0), hi = max_value(u0);
        for (int i = 0; i < 5; ++i) {
            double k = lo + (hi - lo) * i / 4.0;
            worst = std::max(worst, entropy_residual(traj, k));
        }
    };
    check(burgers(), sine_field(200, 0.0, 1.0), 0.8);
    check(abs_flux(), sine_field(200, 0.0, 1.0), 0.8);
    check(abs_flux(), sine_field(200, 0.3, 0.7), 0.8);
    bool pass = worst <= 1e-10;
    std::printf("[%s] criterion 2: entropy consistency (max positive residual %.3e <= 1e-10)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion3() {
    double worst = -1e300;
    for (const auto& c : solver_corpus(false)) {
        auto rep = decay_curve(c.trajectory);
        for (std::size_t i = 1; i < rep.e_values.size(); ++i)
            worst = std::max(worst, rep.e_values[i] - rep.e_values[i - 1]);
    }
    bool pass = worst <= 1e-12;
    std::printf("[%s] criterion 3: decay monotonicity (max e-increase %.3e <= 1e-12)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion4() {
    std::vector<double> samples = {1.0, 2.0, 3.0};
    std::vector<int> grids = {100, 200, 400};

    std::vector<DecayReport> dec;
    for (int N : grids)
        dec.push_back(decay_curve(solve(burgers(), sine_field(N, 0.0, 1.0), 3.0, samples)));
    bool decays = classify_decay(dec) == DecayClass::decays;
    double worst_ratio = 0.0;
    for (const auto& r : dec) worst_ratio = std::max(worst_ratio, r.e_values.back() / r.e_values.front());

    std::vector<DecayReport> st;
    Trajectory finest;
    for (int N : grids) {
        auto traj = solve(abs_flux(), sine_field(N, 0.5, 0.3), 3.0, samples);
        st.push_back(decay_curve(traj));
        if (N == 400) finest = traj;
    }
    bool stalls = classify_decay(st) == DecayClass::stalls;

    // translating profile: compare u(3, .) with u0(. - 3) via min-shift L1
    const int N = 400;
    auto u0 = sine_field(N, 0.5, 0.3);
    const auto& uT = finest.fields.back();
    double best = 1e300;
    for (int s = 0; s < N; ++s) {
        double dist = 0.0;
        for (int i = 0; i < N; ++i)
            dist += std::abs(uT.data[static_cast<std::size_t>(i)] -
                             u0.data[static_cast<std::size_t>((i + s) % N)]);
        best = std::min(best, dist / N);
    }
    double envelope = kEnvelopeC * std::sqrt(1.0 / N);
    bool shift_ok = best <= envelope;

    bool pass = decays && worst_ratio <= 0.2 && stalls && shift_ok;
    std::printf("[%s] criterion 4: dichotomy (decays: %s, e(T)/e(0) %.3f <= 0.2; stalls: %s, "
                "min-shift L1 %.3e <= %.3e)\n",
                pass ? "PASS" : "FAIL", decays ? "yes" : "no", worst_ratio,
                stalls ? "yes" : "no", best, envelope);
    return pass;
}

bool criterion5() {
    auto corpus = random_flux_corpus(0xACCE55, 60);
    int violated = 0;
    bool consistent = true;
    for (const auto& c : corpus) {
        double radius = default_truncation_radius(c.lattice);
        bool v = check_nd2(c.flux, c.lattice, c.mean_state, radius).verdict ==
                 Nd2Verdict::violated;
        auto wave = traveling_wave(c.flux, c.lattice, c.mean_state, radius);
        if (v != wave.has_value()) consistent = false;
        if (v) ++violated;
    }

    // inject 1-D waves with non-trivial amplitude into the solver; each case
    // runs on a frequency-matched grid for the same number of characteristic
    // times (T scaled by the wave's CFL speed)
    int injected = 0;
    double worst_order = 10.0, worst_env = 0.0;
    for (const auto& c : corpus) {
        if (c.flux.n != 1 || injected >= 12) continue;
        auto wave = traveling_wave(c.flux, c.lattice, c.mean_state,
                                   default_truncation_radius(c.lattice));
        if (!wave || to_double(wave->delta) < 0.02) continue;
        ++injected;
        const int base = 128 * static_cast<int>(std::max(1LL, std::llabs(wave->coeffs[0])));
        auto probe = sample_wave(*wave, c.lattice, {base}, 0.0);
        double alpha = 1.0 / cfl_limit(probe, c.flux) / base;
        double T = 0.4 / std::max(1.0, alpha);
        auto err = [&](int N) {
            auto u0 = sample_wave(*wave, c.lattice, {N}, 0.0);
            auto traj = solve(c.flux, u0, T, {T});
            auto exact = sample_wave(*wave, c.lattice, {N}, T);
            return l1_distance(traj.fields.back(), exact);
        };
        double eN = err(base), e2N = err(2 * base);
        worst_env = std::max(worst_env, eN / (kEnvelopeC * std::sqrt(1.0 / base)));
        if (e2N > 1e-12) worst_order = std::min(worst_order, std::log2(eN / e2N));
    }
    bool pass = consistent && violated >= 10 && injected >= 8 && worst_order >= 0.4 &&
                worst_env <= 1.0;
    std::printf("[%s] criterion 5: wave round-trip (60 cases, %d violated, consistent: %s; %d "
                "injected, min order %.2f >= 0.4, error/envelope %.2f <= 1)\n",
                pass ? "PASS" : "FAIL", violated, consistent ? "yes" : "no", injected,
                worst_order, worst_env);
    return pass;
}

bool criterion6() {
    bool pass = true;
    std::ostringstream detail;
    for (int N : {200, 400}) {
        auto u0 = sine_field(N, 0.0, 1.0);
        SqueezeOptions opt;
        opt.C = kEnvelopeC;
        SqueezeReport rep = squeeze_check(abs_flux(), u0, 1.0, opt);
        double worst = 0.0;
        for (std::size_t i = 0; i < rep.times.size(); ++i)
            worst = std::max({worst, rep.lower_violation[i], rep.upper_violation[i]});
        pass = pass && rep.pass;
        detail << " N=" << N << ": " << worst << " <= " << rep.eps_h << ";";
    }
    std::printf("[%s] criterion 6: squeeze inequalities (%s)\n", pass ? "PASS" : "FAIL",
                detail.str().c_str());
    return pass;
}

bool criterion7() {
    std::vector<int> r_list = {32, 64};
    std::vector<GridField> fields;
    for (int r : r_list)
        fields.push_back(make_grid_field({16384}, [&](const std::vector<double>& x) {
            return std::sin(kTwoPi * r * x[0]);
        }));
    auto p_grid = make_p_grid(fields, 17);
    auto young = young_estimate(fields, r_list, p_grid, {1});
    double sup_err = 0.0;
    for (std::size_t l = 0; l < p_grid.size(); ++l) {
        double p = p_grid[l];
        double expect = p <= -1.0 ? 1.0 : (p >= 1.0 ? 0.0 : std::acos(p) / M_PI);
        sup_err = std::max(sup_err, std::abs(young.value(0, l) - expect));
    }
    bool pass = sup_err <= 0.02;
    std::printf("[%s] criterion 7: young-measure oracle (sup error %.4f <= 0.02 at r=64, 2^14 "
                "samples)\n",
                pass ? "PASS" : "FAIL", sup_err);
    return pass;
}

bool criterion8() {
    DetRng rng(0xACCE558);
    int failures = 0;
    double worst_psd = 0.0, worst_var = 0.0, worst_cs = 0.0, worst_cont = 0.0;
    for (int scenario = 0; scenario < 20; ++scenario) {
        std::vector<int> r_list = {8, 16, 32};
        std::vector<GridField> fields;
        long long variant = rng.uniform_int(0, 2);
        bool planar = scenario % 4 == 3;
        std::vector<int> dims = planar ? std::vector<int>{128, 128} : std::vector<int>{2048};
        double amp = 0.5 + rng.uniform();
        double duty = 0.2 + 0.6 * rng.uniform();
        double tilt = static_cast<double>(rng.uniform_int(0, 2)); // mode direction in 2-D
        std::uint64_t noise_seed = rng.next_u64();
        for (int r : r_list) {
            if (variant == 0)
                fields.push_back(make_grid_field(dims, [&](const std::vector<double>& x) {
                    double phase = x[0] + (planar ? tilt * x[1] : 0.0);
                    return amp * std::sin(kTwoPi * r * phase);
                }));
            else if (variant == 1)
                fields.push_back(make_grid_field(dims, [&](const std::vector<double>& x) {
                    double phase = x[0] + (planar ? tilt * x[1] : 0.0);
                    return std::sin(kTwoPi * r * phase) > 1.2 * (duty - 0.5) ? amp : -0.6 * amp;
                }));
            else
                fields.push_back(noise_field(noise_seed + static_cast<std::uint64_t>(r), dims));
        }
        auto p_grid = make_p_grid(fields, 17);
        auto young = young_estimate(fields, r_list, p_grid,
                                    planar ? std::vector<int>{16, 16} : std::vector<int>{16});
        HMeasureOptions opt;
        opt.m_list = {4, 8};
        opt.r_list = r_list;
        auto res = hmeasure_estimate(fields, young, opt);
        auto props = check_hmeasure_properties(res.matrix, young);
        if (!props.pass()) ++failures;
        worst_psd = std::min(worst_psd, props.psd_floor);
        worst_var = std::max(worst_var, props.var_worst);
        worst_cs = std::max(worst_cs, props.cs_excess);
        worst_cont = std::max(worst_cont, props.cont_excess);
    }
    bool pass = failures == 0;
    std::printf("[%s] criterion 8: H-measure structure on 20 scenarios (min eig/trace %.2e >= "
                "-1e-6, max Var %.3f <= 1.1, CS excess %.2e <= 1e-6, continuity excess %.3f <= "
                "0.1)\n",
                pass ? "PASS" : "FAIL", worst_psd, worst_var, worst_cs, worst_cont);
    return pass;
}

bool criterion9() {
    std::vector<int> r_list = {8, 16, 32, 64};
    std::vector<GridField> strong, osc;
    for (int r : r_list) {
        strong.push_back(make_grid_field({16384}, [&](const std::vector<double>& x) {
            return 0.8 * std::sin(kTwoPi * (x[0] - 0.375)) +
                   (0.4 / r) * std::sin(3.0 * kTwoPi * x[0]);
        }));
        osc.push_back(make_grid_field({16384}, [&](const std::vector<double>& x) {
            return 0.8 * std::sin(kTwoPi * r * x[0]);
        }));
    }
    HMeasureOptions opt;
    opt.m_list = {4, 8, 16};
    opt.r_list = r_list;

    auto ps = make_p_grid(strong, 17);
    auto ys = young_estimate(strong, r_list, ps, {256});
    double mass_strong = hmeasure_estimate(strong, ys, opt).matrix.total_mass();

    auto po = make_p_grid(osc, 17);
    auto yo = young_estimate(osc, r_list, po, {256});
    auto Ho = hmeasure_estimate(osc, yo, opt).matrix;
    double mass_osc = Ho.total_mass();

    double at_bins = 0.0;
    for (int p = 0; p < static_cast<int>(po.size()); ++p)
        for (int b = 0; b < 2; ++b) at_bins += Ho.at(p, p, b).real();
    double concentration = at_bins / mass_osc;

    bool pass = mass_strong <= 0.10 * mass_osc && concentration >= 0.9;
    std::printf("[%s] criterion 9: strong convergence detector (strong mass %.4f <= 10%% of "
                "%.4f; concentration %.3f >= 0.9)\n",
                pass ? "PASS" : "FAIL", mass_strong, mass_osc, concentration);
    return pass;
}

bool criterion10() {
    // (a) exact traveling wave in two spatial dimensions
    auto lattice2 = unit_lattice(2);
    auto wave = traveling_wave(affine_flux({Rational(1), Rational(0)}), lattice2, Rational(0), 1.5);
    std::vector<int> k_list = {4, 8};
    std::vector<int> eval = {32, 32, 32};
    auto fields = rescale_wave(*wave, k_list, eval);
    auto pw = make_p_grid(fields, 9);
    auto yw = young_estimate(fields, k_list, pw, {4, 4, 4});
    HMeasureOptions opt;
    opt.m_list = {2};
    opt.r_list = k_list;
    opt.pad_factor = 2;
    opt.spacetime = true;
    auto rw = hmeasure_estimate(fields, yw, opt);
    auto loc_wave = localization_mass(rw.matrix, lattice2, 0.2, 1.5);

    // (b) rescaled 1-D Burgers solution: every direction lies on a dual ray,
    // so the fraction is 1 by construction; the ladder must not decrease
    auto lattice1 = unit_lattice(1);
    auto u0 = sine_field(512, 0.0, 1.0);
    std::vector<double> samples;
    const double T = 8.0;
    for (int i = 1; i <= 256; ++i) samples.push_back(T * i / 256);
    auto traj = solve(burgers(), u0, T, samples);
    std::vector<int> kb = {2, 4, 8};
    auto bfields = rescale_sequence(traj, kb, {64, 64});
    auto pb = make_p_grid(bfields, 9);
    auto yb = young_estimate(bfields, kb, pb, {8, 8});
    HMeasureOptions optb;
    optb.m_list = {3, 4};
    optb.r_list = kb;
    optb.spacetime = true;
    auto rb = hmeasure_estimate(bfields, yb, optb);
    double prev_frac = 0.0;
    bool trend_ok = true;
    double burgers_frac = 0.0;
    for (const auto& level : rb.per_level) {
        auto loc = localization_mass(level, lattice1, 0.2, 2.0);
        if (loc.fraction < prev_frac - 1e-12) trend_ok = false;
        prev_frac = loc.fraction;
        burgers_frac = loc.fraction;
    }

    // (c) isotropic negative control in 2+1 dimensions
    std::vector<GridField> noise;
    for (int k : k_list) noise.push_back(noise_field(99 + static_cast<std::uint64_t>(k), eval));
    auto pn = make_p_grid(noise, 9);
    auto yn = young_estimate(noise, k_list, pn, {4, 4, 4});
    auto rn = hmeasure_estimate(noise, yn, opt);
    auto loc_noise = localization_mass(rn.matrix, lattice2, 0.2, 1.5);

    bool pass = loc_wave.fraction >= 0.9 && burgers_frac >= 0.8 && trend_ok &&
                loc_noise.fraction <= 2.0 * loc_noise.baseline;
    std::printf("[%s] criterion 10: localization (wave %.3f >= 0.9; burgers %.3f >= 0.8, trend "
                "%s; control %.3f <= 2 x baseline %.3f)\n",
                pass ? "PASS" : "FAIL", loc_wave.fraction, burgers_frac,
                trend_ok ? "ok" : "broken", loc_noise.fraction, loc_noise.baseline);
    return pass;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3,
                                                   criterion4, criterion5, criterion6,
                                                   criterion7, criterion8, criterion9,
                                                   criterion10};
    int failures = 0;
    if (argc > 1) {
        int which = std::atoi(argv[1]);
        if (which < 1 || which > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "usage: acceptance [1..10]\n");
            return 2;
        }
        failures = criteria[static_cast<std::size_t>(which - 1)]() ? 0 : 1;
    } else {
        for (auto& c : criteria)
            if (!c()) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
