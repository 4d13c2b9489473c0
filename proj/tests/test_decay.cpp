#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "declab/corpus.hpp"
#include "declab/decay.hpp"
#include "declab/error.hpp"

#include <cmath>
#include <vector>

using namespace declab;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

LatticeSpec unit_lattice(int n) { return make_lattice(RatMat::identity(n)); }

PeriodicField sine_field(int N, double offset, double amplitude) {
    return make_field_from(unit_lattice(1), {N}, [&](const std::vector<double>& y) {
        return offset + amplitude * std::sin(kTwoPi * y[0]);
    });
}

} // namespace

TEST_CASE("decay curve of constant data is identically zero") {
    auto u0 = make_field(unit_lattice(1), {64}, 0.9);
    auto rep = decay_curve(solve(abs_flux(), u0, 1.0, {0.5, 1.0}));
    CHECK(rep.mean_state == doctest::Approx(0.9));
    for (double e : rep.e_values) CHECK(e == doctest::Approx(0.0));
}

TEST_CASE("analytic traveling wave has constant decay functional 2 delta / pi") {
    // wave for |u| at I = 1: xi = 1, a = 1, delta = 0.9
    auto wave = traveling_wave(abs_flux(), unit_lattice(1), Rational(1), 1.0);
    REQUIRE(wave.has_value());
    const int N = 4096;
    // times aligned with the grid (a t = multiple of h): sampled sums are
    // exact permutations of each other, so e is constant to machine precision
    std::vector<double> times = {0.0, 128.0 / N, 512.0 / N, 1024.0 / N};
    std::vector<double> e_values;
    for (double t : times) {
        auto f = sample_wave(*wave, unit_lattice(1), {N}, t);
        auto base = make_field(unit_lattice(1), {N}, 1.0);
        e_values.push_back(l1_distance(f, base));
    }
    for (double e : e_values) {
        CHECK(e == doctest::Approx(2.0 * 0.9 / M_PI).epsilon(1e-5)); // quadrature oracle
        CHECK(e == doctest::Approx(e_values[0]).epsilon(1e-13));     // t-invariance
    }
}

TEST_CASE("burgers sine data decays strictly") {
    auto burgers = burgers_sampled(Rational(1, 50), Rational(-2), Rational(2));
    auto rep = decay_curve(solve(burgers, sine_field(200, 0.0, 1.0), 3.0, {1.0, 2.0, 3.0}));
    for (std::size_t i = 1; i < rep.e_values.size(); ++i)
        CHECK(rep.e_values[i] < rep.e_values[i - 1]);
}

TEST_CASE("e(t) is non-increasing on every trajectory") {
    DetRng rng(8080);
    auto burgers = burgers_sampled(Rational(1, 40), Rational(-3), Rational(3));
    for (int trial = 0; trial < 4; ++trial) {
        auto u0 = sine_field(120, rng.uniform() - 0.5, 0.5 + rng.uniform());
        auto rep = decay_curve(solve(burgers, u0, 2.0, {0.5, 1.0, 1.5, 2.0}));
        for (std::size_t i = 1; i < rep.e_values.size(); ++i)
            CHECK(rep.e_values[i] <= rep.e_values[i - 1] + 1e-12);
    }
}

TEST_CASE("classifier: burgers decays, translating profile stalls") {
    std::vector<double> samples = {1.0, 2.0, 3.0};
    auto run = [&](const FluxPL& flux, double offset, double amp, int N) {
        return decay_curve(solve(flux, sine_field(N, offset, amp), 3.0, samples));
    };
    auto burgers = burgers_sampled(Rational(1, 50), Rational(-2), Rational(2));
    std::vector<DecayReport> dec = {run(burgers, 0.0, 1.0, 100), run(burgers, 0.0, 1.0, 200),
                                    run(burgers, 0.0, 1.0, 400)};
    CHECK(classify_decay(dec) == DecayClass::decays);

    std::vector<DecayReport> st = {run(abs_flux(), 0.5, 0.3, 100), run(abs_flux(), 0.5, 0.3, 200),
                                   run(abs_flux(), 0.5, 0.3, 400)};
    CHECK(classify_decay(st) == DecayClass::stalls);
}

TEST_CASE("classifier guards and trivial input") {
    auto u0 = make_field(unit_lattice(1), {64}, 0.0);
    auto zero = decay_curve(solve(abs_flux(), u0, 1.0, {0.5, 1.0}));
    auto zero2 = zero;
    zero2.cells = 128;
    CHECK(classify_decay({zero, zero2}) == DecayClass::decays);

    CHECK_THROWS_AS(classify_decay({zero}), Error);
    auto other = zero2;
    other.times.push_back(9.0);
    other.e_values.push_back(0.0);
    CHECK_THROWS_WITH_AS(classify_decay({zero, other}), "inconsistent sample grids", Error);
}

TEST_CASE("traveling wave from the absolute-value flux at mean one") {
    auto wave = traveling_wave(abs_flux(), unit_lattice(1), Rational(1), 1.0);
    REQUIRE(wave.has_value());
    CHECK(wave->xi[0] == 1);
    CHECK(wave->slope == 1);
    CHECK(wave->intercept == 0);
    CHECK(wave->delta == Rational(9, 10));
    // u(t, x) = 1 + 0.9 sin(2 pi (x - t))
    std::vector<double> y = {0.25};
    CHECK(wave->eval_lattice(0.0, y) == doctest::Approx(1.9));
    CHECK(wave->eval_lattice(0.25, y) == doctest::Approx(1.0));
}

TEST_CASE("no wave when the criterion holds") {
    CHECK_FALSE(traveling_wave(abs_flux(), unit_lattice(1), Rational(0), 4.0).has_value());
}

TEST_CASE("globally affine flux in 2-D: wave along the shortest dual vector") {
    auto lattice = unit_lattice(2);
    auto wave = traveling_wave(affine_flux({Rational(2), Rational(1)}), lattice, Rational(5), 3.0);
    REQUIRE(wave.has_value());
    CHECK(wave->xi[0] == 1); // (1,0) sorts first among the unit vectors
    CHECK(wave->xi[1] == 0);
    CHECK(wave->slope == 2); // a = xi . c
    CHECK(wave->delta == 1); // unbounded affine interval: default amplitude
}

TEST_CASE("round trip: wave exists exactly when the criterion fails") {
    auto corpus = random_flux_corpus(0xC0FFEE, 60);
    int violated = 0;
    for (const auto& c : corpus) {
        double radius = default_truncation_radius(c.lattice);
        bool v = check_nd2(c.flux, c.lattice, c.mean_state, radius).verdict ==
                 Nd2Verdict::violated;
        auto wave = traveling_wave(c.flux, c.lattice, c.mean_state, radius);
        CHECK(v == wave.has_value());
        if (!wave) continue;
        ++violated;
        // the wave's range stays strictly inside the witness interval
        double lo = wave->interval.lo ? to_double(*wave->interval.lo) : -1e300;
        double hi = wave->interval.hi ? to_double(*wave->interval.hi) : 1e300;
        double I = to_double(wave->mean_state), delta = to_double(wave->delta);
        CHECK(I - delta > lo - 1e-15);
        CHECK(I + delta < hi + 1e-15);
    }
    CHECK(violated > 10);
    CHECK(violated < 60);
}

TEST_CASE("injected wave is transported at first order by the solver") {
    auto wave = traveling_wave(abs_flux(), unit_lattice(1), Rational(1), 1.0);
    REQUIRE(wave.has_value());
    auto error_at = [&](int N) {
        auto u0 = sample_wave(*wave, unit_lattice(1), {N}, 0.0);
        auto traj = solve(abs_flux(), u0, 0.5, {0.5});
        auto exact = sample_wave(*wave, unit_lattice(1), {N}, 0.5);
        return l1_distance(traj.fields.back(), exact);
    };
    double eN = error_at(100), e2N = error_at(200);
    CHECK(eN <= 1.0 * std::sqrt(1.0 / 100));
    double order = std::log2(eN / e2N);
    CHECK(order >= 0.4);
}

TEST_CASE("comparison check: orderings hold along the run") {
    auto u0 = sine_field(160, 0.1, 0.8);
    auto res_equal = comparison_check(abs_flux(), u0, u0, 1.0, {0.5, 1.0});
    CHECK(res_equal.ordered);

    // v- <= u0 <= v+ for sign-changing data
    auto vminus = u0, vplus = u0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        vminus.data[i] = std::min(u0.data[i], 0.0);
        vplus.data[i] = std::max(u0.data[i], 0.0);
    }
    CHECK(comparison_check(abs_flux(), vminus, u0, 1.0, {0.5, 1.0}).ordered);
    CHECK(comparison_check(abs_flux(), u0, vplus, 1.0, {0.5, 1.0}).ordered);

    auto ca = make_field(unit_lattice(1), {64}, 0.3);
    auto cb = make_field(unit_lattice(1), {64}, 0.9);
    auto res = comparison_check(abs_flux(), ca, cb, 1.0, {1.0});
    CHECK(res.ordered);
    CHECK(res.max_violation == doctest::Approx(-0.6)); // gap preserved exactly

    CHECK_THROWS_AS(comparison_check(abs_flux(), cb, ca, 1.0, {1.0}), Error);
}

TEST_CASE("squeeze inequalities for sign-changing data") {
    auto u0 = sine_field(200, 0.0, 1.0);
    SqueezeReport rep = squeeze_check(abs_flux(), u0, 1.0);
    CHECK(rep.pass);
    CHECK(rep.eps_h == doctest::Approx(1.5 * std::sqrt(1.0 / 200)));
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        CHECK(rep.lower_violation[i] <= rep.eps_h);
        CHECK(rep.upper_violation[i] <= rep.eps_h);
    }
}

TEST_CASE("squeeze preconditions") {
    auto nonneg = make_field_from(unit_lattice(1), {100}, [&](const std::vector<double>& y) {
        return std::max(std::sin(kTwoPi * y[0]), 0.0);
    });
    CHECK_THROWS_AS(squeeze_check(abs_flux(), nonneg, 1.0), Error);
    auto zero = make_field(unit_lattice(1), {100}, 0.0);
    CHECK_THROWS_AS(squeeze_check(abs_flux(), zero, 1.0), Error);
    auto signchanging = sine_field(100, 0.0, 1.0);
    auto burgers = burgers_sampled(Rational(1, 10), Rational(-1), Rational(1));
    CHECK_THROWS_AS(squeeze_check(burgers, signchanging, 1.0), Error);
}
