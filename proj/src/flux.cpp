#include "declab/flux.hpp"

#include "declab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace declab {

namespace {
constexpr double kSlopeTol = 1e-12; // slope equality tolerance for float-born data
} // namespace

void ScalarPL::finalize() {
    if (bp.size() < 2 || bp.size() != val.size()) throw Error("flux needs >= 2 breakpoints with matching values");
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
        if (!(bp[j] < bp[j + 1])) throw Error("breakpoints must be strictly increasing");
    bp_d.resize(bp.size());
    val_d.resize(val.size());
    for (std::size_t j = 0; j < bp.size(); ++j) {
        bp_d[j] = to_double(bp[j]);
        val_d[j] = to_double(val[j]);
    }
    slope_d.resize(bp.size() - 1);
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
        slope_d[j] = to_double((val[j + 1] - val[j]) / (bp[j + 1] - bp[j]));
}

Rational ScalarPL::slope_exact(std::size_t piece) const {
    return (val[piece + 1] - val[piece]) / (bp[piece + 1] - bp[piece]);
}

double ScalarPL::eval(double u) const {
    const std::size_t J = slope_d.size();
    if (u <= bp_d.front()) return val_d.front() + slope_d.front() * (u - bp_d.front());
    if (u >= bp_d.back()) return val_d.back() + slope_d.back() * (u - bp_d.back());
    auto it = std::upper_bound(bp_d.begin(), bp_d.end(), u);
    std::size_t j = static_cast<std::size_t>(it - bp_d.begin()) - 1;
    if (j >= J) j = J - 1;
    return val_d[j] + slope_d[j] * (u - bp_d[j]);
}

double ScalarPL::max_abs_slope(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    double best = 0.0;
    if (lo < bp_d.front()) best = std::max(best, std::abs(slope_d.front()));
    if (hi > bp_d.back()) best = std::max(best, std::abs(slope_d.back()));
    // pieces [bp[j], bp[j+1]] overlapping (lo, hi)
    auto first = std::upper_bound(bp_d.begin(), bp_d.end(), lo);
    std::size_t j = first == bp_d.begin() ? 0 : static_cast<std::size_t>(first - bp_d.begin()) - 1;
    for (; j < slope_d.size() && bp_d[j] < hi; ++j) {
        if (bp_d[j + 1] <= lo) continue;
        best = std::max(best, std::abs(slope_d[j]));
    }
    return best;
}

ScalarPL FluxPL::component(int d) const {
    ScalarPL g;
    g.bp = bp;
    g.exact = exact;
    g.val.reserve(val.size());
    for (const auto& v : val) g.val.push_back(v[static_cast<std::size_t>(d)]);
    g.finalize();
    return g;
}

ScalarPL FluxPL::directional(const std::vector<Rational>& xi) const {
    if (static_cast<int>(xi.size()) != n) throw Error("direction dimension mismatch");
    ScalarPL g;
    g.bp = bp;
    g.exact = exact;
    g.val.reserve(val.size());
    for (const auto& v : val) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += xi[static_cast<std::size_t>(d)] * v[static_cast<std::size_t>(d)];
        g.val.push_back(s);
    }
    g.finalize();
    return g;
}

std::vector<double> FluxPL::eval(double u) const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) out[static_cast<std::size_t>(d)] = component(d).eval(u);
    return out;
}

FluxPL make_flux(std::vector<Rational> breakpoints, std::vector<std::vector<Rational>> values,
                 bool exact) {
    if (breakpoints.size() < 2) throw Error("flux needs >= 2 breakpoints with matching values");
    if (breakpoints.size() != values.size()) throw Error("breakpoint/value length mismatch");
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
        if (!(breakpoints[j] < breakpoints[j + 1])) throw Error("breakpoints must be strictly increasing");
    const std::size_t n = values.front().size();
    if (n < 1 || n > 3) throw Error("flux dimension must be 1..3");
    for (const auto& v : values)
        if (v.size() != n) throw Error("inconsistent value dimensions");
    FluxPL f;
    f.n = static_cast<int>(n);
    f.bp = std::move(breakpoints);
    f.val = std::move(values);
    f.exact = exact;
    return f;
}

std::vector<AffineInterval> affine_intervals(const ScalarPL& g) {
    const std::size_t J = g.bp.size() - 1; // number of pieces
    std::vector<Rational> slopes(J);
    for (std::size_t j = 0; j < J; ++j) slopes[j] = g.slope_exact(j);

    auto same = [&](const Rational& a, const Rational& b) {
        if (g.exact) return a == b;
        return std::abs(to_double(a - b)) <= kSlopeTol;
    };

    std::vector<AffineInterval> out;
    std::size_t start = 0;
    while (start < J) {
        std::size_t end = start;
        while (end + 1 < J && same(slopes[end + 1], slopes[start])) ++end;
        AffineInterval iv;
        iv.slope = slopes[start];
        iv.intercept = g.val[start] - iv.slope * g.bp[start];
        // first run extends to -infinity, last run to +infinity (boundary-slope extension)
        if (start == 0)
            iv.lo = std::nullopt;
        else
            iv.lo = g.bp[start];
        if (end == J - 1)
            iv.hi = std::nullopt;
        else
            iv.hi = g.bp[end + 1];
        out.push_back(std::move(iv));
        start = end + 1;
    }
    return out;
}

std::optional<AffineInterval> affine_vicinity(const std::vector<AffineInterval>& intervals,
                                              const Rational& u) {
    for (const auto& iv : intervals) {
        bool above = !iv.lo || *iv.lo < u;
        bool below = !iv.hi || u < *iv.hi;
        if (above && below) return iv;
    }
    return std::nullopt;
}

Nd2Report check_nd2(const FluxPL& flux, const LatticeSpec& lattice, const Rational& I,
                    double radius, std::size_t cap) {
    if (flux.n != lattice.n) throw Error("flux/lattice dimension mismatch");
    Nd2Report report;
    report.truncation_radius = radius;
    report.mean_state = I;
    report.sampled_flux = flux.sampled;
    report.sample_resolution = flux.sample_resolution;
    for (const auto& xi : enumerate_dual(lattice, radius, cap)) {
        ScalarPL g = flux.directional(xi.xi);
        auto iv = affine_vicinity(affine_intervals(g), I);
        if (iv) {
            report.witnesses.push_back(Nd2Witness{xi, *iv});
        }
    }
    report.verdict = report.witnesses.empty() ? Nd2Verdict::holds : Nd2Verdict::violated;
    return report;
}

NondegReport nondeg_at(const FluxPL& flux, const Rational& u) {
    // Slopes of the pieces meeting u (one slope inside a piece or beyond the
    // range, two at an interior breakpoint).
    const std::size_t J = flux.bp.size() - 1;
    std::vector<std::size_t> pieces;
    if (u <= flux.bp.front())
        pieces = {0};
    else if (u >= flux.bp.back())
        pieces = {J - 1};
    else {
        for (std::size_t j = 0; j < J; ++j) {
            if (flux.bp[j] < u && u < flux.bp[j + 1]) {
                pieces = {j};
                break;
            }
            if (u == flux.bp[j + 1] && j + 1 < J) {
                pieces = {j, j + 1};
                break;
            }
        }
    }
    std::vector<std::vector<Rational>> rows;
    for (std::size_t j : pieces) {
        std::vector<Rational> s(static_cast<std::size_t>(flux.n));
        Rational dl = flux.bp[j + 1] - flux.bp[j];
        for (int d = 0; d < flux.n; ++d)
            s[static_cast<std::size_t>(d)] =
                (flux.val[j + 1][static_cast<std::size_t>(d)] - flux.val[j][static_cast<std::size_t>(d)]) / dl;
        rows.push_back(std::move(s));
    }
    NondegReport rep;
    if (rat_rank(rows) >= flux.n) return rep;
    rep.nondegenerate = false;
    auto xi = rat_nullspace_vector(rows, flux.n);
    double norm = 0.0;
    std::vector<double> w(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        w[i] = to_double(xi[i]);
        norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    for (auto& c : w) c /= norm;
    rep.witness = std::move(w);
    return rep;
}

FluxPL cantor_flux(int depth) {
    if (depth < 0 || depth > 12) throw Error("cantor depth out of range (0..12)");
    // Stair approximation C_depth on [0,1] at its slope-change points.
    std::vector<Rational> t = {Rational(0), Rational(1)};
    std::vector<Rational> c = {Rational(0), Rational(1)};
    for (int level = 0; level < depth; ++level) {
        std::vector<Rational> nt, nc;
        nt.reserve(2 * t.size());
        nc.reserve(2 * t.size());
        for (std::size_t j = 0; j < t.size(); ++j) {
            nt.push_back(t[j] / 3);
            nc.push_back(c[j] / 2);
        }
        nt.push_back(Rational(2, 3));
        nc.push_back(Rational(1, 2));
        for (std::size_t j = 1; j < t.size(); ++j) { // skip duplicate 2/3
            nt.push_back((t[j] + 2) / 3);
            nc.push_back((c[j] + 1) / 2);
        }
        t = std::move(nt);
        c = std::move(nc);
    }
    // Chordwise primitive: on each stair segment the primitive is quadratic
    // and its PL sample is the trapezoid accumulation.
    std::vector<std::vector<Rational>> phi;
    phi.reserve(t.size());
    Rational acc = 0;
    phi.push_back({acc});
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        acc += (c[j] + c[j + 1]) / 2 * (t[j + 1] - t[j]);
        phi.push_back({acc});
    }
    return make_flux(std::move(t), std::move(phi), /*exact=*/true);
}

FluxPL abs_flux() {
    return make_flux({Rational(-1), Rational(0), Rational(1)},
                     {{Rational(1)}, {Rational(0)}, {Rational(1)}});
}

FluxPL affine_flux(const std::vector<Rational>& c) {
    std::vector<Rational> v0(c.size(), Rational(0));
    std::vector<Rational> v1 = c;
    return make_flux({Rational(0), Rational(1)}, {v0, v1});
}

FluxPL burgers_sampled(const Rational& h, const Rational& lo, const Rational& hi) {
    if (!(h > 0) || !(lo < hi)) throw Error("invalid burgers sampling parameters");
    std::vector<Rational> bp;
    std::vector<std::vector<Rational>> val;
    for (Rational u = lo; u < hi; u += h) {
        bp.push_back(u);
        val.push_back({u * u / 2});
    }
    bp.push_back(hi);
    val.push_back({hi * hi / 2});
    FluxPL f = make_flux(std::move(bp), std::move(val));
    f.sampled = true;
    f.sample_resolution = to_double(h);
    return f;
}

std::string interval_to_string(const AffineInterval& iv) {
    std::ostringstream os;
    if (iv.lo)
        os << "[" << iv.lo->convert_to<double>();
    else
        os << "(-inf";
    os << ", ";
    if (iv.hi)
        os << iv.hi->convert_to<double>() << "]";
    else
        os << "inf)";
    return os.str();
}

} // namespace declab
