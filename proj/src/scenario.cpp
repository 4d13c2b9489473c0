#include "declab/scenario.hpp"

#include "declab/corpus.hpp"
#include "declab/error.hpp"
#include "declab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

namespace declab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int require_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

Rational require_rational(const json& j, const std::string& path) {
    if (j.is_number()) return rational_of(j.get<double>());
    if (j.is_string()) {
        auto r = parse_rational(j.get<std::string>());
        if (!r) fail(path, "cannot parse rational '" + j.get<std::string>() + "'");
        return *r;
    }
    fail(path, "expected a number or a 'p/q' string");
}

std::vector<int> require_int_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(require_int(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

LatticeSpec parse_lattice(const json& j) {
    int n = 1;
    if (auto* d = find(j, "dim")) n = require_int(*d, "lattice.dim");
    if (n < 1 || n > 3) fail("lattice.dim", "must be 1..3");
    RatMat B = RatMat::identity(n);
    bool exact = true;
    if (auto* g = find(j, "generators")) {
        if (!g->is_array() || g->size() != static_cast<std::size_t>(n * n))
            fail("lattice.generators", "expected a row-major list of dim^2 entries");
        for (int i = 0; i < n * n; ++i) {
            const json& e = (*g)[static_cast<std::size_t>(i)];
            B.a[static_cast<std::size_t>(i)] =
                require_rational(e, "lattice.generators[" + std::to_string(i) + "]");
            if (e.is_number() && e.get<double>() != std::floor(e.get<double>())) exact = false;
        }
    }
    try {
        return make_lattice(B, exact);
    } catch (const Error& e) {
        fail("lattice.generators", e.what());
    }
}

FluxPL parse_flux(const json& j) {
    if (auto* b = find(j, "builtin")) {
        std::string name = b->is_string() ? b->get<std::string>() : "";
        if (name == "abs") return abs_flux();
        if (name == "cantor") {
            int depth = 1;
            if (auto* d = find(j, "depth")) depth = require_int(*d, "flux.depth");
            try {
                return cantor_flux(depth);
            } catch (const Error& e) {
                fail("flux.depth", e.what());
            }
        }
        if (name == "burgers" || name == "burgers_sampled") {
            Rational h(1, 100), lo(-2), hi(2);
            if (auto* v = find(j, "h")) h = require_rational(*v, "flux.h");
            if (auto* v = find(j, "range")) {
                if (!v->is_array() || v->size() != 2) fail("flux.range", "expected [lo, hi]");
                lo = require_rational((*v)[0], "flux.range[0]");
                hi = require_rational((*v)[1], "flux.range[1]");
            }
            try {
                return burgers_sampled(h, lo, hi);
            } catch (const Error& e) {
                fail("flux", e.what());
            }
        }
        if (name == "affine") {
            auto* c = find(j, "c");
            if (!c || !c->is_array() || c->empty()) fail("flux.c", "expected the slope vector");
            std::vector<Rational> slope;
            for (std::size_t i = 0; i < c->size(); ++i)
                slope.push_back(require_rational((*c)[i], "flux.c[" + std::to_string(i) + "]"));
            return affine_flux(slope);
        }
        fail("flux.builtin", "unknown builtin '" + name + "'");
    }
    auto* bp = find(j, "breakpoints");
    auto* vals = find(j, "values");
    if (!bp || !vals) fail("flux", "expected 'builtin' or 'breakpoints' + 'values'");
    if (!bp->is_array() || !vals->is_array() || bp->size() != vals->size())
        fail("flux", "breakpoints and values must be arrays of equal length");
    std::vector<Rational> breakpoints;
    std::vector<std::vector<Rational>> values;
    bool exact = true;
    for (std::size_t i = 0; i < bp->size(); ++i) {
        const json& e = (*bp)[i];
        breakpoints.push_back(require_rational(e, "flux.breakpoints[" + std::to_string(i) + "]"));
        if (e.is_number() && e.get<double>() != std::floor(e.get<double>())) exact = false;
        const json& row = (*vals)[i];
        std::vector<Rational> v;
        if (row.is_array()) {
            for (std::size_t d = 0; d < row.size(); ++d)
                v.push_back(require_rational(row[d], "flux.values[" + std::to_string(i) + "][" +
                                                         std::to_string(d) + "]"));
        } else {
            v.push_back(require_rational(row, "flux.values[" + std::to_string(i) + "]"));
        }
        values.push_back(std::move(v));
    }
    try {
        return make_flux(std::move(breakpoints), std::move(values), exact);
    } catch (const Error& e) {
        fail("flux", e.what());
    }
}

void apply_override(json& doc, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + spec);
    std::string path = spec.substr(0, eq), value = spec.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (...) {
        parsed = value; // plain string
    }
    json* node = &doc;
    std::size_t start = 0;
    std::vector<std::string> keys;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        if (dot == std::string::npos) {
            keys.push_back(path.substr(start));
            break;
        }
        keys.push_back(path.substr(start, dot - start));
        start = dot + 1;
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &(*node)[keys[i]];
    (*node)[keys.back()] = parsed;
}

} // namespace

PeriodicField Scenario::initial_field(const std::vector<int>& grid_dims) const {
    if (initial_from_csv) {
        std::ifstream in(csv_path);
        if (!in) throw ConfigError("config field 'initial.csv': cannot open " + csv_path);
        std::vector<double> values;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            values.push_back(std::stod(line));
        }
        PeriodicField f = make_field(lattice, grid_dims);
        if (values.size() != f.size())
            throw ConfigError("config field 'initial.csv': expected " + std::to_string(f.size()) +
                              " values, got " + std::to_string(values.size()));
        f.data = std::move(values);
        return f;
    }
    return make_field_from(lattice, grid_dims, [&](const std::vector<double>& y) {
        double u = offset;
        for (const auto& mode : modes) {
            double phase = mode.phase;
            for (std::size_t d = 0; d < y.size() && d < mode.mode.size(); ++d)
                phase += kTwoPi * static_cast<double>(mode.mode[d]) * y[d];
            u += mode.amplitude * std::sin(phase);
        }
        return u;
    });
}

Rational Scenario::nd2_mean() const {
    if (nd2.mean_set) return nd2.mean;
    // integer Fourier modes integrate to zero over the torus
    return rational_of(offset);
}

double Scenario::nd2_radius() const {
    return nd2.radius > 0 ? nd2.radius : default_truncation_radius(lattice);
}

Scenario scenario_from_json(json doc) {
    Scenario s;
    s.raw = doc;
    if (auto* v = find(doc, "name")) s.name = v->is_string() ? v->get<std::string>() : "scenario";
    if (auto* v = find(doc, "seed")) s.seed = static_cast<std::uint64_t>(require_int(*v, "seed"));

    s.lattice = find(doc, "lattice") ? parse_lattice(*find(doc, "lattice"))
                                     : make_lattice(RatMat::identity(1));
    s.flux = find(doc, "flux") ? parse_flux(*find(doc, "flux")) : abs_flux();
    if (s.flux.n != s.lattice.n) fail("flux", "flux dimension must match lattice dimension");

    if (auto* ini = find(doc, "initial")) {
        if (auto* v = find(*ini, "offset")) s.offset = require_number(*v, "initial.offset");
        if (auto* v = find(*ini, "csv")) {
            if (!v->is_string()) fail("initial.csv", "expected a path string");
            s.csv_path = v->get<std::string>();
            s.initial_from_csv = true;
        }
        if (auto* ms = find(*ini, "modes")) {
            if (!ms->is_array()) fail("initial.modes", "expected an array");
            for (std::size_t i = 0; i < ms->size(); ++i) {
                const json& mj = (*ms)[i];
                FourierMode mode;
                std::string base = "initial.modes[" + std::to_string(i) + "]";
                auto* mv = find(mj, "mode");
                if (!mv || !mv->is_array()) fail(base + ".mode", "expected an integer vector");
                for (std::size_t d = 0; d < mv->size(); ++d)
                    mode.mode.push_back(require_int((*mv)[d], base + ".mode"));
                if (auto* av = find(mj, "amplitude"))
                    mode.amplitude = require_number(*av, base + ".amplitude");
                if (auto* pv = find(mj, "phase")) mode.phase = require_number(*pv, base + ".phase");
                s.modes.push_back(std::move(mode));
            }
        }
    }

    if (auto* g = find(doc, "grid")) {
        if (auto* dd = find(*g, "dims")) s.dims = require_int_list(*dd, "grid.dims");
    }
    if (s.dims.empty()) s.dims.assign(static_cast<std::size_t>(s.lattice.n), 200);
    if (static_cast<int>(s.dims.size()) != s.lattice.n)
        fail("grid.dims", "must have one entry per lattice dimension");
    for (int d : s.dims)
        if (d < 2 || d > 4096) fail("grid.dims", "entries must be in 2..4096");

    if (auto* t = find(doc, "time")) {
        if (auto* v = find(*t, "t_end")) s.t_end = require_number(*v, "time.t_end");
        if (!(s.t_end > 0)) fail("time.t_end", "must be positive");
        if (auto* v = find(*t, "samples")) {
            if (!v->is_array()) fail("time.samples", "expected an array");
            for (std::size_t i = 0; i < v->size(); ++i)
                s.samples.push_back(require_number((*v)[i], "time.samples"));
        } else {
            int count = 10;
            if (auto* v = find(*t, "num_samples")) count = require_int(*v, "time.num_samples");
            if (count < 1 || count > 100000) fail("time.num_samples", "must be in 1..100000");
            for (int i = 1; i <= count; ++i) s.samples.push_back(s.t_end * i / count);
        }
        for (double v : s.samples)
            if (v < 0 || v > s.t_end * (1 + 1e-12)) fail("time.samples", "must lie in [0, t_end]");
    } else {
        for (int i = 1; i <= 10; ++i) s.samples.push_back(s.t_end * i / 10);
    }

    if (auto* v = find(doc, "cfl")) s.cfl = require_number(*v, "cfl");
    if (!(s.cfl > 0) || s.cfl > 0.5) fail("cfl", "must be in (0, 0.5]");
    if (auto* v = find(doc, "diagnostics")) {
        if (!v->is_boolean()) fail("diagnostics", "expected a boolean");
        s.diagnostics = v->get<bool>();
    }

    auto parse_block = [&](const char* key, Scenario::CriterionBlock& block) {
        if (auto* b = find(doc, key)) {
            if (auto* v = find(*b, "mean")) {
                block.mean = require_rational(*v, std::string(key) + ".mean");
                block.mean_set = true;
            }
            if (auto* v = find(*b, "radius")) {
                block.radius = require_number(*v, std::string(key) + ".radius");
                if (!(block.radius > 0)) fail(std::string(key) + ".radius", "must be positive");
            }
        }
    };
    parse_block("nd2", s.nd2);
    parse_block("wave", s.wave);

    if (auto* d = find(doc, "decay")) {
        if (auto* v = find(*d, "refinements")) s.refinements = require_int_list(*v, "decay.refinements");
        if (s.refinements.size() < 2) fail("decay.refinements", "need >= 2 levels");
        for (std::size_t i = 1; i < s.refinements.size(); ++i)
            if (s.refinements[i] <= s.refinements[i - 1])
                fail("decay.refinements", "must be strictly increasing");
        if (auto* v = find(*d, "theta_decay")) s.classify.theta_decay = require_number(*v, "decay.theta_decay");
        if (auto* v = find(*d, "theta_stall")) s.classify.theta_stall = require_number(*v, "decay.theta_stall");
        if (auto* v = find(*d, "trend_slack")) s.classify.trend_slack = require_number(*v, "decay.trend_slack");
    }

    if (auto* q = find(doc, "squeeze")) {
        if (auto* v = find(*q, "C")) s.squeeze_C = require_number(*v, "squeeze.C");
        if (auto* v = find(*q, "num_samples")) s.squeeze_samples = require_int(*v, "squeeze.num_samples");
    }

    if (auto* mc = find(doc, "microscope")) {
        MicroscopeConfig& m = s.microscope;
        if (auto* v = find(*mc, "kind")) {
            if (!v->is_string()) fail("microscope.kind", "expected a string");
            m.kind = v->get<std::string>();
        }
        if (auto* v = find(*mc, "omega")) {
            m.omega.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                m.omega.push_back(require_int((*v)[i], "microscope.omega"));
        }
        if (auto* v = find(*mc, "amplitude")) m.amplitude = require_number(*v, "microscope.amplitude");
        if (auto* v = find(*mc, "offset")) m.offset = require_number(*v, "microscope.offset");
        if (auto* v = find(*mc, "field_dims")) m.field_dims = require_int_list(*v, "microscope.field_dims");
        if (auto* v = find(*mc, "k_list")) m.k_list = require_int_list(*v, "microscope.k_list");
        if (auto* v = find(*mc, "r_list")) m.r_list = require_int_list(*v, "microscope.r_list");
        if (auto* v = find(*mc, "m_list")) m.m_list = require_int_list(*v, "microscope.m_list");
        if (auto* v = find(*mc, "p_levels")) m.p_levels = require_int(*v, "microscope.p_levels");
        if (auto* v = find(*mc, "windows")) m.windows = require_int_list(*v, "microscope.windows");
        if (auto* v = find(*mc, "center")) {
            m.center.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                m.center.push_back(require_number((*v)[i], "microscope.center"));
        }
        if (auto* v = find(*mc, "arcs")) m.arcs = require_int(*v, "microscope.arcs");
        if (auto* v = find(*mc, "pad")) m.pad = require_int(*v, "microscope.pad");
        if (auto* v = find(*mc, "localization")) m.localization = v->get<bool>();
        if (auto* v = find(*mc, "angular_tol")) m.angular_tol = require_number(*v, "microscope.angular_tol");
        if (auto* v = find(*mc, "dual_radius")) m.dual_radius = require_number(*v, "microscope.dual_radius");
        if (m.p_levels < 3 || m.p_levels > 64) fail("microscope.p_levels", "must be in 3..64");
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario parse error: " + std::string(e.what()));
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return scenario_from_json(std::move(doc));
}

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

namespace {

json rational_json(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

json interval_json(const AffineInterval& iv) {
    json j;
    j["lo"] = iv.lo ? rational_json(*iv.lo) : json(nullptr);
    j["hi"] = iv.hi ? rational_json(*iv.hi) : json(nullptr);
    j["slope"] = rational_json(iv.slope);
    j["intercept"] = rational_json(iv.intercept);
    j["display"] = interval_to_string(iv);
    return j;
}

json nd2_json(const Nd2Report& rep) {
    json j;
    j["verdict"] = rep.verdict == Nd2Verdict::holds ? "holds" : "violated";
    j["truncation_radius"] = rep.truncation_radius;
    j["mean"] = rational_json(rep.mean_state);
    if (rep.sampled_flux) {
        j["caveat"] = "sampled flux - verdict at resolution h";
        j["sample_resolution"] = rep.sample_resolution;
    }
    j["witnesses"] = json::array();
    for (const auto& w : rep.witnesses) {
        json wj;
        wj["xi"] = json::array();
        for (const auto& c : w.xi.xi) wj["xi"].push_back(rational_json(c));
        wj["coeffs"] = w.xi.coeffs;
        wj["norm"] = w.xi.norm;
        wj["interval"] = interval_json(w.interval);
        wj["a"] = rational_json(w.interval.slope);
        wj["b"] = rational_json(w.interval.intercept);
        j["witnesses"].push_back(std::move(wj));
    }
    return j;
}

void write_manifest(const Scenario& s, const RunContext& ctx, const std::string& subcommand,
                    json tolerances) {
    json m;
    m["config_hash"] = fnv1a_hash(s.raw.dump());
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["scenario"] = s.name;
    m["seed"] = ctx.seed_override ? ctx.seed : s.seed;
    m["threads"] = ctx.threads;
    m["tolerances"] = std::move(tolerances);
    atomic_write(ctx.out_dir / "manifest.json", m.dump(2) + "\n");
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    const int n = traj.fields.front().dim();
    os << "t";
    for (int d = 0; d < n; ++d) os << ",i" << d + 1;
    os << ",value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& f = traj.fields[k];
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        for (std::size_t lin = 0; lin < f.size(); ++lin) {
            std::size_t rem = lin;
            for (int d = n - 1; d >= 0; --d) {
                auto dd = static_cast<std::size_t>(d);
                idx[dd] = static_cast<int>(rem % static_cast<std::size_t>(f.dims[dd]));
                rem /= static_cast<std::size_t>(f.dims[dd]);
            }
            os << format_double(traj.times[k]);
            for (int d = 0; d < n; ++d) os << "," << idx[static_cast<std::size_t>(d)];
            os << "," << format_double(f.data[lin]) << "\n";
        }
    }
    return os.str();
}

std::uint64_t effective_seed(const Scenario& s, const RunContext& ctx) {
    return ctx.seed_override ? ctx.seed : s.seed;
}

} // namespace

int run_solve(const Scenario& s, const RunContext& ctx) {
    PeriodicField u0 = s.initial_field(s.dims);
    SolveOptions opt;
    opt.cfl = s.cfl;
    opt.diagnostics = s.diagnostics;
    Trajectory traj = solve(s.flux, u0, s.t_end, s.samples, opt);

    atomic_write(ctx.out_dir / "trajectory.csv", trajectory_csv(traj));

    DecayReport curve = decay_curve(traj);
    json summary;
    summary["mean_initial"] = mean(traj.fields.front());
    double drift = 0.0;
    for (const auto& f : traj.fields)
        drift = std::max(drift, std::abs(mean(f) - summary["mean_initial"].get<double>()));
    summary["max_mean_drift"] = drift;
    summary["min"] = min_value(traj.fields.back());
    summary["max"] = max_value(traj.fields.back());
    summary["e_final"] = curve.e_values.back();
    atomic_write(ctx.out_dir / "summary.json", summary.dump(2) + "\n");

    write_manifest(s, ctx, "solve",
                   json{{"conservation", 1e-12}, {"max_principle", 1e-12}, {"cfl", s.cfl}});
    return 0;
}

int run_nd2(const Scenario& s, const RunContext& ctx) {
    Nd2Report rep = check_nd2(s.flux, s.lattice, s.nd2_mean(), s.nd2_radius());
    atomic_write(ctx.out_dir / "nd2.json", nd2_json(rep).dump(2) + "\n");
    write_manifest(s, ctx, "nd2",
                   json{{"slope_equality", s.flux.exact ? 0.0 : 1e-12},
                        {"truncation_radius", s.nd2_radius()}});
    return 0;
}

int run_decay(const Scenario& s, const RunContext& ctx) {
    std::vector<DecayReport> reports(s.refinements.size());
    auto run_one = [&](std::size_t i) {
        std::vector<int> dims(static_cast<std::size_t>(s.lattice.n), s.refinements[i]);
        PeriodicField u0 = s.initial_field(dims);
        SolveOptions opt;
        opt.cfl = s.cfl;
        Trajectory traj = solve(s.flux, u0, s.t_end, s.samples, opt);
        reports[i] = decay_curve(traj);
    };
    if (ctx.threads > 1) {
        std::vector<std::future<void>> futs;
        for (std::size_t i = 0; i < reports.size(); ++i)
            futs.push_back(std::async(std::launch::async, run_one, i));
        for (auto& f : futs) f.get();
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i) run_one(i);
    }

    DecayClass verdict = classify_decay(reports, s.classify);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::ostringstream os;
        os << "t,e,I\n";
        for (std::size_t k = 0; k < reports[i].times.size(); ++k)
            os << format_double(reports[i].times[k]) << "," << format_double(reports[i].e_values[k])
               << "," << format_double(reports[i].mean_state) << "\n";
        atomic_write(ctx.out_dir / ("decay_" + std::to_string(s.refinements[i]) + ".csv"),
                     os.str());
    }
    json verdict_json;
    verdict_json["classification"] = to_string(verdict);
    verdict_json["thresholds"] = {{"theta_decay", s.classify.theta_decay},
                                  {"theta_stall", s.classify.theta_stall},
                                  {"trend_slack", s.classify.trend_slack}};
    verdict_json["refinements"] = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        double e0 = reports[i].e_values.front(), eT = reports[i].e_values.back();
        verdict_json["refinements"].push_back(
            {{"cells", s.refinements[i]},
             {"e0", e0},
             {"eT", eT},
             {"ratio", e0 <= 1e-14 ? 0.0 : eT / e0}});
    }
    atomic_write(ctx.out_dir / "decay.json", verdict_json.dump(2) + "\n");
    write_manifest(s, ctx, "decay",
                   json{{"theta_decay", s.classify.theta_decay},
                        {"theta_stall", s.classify.theta_stall},
                        {"trend_slack", s.classify.trend_slack},
                        {"e_monotonicity", 1e-12}});
    return 0;
}

int run_wave(const Scenario& s, const RunContext& ctx) {
    Rational I = s.wave.mean_set ? s.wave.mean : s.nd2_mean();
    double R = s.wave.radius > 0 ? s.wave.radius : s.nd2_radius();
    auto wave = traveling_wave(s.flux, s.lattice, I, R);
    json j;
    if (!wave) {
        j["result"] = "none";
    } else {
        j["result"] = "wave";
        j["xi"] = json::array();
        for (const auto& c : wave->xi) j["xi"].push_back(rational_json(c));
        j["coeffs"] = wave->coeffs;
        j["I"] = rational_json(wave->mean_state);
        j["delta"] = rational_json(wave->delta);
        j["a"] = rational_json(wave->slope);
        j["b"] = rational_json(wave->intercept);
        j["interval"] = interval_json(wave->interval);
        std::ostringstream os;
        os << "u(t,x) = " << to_double(wave->mean_state) << " + " << to_double(wave->delta)
           << " * sin(2*pi*(xi.x - " << to_double(wave->slope) << "*t))";
        j["descriptor"] = os.str();
    }
    atomic_write(ctx.out_dir / "wave.json", j.dump(2) + "\n");
    write_manifest(s, ctx, "wave", json{{"delta_shrink", 0.9}, {"truncation_radius", R}});
    return 0;
}

// ---------------------------------------------------------------------------
// microscope subcommand
// ---------------------------------------------------------------------------

namespace {

struct MicroscopeInput {
    std::vector<GridField> fields;
    std::vector<int> r_list;
    bool spacetime = false;
};

MicroscopeInput build_fields(const Scenario& s, const RunContext& ctx) {
    const MicroscopeConfig& m = s.microscope;
    MicroscopeInput in;
    std::uint64_t seed = effective_seed(s, ctx);

    if (m.kind == "sine" || m.kind == "strong" || m.kind == "noise") {
        std::vector<int> dims = m.field_dims;
        if (dims.empty()) dims = {16384};
        in.r_list = m.r_list;
        for (std::size_t i = 0; i < in.r_list.size(); ++i) {
            int r = in.r_list[i];
            if (m.kind == "sine") {
                in.fields.push_back(make_grid_field(dims, [&](const std::vector<double>& x) {
                    double phase = 0.0;
                    for (std::size_t d = 0; d < x.size() && d < m.omega.size(); ++d)
                        phase += static_cast<double>(m.omega[d]) * x[d];
                    return m.offset + m.amplitude * std::sin(kTwoPi * r * phase);
                }));
            } else if (m.kind == "strong") {
                in.fields.push_back(make_grid_field(dims, [&](const std::vector<double>& x) {
                    double phase = 0.0;
                    for (std::size_t d = 0; d < x.size() && d < m.omega.size(); ++d)
                        phase += static_cast<double>(m.omega[d]) * x[d];
                    double v = m.offset + m.amplitude * std::sin(kTwoPi * phase);
                    return v + 0.5 * m.amplitude / r * std::sin(3.0 * kTwoPi * x[0]);
                }));
            } else {
                in.fields.push_back(noise_field(seed + static_cast<std::uint64_t>(r), dims));
            }
        }
        return in;
    }

    if (m.kind == "rescaled_wave") {
        Rational I = s.wave.mean_set ? s.wave.mean : s.nd2_mean();
        double R = s.wave.radius > 0 ? s.wave.radius : s.nd2_radius();
        auto wave = traveling_wave(s.flux, s.lattice, I, R);
        if (!wave) throw Error("rescaled_wave source: the criterion holds, no wave exists");
        std::vector<int> dims = m.field_dims;
        if (dims.empty()) dims.assign(static_cast<std::size_t>(s.lattice.n) + 1, 64);
        std::vector<int> k_list = m.k_list.empty() ? std::vector<int>{2, 4, 8} : m.k_list;
        in.fields = rescale_wave(*wave, k_list, dims);
        in.r_list = k_list;
        in.spacetime = true;
        return in;
    }

    if (m.kind == "rescaled_solve") {
        std::vector<int> dims = m.field_dims;
        if (dims.empty()) dims = {64, 64};
        std::vector<int> k_list = m.k_list.empty() ? std::vector<int>{2, 4, 8} : m.k_list;
        int k_max = *std::max_element(k_list.begin(), k_list.end());
        PeriodicField u0 = s.initial_field(s.dims);
        // sample densely enough for the finest rescaling
        int Mt = dims[0];
        double gap = 1.0 / Mt; // finest k needs spacing k/Mt; k=1 is worst
        int k_min = *std::min_element(k_list.begin(), k_list.end());
        gap = static_cast<double>(k_min) / Mt / 2.0;
        std::vector<double> samples;
        double T = static_cast<double>(k_max);
        for (double t = gap; t < T + gap / 2; t += gap) samples.push_back(std::min(t, T));
        SolveOptions opt;
        opt.cfl = s.cfl;
        Trajectory traj = solve(s.flux, u0, T, samples, opt);
        in.fields = rescale_sequence(traj, k_list, dims);
        in.r_list = k_list;
        in.spacetime = true;
        return in;
    }
    throw ConfigError("config field 'microscope.kind': unknown source '" + m.kind + "'");
}

} // namespace

int run_microscope(const Scenario& s, const RunContext& ctx) {
    const MicroscopeConfig& mc = s.microscope;
    MicroscopeInput input = build_fields(s, ctx);

    std::vector<double> p_grid = make_p_grid(input.fields, mc.p_levels);
    std::vector<int> windows = mc.windows;
    if (windows.empty()) {
        windows.assign(input.fields.front().dims.size(), 1);
        for (std::size_t d = 0; d < windows.size(); ++d) {
            int cells = input.fields.front().dims[d];
            windows[d] = std::max(1, cells / 32);
            while (cells % windows[d] != 0) --windows[d];
        }
    }
    YoungMeasureEstimate young = young_estimate(input.fields, input.r_list, p_grid, windows);

    HMeasureOptions opt;
    opt.m_list = mc.m_list;
    opt.r_list = input.r_list;
    opt.center = mc.center;
    opt.arcs = mc.arcs;
    opt.pad_factor = mc.pad;
    opt.spacetime = input.spacetime;
    HMeasureResult result = hmeasure_estimate(input.fields, young, opt);
    HMeasureProperties props = check_hmeasure_properties(result.matrix, young);

    // young table
    json yj;
    yj["p_grid"] = p_grid;
    yj["windows_per_dim"] = young.windows_per_dim;
    yj["pooled_r"] = young.pooled_r;
    yj["u0"] = json::array();
    for (std::size_t w = 0; w < young.window_count(); ++w) {
        json row = json::array();
        for (std::size_t l = 0; l < p_grid.size(); ++l) row.push_back(young.value(w, l));
        yj["u0"].push_back(std::move(row));
    }
    atomic_write(ctx.out_dir / "young.json", yj.dump() + "\n");

    // H-measure matrix
    const HMeasureMatrix& H = result.matrix;
    json hj;
    hj["p_grid"] = H.p_grid;
    hj["m"] = H.m;
    hj["r"] = H.r;
    hj["spacetime"] = H.spacetime;
    hj["bins"] = json::array();
    for (const auto& c : H.bins.centers) hj["bins"].push_back(c);
    hj["entries_re"] = json::array();
    hj["entries_im"] = json::array();
    const int P = static_cast<int>(H.p_grid.size());
    for (int p = 0; p < P; ++p) {
        json re_row = json::array(), im_row = json::array();
        for (int q = 0; q < P; ++q) {
            json re_bins = json::array(), im_bins = json::array();
            for (int b = 0; b < H.bins.count(); ++b) {
                re_bins.push_back(H.at(p, q, b).real());
                im_bins.push_back(H.at(p, q, b).imag());
            }
            re_row.push_back(std::move(re_bins));
            im_row.push_back(std::move(im_bins));
        }
        hj["entries_re"].push_back(std::move(re_row));
        hj["entries_im"].push_back(std::move(im_row));
    }
    atomic_write(ctx.out_dir / "hmeasure.json", hj.dump() + "\n");

    // ladder diagnostics
    std::ostringstream ladder;
    ladder << "level,m,r,total_mass,max_delta\n";
    for (std::size_t i = 0; i < result.ladder.size(); ++i)
        ladder << i << "," << result.ladder[i].m << "," << result.ladder[i].r << ","
               << format_double(result.ladder[i].total_mass) << ","
               << format_double(result.ladder[i].max_delta) << "\n";
    atomic_write(ctx.out_dir / "ladder.csv", ladder.str());

    json pj;
    pj["psd_floor"] = props.psd_floor;
    pj["psd_ok"] = props.psd_ok;
    pj["var_worst"] = props.var_worst;
    pj["var_ok"] = props.var_ok;
    pj["cs_excess"] = props.cs_excess;
    pj["cs_ok"] = props.cs_ok;
    pj["cont_excess"] = props.cont_excess;
    pj["cont_ok"] = props.cont_ok;
    pj["pass"] = props.pass();
    atomic_write(ctx.out_dir / "properties.json", pj.dump(2) + "\n");

    if (mc.localization) {
        double radius = mc.dual_radius > 0 ? mc.dual_radius : default_truncation_radius(s.lattice);
        LocalizationReport loc = localization_mass(H, s.lattice, mc.angular_tol, radius);
        json lj;
        lj["fraction"] = loc.fraction;
        lj["pole_fraction"] = loc.pole_fraction;
        lj["baseline"] = loc.baseline;
        lj["angular_tol"] = loc.angular_tol;
        lj["dual_radius"] = loc.dual_radius;
        atomic_write(ctx.out_dir / "localization.json", lj.dump(2) + "\n");
    }

    write_manifest(s, ctx, "microscope",
                   json{{"psd_tol", 1e-6},
                        {"var_slack", 0.1},
                        {"cs_tol", 1e-6},
                        {"cont_slack", 0.1},
                        {"angular_tol", mc.angular_tol}});
    return props.pass() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// suite: the compact example bundle
// ---------------------------------------------------------------------------

namespace {

struct SuiteCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

void report(std::vector<SuiteCheck>& checks, const std::string& name, bool pass,
            const std::string& detail) {
    checks.push_back({name, pass, detail});
    std::printf("[%s] %s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
}

} // namespace

int run_suite(const Scenario& s, const RunContext& ctx) {
    std::vector<SuiteCheck> checks;
    std::uint64_t seed = effective_seed(s, ctx);
    auto lattice1 = make_lattice(RatMat::identity(1));
    FluxPL abs1 = abs_flux();

    // absolute-value dichotomy: zero-mean data decays, sign-definite data stalls
    {
        std::vector<double> samples = {1.0, 2.0, 3.0};
        auto classify_abs = [&](double off, double amp) {
            std::vector<DecayReport> reps;
            for (int N : {100, 200, 400}) {
                PeriodicField u0 =
                    make_field_from(lattice1, {N}, [&](const std::vector<double>& y) {
                        return off + amp * std::sin(kTwoPi * y[0]);
                    });
                reps.push_back(decay_curve(solve(abs1, u0, 3.0, samples)));
            }
            return classify_decay(reps);
        };
        DecayClass zero_mean = classify_abs(0.0, 1.0);
        DecayClass sign_def = classify_abs(0.5, 0.3);
        report(checks, "abs dichotomy: zero mean decays", zero_mean == DecayClass::decays,
               "(" + to_string(zero_mean) + ")");
        report(checks, "abs dichotomy: mean 0.5 stalls", sign_def == DecayClass::stalls,
               "(" + to_string(sign_def) + ")");
    }

    // squeeze inequalities on sign-changing data
    {
        PeriodicField u0 = make_field_from(lattice1, {200}, [&](const std::vector<double>& y) {
            return std::sin(kTwoPi * y[0]);
        });
        SqueezeOptions opt;
        opt.C = s.squeeze_C;
        SqueezeReport rep = squeeze_check(abs1, u0, 1.0, opt);
        double worst = 0.0;
        for (std::size_t i = 0; i < rep.times.size(); ++i)
            worst = std::max({worst, rep.lower_violation[i], rep.upper_violation[i]});
        std::ostringstream os;
        os << "(worst=" << worst << ", eps_h=" << rep.eps_h << ")";
        report(checks, "squeeze inequalities", rep.pass, os.str());
    }

    // traveling-wave round trip over a random rational corpus
    {
        auto corpus = random_flux_corpus(seed ^ 0x77a7eULL, 30);
        bool consistent = true;
        int violated = 0;
        for (const auto& c : corpus) {
            double R = default_truncation_radius(c.lattice);
            Nd2Report nd2 = check_nd2(c.flux, c.lattice, c.mean_state, R);
            auto wave = traveling_wave(c.flux, c.lattice, c.mean_state, R);
            bool v = nd2.verdict == Nd2Verdict::violated;
            if (v != wave.has_value()) consistent = false;
            if (v) ++violated;
        }
        std::ostringstream os;
        os << "(30 cases, " << violated << " violated)";
        report(checks, "wave round-trip corpus", consistent && violated > 0, os.str());
    }

    // microscope property spot checks
    {
        bool all_ok = true;
        std::string worst;
        for (int variant = 0; variant < 3; ++variant) {
            std::vector<int> r_list = {8, 16, 32};
            std::vector<GridField> fields;
            for (int r : r_list) {
                if (variant == 0)
                    fields.push_back(make_grid_field({2048}, [&](const std::vector<double>& x) {
                        return std::sin(kTwoPi * r * x[0]);
                    }));
                else if (variant == 1)
                    fields.push_back(make_grid_field({2048}, [&](const std::vector<double>& x) {
                        return std::sin(kTwoPi * r * x[0]) > 0 ? 1.0 : -0.5;
                    }));
                else
                    fields.push_back(noise_field(seed + static_cast<std::uint64_t>(r), {2048}));
            }
            auto p_grid = make_p_grid(fields, 9);
            auto young = young_estimate(fields, r_list, p_grid, {32});
            HMeasureOptions opt;
            opt.m_list = {4, 8};
            opt.r_list = r_list;
            auto res = hmeasure_estimate(fields, young, opt);
            auto props = check_hmeasure_properties(res.matrix, young);
            if (!props.pass()) {
                all_ok = false;
                worst = "variant " + std::to_string(variant);
            }
        }
        report(checks, "microscope property suite", all_ok, worst.empty() ? "(3 variants)" : worst);
    }

    bool ok = true;
    json results = json::array();
    for (const auto& c : checks) {
        ok = ok && c.pass;
        results.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    atomic_write(ctx.out_dir / "suite.json", results.dump(2) + "\n");
    write_manifest(s, ctx, "suite", json{{"squeeze_C", s.squeeze_C}});
    return ok ? 0 : 1;
}

int run_scenario(const std::filesystem::path& path, const std::string& subcommand,
                 const std::vector<std::string>& overrides, const RunContext& ctx) {
    Scenario s = load_scenario(path, overrides);
    if (subcommand == "solve") return run_solve(s, ctx);
    if (subcommand == "nd2") return run_nd2(s, ctx);
    if (subcommand == "decay") return run_decay(s, ctx);
    if (subcommand == "wave") return run_wave(s, ctx);
    if (subcommand == "microscope") return run_microscope(s, ctx);
    if (subcommand == "suite") return run_suite(s, ctx);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

} // namespace declab
