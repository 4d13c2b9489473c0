#include "declab/solver.hpp"

#include "declab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace declab {

namespace {

// Neumaier compensated sum in index order: deterministic and accurate enough
// to hold the 1e-12 conservation budget over long runs.
double compensated_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

std::size_t check_dims(const std::vector<int>& dims) {
    if (dims.empty() || dims.size() > 3) throw Error("grid dimension must be 1..3");
    std::size_t total = 1;
    for (int d : dims) {
        if (d < 2) throw Error("grid needs at least 2 cells per dimension");
        total *= static_cast<std::size_t>(d);
    }
    return total;
}

struct LineLayout {
    std::size_t count;  // number of lines
    std::size_t length; // cells per line
    std::size_t stride; // linear-index stride along the sweep dimension
};

LineLayout line_layout(const std::vector<int>& dims, int d) {
    LineLayout L{};
    L.length = static_cast<std::size_t>(dims[static_cast<std::size_t>(d)]);
    L.stride = 1;
    for (std::size_t j = static_cast<std::size_t>(d) + 1; j < dims.size(); ++j)
        L.stride *= static_cast<std::size_t>(dims[j]);
    std::size_t total = 1;
    for (int n : dims) total *= static_cast<std::size_t>(n);
    L.count = total / L.length;
    return L;
}

// Linear index of the first cell of line `l` for sweeps along dimension d.
std::size_t line_base(const LineLayout& L, std::size_t l) {
    // lines are indexed by the flattened complement of dimension d
    std::size_t inner = L.stride;                     // cells in dims after d
    std::size_t outer_block = inner * L.length;       // block size of dimension d
    std::size_t hi = l / inner;                       // index over dims before d
    std::size_t lo = l % inner;                       // index over dims after d
    return hi * outer_block + lo;
}

// One local Lax-Friedrichs sweep along dimension d with time step dt:
//   F_{i+1/2} = (g(u_i)+g(u_{i+1}))/2 - (alpha/2)(u_{i+1}-u_i),
//   alpha = max |g'| over [min(u_i,u_{i+1}), max(u_i,u_{i+1})].
void llf_sweep(std::vector<double>& u, const std::vector<int>& dims, int d, const ScalarPL& g,
               double dt) {
    const LineLayout L = line_layout(dims, d);
    const double h = 1.0 / static_cast<double>(L.length);
    const double lam = dt / h;
    std::vector<double> line(L.length), gv(L.length), flux(L.length);
    for (std::size_t l = 0; l < L.count; ++l) {
        const std::size_t base = line_base(L, l);
        for (std::size_t i = 0; i < L.length; ++i) line[i] = u[base + i * L.stride];
        for (std::size_t i = 0; i < L.length; ++i) gv[i] = g.eval(line[i]);
        for (std::size_t i = 0; i < L.length; ++i) {
            std::size_t ip = (i + 1 == L.length) ? 0 : i + 1;
            double a = g.max_abs_slope(line[i], line[ip]);
            flux[i] = 0.5 * (gv[i] + gv[ip]) - 0.5 * a * (line[ip] - line[i]);
        }
        for (std::size_t i = 0; i < L.length; ++i) {
            std::size_t im = (i == 0) ? L.length - 1 : i - 1;
            u[base + i * L.stride] = line[i] - lam * (flux[i] - flux[im]);
        }
    }
}

std::vector<int> sweep_order(int n, int parity) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) order[static_cast<std::size_t>(d)] = d;
    if (parity % 2 != 0) std::reverse(order.begin(), order.end());
    return order;
}

} // namespace

PeriodicField make_field(const LatticeSpec& lattice, std::vector<int> dims, double fill) {
    std::size_t total = check_dims(dims);
    if (static_cast<int>(dims.size()) != lattice.n) throw Error("grid/lattice dimension mismatch");
    PeriodicField f;
    f.dims = std::move(dims);
    f.data.assign(total, fill);
    f.lattice = lattice;
    return f;
}

PeriodicField make_field_from(const LatticeSpec& lattice, std::vector<int> dims,
                              const std::function<double(const std::vector<double>&)>& fn) {
    PeriodicField f = make_field(lattice, std::move(dims));
    const int n = f.dim();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::size_t lin = 0; lin < f.size(); ++lin) {
        std::size_t rem = lin;
        for (int d = n - 1; d >= 0; --d) {
            auto dd = static_cast<std::size_t>(d);
            idx[dd] = static_cast<int>(rem % static_cast<std::size_t>(f.dims[dd]));
            rem /= static_cast<std::size_t>(f.dims[dd]);
        }
        for (int d = 0; d < n; ++d) {
            auto dd = static_cast<std::size_t>(d);
            y[dd] = (idx[dd] + 0.5) / f.dims[dd];
        }
        f.data[lin] = fn(y);
    }
    return f;
}

double mean(const PeriodicField& field) {
    return compensated_sum(field.data) / static_cast<double>(field.size());
}

double min_value(const PeriodicField& field) {
    return *std::min_element(field.data.begin(), field.data.end());
}

double max_value(const PeriodicField& field) {
    return *std::max_element(field.data.begin(), field.data.end());
}

double l1_distance(const PeriodicField& a, const PeriodicField& b) {
    if (a.dims != b.dims) throw Error("field dimension mismatch");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = std::abs(a.data[i] - b.data[i]);
    return compensated_sum(diff) / static_cast<double>(a.size());
}

std::vector<ScalarPL> effective_flux(const FluxPL& flux, const LatticeSpec& lattice) {
    if (flux.n != lattice.n) throw Error("flux/lattice dimension mismatch");
    // In lattice coordinates x = B.y the equation reads u_t + div_y (B^{-1} phi) = 0,
    // and row d of B^{-1} is column d of D.
    std::vector<ScalarPL> out;
    out.reserve(static_cast<std::size_t>(flux.n));
    for (int d = 0; d < flux.n; ++d) {
        std::vector<Rational> dir(static_cast<std::size_t>(flux.n));
        for (int i = 0; i < flux.n; ++i)
            dir[static_cast<std::size_t>(i)] = lattice.dual_generators.at(i, d);
        out.push_back(flux.directional(dir));
    }
    return out;
}

double cfl_limit(const PeriodicField& field, const FluxPL& flux) {
    auto eff = effective_flux(flux, field.lattice);
    double lo = min_value(field), hi = max_value(field);
    double limit = std::numeric_limits<double>::infinity();
    for (int d = 0; d < field.dim(); ++d) {
        double alpha = eff[static_cast<std::size_t>(d)].max_abs_slope(lo, hi);
        if (alpha > 0.0) limit = std::min(limit, field.h(d) / alpha);
    }
    return limit;
}

PeriodicField step(const PeriodicField& field, const FluxPL& flux, double dt, int parity) {
    if (!(dt > 0.0)) throw Error("time step must be positive");
    double limit = cfl_limit(field, flux);
    if (dt > limit * (1.0 + 1e-9)) throw Error("CFL violation");
    auto eff = effective_flux(flux, field.lattice);
    PeriodicField out = field;
    for (int d : sweep_order(field.dim(), parity))
        llf_sweep(out.data, out.dims, d, eff[static_cast<std::size_t>(d)], dt);
    return out;
}

Trajectory solve(const FluxPL& flux, const PeriodicField& u0, double T,
                 std::vector<double> sample_times, const SolveOptions& options) {
    if (!(T > 0.0)) throw Error("final time must be positive");
    if (!(options.cfl > 0.0) || options.cfl > 1.0) throw Error("cfl must be in (0, 1]");
    std::sort(sample_times.begin(), sample_times.end());
    sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
    for (double t : sample_times)
        if (t < 0.0 || t > T * (1.0 + 1e-12)) throw Error("sample times must lie in [0, T]");

    Trajectory traj;
    traj.flux = flux;
    traj.lattice = u0.lattice;
    traj.effective = effective_flux(flux, u0.lattice);
    traj.cfl = options.cfl;
    traj.diagnostics = options.diagnostics;
    traj.times.push_back(0.0);
    traj.fields.push_back(u0);

    const double u_lo = min_value(u0), u_hi = max_value(u0);
    double dt_max = cfl_limit(u0, flux) * options.cfl;
    if (options.dt_cap > 0.0) dt_max = std::min(dt_max, options.dt_cap);
    if (!std::isfinite(dt_max)) dt_max = T; // constant-speed-zero flux: any step works

    PeriodicField current = u0;
    double t = 0.0;
    long parity = 0;
    auto order_of = [&](long p) { return sweep_order(current.dim(), static_cast<int>(p & 1)); };

    for (double target : sample_times) {
        if (target <= t + 1e-15) {
            if (target > 0.0 && std::abs(target - t) <= 1e-15) {
                traj.times.push_back(t);
                traj.fields.push_back(current);
            }
            continue;
        }
        const double span = target - t;
        const long k_steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-12)));
        const double dt = span / static_cast<double>(k_steps);
        for (long s = 0; s < k_steps; ++s) {
            for (int d : order_of(parity)) {
                if (options.diagnostics)
                    traj.sweeps.push_back(SweepRecord{d, dt, current.data});
                llf_sweep(current.data, current.dims, d,
                          traj.effective[static_cast<std::size_t>(d)], dt);
            }
            ++parity;
        }
        t = target;
        // Discrete maximum principle audit (monotone scheme guarantee).
        if (min_value(current) < u_lo - 1e-12 || max_value(current) > u_hi + 1e-12)
            throw Error("maximum principle violated (internal scheme error)");
        traj.times.push_back(t);
        traj.fields.push_back(current);
    }
    return traj;
}

double entropy_residual(const Trajectory& trajectory, double k) {
    if (!trajectory.diagnostics) throw Error("diagnostics not enabled on the trajectory");
    double worst = 0.0;
    for (const auto& sweep : trajectory.sweeps) {
        const auto& dims = trajectory.fields.front().dims;
        const int d = sweep.dim;
        const ScalarPL& g = trajectory.effective[static_cast<std::size_t>(d)];
        const double gk = g.eval(k);
        const LineLayout L = line_layout(dims, d);
        const double h = 1.0 / static_cast<double>(L.length);
        const double lam = sweep.dt / h;

        std::vector<double> line(L.length), gv(L.length), flux(L.length), q(L.length), ent(L.length);
        for (std::size_t l = 0; l < L.count; ++l) {
            const std::size_t base = line_base(L, l);
            for (std::size_t i = 0; i < L.length; ++i) line[i] = sweep.before[base + i * L.stride];
            for (std::size_t i = 0; i < L.length; ++i) {
                gv[i] = g.eval(line[i]);
                // Kruzhkov entropy flux q(u) = sign(u-k)(g(u)-g(k))
                q[i] = line[i] > k ? gv[i] - gk : (line[i] < k ? gk - gv[i] : 0.0);
            }
            for (std::size_t i = 0; i < L.length; ++i) {
                std::size_t ip = (i + 1 == L.length) ? 0 : i + 1;
                double a = g.max_abs_slope(line[i], line[ip]);
                flux[i] = 0.5 * (gv[i] + gv[ip]) - 0.5 * a * (line[ip] - line[i]);
                // same LLF form applied to the entropy pair, same alpha
                ent[i] = 0.5 * (q[i] + q[ip]) - 0.5 * a * (std::abs(line[ip] - k) - std::abs(line[i] - k));
            }
            for (std::size_t i = 0; i < L.length; ++i) {
                std::size_t im = (i == 0) ? L.length - 1 : i - 1;
                double after = line[i] - lam * (flux[i] - flux[im]);
                double residual =
                    (std::abs(after - k) - std::abs(line[i] - k)) / sweep.dt + (ent[i] - ent[im]) / h;
                worst = std::max(worst, residual);
            }
        }
    }
    return worst;
}

} // namespace declab
