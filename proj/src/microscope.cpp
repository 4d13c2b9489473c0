#include "declab/microscope.hpp"

#include "declab/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace declab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<int> cell_index(const std::vector<int>& dims, std::size_t linear) {
    std::vector<int> idx(dims.size());
    for (int d = static_cast<int>(dims.size()) - 1; d >= 0; --d) {
        auto dd = static_cast<std::size_t>(d);
        idx[dd] = static_cast<int>(linear % static_cast<std::size_t>(dims[dd]));
        linear /= static_cast<std::size_t>(dims[dd]);
    }
    return idx;
}

std::size_t total_cells(const std::vector<int>& dims) {
    std::size_t t = 1;
    for (int d : dims) t *= static_cast<std::size_t>(d);
    return t;
}

} // namespace

GridField make_grid_field(std::vector<int> dims,
                          const std::function<double(const std::vector<double>&)>& f) {
    if (dims.empty() || dims.size() > 3) throw Error("grid dimension must be 1..3");
    GridField g;
    g.dims = std::move(dims);
    g.data.resize(total_cells(g.dims));
    std::vector<double> x(g.dims.size());
    for (std::size_t lin = 0; lin < g.data.size(); ++lin) {
        auto idx = cell_index(g.dims, lin);
        for (std::size_t d = 0; d < g.dims.size(); ++d) x[d] = (idx[d] + 0.5) / g.dims[d];
        g.data[lin] = f(x);
    }
    return g;
}

std::vector<double> make_p_grid(const std::vector<GridField>& fields, int levels,
                                double margin_fraction) {
    if (fields.empty()) throw Error("p-grid needs at least one field");
    if (levels < 2) throw Error("p-grid needs at least two levels");
    double lo = fields[0].data[0], hi = lo;
    for (const auto& f : fields)
        for (double v : f.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    double span = hi - lo;
    double pad = span > 0 ? margin_fraction * span : 0.5;
    lo -= pad;
    hi += pad;
    std::vector<double> grid(static_cast<std::size_t>(levels));
    double step = (hi - lo) / (levels - 1);
    for (int i = 0; i < levels; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
    // Nudge levels off exact sample values (atoms of the empirical measure).
    for (auto& p : grid) {
        bool collides = false;
        for (const auto& f : fields) {
            for (double v : f.data)
                if (v == p) {
                    collides = true;
                    break;
                }
            if (collides) break;
        }
        if (collides) p += 0.5 * step;
    }
    return grid;
}

std::size_t YoungMeasureEstimate::window_count() const {
    return total_cells(windows_per_dim);
}

std::size_t YoungMeasureEstimate::window_of_cell(std::size_t cell_linear) const {
    auto idx = cell_index(field_dims, cell_linear);
    std::size_t w = 0;
    for (std::size_t d = 0; d < field_dims.size(); ++d) {
        int per = field_dims[d] / windows_per_dim[d];
        w = w * static_cast<std::size_t>(windows_per_dim[d]) +
            static_cast<std::size_t>(idx[d] / per);
    }
    return w;
}

std::size_t YoungMeasureEstimate::window_of_point(const std::vector<double>& x) const {
    std::size_t w = 0;
    for (std::size_t d = 0; d < windows_per_dim.size(); ++d) {
        int wi = std::min(windows_per_dim[d] - 1,
                          static_cast<int>(std::floor(x[d] * windows_per_dim[d])));
        w = w * static_cast<std::size_t>(windows_per_dim[d]) + static_cast<std::size_t>(wi);
    }
    return w;
}

double YoungMeasureEstimate::value(std::size_t window, std::size_t level) const {
    return u0[window * p_grid.size() + level];
}

int YoungMeasureEstimate::level_of(double p) const {
    for (std::size_t i = 0; i < p_grid.size(); ++i)
        if (p_grid[i] == p) return static_cast<int>(i);
    return -1;
}

YoungMeasureEstimate young_estimate(const std::vector<GridField>& fields,
                                    const std::vector<int>& r_list,
                                    const std::vector<double>& p_grid,
                                    const std::vector<int>& windows_per_dim) {
    if (fields.size() != r_list.size()) throw Error("field list and r list must align");
    std::vector<int> distinct = r_list;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error("young estimate needs >= 2 distinct r values");
    const auto& dims = fields.front().dims;
    for (const auto& f : fields)
        if (f.dims != dims) throw Error("fields must share one grid");
    if (windows_per_dim.size() != dims.size()) throw Error("window grid dimension mismatch");
    for (std::size_t d = 0; d < dims.size(); ++d) {
        if (windows_per_dim[d] < 1 || dims[d] % windows_per_dim[d] != 0)
            throw Error("window grid must divide the field grid");
    }

    YoungMeasureEstimate est;
    est.p_grid = p_grid;
    est.field_dims = dims;
    est.windows_per_dim = windows_per_dim;

    // Pool the largest half of the oscillation indices.
    std::vector<std::size_t> order(fields.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return r_list[a] < r_list[b]; });
    std::size_t keep = (fields.size() + 1) / 2;
    std::vector<std::size_t> pooled(order.end() - static_cast<long>(keep), order.end());
    for (std::size_t i : pooled) est.pooled_r.push_back(r_list[i]);

    const std::size_t W = est.window_count();
    const std::size_t P = p_grid.size();
    // hist[w][j] counts samples whose value exceeds exactly the first j levels.
    std::vector<std::vector<std::size_t>> hist(W, std::vector<std::size_t>(P + 1, 0));
    std::vector<std::size_t> totals(W, 0);
    for (std::size_t fi : pooled) {
        const auto& f = fields[fi];
        for (std::size_t lin = 0; lin < f.size(); ++lin) {
            std::size_t w = est.window_of_cell(lin);
            // number of levels strictly below the sample (theta(0) = 0: ties
            // do not count as exceeding)
            auto it = std::lower_bound(p_grid.begin(), p_grid.end(), f.data[lin]);
            hist[w][static_cast<std::size_t>(it - p_grid.begin())] += 1;
            totals[w] += 1;
        }
    }
    est.u0.assign(W * P, 0.0);
    for (std::size_t w = 0; w < W; ++w) {
        if (totals[w] == 0) throw Error("empty young window");
        std::size_t above = 0;
        for (std::size_t l = P; l-- > 0;) {
            above += hist[w][l + 1];
            est.u0[w * P + l] = static_cast<double>(above) / static_cast<double>(totals[w]);
        }
    }
    return est;
}

GridField distribution_field(const GridField& u_r, const YoungMeasureEstimate& young, double p) {
    if (u_r.dims != young.field_dims) throw Error("field/young grid mismatch");
    int level = young.level_of(p);
    if (level < 0) throw Error("level not on the p-grid");
    GridField U;
    U.dims = u_r.dims;
    U.data.resize(u_r.size());
    for (std::size_t lin = 0; lin < u_r.size(); ++lin) {
        double theta = u_r.data[lin] > p ? 1.0 : 0.0;
        U.data[lin] =
            theta - young.value(young.window_of_cell(lin), static_cast<std::size_t>(level));
    }
    return U;
}

// ---------------------------------------------------------------------------
// Sphere binning
// ---------------------------------------------------------------------------

int SphereBinning::bin_of(const std::vector<double>& k) const {
    if (dim == 1) return k[0] > 0.0 ? 0 : 1;
    if (dim == 2) {
        // arcs are centered on the canonical directions (bin 0 contains +e1)
        double ang = std::atan2(k[1], k[0]) + kTwoPi / (2.0 * count());
        if (ang < 0) ang += kTwoPi;
        int b = static_cast<int>(ang / kTwoPi * count());
        return b % count();
    }
    double norm = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    int best = 0;
    double best_dot = -2.0;
    for (int b = 0; b < count(); ++b) {
        const auto& c = centers[static_cast<std::size_t>(b)];
        double dot = (c[0] * k[0] + c[1] * k[1] + c[2] * k[2]) / norm;
        if (dot > best_dot) {
            best_dot = dot;
            best = b;
        }
    }
    return best;
}

SphereBinning make_binning(int dim, int arcs) {
    SphereBinning bins;
    bins.dim = dim;
    if (dim == 1) {
        bins.centers = {{1.0}, {-1.0}};
        return bins;
    }
    if (dim == 2) {
        if (arcs < 4) throw Error("need at least 4 angular bins");
        for (int b = 0; b < arcs; ++b) {
            double ang = kTwoPi * b / arcs;
            bins.centers.push_back({std::cos(ang), std::sin(ang)});
        }
        return bins;
    }
    if (dim != 3) throw Error("sphere binning supports dimensions 1..3");
    // Icosahedron subdivided once: 80 nearly equal faces.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> v = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    auto normalize = [](std::array<double, 3> a) {
        double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        return std::array<double, 3>{a[0] / n, a[1] / n, a[2] / n};
    };
    for (auto& p : v) p = normalize(p);
    const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    auto mid = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return normalize({(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2});
    };
    auto centroid = [&](const std::array<double, 3>& a, const std::array<double, 3>& b,
                        const std::array<double, 3>& c) {
        return normalize({(a[0] + b[0] + c[0]) / 3, (a[1] + b[1] + c[1]) / 3,
                          (a[2] + b[2] + c[2]) / 3});
    };
    for (const auto& f : faces) {
        auto a = v[static_cast<std::size_t>(f[0])];
        auto b = v[static_cast<std::size_t>(f[1])];
        auto c = v[static_cast<std::size_t>(f[2])];
        auto ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        for (auto ctr : {centroid(a, ab, ca), centroid(ab, b, bc), centroid(ca, bc, c),
                         centroid(ab, bc, ca)})
            bins.centers.push_back({ctr[0], ctr[1], ctr[2]});
    }
    return bins;
}

// ---------------------------------------------------------------------------
// H-measure estimation
// ---------------------------------------------------------------------------

std::complex<double> HMeasureMatrix::at(int p, int q, int bin) const {
    const std::size_t P = p_grid.size();
    return entries[(static_cast<std::size_t>(p) * P + static_cast<std::size_t>(q)) *
                       static_cast<std::size_t>(bins.count()) +
                   static_cast<std::size_t>(bin)];
}

double HMeasureMatrix::total_mass() const {
    const int P = static_cast<int>(p_grid.size());
    double s = 0.0;
    for (int p = 0; p < P; ++p)
        for (int b = 0; b < bins.count(); ++b) s += at(p, p, b).real();
    return s;
}

double HMeasureMatrix::total_variation() const {
    double s = 0.0;
    for (const auto& e : entries) s += std::abs(e);
    return s;
}

namespace {

struct WindowBox {
    std::vector<int> lo;    // first cell index per dim
    std::vector<int> size;  // cells per dim
    std::vector<double> phi; // sqrt of the normalized K_m, flat over the box
};

WindowBox build_window(const std::vector<int>& dims, const std::vector<double>& center, int m) {
    const std::size_t D = dims.size();
    if (center.size() != D) throw Error("window center dimension mismatch");
    if (m < 2) throw Error("window scale must be >= 2");
    WindowBox box;
    box.lo.resize(D);
    box.size.resize(D);
    double radius = 1.0 / m;
    for (std::size_t d = 0; d < D; ++d) {
        if (center[d] - radius < -1e-12 || center[d] + radius > 1.0 + 1e-12)
            throw Error("window clipped by domain");
        double h = 1.0 / dims[d];
        int first = static_cast<int>(std::ceil((center[d] - radius) / h - 0.5));
        int last = static_cast<int>(std::floor((center[d] + radius) / h - 0.5));
        first = std::max(first, 0);
        last = std::min(last, dims[d] - 1);
        if (last < first) throw Error("window too small for the grid");
        box.lo[d] = first;
        box.size[d] = last - first + 1;
    }
    std::size_t cells = total_cells(box.size);
    box.phi.resize(cells);
    double hD = 1.0;
    for (std::size_t d = 0; d < D; ++d) hD /= dims[d];
    double mass = 0.0;
    for (std::size_t lin = 0; lin < cells; ++lin) {
        auto idx = cell_index(box.size, lin);
        double z2 = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            double x = (box.lo[d] + idx[d] + 0.5) / dims[d];
            double z = m * (x - center[d]);
            z2 += z * z;
        }
        double K = z2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z2)) : 0.0;
        box.phi[lin] = K;
        mass += K * hD;
    }
    if (mass <= 0.0) throw Error("window too small for the grid");
    for (auto& k : box.phi) k = std::sqrt(k / mass);
    return box;
}

int fft_frequency(int index, int size) { return index < (size + 1) / 2 ? index : index - size; }

} // namespace

HMeasureResult hmeasure_estimate(const std::vector<GridField>& fields,
                                 const YoungMeasureEstimate& young,
                                 const HMeasureOptions& options) {
    if (fields.empty()) throw Error("h-measure needs fields");
    if (fields.size() != options.r_list.size()) throw Error("field list and r list must align");
    const auto& dims = fields.front().dims;
    if (dims != young.field_dims) throw Error("field/young grid mismatch");
    const std::size_t D = dims.size();
    std::vector<double> center = options.center;
    if (center.empty()) center.assign(D, 0.5);

    const std::size_t P = young.p_grid.size();
    const int freq_dim = static_cast<int>(D);
    SphereBinning bins = make_binning(freq_dim, options.arcs);
    const std::size_t B = static_cast<std::size_t>(bins.count());

    const std::size_t levels =
        std::max(options.m_list.size(), options.r_list.size());
    if (options.m_list.empty()) throw Error("empty m list");

    HMeasureResult result;
    std::vector<std::complex<double>> prev;

    for (std::size_t lev = 0; lev < levels; ++lev) {
        const int m = options.m_list[std::min(lev, options.m_list.size() - 1)];
        const std::size_t fi = std::min(lev, fields.size() - 1);
        const int r = options.r_list[fi];
        const GridField& u = fields[fi];

        WindowBox box = build_window(dims, center, m);
        std::vector<int> padded(D);
        for (std::size_t d = 0; d < D; ++d) padded[d] = box.size[d] * options.pad_factor;
        const std::size_t Npad = total_cells(padded);
        const std::size_t Nbox = total_cells(box.size);

        // scale = prod_d (h_d / P_d): continuous-FT normalization x frequency
        // cell volume, so that summing |.|^2 over all nonzero frequencies
        // reproduces the windowed L2 mass (which is <= 1).
        double scale = 1.0;
        for (std::size_t d = 0; d < D; ++d) scale *= (1.0 / dims[d]) / padded[d];

        // windowed, zero-padded distribution fields, then one DFT per level
        std::vector<std::vector<std::complex<double>>> spectra(
            P, std::vector<std::complex<double>>(Npad));
        fftw_complex* buf =
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * Npad));
        fftw_plan plan;
        {
            std::vector<int> sizes(D);
            for (std::size_t d = 0; d < D; ++d) sizes[d] = padded[d];
            plan = fftw_plan_dft(static_cast<int>(D), sizes.data(), buf, buf, FFTW_FORWARD,
                                 FFTW_ESTIMATE);
        }
        double max_abs_u_field = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * Npad,
                      0.0);
            const double level_p = young.p_grid[p];
            for (std::size_t lin = 0; lin < Nbox; ++lin) {
                auto idx = cell_index(box.size, lin);
                // absolute cell and padded-buffer linear indices
                std::size_t cell = 0, pad_lin = 0;
                for (std::size_t d = 0; d < D; ++d) {
                    cell = cell * static_cast<std::size_t>(dims[d]) +
                           static_cast<std::size_t>(box.lo[d] + idx[d]);
                    pad_lin = pad_lin * static_cast<std::size_t>(padded[d]) +
                              static_cast<std::size_t>(idx[d]);
                }
                double theta = u.data[cell] > level_p ? 1.0 : 0.0;
                double U = theta - young.value(young.window_of_cell(cell), p);
                max_abs_u_field = std::max(max_abs_u_field, std::abs(U));
                buf[pad_lin][0] = box.phi[lin] * U;
            }
            fftw_execute(plan);
            for (std::size_t i = 0; i < Npad; ++i)
                spectra[p][i] = std::complex<double>(buf[i][0], buf[i][1]);
        }
        fftw_destroy_plan(plan);
        fftw_free(buf);
        if (max_abs_u_field == 0.0) throw Error("degenerate distribution fields");

        HMeasureMatrix H;
        H.p_grid = young.p_grid;
        H.bins = bins;
        H.spacetime = options.spacetime;
        H.spatial_dim = options.spacetime ? static_cast<int>(D) - 1 : static_cast<int>(D);
        H.window_center = center;
        H.m = m;
        H.r = r;
        H.entries.assign(P * P * B, {0.0, 0.0});

        std::vector<double> kappa(D);
        std::vector<std::complex<double>> v(P);
        for (std::size_t i = 0; i < Npad; ++i) {
            std::size_t rem = i;
            bool zero = true, nyquist = false;
            for (int d = static_cast<int>(D) - 1; d >= 0; --d) {
                auto dd = static_cast<std::size_t>(d);
                int raw = static_cast<int>(rem % static_cast<std::size_t>(padded[dd]));
                rem /= static_cast<std::size_t>(padded[dd]);
                int f = fft_frequency(raw, padded[dd]);
                if (padded[dd] % 2 == 0 && raw == padded[dd] / 2) nyquist = true;
                kappa[dd] = static_cast<double>(f) * dims[dd] /
                            static_cast<double>(padded[dd]); // cycles
                if (f != 0) zero = false;
            }
            if (zero || nyquist) continue;
            int b = bins.bin_of(kappa);
            for (std::size_t p = 0; p < P; ++p) v[p] = spectra[p][i];
            for (std::size_t p = 0; p < P; ++p)
                for (std::size_t q = p; q < P; ++q)
                    H.entries[(p * P + q) * B + static_cast<std::size_t>(b)] +=
                        scale * v[p] * std::conj(v[q]);
        }
        // Hermitian mirror (exact by construction)
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t q = 0; q < p; ++q)
                for (std::size_t b = 0; b < B; ++b)
                    H.entries[(p * P + q) * B + b] = std::conj(H.entries[(q * P + p) * B + b]);

        LadderLevel ladder;
        ladder.m = m;
        ladder.r = r;
        ladder.total_mass = H.total_mass();
        if (!prev.empty()) {
            double worst = 0.0;
            for (std::size_t i = 0; i < H.entries.size(); ++i)
                worst = std::max(worst, std::abs(H.entries[i] - prev[i]));
            ladder.max_delta = worst;
        }
        prev = H.entries;
        result.ladder.push_back(ladder);
        result.per_level.push_back(std::move(H));
    }
    result.matrix = result.per_level.back();
    return result;
}

HMeasureProperties check_hmeasure_properties(const HMeasureMatrix& H,
                                             const YoungMeasureEstimate& nu,
                                             const HMeasurePropertyOptions& options) {
    if (H.p_grid != nu.p_grid) throw Error("H-measure / young p-grid mismatch");
    const int P = static_cast<int>(H.p_grid.size());
    const int B = H.bins.count();
    HMeasureProperties rep;

    // (a) nonnegative definiteness of level submatrices per bin
    double psd_floor = 0.0;
    std::vector<int> subset;
    std::function<void(int, int)> scan = [&](int start, int remaining) {
        if (!subset.empty()) {
            const int s = static_cast<int>(subset.size());
            for (int b = 0; b < B; ++b) {
                Eigen::MatrixXcd M(s, s);
                double trace = 0.0;
                for (int i = 0; i < s; ++i) {
                    for (int j = 0; j < s; ++j)
                        M(i, j) = H.at(subset[static_cast<std::size_t>(i)],
                                       subset[static_cast<std::size_t>(j)], b);
                    trace += M(i, i).real();
                }
                if (trace <= 0.0) continue;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M,
                                                                   Eigen::EigenvaluesOnly);
                psd_floor = std::min(psd_floor, es.eigenvalues().minCoeff() / trace);
            }
        }
        if (remaining == 0) return;
        for (int next = start; next < P; ++next) {
            subset.push_back(next);
            scan(next + 1, remaining - 1);
            subset.pop_back();
        }
    };
    scan(0, options.max_subset);
    rep.psd_floor = psd_floor;
    rep.psd_ok = psd_floor >= -options.psd_tol;

    // (b) variation bound Var mu^{pq} <= 1 + slack
    double var_worst = 0.0;
    for (int p = 0; p < P; ++p)
        for (int q = 0; q < P; ++q) {
            double var = 0.0;
            for (int b = 0; b < B; ++b) var += std::abs(H.at(p, q, b));
            var_worst = std::max(var_worst, var);
        }
    rep.var_worst = var_worst;
    rep.var_ok = var_worst <= 1.0 + options.var_slack;

    // (c) per-bin Cauchy-Schwarz
    double cs_excess = 0.0;
    for (int p = 0; p < P; ++p)
        for (int q = 0; q < P; ++q)
            for (int b = 0; b < B; ++b) {
                double lhs = std::abs(H.at(p, q, b));
                double rhs = std::sqrt(std::max(0.0, H.at(p, p, b).real()) *
                                       std::max(0.0, H.at(q, q, b).real()));
                cs_excess = std::max(cs_excess, lhs - rhs);
            }
    rep.cs_excess = cs_excess;
    rep.cs_ok = cs_excess <= options.cs_tol;

    // (d) continuity in the level index against the Young mass of the gap,
    // evaluated at the window the estimate was localized to
    std::size_t w = nu.window_of_point(H.window_center);
    double cont_excess = 0.0;
    for (int p = 0; p + 1 < P; ++p) {
        double gap = std::max(0.0, nu.value(w, static_cast<std::size_t>(p)) -
                                       nu.value(w, static_cast<std::size_t>(p + 1)));
        double bound = 2.0 * std::sqrt(gap);
        for (int q = 0; q < P; ++q) {
            double var = 0.0;
            for (int b = 0; b < B; ++b) var += std::abs(H.at(p + 1, q, b) - H.at(p, q, b));
            cont_excess = std::max(cont_excess, var - bound);
        }
    }
    rep.cont_excess = cont_excess;
    rep.cont_ok = cont_excess <= options.cont_slack;
    return rep;
}

// ---------------------------------------------------------------------------
// Localization
// ---------------------------------------------------------------------------

namespace {

// Angular distance from a unit space-time direction to the closed ray
// {(tau, s xi)/|.| : tau real, s > 0} (poles belong to the closure).
double ray_distance(const std::vector<double>& c, const std::vector<double>& xi_dir) {
    double tau = c[0];
    double s = 0.0;
    for (std::size_t d = 0; d < xi_dir.size(); ++d) s += c[d + 1] * xi_dir[d];
    auto clamp01 = [](double x) { return std::min(1.0, std::max(-1.0, x)); };
    if (s >= 0.0) return std::acos(clamp01(std::sqrt(tau * tau + s * s)));
    return std::acos(clamp01(std::abs(tau)));
}

} // namespace

LocalizationReport localization_mass(const HMeasureMatrix& H, const LatticeSpec& lattice,
                                     double angular_tol, double dual_radius) {
    if (!H.spacetime) throw Error("localization needs a space-time H-measure");
    if (H.spatial_dim != lattice.n) throw Error("H-measure / lattice dimension mismatch");
    if (H.bins.dim != lattice.n + 1) throw Error("H-measure / lattice dimension mismatch");

    auto duals = enumerate_dual(lattice, dual_radius);
    if (duals.empty()) throw Error("no dual vectors within the localization radius");
    std::vector<std::vector<double>> dirs;
    for (const auto& dv : duals) {
        std::vector<double> dir(dv.xi.size());
        for (std::size_t d = 0; d < dir.size(); ++d) dir[d] = to_double(dv.xi[d]) / dv.norm;
        dirs.push_back(std::move(dir));
    }

    auto s0_distance = [&](const std::vector<double>& c) {
        double best = kTwoPi;
        for (const auto& dir : dirs) best = std::min(best, ray_distance(c, dir));
        return best;
    };

    LocalizationReport rep;
    rep.angular_tol = angular_tol;
    rep.dual_radius = dual_radius;

    double total = 0.0, near = 0.0, pole = 0.0;
    const int P = static_cast<int>(H.p_grid.size());
    for (int b = 0; b < H.bins.count(); ++b) {
        double mass = 0.0;
        for (int p = 0; p < P; ++p)
            for (int q = 0; q < P; ++q) mass += std::abs(H.at(p, q, b));
        const auto& c = H.bins.centers[static_cast<std::size_t>(b)];
        total += mass;
        if (s0_distance(c) <= angular_tol) near += mass;
        if (std::acos(std::min(1.0, std::abs(c[0]))) <= angular_tol) pole += mass;
    }
    if (total <= 0.0) throw Error("empty H-measure");
    rep.fraction = near / total;
    rep.pole_fraction = pole / total;

    // Area fraction of the S0 neighborhood under the same bin rule, by a
    // fixed-seed sphere sampling (deterministic baseline for controls).
    std::mt19937_64 rng(0x5eedba5eULL);
    auto uniform = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const int dim = H.bins.dim;
    const int samples = 200000;
    int hits = 0;
    std::vector<double> point(static_cast<std::size_t>(dim));
    for (int s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            // Box-Muller from deterministic uniforms
            double u1 = std::max(uniform(), 1e-300), u2 = uniform();
            point[static_cast<std::size_t>(d)] =
                std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
            norm2 += point[static_cast<std::size_t>(d)] * point[static_cast<std::size_t>(d)];
        }
        if (norm2 <= 0.0) continue;
        double norm = std::sqrt(norm2);
        for (auto& x : point) x /= norm;
        const auto& c = H.bins.centers[static_cast<std::size_t>(H.bins.bin_of(point))];
        if (s0_distance(c) <= angular_tol) ++hits;
    }
    rep.baseline = static_cast<double>(hits) / samples;
    return rep;
}

// ---------------------------------------------------------------------------
// Rescaled sequences
// ---------------------------------------------------------------------------

std::vector<GridField> rescale_sequence(const Trajectory& trajectory,
                                        const std::vector<int>& k_list,
                                        const std::vector<int>& eval_dims) {
    if (eval_dims.size() < 2) throw Error("space-time evaluation grid needs time and space dims");
    const auto& src_dims = trajectory.fields.front().dims;
    if (eval_dims.size() != src_dims.size() + 1) throw Error("evaluation grid dimension mismatch");
    const int Mt = eval_dims[0];

    std::vector<GridField> out;
    for (int k : k_list) {
        if (k < 1) throw Error("rescaling index must be >= 1");
        for (std::size_t d = 0; d + 1 < eval_dims.size(); ++d)
            if (src_dims[d] < k * eval_dims[d + 1])
                throw Error("resolution insufficient for requested k");
        const double needed_t = static_cast<double>(k) * (Mt - 0.5) / Mt;
        if (trajectory.times.back() < needed_t - 1e-9)
            throw Error("resolution insufficient for requested k");
        double max_gap = 0.0;
        for (std::size_t i = 0; i + 1 < trajectory.times.size(); ++i) {
            if (trajectory.times[i] > needed_t) break;
            max_gap = std::max(max_gap, trajectory.times[i + 1] - trajectory.times[i]);
        }
        if (max_gap > static_cast<double>(k) / Mt + 1e-9)
            throw Error("resolution insufficient for requested k");

        GridField g;
        g.dims = eval_dims;
        g.data.resize(total_cells(eval_dims));
        std::size_t space_cells = total_cells(src_dims);
        std::size_t eval_space = g.size() / static_cast<std::size_t>(Mt);
        std::vector<int> eval_space_dims(eval_dims.begin() + 1, eval_dims.end());
        // precompute spatial source index per evaluation cell
        std::vector<std::size_t> src_of(eval_space);
        for (std::size_t lin = 0; lin < eval_space; ++lin) {
            auto idx = cell_index(eval_space_dims, lin);
            std::size_t cell = 0;
            for (std::size_t d = 0; d < eval_space_dims.size(); ++d) {
                double x = (idx[d] + 0.5) / eval_space_dims[d];
                double y = k * x - std::floor(k * x);
                int j = std::min(src_dims[d] - 1, static_cast<int>(y * src_dims[d]));
                cell = cell * static_cast<std::size_t>(src_dims[d]) + static_cast<std::size_t>(j);
            }
            src_of[lin] = cell;
        }
        (void)space_cells;
        for (int it = 0; it < Mt; ++it) {
            double t = static_cast<double>(k) * (it + 0.5) / Mt;
            auto iter = std::lower_bound(trajectory.times.begin(), trajectory.times.end(), t);
            std::size_t ti = static_cast<std::size_t>(iter - trajectory.times.begin());
            if (ti == trajectory.times.size()) ti -= 1;
            if (ti > 0 && std::abs(trajectory.times[ti - 1] - t) <=
                              std::abs(trajectory.times[ti] - t))
                ti -= 1;
            const auto& src = trajectory.fields[ti].data;
            double* dst = g.data.data() + static_cast<std::size_t>(it) * eval_space;
            for (std::size_t lin = 0; lin < eval_space; ++lin) dst[lin] = src[src_of[lin]];
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<GridField> rescale_wave(const TravelingWave& wave, const std::vector<int>& k_list,
                                    const std::vector<int>& eval_dims) {
    std::vector<GridField> out;
    for (int k : k_list) {
        out.push_back(make_grid_field(eval_dims, [&](const std::vector<double>& tx) {
            std::vector<double> y(tx.begin() + 1, tx.end());
            for (auto& c : y) c *= k;
            return wave.eval_lattice(k * tx[0], y);
        }));
    }
    return out;
}

} // namespace declab
