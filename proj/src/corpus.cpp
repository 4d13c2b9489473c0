#include "declab/corpus.hpp"

#include <algorithm>

namespace declab {

std::uint64_t DetRng::next_u64() {
    // splitmix64: small, fast, and stable across platforms
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double DetRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

long long DetRng::uniform_int(long long lo, long long hi) {
    return lo + static_cast<long long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

Rational random_rational(DetRng& rng, long long num_range, long long max_den) {
    long long den = rng.uniform_int(1, max_den);
    long long num = rng.uniform_int(-num_range * den, num_range * den);
    return Rational(num, den);
}

RatMat random_lattice_matrix(DetRng& rng, int n) {
    for (;;) {
        RatMat B;
        B.n = n;
        B.a.assign(static_cast<std::size_t>(n) * n, Rational(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B.at(i, j) = random_rational(rng, 2, 4);
        // keep generators away from degeneracy
        if (rat_abs(rat_det(B)) >= Rational(1, 4)) return B;
    }
}

} // namespace

std::vector<CorpusCase> random_flux_corpus(std::uint64_t seed, int count, int max_dim) {
    DetRng rng(seed);
    std::vector<CorpusCase> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        int n = static_cast<int>(rng.uniform_int(1, max_dim));
        int pieces = static_cast<int>(rng.uniform_int(2, 6));

        std::vector<Rational> bp;
        Rational x = random_rational(rng, 2, 4);
        bp.push_back(x);
        for (int j = 0; j < pieces; ++j) {
            x += Rational(rng.uniform_int(1, 8), 8);
            bp.push_back(x);
        }
        std::vector<std::vector<Rational>> val;
        for (std::size_t j = 0; j < bp.size(); ++j) {
            std::vector<Rational> v(static_cast<std::size_t>(n));
            for (int d = 0; d < n; ++d) v[static_cast<std::size_t>(d)] = random_rational(rng, 4, 6);
            val.push_back(std::move(v));
        }
        CorpusCase c{make_flux(bp, val), make_lattice(random_lattice_matrix(rng, n)),
                     Rational(0)};

        // Mean placement mix: strictly inside a piece, exactly on a breakpoint,
        // or outside the breakpoint range (affine extension region).
        long long kind = rng.uniform_int(0, 3);
        if (kind == 0) {
            std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, pieces - 1));
            c.mean_state = (c.flux.bp[j] + c.flux.bp[j + 1]) / 2;
        } else if (kind == 1) {
            std::size_t j =
                static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(bp.size()) - 1));
            c.mean_state = c.flux.bp[j];
        } else if (kind == 2) {
            c.mean_state = c.flux.bp.back() + Rational(1, 2);
        } else {
            std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, pieces - 1));
            c.mean_state = (c.flux.bp[j] * 3 + c.flux.bp[j + 1]) / 4;
        }
        out.push_back(std::move(c));
    }
    return out;
}

FluxPL random_convex_flux(DetRng& rng, int pieces) {
    std::vector<Rational> bp, slopes;
    Rational x = random_rational(rng, 2, 4);
    bp.push_back(x);
    for (int j = 0; j < pieces; ++j) {
        x += Rational(rng.uniform_int(1, 8), 8);
        bp.push_back(x);
    }
    Rational s = random_rational(rng, 3, 4);
    for (int j = 0; j < pieces; ++j) {
        s += Rational(rng.uniform_int(1, 6), 6); // strictly increasing slopes
        slopes.push_back(s);
    }
    std::vector<std::vector<Rational>> val;
    Rational v = random_rational(rng, 2, 4);
    val.push_back({v});
    for (int j = 0; j < pieces; ++j) {
        v += slopes[static_cast<std::size_t>(j)] * (bp[static_cast<std::size_t>(j) + 1] -
                                                    bp[static_cast<std::size_t>(j)]);
        val.push_back({v});
    }
    return make_flux(std::move(bp), std::move(val));
}

GridField noise_field(std::uint64_t seed, const std::vector<int>& dims) {
    DetRng rng(seed);
    return make_grid_field(dims, [&](const std::vector<double>&) {
        return 2.0 * rng.uniform() - 1.0;
    });
}

} // namespace declab
