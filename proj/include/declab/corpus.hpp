#pragma once

#include "declab/flux.hpp"
#include "declab/lattice.hpp"
#include "declab/microscope.hpp"

#include <cstdint>
#include <vector>

namespace declab {

/// Deterministic RNG helpers: raw mt19937_64 bits only, no library
/// distributions (their sequences are implementation-defined).
struct DetRng {
    explicit DetRng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64();
    double uniform();                        // [0, 1)
    long long uniform_int(long long lo, long long hi); // inclusive
private:
    std::uint64_t state;
};

struct CorpusCase {
    FluxPL flux;
    LatticeSpec lattice;
    Rational mean_state; // I
};

/// Random rational PL fluxes, lattices and mean states for round-trip and
/// property suites. Mixes interior means, breakpoint means, and deliberately
/// affine vicinities so both ND2 verdicts appear.
std::vector<CorpusCase> random_flux_corpus(std::uint64_t seed, int count, int max_dim = 2);

/// Strictly convex sampled 1-D fluxes (consecutive slopes strictly increasing).
FluxPL random_convex_flux(DetRng& rng, int pieces);

/// White-noise field on the given grid, values uniform in [-1, 1].
GridField noise_field(std::uint64_t seed, const std::vector<int>& dims);

} // namespace declab
