#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "earl/search_space.hpp"
#include "earl/types.hpp"

namespace earl {

// Low-discrepancy point stream over the unit hypercube, built from the
// Joe-Kuo direction numbers with Gray-code index updates. The all-zeros
// point at index 0 is never emitted, so every component lies in (0,1).
// A nonzero scramble_seed switches on hash-based Owen scrambling; the
// default stream is unscrambled and therefore seed-independent.
class SobolStream {
public:
    static constexpr int kMaxDimension = 8;
    static constexpr int kMaxBits = 31;

    explicit SobolStream(int dimension, std::uint64_t scramble_seed = 0);

    // Point at next_index; advances the stream.
    Vec next_point();

    int dimension() const { return dim_; }
    std::uint64_t next_index() const { return count_ + 1; }
    bool scrambled() const { return scrambled_; }

private:
    int dim_;
    bool scrambled_;
    std::uint64_t count_ = 0;
    std::array<std::uint32_t, kMaxDimension> state_{};
    std::array<std::uint32_t, kMaxDimension> keys_{};
    std::vector<std::array<std::uint32_t, kMaxBits>> v_;
};

// Maps a 4-component unit-cube point onto the search box. The integer size
// dimension rounds to the nearest neuron count and clamps into range; the
// real dimensions are plain linear maps.
Configuration scale_to_space(const Vec& point, const SearchSpace& space);

// First n_init configurations of the scaled Sobol design. Exact duplicate
// configurations (possible once the size dimension rounds) are nudged by
// whole neurons until distinct; after bounded retries a duplicate is kept
// and a warning is printed.
std::vector<Configuration> generate_initial_design(const SearchSpace& space, int n_init,
                                                   std::uint64_t seed, bool scramble = false,
                                                   int max_n_init = 1 << 16);

}  // namespace earl
