#include "earl/sobol.hpp"

#include <cmath>
#include <iostream>
#include <set>
#include <tuple>

#include "earl/rng.hpp"

namespace earl {
namespace {

// Joe-Kuo "new-joe-kuo-6" primitive polynomials and initial direction
// numbers for dimensions 2..8 (dimension 1 is the van der Corput radical
// inverse and needs no table row).
struct JoeKuoRow {
    int s;
    std::uint32_t a;
    std::array<std::uint32_t, 5> m;
};

constexpr JoeKuoRow kJoeKuo[] = {
    {1, 0, {1, 0, 0, 0, 0}},    // dim 2
    {2, 1, {1, 3, 0, 0, 0}},    // dim 3
    {3, 1, {1, 3, 1, 0, 0}},    // dim 4
    {3, 2, {1, 1, 1, 0, 0}},    // dim 5
    {4, 1, {1, 1, 3, 3, 0}},    // dim 6
    {4, 4, {1, 3, 5, 13, 0}},   // dim 7
    {5, 2, {1, 1, 5, 5, 17}},   // dim 8
};

std::uint32_t reverse_bits32(std::uint32_t x) {
    x = (x >> 16) | (x << 16);
    x = ((x & 0xff00ff00u) >> 8) | ((x & 0x00ff00ffu) << 8);
    x = ((x & 0xf0f0f0f0u) >> 4) | ((x & 0x0f0f0f0fu) << 4);
    x = ((x & 0xccccccccu) >> 2) | ((x & 0x33333333u) << 2);
    x = ((x & 0xaaaaaaaau) >> 1) | ((x & 0x55555555u) << 1);
    return x;
}

// Laine-Karras style hash; together with the bit reversals it applies a
// nested uniform (Owen) scramble to a 32-bit fixed-point sample.
std::uint32_t owen_scramble(std::uint32_t x, std::uint32_t key) {
    x = reverse_bits32(x);
    x += key;
    x ^= x * 0x6c50b47cu;
    x ^= x * 0xb82f1e52u;
    x ^= x * 0xc7afe638u;
    x ^= x * 0x8d22f6e6u;
    return reverse_bits32(x);
}

}  // namespace

SobolStream::SobolStream(int dimension, std::uint64_t scramble_seed)
    : dim_(dimension), scrambled_(scramble_seed != 0) {
    if (dimension < 1 || dimension > kMaxDimension)
        throw ConfigError("SobolStream: dimension must be in [1, 8]");

    v_.resize(dim_);
    for (int d = 0; d < dim_; ++d) {
        auto& v = v_[d];
        if (d == 0) {
            for (int j = 0; j < kMaxBits; ++j) v[j] = 1u << (kMaxBits - 1 - j);
            continue;
        }
        const JoeKuoRow& row = kJoeKuo[d - 1];
        std::array<std::uint32_t, kMaxBits> m{};
        for (int j = 0; j < row.s; ++j) m[j] = row.m[j];
        for (int k = row.s; k < kMaxBits; ++k) {
            std::uint32_t mk = m[k - row.s] ^ (m[k - row.s] << row.s);
            for (int i = 1; i < row.s; ++i)
                if ((row.a >> (row.s - 1 - i)) & 1u) mk ^= m[k - i] << i;
            m[k] = mk;
        }
        for (int j = 0; j < kMaxBits; ++j) v[j] = m[j] << (kMaxBits - 1 - j);
    }

    if (scrambled_)
        for (int d = 0; d < dim_; ++d)
            keys_[d] = static_cast<std::uint32_t>(derive_seed(scramble_seed, 0x536f626cULL, d));
}

Vec SobolStream::next_point() {
    // Gray-code update: flip the direction number of the lowest zero bit of
    // the previous index. Walks the same point set as natural ordering.
    std::uint64_t im = count_;
    int j = 0;
    while (im & 1u) {
        im >>= 1;
        ++j;
    }
    if (j >= kMaxBits) throw NumericFailure("SobolStream exhausted");
    ++count_;

    Vec p(dim_);
    for (int d = 0; d < dim_; ++d) {
        state_[d] ^= v_[d][j];
        if (scrambled_) {
            const std::uint32_t x = owen_scramble(state_[d] << 1, keys_[d]);
            p[d] = (static_cast<double>(x) + 0.5) * 0x1.0p-32;
        } else {
            p[d] = static_cast<double>(state_[d]) * 0x1.0p-31;
        }
    }
    return p;
}

Configuration scale_to_space(const Vec& point, const SearchSpace& space) {
    if (point.size() != 4)
        throw std::invalid_argument("scale_to_space: point must have 4 components");
    Vec4 u = point;
    return from_unit_cube(u, space);
}

std::vector<Configuration> generate_initial_design(const SearchSpace& space, int n_init,
                                                   std::uint64_t seed, bool scramble,
                                                   int max_n_init) {
    if (n_init < 1) throw ConfigError("generate_initial_design: n_init must be >= 1");
    if (n_init > max_n_init)
        throw ConfigError("generate_initial_design: n_init exceeds maximum of " +
                          std::to_string(max_n_init));
    space.validate();

    SobolStream stream(4, scramble ? seed : 0);
    using Key = std::tuple<int, double, double, double>;
    std::set<Key> seen;
    std::vector<Configuration> design;
    design.reserve(n_init);

    for (int i = 0; i < n_init; ++i) {
        Configuration c = scale_to_space(stream.next_point(), space);
        auto key = [](const Configuration& q) {
            return Key{q.reservoir_size, q.connectivity, q.spectral_radius, q.leak_rate};
        };
        if (seen.count(key(c))) {
            // Size rounding collided with an earlier point; walk outward a
            // neuron at a time to restore distinctness.
            bool fixed = false;
            for (int step = 1; step <= 16 && !fixed; ++step) {
                for (int sign : {+1, -1}) {
                    Configuration alt = c;
                    alt.reservoir_size = c.reservoir_size + sign * step;
                    if (!space.size_range.contains(alt.reservoir_size)) continue;
                    if (!seen.count(key(alt))) {
                        c = alt;
                        fixed = true;
                        break;
                    }
                }
            }
            if (!fixed)
                std::cerr << "warning: initial design keeps a duplicate configuration at point "
                          << i << "\n";
        }
        seen.insert(key(c));
        design.push_back(c);
    }
    return design;
}

}  // namespace earl
