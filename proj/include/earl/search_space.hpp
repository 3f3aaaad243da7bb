#pragma once

#include <cmath>
#include <string>

#include "earl/types.hpp"

namespace earl {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double span() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct IntInterval {
    int lo = 1;
    int hi = 2;

    int span() const { return hi - lo; }
    bool contains(int x) const { return x >= lo && x <= hi; }
};

// The four-dimensional hyperparameter domain. Defaults are the standard
// bounds used by the built-in optimizer configs.
struct SearchSpace {
    IntInterval size_range{100, 1000};      // neuron count
    Interval conn_range{0.2, 0.7};          // connection probability
    Interval spectral_range{0.6, 1.1};      // spectral radius
    Interval leak_range{0.1, 0.4};          // leak rate

    void validate() const;
};

// One point in the search space.
struct Configuration {
    int reservoir_size = 0;
    double connectivity = 0.0;
    double spectral_radius = 0.0;
    double leak_rate = 0.0;

    bool operator==(const Configuration&) const = default;
};

inline void SearchSpace::validate() const {
    if (size_range.lo >= size_range.hi || size_range.lo <= 0)
        throw ConfigError("size_range must satisfy 0 < lo < hi");
    if (conn_range.lo >= conn_range.hi || conn_range.lo <= 0.0 || conn_range.hi > 1.0)
        throw ConfigError("conn_range must be a subinterval of (0,1] with lo < hi");
    if (spectral_range.lo >= spectral_range.hi)
        throw ConfigError("spectral_range must satisfy lo < hi");
    if (leak_range.lo >= leak_range.hi || leak_range.lo <= 0.0 || leak_range.hi > 1.0)
        throw ConfigError("leak_range must be a subinterval of (0,1] with lo < hi");
}

inline bool in_space(const Configuration& c, const SearchSpace& s) {
    return s.size_range.contains(c.reservoir_size) &&
           s.conn_range.contains(c.connectivity) &&
           s.spectral_range.contains(c.spectral_radius) &&
           s.leak_range.contains(c.leak_rate);
}

// Normalized image in the unit hypercube; the integer dimension is mapped
// continuously so ARD length-scales stay comparable across dimensions.
inline Vec4 to_unit_cube(const Configuration& c, const SearchSpace& s) {
    Vec4 u;
    u[0] = (c.reservoir_size - s.size_range.lo) /
           static_cast<double>(s.size_range.span());
    u[1] = (c.connectivity - s.conn_range.lo) / s.conn_range.span();
    u[2] = (c.spectral_radius - s.spectral_range.lo) / s.spectral_range.span();
    u[3] = (c.leak_rate - s.leak_range.lo) / s.leak_range.span();
    return u;
}

inline Configuration from_unit_cube(const Vec4& u, const SearchSpace& s) {
    Configuration c;
    const double raw = s.size_range.lo + u[0] * s.size_range.span();
    const int size = static_cast<int>(std::lround(raw));
    c.reservoir_size = std::min(std::max(size, s.size_range.lo), s.size_range.hi);
    c.connectivity = s.conn_range.lo + u[1] * s.conn_range.span();
    c.spectral_radius = s.spectral_range.lo + u[2] * s.spectral_range.span();
    c.leak_rate = s.leak_range.lo + u[3] * s.leak_range.span();
    return c;
}

}  // namespace earl
