#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/types.hpp"

#include <cmath>
#include <random>

namespace bf_test {

using beamfocus::ArrayConfig;
using beamfocus::FieldPoint;

inline constexpr double kC = 3e8;
inline constexpr double kFc = 340e9;

// 340 GHz, half-wavelength spacing with c = 3e8, 680 elements, focus at 15 m / 20 deg.
inline ArrayConfig<double> table_config() {
    return ArrayConfig<double>::with_half_wavelength_spacing(680, kFc, kC);
}

inline FieldPoint<double> table_target() {
    return FieldPoint<double>{15.0, beamfocus::deg_to_rad(20.0)};
}

// Zero-offset array with a 0.3 m aperture at 340 GHz, focus at 10 m / 20 deg.
inline ArrayConfig<double> aperture_config() {
    return ArrayConfig<double>::from_aperture(680, 0.3, kFc, kC);
}

inline FieldPoint<double> aperture_target() {
    return FieldPoint<double>{10.0, beamfocus::deg_to_rad(20.0)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

private:
    std::mt19937_64 engine_;
};

}  // namespace bf_test
