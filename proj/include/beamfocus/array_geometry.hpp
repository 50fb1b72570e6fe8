#pragma once

#include "beamfocus/types.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace beamfocus {

/// Uniform linear transmit array. The first element sits at the origin and
/// element m (1-based) at (m-1)*spacing along the array axis.
template <typename Scalar = double>
class ArrayConfig {
public:
    ArrayConfig(std::size_t element_count, Scalar spacing, Scalar carrier_frequency,
                Scalar wave_speed = Scalar(kSpeedOfLight))
        : element_count_(element_count), spacing_(spacing),
          carrier_frequency_(carrier_frequency), wave_speed_(wave_speed) {
        detail::require(element_count >= 1, "ArrayConfig: element_count must be >= 1");
        detail::require(std::isfinite(double(spacing)) && spacing > 0,
                        "ArrayConfig: spacing must be > 0");
        detail::require(std::isfinite(double(carrier_frequency)) && carrier_frequency > 0,
                        "ArrayConfig: carrier_frequency must be > 0");
        detail::require(std::isfinite(double(wave_speed)) && wave_speed > 0,
                        "ArrayConfig: wave_speed must be > 0");
    }

    /// Spacing set to half the carrier wavelength.
    static ArrayConfig with_half_wavelength_spacing(std::size_t element_count,
                                                    Scalar carrier_frequency,
                                                    Scalar wave_speed = Scalar(kSpeedOfLight));

    /// Spacing derived from the total aperture: d = D / (M - 1).
    static ArrayConfig from_aperture(std::size_t element_count, Scalar aperture,
                                     Scalar carrier_frequency,
                                     Scalar wave_speed = Scalar(kSpeedOfLight)) {
        detail::require(element_count >= 2, "from_aperture: element_count must be >= 2");
        detail::require(aperture > 0, "from_aperture: aperture must be > 0");
        return ArrayConfig(element_count, aperture / Scalar(element_count - 1),
                           carrier_frequency, wave_speed);
    }

    std::size_t element_count() const { return element_count_; }
    Scalar spacing() const { return spacing_; }
    Scalar carrier_frequency() const { return carrier_frequency_; }
    Scalar wave_speed() const { return wave_speed_; }
    Scalar wavelength() const { return wave_speed_ / carrier_frequency_; }
    Scalar aperture() const { return Scalar(element_count_ - 1) * spacing_; }

    template <typename Other>
    ArrayConfig<Other> cast() const {
        return ArrayConfig<Other>(element_count_, Other(spacing_), Other(carrier_frequency_),
                                  Other(wave_speed_));
    }

private:
    std::size_t element_count_;
    Scalar spacing_;
    Scalar carrier_frequency_;
    Scalar wave_speed_;
};

/// Polar position (range in metres, angle in radians from broadside).
template <typename Scalar = double>
struct FieldPoint {
    Scalar range;
    Scalar angle;

    static FieldPoint checked(Scalar range, Scalar angle) {
        detail::require(range > 0, "FieldPoint: range must be > 0");
        detail::require(std::abs(angle) < kPi<Scalar> / 2,
                        "FieldPoint: angle must lie in (-pi/2, pi/2)");
        return FieldPoint{range, angle};
    }

    friend bool operator==(const FieldPoint&, const FieldPoint&) = default;
};

template <typename Scalar>
Scalar half_wavelength_spacing(Scalar carrier_frequency,
                               Scalar wave_speed = Scalar(kSpeedOfLight)) {
    detail::require(carrier_frequency > 0, "half_wavelength_spacing: frequency must be > 0");
    return wave_speed / (Scalar(2) * carrier_frequency);
}

template <typename Scalar>
ArrayConfig<Scalar> ArrayConfig<Scalar>::with_half_wavelength_spacing(std::size_t element_count,
                                                                      Scalar carrier_frequency,
                                                                      Scalar wave_speed) {
    return ArrayConfig(element_count, half_wavelength_spacing(carrier_frequency, wave_speed),
                       carrier_frequency, wave_speed);
}

/// Far-field boundary 2 D^2 / lambda.
template <typename Scalar>
Scalar rayleigh_distance(Scalar aperture, Scalar wavelength) {
    detail::require(aperture >= 0, "rayleigh_distance: aperture must be >= 0");
    detail::require(wavelength > 0, "rayleigh_distance: wavelength must be > 0");
    return Scalar(2) * aperture * aperture / wavelength;
}

namespace detail {

inline void check_element_index(std::size_t m, std::size_t count) {
    if (m < 1 || m > count) {
        throw ContractViolation("element index " + std::to_string(m) + " outside [1, " +
                                std::to_string(count) + "]");
    }
}

}  // namespace detail

/// Cosine-rule distance from element m (1-based) to the point.
template <typename Scalar>
Scalar exact_element_distance(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& point,
                              std::size_t m) {
    using std::sin;
    using std::sqrt;
    detail::check_element_index(m, config.element_count());
    if (m == 1) return point.range;
    const Scalar offset = Scalar(m - 1) * config.spacing();
    const Scalar r = point.range;
    return sqrt(r * r + offset * offset + Scalar(2) * r * offset * sin(point.angle));
}

/// Second-order (Fresnel) expansion of the element distance, valid for
/// (m-1) d << r.
template <typename Scalar>
Scalar approx_element_distance(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& point,
                               std::size_t m) {
    using std::sin;
    detail::check_element_index(m, config.element_count());
    const Scalar offset = Scalar(m - 1) * config.spacing();
    const Scalar r = point.range;
    return r + offset * offset / (Scalar(2) * r) + offset * sin(point.angle);
}

}  // namespace beamfocus
