#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/parallel.hpp"
#include "beamfocus/types.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace beamfocus {

/// Per-element carrier frequency offsets in Hz; element m lives at index m-1.
template <typename Scalar = double>
using OffsetVector = Vector<Scalar>;

enum class DistanceMode { exact, approx };

template <typename Scalar>
OffsetVector<Scalar> zero_offsets(const ArrayConfig<Scalar>& config) {
    return OffsetVector<Scalar>::Zero(Eigen::Index(config.element_count()));
}

namespace detail {

template <typename Scalar>
void check_offsets(const ArrayConfig<Scalar>& config, const OffsetVector<Scalar>& offsets) {
    if (std::size_t(offsets.size()) != config.element_count()) {
        throw ContractViolation("offset vector has " + std::to_string(offsets.size()) +
                                " entries, array has " +
                                std::to_string(config.element_count()) + " elements");
    }
    require(offsets.allFinite(), "offset vector contains non-finite entries");
}

// 2*pi*cycles reduced to (-pi, pi]; the integer part is removed before the
// multiplication so large cycle counts keep their fractional precision.
template <typename Scalar>
Scalar reduce_cycles(Scalar cycles) {
    using std::nearbyint;
    Scalar phase = Scalar(2) * kPi<Scalar> * (cycles - nearbyint(cycles));
    if (phase <= -kPi<Scalar>) phase += Scalar(2) * kPi<Scalar>;
    return phase;
}

template <typename Scalar>
Scalar element_distance(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& point,
                        std::size_t m, DistanceMode mode) {
    return mode == DistanceMode::exact ? exact_element_distance(config, point, m)
                                       : approx_element_distance(config, point, m);
}

}  // namespace detail

/// Phase of the matched weight exp(-j 2 pi f_m r_m^D / c), in (-pi, pi].
template <typename Scalar>
Scalar matched_weight_phase(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                            const OffsetVector<Scalar>& offsets, std::size_t m,
                            DistanceMode mode = DistanceMode::approx) {
    detail::check_offsets(config, offsets);
    detail::require(target.range > 0, "matched_weight_phase: target range must be > 0");
    const Scalar fm = config.carrier_frequency() + offsets(Eigen::Index(m - 1));
    const Scalar rD = detail::element_distance(config, target, m, mode);
    return detail::reduce_cycles(-fm * rD / config.wave_speed());
}

template <typename Scalar>
ComplexVector<Scalar> matched_weights(const ArrayConfig<Scalar>& config,
                                      const FieldPoint<Scalar>& target,
                                      const OffsetVector<Scalar>& offsets,
                                      DistanceMode mode = DistanceMode::approx) {
    const auto count = Eigen::Index(config.element_count());
    ComplexVector<Scalar> w(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        w(i) = std::polar(Scalar(1),
                          matched_weight_phase(config, target, offsets, std::size_t(i + 1), mode));
    }
    return w;
}

/// Received amplitude (1/r) sum_m w_m exp(j 2 pi f_m r_m / c) for arbitrary weights.
template <typename Scalar>
std::complex<Scalar> received_signal(const ArrayConfig<Scalar>& config,
                                     const ComplexVector<Scalar>& weights,
                                     const OffsetVector<Scalar>& offsets,
                                     const FieldPoint<Scalar>& eval_point,
                                     DistanceMode mode = DistanceMode::approx) {
    detail::check_offsets(config, offsets);
    detail::require(std::size_t(weights.size()) == config.element_count(),
                    "received_signal: weight count differs from element count");
    detail::require(eval_point.range > 0, "received_signal: range must be > 0");
    std::complex<Scalar> sum(0, 0);
    for (std::size_t m = 1; m <= config.element_count(); ++m) {
        const Scalar fm = config.carrier_frequency() + offsets(Eigen::Index(m - 1));
        const Scalar rm = detail::element_distance(config, eval_point, m, mode);
        sum += weights(Eigen::Index(m - 1)) *
               std::polar(Scalar(1), detail::reduce_cycles(fm * rm / config.wave_speed()));
    }
    return sum / eval_point.range;
}

/// Received amplitude with weights matched to `target`.
template <typename Scalar>
std::complex<Scalar> received_signal(const ArrayConfig<Scalar>& config,
                                     const FieldPoint<Scalar>& target,
                                     const OffsetVector<Scalar>& offsets,
                                     const FieldPoint<Scalar>& eval_point,
                                     DistanceMode mode = DistanceMode::approx) {
    return received_signal(config, matched_weights(config, target, offsets, mode), offsets,
                           eval_point, mode);
}

/// Evaluates S(r, theta) = |sum_m exp(j 2 pi f_m (r_m - r_m^D) / c)|^2 for a
/// fixed focus target. The distance difference r_m - r_m^D is formed
/// algebraically per element, and the phase 2 pi f_c (r - R_D) / c common to
/// every element is dropped, so no large phase is ever reduced.
template <typename Scalar = double>
class PatternKernel {
public:
    PatternKernel(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                  const OffsetVector<Scalar>& offsets, DistanceMode mode)
        : config_(config), target_(target), mode_(mode) {
        using std::sin;
        using std::sqrt;
        detail::check_offsets(config, offsets);
        detail::require(target.range > 0, "PatternKernel: target range must be > 0");
        const auto count = Eigen::Index(config.element_count());
        const Scalar two_pi_over_c = Scalar(2) * kPi<Scalar> / config.wave_speed();
        carrier_wavenumber_ = two_pi_over_c * config.carrier_frequency();
        offset_wavenumber_ = two_pi_over_c * offsets;
        position_.resize(count);
        target_excess_.resize(count);
        const Scalar rD = target.range;
        const Scalar sD = sin(target.angle);
        for (Eigen::Index i = 0; i < count; ++i) {
            const Scalar o = Scalar(i) * config.spacing();
            position_(i) = o;
            if (mode == DistanceMode::exact) {
                // r_m^D - R_D = (o^2 + 2 R_D o sin) / (r_m^D + R_D)
                const Scalar num = o * o + Scalar(2) * rD * o * sD;
                const Scalar dist = sqrt(rD * rD + num);
                target_excess_(i) = num / (dist + rD);
            } else {
                target_excess_(i) = o * o / (Scalar(2) * rD) + o * sD;
            }
        }
    }

    std::size_t element_count() const { return config_.element_count(); }
    const FieldPoint<Scalar>& target() const { return target_; }

    Scalar power(const FieldPoint<Scalar>& point) const {
        using std::cos;
        using std::sin;
        using std::sqrt;
        const Scalar r = point.range;
        const Scalar rD = target_.range;
        const Scalar u = r - rD;
        const Scalar s = sin(point.angle);
        const Scalar dsin = Scalar(2) * cos((point.angle + target_.angle) / 2) *
                            sin((point.angle - target_.angle) / 2);
        Scalar re = 0;
        Scalar im = 0;
        const Eigen::Index count = position_.size();
        for (Eigen::Index i = 0; i < count; ++i) {
            const Scalar o = position_(i);
            Scalar excess;  // (r_m - r_m^D) - (r - R_D)
            if (mode_ == DistanceMode::exact) {
                const Scalar num = o * o + Scalar(2) * r * o * s;
                excess = num / (sqrt(r * r + num) + r) - target_excess_(i);
            } else {
                excess = -o * o * u / (Scalar(2) * r * rD) + o * dsin;
            }
            const Scalar phase =
                carrier_wavenumber_ * excess + offset_wavenumber_(i) * (u + excess);
            re += cos(phase);
            im += sin(phase);
        }
        return re * re + im * im;
    }

private:
    ArrayConfig<Scalar> config_;
    FieldPoint<Scalar> target_;
    DistanceMode mode_;
    Scalar carrier_wavenumber_{};
    Vector<Scalar> offset_wavenumber_;
    Vector<Scalar> position_;
    Vector<Scalar> target_excess_;
};

template <typename Scalar>
Scalar beampattern_value(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                         const OffsetVector<Scalar>& offsets, const FieldPoint<Scalar>& eval_point,
                         DistanceMode mode = DistanceMode::approx) {
    detail::require(eval_point.range > 0, "beampattern_value: range must be > 0");
    return PatternKernel<Scalar>(config, target, offsets, mode).power(eval_point);
}

/// Rectangular (range, angle) sampling lattice; both axes include their end
/// points. Angles in radians.
template <typename Scalar = double>
struct BeamGridSpec {
    Scalar range_min;
    Scalar range_max;
    Scalar angle_min;
    Scalar angle_max;
    std::size_t range_samples;
    std::size_t angle_samples;

    void validate() const {
        detail::require(range_min > 0, "BeamGridSpec: range_min must be > 0");
        detail::require(range_min < range_max, "BeamGridSpec: range_min must be < range_max");
        detail::require(angle_min < angle_max, "BeamGridSpec: angle_min must be < angle_max");
        detail::require(angle_min > -kPi<Scalar> / 2 && angle_max < kPi<Scalar> / 2,
                        "BeamGridSpec: angles must lie in (-pi/2, pi/2)");
        detail::require(range_samples >= 2 && angle_samples >= 2,
                        "BeamGridSpec: at least 2 samples per axis");
    }

    Scalar range_at(std::size_t i) const {
        return range_min + (range_max - range_min) * Scalar(i) / Scalar(range_samples - 1);
    }
    Scalar angle_at(std::size_t j) const {
        return angle_min + (angle_max - angle_min) * Scalar(j) / Scalar(angle_samples - 1);
    }
    Scalar range_step() const { return (range_max - range_min) / Scalar(range_samples - 1); }
    Scalar angle_step() const { return (angle_max - angle_min) / Scalar(angle_samples - 1); }
};

/// Sampled beampattern. values(i, j) is the power at (range_at(i), angle_at(j)):
/// rows run over range, columns over angle, and flat output is range-major.
template <typename Scalar = double>
struct BeamGrid {
    BeamGridSpec<Scalar> spec;
    Matrix<Scalar> values;
    FieldPoint<Scalar> target;
    Scalar peak_power;
};

/// Default cap on (grid points x elements) per grid evaluation.
inline constexpr std::uint64_t kDefaultGridBudget = 4'000'000'000ULL;

template <typename Scalar>
BeamGrid<Scalar> beampattern_grid(const ArrayConfig<Scalar>& config,
                                  const FieldPoint<Scalar>& target,
                                  const OffsetVector<Scalar>& offsets,
                                  const BeamGridSpec<Scalar>& spec,
                                  DistanceMode mode = DistanceMode::approx,
                                  std::uint64_t budget = kDefaultGridBudget) {
    spec.validate();
    const std::uint64_t work = std::uint64_t(spec.range_samples) * spec.angle_samples *
                               config.element_count();
    if (work > budget) {
        throw BudgetExceededError("grid needs " + std::to_string(work) +
                                  " element evaluations, budget is " + std::to_string(budget));
    }
    const PatternKernel<Scalar> kernel(config, target, offsets, mode);
    BeamGrid<Scalar> grid{spec,
                          Matrix<Scalar>(Eigen::Index(spec.range_samples),
                                         Eigen::Index(spec.angle_samples)),
                          target, Scalar(config.element_count() * config.element_count())};
    parallel_for(spec.range_samples, [&](std::size_t i) {
        const Scalar r = spec.range_at(i);
        for (std::size_t j = 0; j < spec.angle_samples; ++j) {
            grid.values(Eigen::Index(i), Eigen::Index(j)) =
                kernel.power(FieldPoint<Scalar>{r, spec.angle_at(j)});
        }
    });
    return grid;
}

}  // namespace beamfocus
