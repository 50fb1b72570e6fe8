#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/beampattern.hpp"
#include "beamfocus/ellipse_model.hpp"
#include "beamfocus/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <type_traits>
#include <variant>

namespace beamfocus {

struct ZeroScheme {};

/// df_m = k alpha (m-1)^2 with k the focusing rate.
struct QuadraticScheme {
    double alpha;
};

/// df_m = (delta/2) |sin(m-1)| / pi + k (m-1)^2, sin argument in radians.
struct SinusoidalScheme {
    double delta;
};

struct CustomScheme {
    OffsetVector<double> offsets;
};

using SchemeSpec = std::variant<ZeroScheme, QuadraticScheme, SinusoidalScheme, CustomScheme>;

/// alpha == 1 cancels the focusing term exactly and leaves no ellipse.
inline bool flagged_degenerate(const SchemeSpec& scheme) {
    const auto* q = std::get_if<QuadraticScheme>(&scheme);
    return q != nullptr && q->alpha == 1.0;
}

template <typename Scalar>
OffsetVector<Scalar> quadratic_scheme(const ArrayConfig<Scalar>& config,
                                      const FieldPoint<Scalar>& target, Scalar alpha) {
    const Scalar k = focusing_rate(config, target);
    const auto count = Eigen::Index(config.element_count());
    OffsetVector<Scalar> offsets(count);
    for (Eigen::Index i = 0; i < count; ++i) offsets(i) = k * alpha * Scalar(i) * Scalar(i);
    return offsets;
}

template <typename Scalar>
OffsetVector<Scalar> sinusoidal_scheme(const ArrayConfig<Scalar>& config,
                                       const FieldPoint<Scalar>& target, Scalar delta) {
    using std::abs;
    using std::sin;
    detail::require(delta >= 0, "sinusoidal_scheme: delta must be >= 0");
    const Scalar k = focusing_rate(config, target);
    const auto count = Eigen::Index(config.element_count());
    OffsetVector<Scalar> offsets(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        offsets(i) = delta / Scalar(2) * abs(sin(Scalar(i))) / kPi<Scalar> +
                     k * Scalar(i) * Scalar(i);
    }
    return offsets;
}

inline OffsetVector<double> make_offsets(const ArrayConfig<double>& config,
                                         const FieldPoint<double>& target,
                                         const SchemeSpec& scheme) {
    return std::visit(
        [&](const auto& s) -> OffsetVector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroScheme>) {
                return zero_offsets(config);
            } else if constexpr (std::is_same_v<T, QuadraticScheme>) {
                return quadratic_scheme(config, target, s.alpha);
            } else if constexpr (std::is_same_v<T, SinusoidalScheme>) {
                return sinusoidal_scheme(config, target, s.delta);
            } else {
                detail::check_offsets(config, s.offsets);
                return s.offsets;
            }
        },
        scheme);
}

template <typename Scalar = double>
struct Beamwidths {
    Scalar delta_range;  // +inf when degenerate
    Scalar delta_angle;
    bool degenerate = false;
};

namespace detail {

// 2 sqrt(M^2 Z / (XZ - Y^2)) and 2 sqrt(M^2 X / (XZ - Y^2))
template <typename Scalar>
std::array<Scalar, 2> extent_factors(const QuadraticForm<Scalar>& qf) {
    using std::sqrt;
    const Scalar m2 = Scalar(qf.element_count) * Scalar(qf.element_count);
    const Scalar disc = qf.discriminant();
    if (!(disc > 0)) throw NotEllipseError("reference form has no ellipse");
    return {Scalar(2) * sqrt(m2 * qf.Z / disc), Scalar(2) * sqrt(m2 * qf.X / disc)};
}

template <typename Scalar>
QuadraticForm<Scalar> phased_form(const ArrayConfig<Scalar>& config,
                                  const FieldPoint<Scalar>& target) {
    return quadratic_form(xi_vector(config, target, zero_offsets(config)), config, target);
}

// Form of the unit shape xi_m = |sin(m-1)| / pi, i.e. the sinusoidal scheme
// with delta = 2. Built from the shape itself: going through the offsets
// would subtract the large k (m-1)^2 term back out.
template <typename Scalar>
QuadraticForm<Scalar> sinusoidal_unit_form(const ArrayConfig<Scalar>& config,
                                           const FieldPoint<Scalar>& target) {
    using std::abs;
    using std::sin;
    const auto count = Eigen::Index(config.element_count());
    const Vector<Scalar> shape = Vector<Scalar>::LinSpaced(count, Scalar(0), Scalar(count - 1))
                                     .unaryExpr([](Scalar x) { return abs(sin(x)) / kPi<Scalar>; });
    const Vector<Scalar> m = index_vector<Scalar>(count);
    return assemble_form(pair_moment(shape, shape), pair_moment(shape, m), pair_moment(m, m),
                         config, target);
}

}  // namespace detail

template <typename Scalar>
Beamwidths<Scalar> quadratic_beamwidths(const ArrayConfig<Scalar>& config,
                                    const FieldPoint<Scalar>& target, Scalar alpha) {
    using std::abs;
    const auto [range_factor, angle_width] =
        detail::extent_factors(detail::phased_form(config, target));
    const Scalar gap = abs(Scalar(1) - alpha);
    if (gap == Scalar(0)) {
        return {std::numeric_limits<Scalar>::infinity(), angle_width, true};
    }
    return {range_factor / gap, angle_width, false};
}

template <typename Scalar = double>
struct SinusoidalBeamwidths {
    Scalar delta_range;          // consistent with the general ellipse
    Scalar delta_angle;
    Scalar printed_delta_range;  // (2/delta) sqrt(M^2 Z / (XZ - Y^2)) as printed
    Scalar leading_constant;     // delta_range * delta / sqrt(M^2 Z / (XZ - Y^2))
};

/// Range and angle widths of the sinusoidal scheme. The leading constant in
/// front of the unit-shape factor is measured against the general ellipse
/// evaluated on the actual offsets rather than taken on faith.
template <typename Scalar>
SinusoidalBeamwidths<Scalar> sinusoidal_beamwidths(const ArrayConfig<Scalar>& config,
                                              const FieldPoint<Scalar>& target, Scalar delta) {
    using std::sqrt;
    detail::require(delta > 0, "sinusoidal_beamwidths: delta must be > 0");
    const auto unit = detail::sinusoidal_unit_form(config, target);
    const Scalar m2 = Scalar(unit.element_count) * Scalar(unit.element_count);
    const Scalar shape_factor = sqrt(m2 * unit.Z / unit.discriminant());
    const auto actual = analyze(config, target, sinusoidal_scheme(config, target, delta));

    SinusoidalBeamwidths<Scalar> out;
    out.delta_range = actual.delta_range;
    out.delta_angle = actual.delta_angle;
    out.printed_delta_range = Scalar(2) / delta * shape_factor;
    out.leading_constant = actual.delta_range * delta / shape_factor;
    return out;
}

/// Both roots alpha = 1 -+ K / rho of Delta_R(alpha) = rho, ascending.
template <typename Scalar>
std::array<Scalar, 2> solve_alpha_for_range(const ArrayConfig<Scalar>& config,
                                            const FieldPoint<Scalar>& target, Scalar rho) {
    if (!(rho > 0)) throw DomainError("solve_alpha_for_range: range width must be > 0");
    const Scalar k = detail::extent_factors(detail::phased_form(config, target))[0];
    return {Scalar(1) - k / rho, Scalar(1) + k / rho};
}

/// The root with the smaller |alpha| (smaller absolute offsets).
template <typename Scalar>
Scalar preferred_alpha(const std::array<Scalar, 2>& roots) {
    using std::abs;
    return abs(roots[0]) <= abs(roots[1]) ? roots[0] : roots[1];
}

template <typename Scalar>
Scalar solve_delta_for_range(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                             Scalar rho) {
    if (!(rho > 0)) throw DomainError("solve_delta_for_range: range width must be > 0");
    // xi = (delta / 2) * unit shape, so Delta_R * delta = 2 * Delta_R(unit form).
    const Scalar width_times_delta =
        Scalar(2) * ellipse_metrics(detail::sinusoidal_unit_form(config, target), target).delta_range;
    return width_times_delta / rho;
}

inline constexpr double kDefaultDegeneracyTolerance = 1e-9;

/// True when xi is affine in the element index, i.e. the offsets belong to
/// the family df_m = beta m / 2 + k (m-1)^2 + C that collapses the ellipse
/// into parallel lines. Decided by a least-squares affine fit.
template <typename Scalar>
bool is_degenerate_family(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                          const OffsetVector<Scalar>& offsets,
                          Scalar tolerance = Scalar(kDefaultDegeneracyTolerance)) {
    const auto xi = xi_vector(config, target, offsets);
    const auto count = xi.size();
    Matrix<Scalar> design(count, 2);
    design.col(0) = detail::index_vector<Scalar>(count);
    design.col(1).setOnes();
    const Vector<Scalar> coeffs = design.colPivHouseholderQr().solve(xi.values());
    const Scalar residual = (design * coeffs - xi.values()).norm();
    const Scalar scale = std::max({xi.values().norm(), offsets.norm(),
                                   std::numeric_limits<Scalar>::min()});
    return residual <= tolerance * scale;
}

}  // namespace beamfocus
