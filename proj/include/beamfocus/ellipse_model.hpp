#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/beampattern.hpp"
#include "beamfocus/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>

namespace beamfocus {

/// Effective offsets xi_m = df_m - (d^2 f_c / (2 R_D^2)) (m-1)^2. Only
/// constructible through xi_vector().
template <typename Scalar = double>
class XiVector {
public:
    const Vector<Scalar>& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    Scalar operator()(Eigen::Index i) const { return values_(i); }

private:
    explicit XiVector(Vector<Scalar> values) : values_(std::move(values)) {}
    Vector<Scalar> values_;

    template <typename S>
    friend XiVector<S> xi_vector(const ArrayConfig<S>&, const FieldPoint<S>&,
                                 const OffsetVector<S>&);
};

/// Quadratic focusing rate d^2 f_c / (2 R_D^2), in Hz per squared index.
template <typename Scalar>
Scalar focusing_rate(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target) {
    detail::require(target.range > 0, "focusing_rate: target range must be > 0");
    const Scalar d = config.spacing();
    return d * d * config.carrier_frequency() / (Scalar(2) * target.range * target.range);
}

template <typename Scalar>
XiVector<Scalar> xi_vector(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                           const OffsetVector<Scalar>& offsets) {
    detail::check_offsets(config, offsets);
    const Scalar k = focusing_rate(config, target);
    const auto count = offsets.size();
    Vector<Scalar> xi(count);
    for (Eigen::Index i = 0; i < count; ++i) xi(i) = offsets(i) - k * Scalar(i) * Scalar(i);
    return XiVector<Scalar>(std::move(xi));
}

enum class Normalization { uncalibrated, calibrated };

inline std::string_view to_string(Normalization n) {
    return n == Normalization::uncalibrated ? "uncalibrated" : "calibrated";
}

/// Coefficients of X u^2 + 2 Y u v + Z v^2 = M^2 with u = R - R_D (m) and
/// v = theta - theta_D (rad). Calibrated forms are the printed coefficients
/// divided by kappa^2, which stretches every extent by kappa.
template <typename Scalar = double>
struct QuadraticForm {
    Scalar X;
    Scalar Y;
    Scalar Z;
    Normalization normalization = Normalization::uncalibrated;
    Scalar kappa = 1;
    std::size_t element_count = 0;

    Scalar discriminant() const { return X * Z - Y * Y; }
};

namespace detail {

// sum_m sum_n (u_m - u_n)(v_m - v_n) = 2 M sum_m (u_m - mean u)(v_m - mean v)
template <typename DerivedU, typename DerivedV>
auto pair_moment(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    using Scalar = typename DerivedU::Scalar;
    const auto n = Scalar(u.size());
    const auto cu = (u.array() - u.mean()).matrix();
    const auto cv = (v.array() - v.mean()).matrix();
    return Scalar(2) * n * cu.dot(cv);
}

template <typename Scalar>
Vector<Scalar> index_vector(Eigen::Index count) {
    return Vector<Scalar>::LinSpaced(count, Scalar(1), Scalar(count));
}

template <typename Scalar>
QuadraticForm<Scalar> assemble_form(Scalar sum_xx, Scalar sum_xm, Scalar sum_mm,
                                    const ArrayConfig<Scalar>& config,
                                    const FieldPoint<Scalar>& target) {
    using std::cos;
    const Scalar pi2 = kPi<Scalar> * kPi<Scalar>;
    const Scalar c2 = config.wave_speed() * config.wave_speed();
    const Scalar fc = config.carrier_frequency();
    const Scalar d = config.spacing();
    const Scalar ct = cos(target.angle);
    QuadraticForm<Scalar> qf;
    qf.X = Scalar(2) * pi2 / c2 * Scalar(4) * sum_xx;
    qf.Y = Scalar(4) * pi2 * d * fc * ct / c2 * Scalar(2) * sum_xm;
    qf.Z = Scalar(8) * pi2 * fc * fc * d * d * ct * ct / c2 * sum_mm;
    qf.element_count = config.element_count();
    return qf;
}

}  // namespace detail

/// Printed boundary coefficients via the O(M) centred-moment identities.
template <typename Scalar>
QuadraticForm<Scalar> quadratic_form(const XiVector<Scalar>& xi, const ArrayConfig<Scalar>& config,
                                     const FieldPoint<Scalar>& target) {
    detail::require(std::size_t(xi.size()) == config.element_count(),
                    "quadratic_form: xi length differs from element count");
    const Vector<Scalar> m = detail::index_vector<Scalar>(xi.size());
    const Vector<Scalar>& x = xi.values();
    return detail::assemble_form(detail::pair_moment(x, x), detail::pair_moment(x, m),
                                 detail::pair_moment(m, m), config, target);
}

/// Same coefficients by literal O(M^2) double summation.
template <typename Scalar>
QuadraticForm<Scalar> quadratic_form_direct(const XiVector<Scalar>& xi,
                                            const ArrayConfig<Scalar>& config,
                                            const FieldPoint<Scalar>& target) {
    detail::require(std::size_t(xi.size()) == config.element_count(),
                    "quadratic_form_direct: xi length differs from element count");
    Scalar sxx = 0, sxm = 0, smm = 0;
    const Eigen::Index count = xi.size();
    for (Eigen::Index a = 0; a < count; ++a) {
        for (Eigen::Index b = 0; b < count; ++b) {
            const Scalar dx = xi(a) - xi(b);
            const Scalar dm = Scalar(a - b);
            sxx += dx * dx;
            sxm += dx * dm;
            smm += dm * dm;
        }
    }
    return detail::assemble_form(sxx, sxm, smm, config, target);
}

/// Rescales printed coefficients so that every extent grows by kappa.
template <typename Scalar>
QuadraticForm<Scalar> calibrate(QuadraticForm<Scalar> qf, Scalar kappa) {
    detail::require(kappa > 0, "calibrate: kappa must be > 0");
    const Scalar scale = Scalar(1) / (kappa * kappa);
    qf.X *= scale;
    qf.Y *= scale;
    qf.Z *= scale;
    qf.normalization = Normalization::calibrated;
    qf.kappa = kappa;
    return qf;
}

enum class ConicClass { ellipse, degenerate_parallel, hyperbola };

inline std::string_view to_string(ConicClass c) {
    switch (c) {
        case ConicClass::ellipse: return "ELLIPSE";
        case ConicClass::degenerate_parallel: return "DEGENERATE_PARALLEL";
        case ConicClass::hyperbola: return "HYPERBOLA";
    }
    return "UNKNOWN";
}

inline constexpr double kDefaultConicTolerance = 1e-9;

/// XZ > Y^2 is an ellipse. |XZ - Y^2| within tolerance * max(XZ, Y^2) is a
/// pair of parallel lines. The hyperbola branch cannot occur for forms built
/// from real offsets (Cauchy-Schwarz) and is kept for arbitrary inputs.
template <typename Scalar>
ConicClass classify_conic(const QuadraticForm<Scalar>& qf,
                          Scalar tolerance = Scalar(kDefaultConicTolerance)) {
    using std::abs;
    const Scalar xz = qf.X * qf.Z;
    const Scalar yy = qf.Y * qf.Y;
    const Scalar scale = std::max({abs(xz), yy, std::numeric_limits<Scalar>::min()});
    const Scalar disc = xz - yy;
    if (abs(disc) <= tolerance * scale) return ConicClass::degenerate_parallel;
    return disc > 0 ? ConicClass::ellipse : ConicClass::hyperbola;
}

/// Geometry of the half-power ellipse in the (range, angle) plane. Axis
/// lengths mix metres and radians; area is in m*rad.
template <typename Scalar = double>
struct EllipseMetrics {
    Scalar area;
    Scalar delta_range;
    Scalar delta_angle;
    Scalar semi_major;
    Scalar semi_minor;
    Scalar rotation;  // direction of the major axis from the range axis
    FieldPoint<Scalar> center;
    std::size_t element_count;
    Normalization normalization;
    Scalar kappa;
};

/// Signed offset of a point from the boundary, normalised by M^2; -1 at the
/// target, 0 on the boundary.
template <typename Scalar>
Scalar boundary_residual(const QuadraticForm<Scalar>& qf, const FieldPoint<Scalar>& target,
                       const FieldPoint<Scalar>& point) {
    const Scalar u = point.range - target.range;
    const Scalar v = point.angle - target.angle;
    const Scalar m2 = Scalar(qf.element_count) * Scalar(qf.element_count);
    return (qf.X * u * u + Scalar(2) * qf.Y * u * v + qf.Z * v * v - m2) / m2;
}

template <typename Scalar>
FieldPoint<Scalar> boundary_point(const EllipseMetrics<Scalar>& metrics, Scalar t) {
    using std::cos;
    using std::sin;
    const Scalar a = metrics.semi_major, b = metrics.semi_minor;
    const Scalar cr = cos(metrics.rotation), sr = sin(metrics.rotation);
    const Scalar ct = cos(t), st = sin(t);
    return FieldPoint<Scalar>{a * cr * ct - b * sr * st + metrics.center.range,
                              a * sr * ct + b * cr * st + metrics.center.angle};
}

template <typename Scalar>
EllipseMetrics<Scalar> ellipse_metrics(const QuadraticForm<Scalar>& qf,
                                       const FieldPoint<Scalar>& target,
                                       Scalar tolerance = Scalar(kDefaultConicTolerance)) {
    using std::abs;
    using std::atan2;
    using std::sqrt;
    if (classify_conic(qf, tolerance) != ConicClass::ellipse) {
        throw NotEllipseError(std::string("half-power boundary is ") +
                              std::string(to_string(classify_conic(qf, tolerance))) +
                              ", not an ellipse");
    }
    const Scalar X = qf.X, Y = qf.Y, Z = qf.Z;
    const Scalar m2 = Scalar(qf.element_count) * Scalar(qf.element_count);
    const Scalar disc = X * Z - Y * Y;
    const Scalar root = sqrt((X - Z) * (X - Z) + Scalar(4) * Y * Y);

    EllipseMetrics<Scalar> e{};
    e.center = target;
    e.element_count = qf.element_count;
    e.normalization = qf.normalization;
    e.kappa = qf.kappa;
    e.area = kPi<Scalar> * m2 / sqrt(disc);
    // X + Z - root = 4 disc / (X + Z + root) without the cancellation.
    e.semi_major = sqrt(m2 * (X + Z + root) / (Scalar(2) * disc));
    e.semi_minor = sqrt(Scalar(2) * m2 / (X + Z + root));
    e.delta_range = Scalar(2) * sqrt(m2 * Z / disc);
    e.delta_angle = Scalar(2) * sqrt(m2 * X / disc);

    // Only cos^2 of the rotation is determined in closed form; the sign is
    // the one whose boundary samples satisfy the quadratic form.
    if (root == Scalar(0)) {
        e.rotation = 0;
        return e;
    }
    // cos(2 theta') = (Z - X) / root; the half-angle form avoids sqrt(1 - cos^2).
    const Scalar magnitude = atan2(Scalar(2) * abs(Y), Z - X) / Scalar(2);
    auto misfit = [&](Scalar rotation) {
        EllipseMetrics<Scalar> trial = e;
        trial.rotation = rotation;
        Scalar total = 0;
        for (Scalar t : {kPi<Scalar> / 4, Scalar(3) * kPi<Scalar> / 4}) {
            total += abs(boundary_residual(qf, target, boundary_point(trial, t)));
        }
        return total;
    };
    e.rotation = misfit(-magnitude) < misfit(magnitude) ? -magnitude : magnitude;
    return e;
}

template <typename Scalar>
EllipseMetrics<Scalar> analyze(const ArrayConfig<Scalar>& config, const FieldPoint<Scalar>& target,
                               const OffsetVector<Scalar>& offsets) {
    return ellipse_metrics(quadratic_form(xi_vector(config, target, offsets), config, target),
                           target);
}

/// Printed closed forms for zero offsets alongside the general ellipse
/// evaluated on the same inputs.
template <typename Scalar = double>
struct PhasedArrayMetrics {
    Scalar area;
    Scalar delta_range;
    Scalar delta_angle;
    EllipseMetrics<Scalar> general;
};

template <typename Scalar>
PhasedArrayMetrics<Scalar> phased_array_metrics(const ArrayConfig<Scalar>& config,
                                                const FieldPoint<Scalar>& target) {
    using std::cos;
    using std::sqrt;
    if (config.element_count() <= 2) {
        throw DomainError("phased_array_metrics: closed forms need at least 3 elements");
    }
    const Scalar ct = cos(target.angle);
    if (!(ct > 0)) throw DomainError("phased_array_metrics: cos(angle) must be non-zero");
    const Scalar M = Scalar(config.element_count());
    const Scalar c = config.wave_speed(), fc = config.carrier_frequency();
    const Scalar d = config.spacing(), R = target.range;
    const Scalar pi = kPi<Scalar>;
    const Scalar mm1 = M * M - Scalar(1), mm4 = M * M - Scalar(4);

    PhasedArrayMetrics<Scalar> out{};
    out.area = Scalar(3) * sqrt(Scalar(15)) * c * c * R * R /
               (pi * fc * fc * d * d * d * ct * mm1 * sqrt(mm4));
    out.delta_range = Scalar(6) * sqrt(Scalar(10)) * c * R * R / (pi * fc * d * d * sqrt(mm1 * mm4));
    out.delta_angle = c * sqrt(Scalar(6) * (Scalar(16) * M * M - Scalar(30) * M + Scalar(11))) /
                      (pi * fc * d * ct * sqrt(mm1 * mm4));
    out.general = analyze(config, target, zero_offsets(config));
    return out;
}

}  // namespace beamfocus
