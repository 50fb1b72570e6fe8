#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/beampattern.hpp"
#include "beamfocus/ellipse_model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamfocus {

/// Which grid edges a half-power region reached.
struct BorderContact {
    bool range_low = false;
    bool range_high = false;
    bool angle_low = false;
    bool angle_high = false;

    bool any() const { return range_low || range_high || angle_low || angle_high; }
};

/// The measured region reached the grid edge, so its extents would be clipped.
class GridTooSmallError : public std::runtime_error {
public:
    GridTooSmallError(const std::string& what, BorderContact contact)
        : std::runtime_error(what), contact_(contact) {}
    const BorderContact& contact() const { return contact_; }

private:
    BorderContact contact_;
};

/// 4-connected set of cells with S >= M^2/2 grown from the cell nearest the
/// target. Extents come from threshold crossings interpolated linearly
/// between member cells and their outside neighbours.
struct HalfPowerRegion {
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> members;
    std::size_t cell_count = 0;
    std::size_t seed_range_index = 0;
    std::size_t seed_angle_index = 0;
    double threshold = 0;
    double seed_power = 0;
    bool contiguous = true;

    // Member cell centres.
    double cell_range_min = 0, cell_range_max = 0;
    double cell_angle_min = 0, cell_angle_max = 0;

    // Interpolated threshold crossings.
    double range_min = 0, range_max = 0;
    double angle_min = 0, angle_max = 0;

    double measured_delta_range() const { return range_max - range_min; }
    double measured_delta_angle() const { return angle_max - angle_min; }
};

HalfPowerRegion half_power_region(const BeamGrid<double>& grid);

/// A boundary crossing used for extent measurement; axis 0 = range, 1 = angle.
struct BoundaryCrossing {
    int axis;
    double range;
    double angle;
};

std::vector<BoundaryCrossing> boundary_crossings(const BeamGrid<double>& grid,
                                                 const HalfPowerRegion& region);

struct ValidateOptions {
    double margin_factor = 3.0;
    std::size_t resolution = 401;
    int max_retries = 2;
    DistanceMode mode = DistanceMode::exact;
    std::uint64_t budget = kDefaultGridBudget;
};

/// Candidate per-axis scale factors between the printed coefficients and
/// the measured field.
inline const std::vector<double>& kappa_candidates() {
    static const std::vector<double> candidates{1.0, std::sqrt(2.0)};
    return candidates;
}

struct KappaErrors {
    double kappa;
    double range_error;
    double angle_error;
    double joint_error() const { return std::hypot(range_error, angle_error); }
};

struct ClosedFormComparison {
    double delta_range;
    double delta_angle;
    double range_error;
    double angle_error;
};

struct ValidationReport {
    EllipseMetrics<double> analytic;  // printed normalisation
    QuadraticForm<double> form;
    double measured_delta_range = 0;
    double measured_delta_angle = 0;
    double measured_range_min = 0;
    double measured_range_max = 0;
    double measured_angle_min = 0;
    double measured_angle_max = 0;
    std::size_t region_cells = 0;
    double peak_power = 0;
    double target_power = 0;
    std::vector<KappaErrors> candidates;
    double chosen_kappa = 1;
    double range_error = 0;  // at chosen kappa
    double angle_error = 0;
    double best_range_kappa = 1;
    double best_angle_kappa = 1;
    std::optional<ClosedFormComparison> closed_form;  // zero offsets, M >= 3
    std::vector<BoundaryCrossing> boundary;
    BeamGridSpec<double> grid;
    ValidateOptions options;
    int retries_used = 0;
    double runtime_seconds = 0;
};

/// Scans the beampattern around the target, measures the half-power region
/// and compares its extents with the analytic ellipse. The grid starts at
/// margin_factor times the analytic extents and every edge the region
/// touches is pushed out by a factor two per retry.
ValidationReport validate(const ArrayConfig<double>& config, const FieldPoint<double>& target,
                          const OffsetVector<double>& offsets, const ValidateOptions& options = {});

/// Grid of `resolution` samples per axis with the target on a node, spanning
/// [target - below, target + above] on each axis (range clamped positive,
/// angle clamped inside the broadside sector).
BeamGridSpec<double> grid_around(const FieldPoint<double>& target, double range_below,
                                 double range_above, double angle_below, double angle_above,
                                 std::size_t resolution);

}  // namespace beamfocus
