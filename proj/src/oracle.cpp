#include "beamfocus/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>

namespace beamfocus {

namespace {

constexpr double kAngleLimit = 1.5707963267948966 - 1e-6;

std::size_t nearest_index(double lo, double step, std::size_t count, double value) {
    const double pos = std::round((value - lo) / step);
    return static_cast<std::size_t>(std::clamp(pos, 0.0, double(count - 1)));
}

// Position between an inside sample (value_in at x_in) and an outside
// neighbour (value_out at x_out) where the power equals the threshold.
double crossing(double x_in, double value_in, double x_out, double value_out, double threshold) {
    const double t = (value_in - threshold) / (value_in - value_out);
    return x_in + t * (x_out - x_in);
}

}  // namespace

HalfPowerRegion half_power_region(const BeamGrid<double>& grid) {
    const auto& spec = grid.spec;
    const std::size_t nr = spec.range_samples;
    const std::size_t na = spec.angle_samples;
    detail::require(std::size_t(grid.values.rows()) == nr && std::size_t(grid.values.cols()) == na,
                    "half_power_region: value matrix does not match grid spec");
    detail::require(grid.target.range >= spec.range_min && grid.target.range <= spec.range_max &&
                        grid.target.angle >= spec.angle_min && grid.target.angle <= spec.angle_max,
                    "half_power_region: grid does not contain the target");

    HalfPowerRegion region;
    region.threshold = grid.peak_power / 2;
    region.seed_range_index = nearest_index(spec.range_min, spec.range_step(), nr, grid.target.range);
    region.seed_angle_index = nearest_index(spec.angle_min, spec.angle_step(), na, grid.target.angle);
    region.seed_power = grid.values(Eigen::Index(region.seed_range_index),
                                    Eigen::Index(region.seed_angle_index));
    if (region.seed_power < region.threshold) {
        throw ContractViolation("half_power_region: cell nearest the target is below half power; "
                                "grid too coarse");
    }

    region.members.setZero(Eigen::Index(nr), Eigen::Index(na));
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    queue.emplace_back(region.seed_range_index, region.seed_angle_index);
    region.members(Eigen::Index(region.seed_range_index), Eigen::Index(region.seed_angle_index)) = 1;
    BorderContact contact;
    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        ++region.cell_count;
        contact.range_low |= i == 0;
        contact.range_high |= i + 1 == nr;
        contact.angle_low |= j == 0;
        contact.angle_high |= j + 1 == na;
        auto visit = [&](std::size_t a, std::size_t b) {
            auto& flag = region.members(Eigen::Index(a), Eigen::Index(b));
            if (flag == 0 && grid.values(Eigen::Index(a), Eigen::Index(b)) >= region.threshold) {
                flag = 1;
                queue.emplace_back(a, b);
            }
        };
        if (i > 0) visit(i - 1, j);
        if (i + 1 < nr) visit(i + 1, j);
        if (j > 0) visit(i, j - 1);
        if (j + 1 < na) visit(i, j + 1);
    }
    if (contact.any()) {
        throw GridTooSmallError("half-power region reaches the grid border (" +
                                    std::to_string(region.cell_count) + " cells)",
                                contact);
    }

    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    double amin = rmin, amax = -rmin;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            if (region.members(Eigen::Index(i), Eigen::Index(j)) == 0) continue;
            rmin = std::min(rmin, spec.range_at(i));
            rmax = std::max(rmax, spec.range_at(i));
            amin = std::min(amin, spec.angle_at(j));
            amax = std::max(amax, spec.angle_at(j));
        }
    }
    region.cell_range_min = rmin;
    region.cell_range_max = rmax;
    region.cell_angle_min = amin;
    region.cell_angle_max = amax;

    region.range_min = rmin;
    region.range_max = rmax;
    region.angle_min = amin;
    region.angle_max = amax;
    for (const auto& c : boundary_crossings(grid, region)) {
        if (c.axis == 0) {
            region.range_min = std::min(region.range_min, c.range);
            region.range_max = std::max(region.range_max, c.range);
        } else {
            region.angle_min = std::min(region.angle_min, c.angle);
            region.angle_max = std::max(region.angle_max, c.angle);
        }
    }
    return region;
}

std::vector<BoundaryCrossing> boundary_crossings(const BeamGrid<double>& grid,
                                                 const HalfPowerRegion& region) {
    const auto& spec = grid.spec;
    const std::size_t nr = spec.range_samples;
    const std::size_t na = spec.angle_samples;
    const double thr = region.threshold;
    std::vector<BoundaryCrossing> out;
    auto inside = [&](std::size_t i, std::size_t j) {
        return region.members(Eigen::Index(i), Eigen::Index(j)) != 0;
    };
    auto value = [&](std::size_t i, std::size_t j) {
        return grid.values(Eigen::Index(i), Eigen::Index(j));
    };
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            if (!inside(i, j)) continue;
            const double r = spec.range_at(i), a = spec.angle_at(j), v = value(i, j);
            if (i > 0 && !inside(i - 1, j))
                out.push_back({0, crossing(r, v, spec.range_at(i - 1), value(i - 1, j), thr), a});
            if (i + 1 < nr && !inside(i + 1, j))
                out.push_back({0, crossing(r, v, spec.range_at(i + 1), value(i + 1, j), thr), a});
            if (j > 0 && !inside(i, j - 1))
                out.push_back({1, r, crossing(a, v, spec.angle_at(j - 1), value(i, j - 1), thr)});
            if (j + 1 < na && !inside(i, j + 1))
                out.push_back({1, r, crossing(a, v, spec.angle_at(j + 1), value(i, j + 1), thr)});
        }
    }
    return out;
}

BeamGridSpec<double> grid_around(const FieldPoint<double>& target, double range_below,
                                 double range_above, double angle_below, double angle_above,
                                 std::size_t resolution) {
    detail::require(resolution >= 3, "grid_around: resolution must be >= 3");
    detail::require(range_below > 0 && range_above > 0 && angle_below > 0 && angle_above > 0,
                    "grid_around: extents must be > 0");
    // Keep a positive range floor and stay inside the broadside sector.
    range_below = std::min(range_below, target.range * 0.99);
    angle_below = std::min(angle_below, target.angle + kAngleLimit);
    angle_above = std::min(angle_above, kAngleLimit - target.angle);

    auto axis = [&](double centre, double below, double above, double& lo, double& hi) {
        const std::size_t intervals = resolution - 1;
        const double step = (below + above) / double(intervals);
        auto n_below = static_cast<std::size_t>(std::floor(below / step));
        n_below = std::clamp<std::size_t>(n_below, 1, intervals - 1);
        lo = centre - double(n_below) * step;
        hi = centre + double(intervals - n_below) * step;
    };
    BeamGridSpec<double> spec{};
    axis(target.range, range_below, range_above, spec.range_min, spec.range_max);
    axis(target.angle, angle_below, angle_above, spec.angle_min, spec.angle_max);
    spec.angle_min = std::max(spec.angle_min, -kAngleLimit);
    spec.angle_max = std::min(spec.angle_max, kAngleLimit);
    spec.range_samples = resolution;
    spec.angle_samples = resolution;
    return spec;
}

ValidationReport validate(const ArrayConfig<double>& config, const FieldPoint<double>& target,
                          const OffsetVector<double>& offsets, const ValidateOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    detail::require(options.margin_factor > 0, "validate: margin_factor must be > 0");
    detail::require(options.max_retries >= 0, "validate: max_retries must be >= 0");

    ValidationReport report;
    report.options = options;
    report.form = quadratic_form(xi_vector(config, target, offsets), config, target);
    report.analytic = ellipse_metrics(report.form, target);  // throws NotEllipseError

    double range_below = options.margin_factor * report.analytic.delta_range / 2;
    double range_above = range_below;
    double angle_below = options.margin_factor * report.analytic.delta_angle / 2;
    double angle_above = angle_below;

    const double max_range_below = target.range * 0.99;
    const double max_angle_below = target.angle + kAngleLimit;
    const double max_angle_above = kAngleLimit - target.angle;
    std::optional<HalfPowerRegion> region;
    BeamGrid<double> grid;
    for (int attempt = 0;; ++attempt) {
        const auto spec = grid_around(target, range_below, range_above, angle_below, angle_above,
                                      options.resolution);
        grid = beampattern_grid(config, target, offsets, spec, options.mode, options.budget);
        try {
            region = half_power_region(grid);
            report.retries_used = attempt;
            break;
        } catch (const GridTooSmallError& e) {
            const auto& c = e.contact();
            // Edges already at their physical limit cannot grow.
            const bool stuck = (c.range_low && range_below >= max_range_below) ||
                               (c.angle_low && angle_below >= max_angle_below) ||
                               (c.angle_high && angle_above >= max_angle_above);
            if (attempt >= options.max_retries || stuck) {
                throw GridTooSmallError(std::string(e.what()) + " after " +
                                            std::to_string(attempt) + " retries",
                                        c);
            }
            if (c.range_low) range_below = std::min(2 * range_below, max_range_below);
            if (c.range_high) range_above *= 2;
            if (c.angle_low) angle_below = std::min(2 * angle_below, max_angle_below);
            if (c.angle_high) angle_above = std::min(2 * angle_above, max_angle_above);
        }
    }

    report.grid = grid.spec;
    report.measured_delta_range = region->measured_delta_range();
    report.measured_delta_angle = region->measured_delta_angle();
    report.measured_range_min = region->range_min;
    report.measured_range_max = region->range_max;
    report.measured_angle_min = region->angle_min;
    report.measured_angle_max = region->angle_max;
    report.region_cells = region->cell_count;
    report.boundary = boundary_crossings(grid, *region);
    report.peak_power = grid.peak_power;
    report.target_power = region->seed_power;

    auto rel = [](double analytic, double measured) {
        return std::abs(analytic - measured) / measured;
    };
    double best_joint = std::numeric_limits<double>::infinity();
    double best_range = best_joint, best_angle = best_joint;
    for (double kappa : kappa_candidates()) {
        KappaErrors k{kappa, rel(kappa * report.analytic.delta_range, report.measured_delta_range),
                      rel(kappa * report.analytic.delta_angle, report.measured_delta_angle)};
        report.candidates.push_back(k);
        if (k.joint_error() < best_joint) {
            best_joint = k.joint_error();
            report.chosen_kappa = kappa;
            report.range_error = k.range_error;
            report.angle_error = k.angle_error;
        }
        if (k.range_error < best_range) {
            best_range = k.range_error;
            report.best_range_kappa = kappa;
        }
        if (k.angle_error < best_angle) {
            best_angle = k.angle_error;
            report.best_angle_kappa = kappa;
        }
    }

    if (config.element_count() >= 3 && offsets.isZero(0.0)) {
        const auto closed = phased_array_metrics(config, target);
        report.closed_form = ClosedFormComparison{
            closed.delta_range, closed.delta_angle,
            rel(closed.delta_range, report.measured_delta_range),
            rel(closed.delta_angle, report.measured_delta_angle)};
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace beamfocus
