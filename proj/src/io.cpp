#include "beamfocus/io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace beamfocus::io {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_grid_csv(std::ostream& os, const BeamGrid<double>& grid) {
    os << "range_m,angle_deg,power,power_db_normalized\n";
    const auto& spec = grid.spec;
    for (std::size_t i = 0; i < spec.range_samples; ++i) {
        const std::string range = format_number(spec.range_at(i));
        for (std::size_t j = 0; j < spec.angle_samples; ++j) {
            const double power = grid.values(Eigen::Index(i), Eigen::Index(j));
            os << range << ',' << format_number(rad_to_deg(spec.angle_at(j))) << ','
               << format_number(power) << ','
               << format_number(10.0 * std::log10(power / grid.peak_power)) << '\n';
        }
    }
}

json grid_json(const BeamGrid<double>& grid) {
    const auto& spec = grid.spec;
    json rows = json::array();
    for (std::size_t i = 0; i < spec.range_samples; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < spec.angle_samples; ++j)
            row.push_back(grid.values(Eigen::Index(i), Eigen::Index(j)));
        rows.push_back(std::move(row));
    }
    return {
        {"spec",
         {{"range_min_m", spec.range_min},
          {"range_max_m", spec.range_max},
          {"angle_min_deg", rad_to_deg(spec.angle_min)},
          {"angle_max_deg", rad_to_deg(spec.angle_max)},
          {"range_samples", spec.range_samples},
          {"angle_samples", spec.angle_samples}}},
        {"target", {{"range_m", grid.target.range}, {"angle_deg", rad_to_deg(grid.target.angle)}}},
        {"metadata",
         {{"peak_power", grid.peak_power},
          {"layout", "range-major; power[i][j] at range i, angle j"},
          {"power_db_normalized", "10*log10(power/peak_power)"}}},
        {"power", std::move(rows)},
    };
}

void write_offsets_csv(std::ostream& os, const OffsetVector<double>& offsets) {
    os << "m,delta_f_hz\n";
    for (Eigen::Index i = 0; i < offsets.size(); ++i)
        os << (i + 1) << ',' << format_number(offsets(i)) << '\n';
}

OffsetVector<double> read_offsets_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("offsets CSV is empty");
    if (line.rfind("m,delta_f_hz", 0) != 0)
        throw ConfigError("offsets CSV header must be 'm,delta_f_hz', got '" + line + "'");
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("offsets CSV line " + std::to_string(line_no) + ": missing comma");
        const long m = std::strtol(line.c_str(), nullptr, 10);
        if (m != long(values.size()) + 1)
            throw ConfigError("offsets CSV line " + std::to_string(line_no) +
                              ": expected m=" + std::to_string(values.size() + 1));
        char* end = nullptr;
        const double v = std::strtod(line.c_str() + comma + 1, &end);
        if (end == line.c_str() + comma + 1 || !std::isfinite(v))
            throw ConfigError("offsets CSV line " + std::to_string(line_no) + ": bad delta_f_hz");
        values.push_back(v);
    }
    return Eigen::Map<const OffsetVector<double>>(values.data(), Eigen::Index(values.size()));
}

json form_json(const QuadraticForm<double>& qf) {
    return {{"X", qf.X},
            {"Y", qf.Y},
            {"Z", qf.Z},
            {"discriminant", qf.discriminant()},
            {"normalization", std::string(to_string(qf.normalization))},
            {"kappa", qf.kappa},
            {"units", {{"X", "1/m^2"}, {"Y", "1/(m*rad)"}, {"Z", "1/rad^2"}}}};
}

json metrics_json(const EllipseMetrics<double>& e) {
    return {{"area_m_rad", e.area},
            {"delta_range_m", e.delta_range},
            {"delta_angle_rad", e.delta_angle},
            {"delta_angle_deg", rad_to_deg(e.delta_angle)},
            {"semi_major", e.semi_major},
            {"semi_minor", e.semi_minor},
            {"rotation_rad", e.rotation},
            {"center", {{"range_m", e.center.range}, {"angle_deg", rad_to_deg(e.center.angle)}}},
            {"element_count", e.element_count},
            {"normalization", std::string(to_string(e.normalization))},
            {"kappa", e.kappa},
            {"units",
             {{"area", "m*rad"},
              {"semi_axes", "rotated frame of (range m, angle rad)"},
              {"rotation", "rad, major axis from the range axis"}}}};
}

json boundary_curve_json(const EllipseMetrics<double>& metrics, std::size_t samples) {
    json range = json::array(), angle = json::array();
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = 2.0 * kPi<double> * double(k) / double(samples);
        const auto p = boundary_point(metrics, t);
        range.push_back(p.range);
        angle.push_back(rad_to_deg(p.angle));
    }
    return {{"samples", samples}, {"range_m", std::move(range)}, {"angle_deg", std::move(angle)}};
}

json report_json(const ValidationReport& r) {
    json candidates = json::array();
    for (const auto& k : r.candidates) {
        candidates.push_back({{"kappa", k.kappa},
                              {"range_error", k.range_error},
                              {"angle_error", k.angle_error},
                              {"joint_error", k.joint_error()}});
    }
    json out = {
        {"analytic", metrics_json(r.analytic)},
        {"coefficients", form_json(r.form)},
        {"measured",
         {{"delta_range_m", r.measured_delta_range},
          {"delta_angle_rad", r.measured_delta_angle},
          {"delta_angle_deg", rad_to_deg(r.measured_delta_angle)},
          {"range_min_m", r.measured_range_min},
          {"range_max_m", r.measured_range_max},
          {"angle_min_deg", rad_to_deg(r.measured_angle_min)},
          {"angle_max_deg", rad_to_deg(r.measured_angle_max)},
          {"region_cells", r.region_cells},
          {"target_power", r.target_power},
          {"peak_power", r.peak_power}}},
        {"kappa_candidates", std::move(candidates)},
        {"chosen_kappa", r.chosen_kappa},
        {"errors", {{"range", r.range_error}, {"angle", r.angle_error}}},
        {"best_kappa_per_axis", {{"range", r.best_range_kappa}, {"angle", r.best_angle_kappa}}},
        {"same_kappa_both_axes", r.best_range_kappa == r.best_angle_kappa},
        {"grid",
         {{"range_min_m", r.grid.range_min},
          {"range_max_m", r.grid.range_max},
          {"angle_min_deg", rad_to_deg(r.grid.angle_min)},
          {"angle_max_deg", rad_to_deg(r.grid.angle_max)},
          {"range_samples", r.grid.range_samples},
          {"angle_samples", r.grid.angle_samples},
          {"margin_factor", r.options.margin_factor},
          {"max_retries", r.options.max_retries},
          {"retries_used", r.retries_used},
          {"distance_mode", r.options.mode == DistanceMode::exact ? "exact" : "approx"}}},
    };
    if (r.closed_form) {
        const auto& c = *r.closed_form;
        const auto& eq = r.candidates.front();  // kappa = 1: printed general coefficients
        const bool closed_closer = std::hypot(c.range_error, c.angle_error) < eq.joint_error();
        out["closed_form_comparison"] = {
            {"delta_range_m", c.delta_range},
            {"delta_angle_deg", rad_to_deg(c.delta_angle)},
            {"range_error", c.range_error},
            {"angle_error", c.angle_error},
            {"general_range_error", eq.range_error},
            {"general_angle_error", eq.angle_error},
            {"supported_formula",
             closed_closer ? "phased_array_closed_form" : "general_printed_coefficients"}};
    }
    return out;
}

void write_crossings_csv(std::ostream& os, const std::vector<BoundaryCrossing>& crossings) {
    os << "axis,range_m,angle_deg\n";
    for (const auto& c : crossings) {
        os << (c.axis == 0 ? "range" : "angle") << ',' << format_number(c.range) << ','
           << format_number(rad_to_deg(c.angle)) << '\n';
    }
}

std::string format_frequency(double hz) {
    if (hz == 0.0) return "0";
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    if (std::abs(hz) >= 1e6) {
        os << hz / 1e6 << "MHz";
    } else {
        os << hz << "Hz";
    }
    return os.str();
}

std::string format_offset_table(const std::string& parameter, const std::vector<TableRow>& rows,
                                const std::vector<std::size_t>& columns) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{parameter};
    for (auto m : columns) header.push_back("m=" + std::to_string(m));
    cells.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> line{row.label};
        for (auto m : columns) {
            if (m < 1 || m > std::size_t(row.offsets.size()))
                throw ContractViolation("table column m=" + std::to_string(m) + " out of range");
            line.push_back(format_frequency(row.offsets(Eigen::Index(m - 1))));
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
    std::ostringstream os;
    for (const auto& line : cells) {
        os << '|';
        for (std::size_t k = 0; k < line.size(); ++k)
            os << ' ' << std::setw(int(width[k])) << line[k] << " |";
        os << '\n';
    }
    return os.str();
}

}  // namespace beamfocus::io
