#pragma once

#include "beamfocus/beampattern.hpp"
#include "beamfocus/ellipse_model.hpp"
#include "beamfocus/oracle.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace beamfocus::io {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Columns range_m, angle_deg, power, power_db_normalized; rows range-major.
void write_grid_csv(std::ostream& os, const BeamGrid<double>& grid);

/// Grid spec, target and metadata plus range-major power rows.
json grid_json(const BeamGrid<double>& grid);

/// Columns m (1-based), delta_f_hz.
void write_offsets_csv(std::ostream& os, const OffsetVector<double>& offsets);
OffsetVector<double> read_offsets_csv(std::istream& is);

json form_json(const QuadraticForm<double>& qf);
json metrics_json(const EllipseMetrics<double>& metrics);

/// Boundary samples (range_m, angle_deg) at `samples` evenly spaced t in [0, 2 pi).
json boundary_curve_json(const EllipseMetrics<double>& metrics, std::size_t samples = 256);

json report_json(const ValidationReport& report);

/// Columns axis, range_m, angle_deg.
void write_crossings_csv(std::ostream& os, const std::vector<BoundaryCrossing>& crossings);

/// "0", "29.4Hz", "13.6MHz": one decimal, Hz below 1 MHz, MHz above.
std::string format_frequency(double hz);

struct TableRow {
    std::string label;
    OffsetVector<double> offsets;
};

/// Plain-text table with one row per parameter value and the requested
/// 1-based element columns.
std::string format_offset_table(const std::string& parameter, const std::vector<TableRow>& rows,
                                const std::vector<std::size_t>& columns);

}  // namespace beamfocus::io
