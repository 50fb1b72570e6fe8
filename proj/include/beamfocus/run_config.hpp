#pragma once

#include "beamfocus/array_geometry.hpp"
#include "beamfocus/beampattern.hpp"
#include "beamfocus/ellipse_model.hpp"
#include "beamfocus/offset_designer.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace beamfocus {

/// Oracle-selected per-axis scale applied in calibrated mode.
inline const double kCalibratedKappa = std::sqrt(2.0);

/// Everything a CLI run needs. Angles are degrees here and nowhere else.
struct RunConfig {
    struct Array {
        double carrier_frequency_hz = 0;
        double wave_speed_m_s = kSpeedOfLight;
        std::optional<double> spacing_m;  // unset with half_wavelength or aperture
        std::optional<double> aperture_m;
        bool half_wavelength = false;
        std::size_t element_count = 0;
    } array;

    struct Target {
        double range_m = 0;
        double angle_deg = 0;
    } target;

    SchemeSpec scheme = ZeroScheme{};
    std::string custom_offsets_path;  // as written in the file

    struct Grid {
        std::optional<double> range_min_m, range_max_m, angle_min_deg, angle_max_deg;
        std::size_t range_samples = 201;
        std::size_t angle_samples = 201;
        double margin_factor = 3.0;
        std::size_t resolution = 401;
        int max_retries = 2;
        std::uint64_t budget = kDefaultGridBudget;
        DistanceMode distance_mode = DistanceMode::exact;

        bool has_bounds() const { return range_min_m.has_value(); }
    } grid;

    struct Norm {
        Normalization mode = Normalization::uncalibrated;
        double kappa = kCalibratedKappa;
    } normalization;

    struct Output {
        std::string directory = ".";
        std::vector<std::string> formats{"json", "csv"};
    } output;

    ArrayConfig<double> array_config() const;
    FieldPoint<double> target_point() const;
    OffsetVector<double> offsets() const;
};

/// Throws ConfigError naming the offending field. Relative custom offset
/// paths resolve against base_dir.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads and parses a config file; syntax errors report line and column.
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved config with every default materialised.
nlohmann::json to_json(const RunConfig& config);

}  // namespace beamfocus
