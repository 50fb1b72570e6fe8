#include "beamfocus/run_config.hpp"

#include "beamfocus/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace beamfocus {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field + ": " + message);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(where, "must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) fail(where + "." + key, "unknown field");
    }
}

double number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail(where + "." + key, "required field missing");
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where + "." + key, "must be finite");
    return x;
}

std::optional<double> optional_number(const json& obj, const std::string& where,
                                      const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, where, key);
}

std::uint64_t count(const json& obj, const std::string& where, const std::string& key,
                    std::uint64_t fallback, std::uint64_t minimum) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(where + "." + key, "must be a non-negative integer");
    const auto n = v.get<std::uint64_t>();
    if (n < minimum) fail(where + "." + key, "must be >= " + std::to_string(minimum));
    return n;
}

void positive(double x, const std::string& field) {
    if (!(x > 0)) fail(field, "must be > 0");
}

}  // namespace

ArrayConfig<double> RunConfig::array_config() const {
    const auto& a = array;
    if (a.aperture_m) {
        return ArrayConfig<double>::from_aperture(a.element_count, *a.aperture_m,
                                                  a.carrier_frequency_hz, a.wave_speed_m_s);
    }
    if (a.half_wavelength) {
        return ArrayConfig<double>::with_half_wavelength_spacing(
            a.element_count, a.carrier_frequency_hz, a.wave_speed_m_s);
    }
    return ArrayConfig<double>(a.element_count, *a.spacing_m, a.carrier_frequency_hz,
                               a.wave_speed_m_s);
}

FieldPoint<double> RunConfig::target_point() const {
    return FieldPoint<double>::checked(target.range_m, deg_to_rad(target.angle_deg));
}

OffsetVector<double> RunConfig::offsets() const {
    return make_offsets(array_config(), target_point(), scheme);
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    check_keys(doc, "config", {"array", "target", "scheme", "grid", "normalization", "output"});

    if (!doc.contains("array")) fail("config.array", "required section missing");
    const auto& a = doc.at("array");
    check_keys(a, "array",
               {"carrier_frequency_hz", "wave_speed_m_s", "spacing_m", "aperture_m",
                "element_count", "resolved_spacing_m", "resolved_aperture_m"});
    cfg.array.carrier_frequency_hz = number(a, "array", "carrier_frequency_hz");
    positive(cfg.array.carrier_frequency_hz, "array.carrier_frequency_hz");
    if (a.contains("wave_speed_m_s")) {
        cfg.array.wave_speed_m_s = number(a, "array", "wave_speed_m_s");
        positive(cfg.array.wave_speed_m_s, "array.wave_speed_m_s");
    }
    cfg.array.element_count = count(a, "array", "element_count", 0, 1);
    if (!a.contains("element_count")) fail("array.element_count", "required field missing");
    const bool has_spacing = a.contains("spacing_m");
    const bool has_aperture = a.contains("aperture_m");
    if (has_spacing == has_aperture)
        fail("array", "exactly one of spacing_m or aperture_m is required");
    if (has_spacing) {
        const auto& s = a.at("spacing_m");
        if (s.is_string()) {
            if (s.get<std::string>() != "half_wavelength")
                fail("array.spacing_m", "must be a number or \"half_wavelength\"");
            cfg.array.half_wavelength = true;
        } else {
            cfg.array.spacing_m = number(a, "array", "spacing_m");
            positive(*cfg.array.spacing_m, "array.spacing_m");
        }
    } else {
        cfg.array.aperture_m = number(a, "array", "aperture_m");
        positive(*cfg.array.aperture_m, "array.aperture_m");
        if (cfg.array.element_count < 2)
            fail("array.element_count", "aperture_m needs element_count >= 2");
    }

    if (!doc.contains("target")) fail("config.target", "required section missing");
    const auto& t = doc.at("target");
    check_keys(t, "target", {"range_m", "angle_deg"});
    cfg.target.range_m = number(t, "target", "range_m");
    positive(cfg.target.range_m, "target.range_m");
    cfg.target.angle_deg = number(t, "target", "angle_deg");
    if (!(std::abs(cfg.target.angle_deg) < 90.0))
        fail("target.angle_deg", "must lie in (-90, 90)");

    if (doc.contains("scheme")) {
        const auto& s = doc.at("scheme");
        check_keys(s, "scheme", {"kind", "alpha", "delta_hz", "offsets_path"});
        if (!s.contains("kind") || !s.at("kind").is_string())
            fail("scheme.kind", "required string field");
        const auto kind = s.at("kind").get<std::string>();
        auto only = [&](const std::set<std::string>& keys) {
            for (const auto& [key, _] : s.items())
                if (key != "kind" && !keys.count(key))
                    fail("scheme." + key, "not allowed for kind '" + kind + "'");
        };
        if (kind == "zero") {
            only({});
            cfg.scheme = ZeroScheme{};
        } else if (kind == "quadratic_alpha") {
            only({"alpha"});
            cfg.scheme = QuadraticScheme{number(s, "scheme", "alpha")};
        } else if (kind == "sinusoidal_delta") {
            only({"delta_hz"});
            const double delta = number(s, "scheme", "delta_hz");
            if (delta < 0) fail("scheme.delta_hz", "must be >= 0");
            cfg.scheme = SinusoidalScheme{delta};
        } else if (kind == "custom") {
            only({"offsets_path"});
            if (!s.contains("offsets_path") || !s.at("offsets_path").is_string())
                fail("scheme.offsets_path", "required string field");
            cfg.custom_offsets_path = s.at("offsets_path").get<std::string>();
            std::filesystem::path p(cfg.custom_offsets_path);
            if (p.is_relative()) p = base_dir / p;
            std::ifstream in(p);
            if (!in) fail("scheme.offsets_path", "cannot open '" + p.string() + "'");
            try {
                cfg.scheme = CustomScheme{io::read_offsets_csv(in)};
            } catch (const ConfigError& e) {
                fail("scheme.offsets_path", e.what());
            }
            if (std::size_t(std::get<CustomScheme>(cfg.scheme).offsets.size()) !=
                cfg.array.element_count)
                fail("scheme.offsets_path", "row count differs from array.element_count");
        } else {
            fail("scheme.kind",
                 "must be one of zero, quadratic_alpha, sinusoidal_delta, custom (got '" + kind +
                     "')");
        }
    }

    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        check_keys(g, "grid",
                   {"range_min_m", "range_max_m", "angle_min_deg", "angle_max_deg",
                    "range_samples", "angle_samples", "margin_factor", "resolution",
                    "max_retries", "budget", "distance_mode"});
        cfg.grid.range_min_m = optional_number(g, "grid", "range_min_m");
        cfg.grid.range_max_m = optional_number(g, "grid", "range_max_m");
        cfg.grid.angle_min_deg = optional_number(g, "grid", "angle_min_deg");
        cfg.grid.angle_max_deg = optional_number(g, "grid", "angle_max_deg");
        const int given = int(cfg.grid.range_min_m.has_value()) +
                          int(cfg.grid.range_max_m.has_value()) +
                          int(cfg.grid.angle_min_deg.has_value()) +
                          int(cfg.grid.angle_max_deg.has_value());
        if (given != 0 && given != 4)
            fail("grid", "range_min_m, range_max_m, angle_min_deg, angle_max_deg go together");
        if (given == 4) {
            if (!(*cfg.grid.range_min_m > 0)) fail("grid.range_min_m", "must be > 0");
            if (!(*cfg.grid.range_min_m < *cfg.grid.range_max_m))
                fail("grid.range_max_m", "must exceed range_min_m");
            if (!(*cfg.grid.angle_min_deg < *cfg.grid.angle_max_deg))
                fail("grid.angle_max_deg", "must exceed angle_min_deg");
            if (!(*cfg.grid.angle_min_deg > -90 && *cfg.grid.angle_max_deg < 90))
                fail("grid", "angles must lie in (-90, 90)");
        }
        cfg.grid.range_samples = count(g, "grid", "range_samples", cfg.grid.range_samples, 2);
        cfg.grid.angle_samples = count(g, "grid", "angle_samples", cfg.grid.angle_samples, 2);
        if (g.contains("margin_factor")) {
            cfg.grid.margin_factor = number(g, "grid", "margin_factor");
            positive(cfg.grid.margin_factor, "grid.margin_factor");
        }
        cfg.grid.resolution = count(g, "grid", "resolution", cfg.grid.resolution, 3);
        cfg.grid.max_retries = int(count(g, "grid", "max_retries", 2, 0));
        cfg.grid.budget = count(g, "grid", "budget", cfg.grid.budget, 1);
        if (g.contains("distance_mode")) {
            const auto& m = g.at("distance_mode");
            if (m == "exact") cfg.grid.distance_mode = DistanceMode::exact;
            else if (m == "approx") cfg.grid.distance_mode = DistanceMode::approx;
            else fail("grid.distance_mode", "must be \"exact\" or \"approx\"");
        }
    }

    if (doc.contains("normalization")) {
        const auto& n = doc.at("normalization");
        check_keys(n, "normalization", {"mode", "kappa"});
        if (n.contains("mode")) {
            const auto& m = n.at("mode");
            if (m == "uncalibrated") cfg.normalization.mode = Normalization::uncalibrated;
            else if (m == "calibrated") cfg.normalization.mode = Normalization::calibrated;
            else fail("normalization.mode", "must be \"uncalibrated\" or \"calibrated\"");
        }
        if (n.contains("kappa")) {
            cfg.normalization.kappa = number(n, "normalization", "kappa");
            positive(cfg.normalization.kappa, "normalization.kappa");
        }
    }

    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        check_keys(o, "output", {"directory", "formats"});
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) fail("output.directory", "must be a string");
            cfg.output.directory = o.at("directory").get<std::string>();
        }
        if (o.contains("formats")) {
            const auto& f = o.at("formats");
            if (!f.is_array()) fail("output.formats", "must be an array");
            cfg.output.formats.clear();
            for (const auto& x : f) {
                if (x != "json" && x != "csv") fail("output.formats", "entries are json or csv");
                cfg.output.formats.push_back(x.get<std::string>());
            }
        }
    }

    // Surface construction errors (e.g. spacing) as config errors.
    try {
        (void)cfg.array_config();
        (void)cfg.target_point();
    } catch (const ContractViolation& e) {
        fail("array", e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        // e.what() carries "line L, column C".
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

json to_json(const RunConfig& cfg) {
    const auto arr = cfg.array_config();
    json array = {{"carrier_frequency_hz", cfg.array.carrier_frequency_hz},
                  {"wave_speed_m_s", cfg.array.wave_speed_m_s},
                  {"element_count", cfg.array.element_count},
                  {"resolved_spacing_m", arr.spacing()},
                  {"resolved_aperture_m", arr.aperture()}};
    if (cfg.array.aperture_m) array["aperture_m"] = *cfg.array.aperture_m;
    else if (cfg.array.half_wavelength) array["spacing_m"] = "half_wavelength";
    else array["spacing_m"] = *cfg.array.spacing_m;

    json scheme = std::visit(
        [&](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroScheme>) return {{"kind", "zero"}};
            else if constexpr (std::is_same_v<T, QuadraticScheme>)
                return {{"kind", "quadratic_alpha"}, {"alpha", s.alpha}};
            else if constexpr (std::is_same_v<T, SinusoidalScheme>)
                return {{"kind", "sinusoidal_delta"}, {"delta_hz", s.delta}};
            else return {{"kind", "custom"}, {"offsets_path", cfg.custom_offsets_path}};
        },
        cfg.scheme);

    json grid = {{"range_samples", cfg.grid.range_samples},
                 {"angle_samples", cfg.grid.angle_samples},
                 {"margin_factor", cfg.grid.margin_factor},
                 {"resolution", cfg.grid.resolution},
                 {"max_retries", cfg.grid.max_retries},
                 {"budget", cfg.grid.budget},
                 {"distance_mode",
                  cfg.grid.distance_mode == DistanceMode::exact ? "exact" : "approx"}};
    if (cfg.grid.has_bounds()) {
        grid["range_min_m"] = *cfg.grid.range_min_m;
        grid["range_max_m"] = *cfg.grid.range_max_m;
        grid["angle_min_deg"] = *cfg.grid.angle_min_deg;
        grid["angle_max_deg"] = *cfg.grid.angle_max_deg;
    }

    return {{"array", std::move(array)},
            {"target", {{"range_m", cfg.target.range_m}, {"angle_deg", cfg.target.angle_deg}}},
            {"scheme", std::move(scheme)},
            {"grid", std::move(grid)},
            {"normalization",
             {{"mode", std::string(to_string(cfg.normalization.mode))},
              {"kappa", cfg.normalization.kappa}}},
            {"output", {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}}}};
}

}  // namespace beamfocus
