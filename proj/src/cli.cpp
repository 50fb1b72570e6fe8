#include "beamfocus/cli.hpp"

#include "beamfocus/io.hpp"
#include "beamfocus/offset_designer.hpp"
#include "beamfocus/oracle.hpp"
#include "beamfocus/run_config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace beamfocus::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << doc.dump(2) << '\n';
        return;
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << doc.dump(2) << '\n';
}

template <typename Writer>
void emit_text(const std::string& path, std::ostream& out, Writer&& writer) {
    if (path.empty() || path == "-") {
        writer(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    writer(file);
}

QuadraticForm<double> configured_form(const RunConfig& cfg, const ArrayConfig<double>& array,
                                      const FieldPoint<double>& target,
                                      const OffsetVector<double>& offsets) {
    auto qf = quadratic_form(xi_vector(array, target, offsets), array, target);
    if (cfg.normalization.mode == Normalization::calibrated)
        qf = calibrate(qf, cfg.normalization.kappa);
    return qf;
}

json analysis_json(const RunConfig& cfg, const ArrayConfig<double>& array,
                   const FieldPoint<double>& target, const OffsetVector<double>& offsets) {
    const auto qf = configured_form(cfg, array, target, offsets);
    const auto conic = classify_conic(qf);
    json doc = {{"coefficients", io::form_json(qf)},
                {"conic_class", std::string(to_string(conic))},
                {"degenerate_family", is_degenerate_family(array, target, offsets)}};
    if (conic == ConicClass::ellipse) {
        const auto metrics = ellipse_metrics(qf, target);
        doc["ellipse"] = io::metrics_json(metrics);
        doc["boundary_curve"] = io::boundary_curve_json(metrics);
    } else {
        doc["ellipse"] = nullptr;
    }
    if (offsets.isZero(0.0) && array.element_count() >= 3) {
        const auto pa = phased_array_metrics(array, target);
        doc["phased_array_comparison"] = {
            {"closed_form",
             {{"area_m_rad", pa.area},
              {"delta_range_m", pa.delta_range},
              {"delta_angle_deg", rad_to_deg(pa.delta_angle)}}},
            {"general_printed",
             {{"area_m_rad", pa.general.area},
              {"delta_range_m", pa.general.delta_range},
              {"delta_angle_deg", rad_to_deg(pa.general.delta_angle)}}},
            {"range_ratio", pa.delta_range / pa.general.delta_range},
            {"angle_ratio", pa.delta_angle / pa.general.delta_angle}};
    }
    if (const auto* s = std::get_if<SinusoidalScheme>(&cfg.scheme); s && s->delta > 0) {
        const auto w = sinusoidal_beamwidths(array, target, s->delta);
        doc["sinusoidal"] = {{"delta_range_m", w.delta_range},
                             {"delta_angle_deg", rad_to_deg(w.delta_angle)},
                             {"printed_delta_range_m", w.printed_delta_range},
                             {"leading_constant", w.leading_constant}};
    }
    return doc;
}

void add_stamp(json& doc, bool stamp, std::chrono::steady_clock::time_point start) {
    if (!stamp) return;
    doc["stamp"] = {
        {"generated_at", utc_timestamp()},
        {"runtime_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string config;
    std::string out;
    bool stamp = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_run_config(a.config);
    const auto array = cfg.array_config();
    const auto target = cfg.target_point();
    json doc = analysis_json(cfg, array, target, cfg.offsets());
    doc["config"] = to_json(cfg);
    add_stamp(doc, a.stamp, start);
    emit_json(doc, a.out, out);
    return kSuccess;
}

// --- design ----------------------------------------------------------------

struct DesignArgs {
    std::string config;
    std::vector<double> alpha;
    std::vector<double> delta;
    std::optional<double> range_width;
    std::string scheme;
    bool table_style = false;
    std::vector<std::size_t> columns;
    std::string out_dir;
    bool stamp = false;
};

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    auto cfg = load_run_config(a.config);
    const auto array = cfg.array_config();
    const auto target = cfg.target_point();

    const int modes = int(!a.alpha.empty()) + int(!a.delta.empty()) + int(a.range_width.has_value());
    if (modes > 1) {
        err << "design: give only one of --alpha, --delta, --target-range-width\n";
        return kConfigError;
    }

    std::vector<SchemeSpec> designs;
    json inversion = nullptr;
    if (!a.alpha.empty()) {
        for (double v : a.alpha) designs.push_back(QuadraticScheme{v});
    } else if (!a.delta.empty()) {
        for (double v : a.delta) {
            if (v < 0) throw ConfigError("--delta must be >= 0");
            designs.push_back(SinusoidalScheme{v});
        }
    } else if (a.range_width) {
        const double rho = *a.range_width;
        const bool sinusoidal = a.scheme.empty()
                                    ? std::holds_alternative<SinusoidalScheme>(cfg.scheme)
                                    : a.scheme == "sinusoidal";
        if (sinusoidal) {
            const double delta = solve_delta_for_range(array, target, rho);
            designs.push_back(SinusoidalScheme{delta});
            inversion = {{"target_range_width_m", rho}, {"scheme", "sinusoidal_delta"},
                         {"delta_hz", delta}};
        } else {
            const auto roots = solve_alpha_for_range(array, target, rho);
            const double alpha = preferred_alpha(roots);
            designs.push_back(QuadraticScheme{alpha});
            inversion = {{"target_range_width_m", rho}, {"scheme", "quadratic_alpha"},
                         {"alpha_roots", {roots[0], roots[1]}}, {"alpha", alpha}};
        }
    } else {
        if (!std::holds_alternative<QuadraticScheme>(cfg.scheme) &&
            !std::holds_alternative<SinusoidalScheme>(cfg.scheme)) {
            err << "design: config scheme is not quadratic_alpha or sinusoidal_delta; pass "
                   "--alpha, --delta or --target-range-width\n";
            return kConfigError;
        }
        designs.push_back(cfg.scheme);
    }

    if (a.table_style) {
        std::vector<std::size_t> columns = a.columns;
        if (columns.empty()) {
            const std::size_t m = array.element_count();
            for (std::size_t c : {std::size_t(1), std::size_t(2), std::size_t(3), m - 1, m})
                if (c >= 1 && c <= m && (columns.empty() || columns.back() < c))
                    columns.push_back(c);
        }
        std::vector<io::TableRow> rows;
        std::string parameter;
        for (const auto& d : designs) {
            std::ostringstream label;
            if (const auto* q = std::get_if<QuadraticScheme>(&d)) {
                parameter = "alpha";
                label << io::format_number(q->alpha);
            } else {
                parameter = "delta";
                label << io::format_number(std::get<SinusoidalScheme>(d).delta);
            }
            rows.push_back({label.str(), make_offsets(array, target, d)});
        }
        out << io::format_offset_table(parameter, rows, columns);
        return kSuccess;
    }

    if (designs.size() != 1) {
        err << "design: several parameter values need --table-style\n";
        return kConfigError;
    }
    const SchemeSpec& design = designs.front();
    const auto offsets = make_offsets(array, target, design);
    cfg.scheme = design;

    json doc = analysis_json(cfg, array, target, offsets);
    doc["config"] = to_json(cfg);
    if (!inversion.is_null()) doc["inversion"] = inversion;
    const double max_offset = offsets.cwiseAbs().maxCoeff();
    doc["max_offset_hz"] = max_offset;
    doc["max_offset_ratio"] = max_offset / array.carrier_frequency();
    if (const auto* q = std::get_if<QuadraticScheme>(&design)) {
        const auto w = quadratic_beamwidths(array, target, q->alpha);
        doc["quadratic"] = {{"alpha", q->alpha},
                            {"delta_range_m", w.degenerate ? json(nullptr) : json(w.delta_range)},
                            {"delta_angle_deg", rad_to_deg(w.delta_angle)},
                            {"degenerate", w.degenerate}};
    }

    const fs::path dir = a.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(a.out_dir);
    fs::create_directories(dir);
    auto wants = [&](const std::string& f) {
        return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), f) !=
               cfg.output.formats.end();
    };
    if (wants("csv")) {
        const auto path = dir / "offsets.csv";
        std::ofstream file(path);
        if (!file) throw std::runtime_error("cannot write " + path.string());
        io::write_offsets_csv(file, offsets);
        doc["offsets_csv"] = path.string();
    }
    add_stamp(doc, a.stamp, start);
    if (wants("json")) emit_json(doc, (dir / "design.json").string(), out);
    emit_json(doc, "", out);
    return kSuccess;
}

// --- pattern ---------------------------------------------------------------

struct PatternArgs {
    std::string config;
    std::optional<double> range_min, range_max, angle_min_deg, angle_max_deg;
    std::optional<std::size_t> range_samples, angle_samples;
    std::string mode;
    std::optional<std::uint64_t> budget;
    std::string out;
    std::string json_out;
};

int cmd_pattern(const PatternArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_run_config(a.config);
    const auto array = cfg.array_config();
    const auto target = cfg.target_point();
    const auto offsets = cfg.offsets();

    BeamGridSpec<double> spec{};
    spec.range_samples = a.range_samples.value_or(cfg.grid.range_samples);
    spec.angle_samples = a.angle_samples.value_or(cfg.grid.angle_samples);
    const int flags = int(a.range_min.has_value()) + int(a.range_max.has_value()) +
                      int(a.angle_min_deg.has_value()) + int(a.angle_max_deg.has_value());
    if (flags != 0 && flags != 4) {
        err << "pattern: --range-min, --range-max, --angle-min-deg, --angle-max-deg go together\n";
        return kConfigError;
    }
    if (flags == 4) {
        spec.range_min = *a.range_min;
        spec.range_max = *a.range_max;
        spec.angle_min = deg_to_rad(*a.angle_min_deg);
        spec.angle_max = deg_to_rad(*a.angle_max_deg);
    } else if (cfg.grid.has_bounds()) {
        spec.range_min = *cfg.grid.range_min_m;
        spec.range_max = *cfg.grid.range_max_m;
        spec.angle_min = deg_to_rad(*cfg.grid.angle_min_deg);
        spec.angle_max = deg_to_rad(*cfg.grid.angle_max_deg);
    } else {
        const auto qf = quadratic_form(xi_vector(array, target, offsets), array, target);
        if (classify_conic(qf) != ConicClass::ellipse) {
            err << "pattern: no analytic ellipse to size the grid; give explicit bounds\n";
            return kConfigError;
        }
        const auto e = ellipse_metrics(qf, target);
        const double hr = cfg.grid.margin_factor * e.delta_range / 2;
        const double ha = cfg.grid.margin_factor * e.delta_angle / 2;
        spec.range_min = std::max(target.range - hr, target.range * 0.01);
        spec.range_max = target.range + hr;
        spec.angle_min = std::max(target.angle - ha, -kPi<double> / 2 + 1e-6);
        spec.angle_max = std::min(target.angle + ha, kPi<double> / 2 - 1e-6);
    }
    DistanceMode mode = cfg.grid.distance_mode;
    if (a.mode == "exact") mode = DistanceMode::exact;
    else if (a.mode == "approx") mode = DistanceMode::approx;

    const auto grid = beampattern_grid(array, target, offsets, spec, mode,
                                       a.budget.value_or(cfg.grid.budget));
    emit_text(a.out, out, [&](std::ostream& os) { io::write_grid_csv(os, grid); });
    if (!a.json_out.empty()) {
        json doc = io::grid_json(grid);
        doc["config"] = to_json(cfg);
        doc["metadata"]["distance_mode"] = mode == DistanceMode::exact ? "exact" : "approx";
        emit_json(doc, a.json_out, out);
    }
    return kSuccess;
}

// --- validate --------------------------------------------------------------

struct ValidateArgs {
    std::string config;
    double tolerance = 0.15;
    std::string out;
    std::string boundary_csv;
    std::optional<std::size_t> resolution;
    std::optional<double> margin;
    std::optional<int> max_retries;
    bool stamp = false;
};

ValidateOptions options_from(const RunConfig& cfg) {
    ValidateOptions o;
    o.margin_factor = cfg.grid.margin_factor;
    o.resolution = cfg.grid.resolution;
    o.max_retries = cfg.grid.max_retries;
    o.mode = cfg.grid.distance_mode;
    o.budget = cfg.grid.budget;
    return o;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_run_config(a.config);
    auto options = options_from(cfg);
    if (a.resolution) options.resolution = *a.resolution;
    if (a.margin) options.margin_factor = *a.margin;
    if (a.max_retries) options.max_retries = *a.max_retries;

    ValidationReport report;
    try {
        report = validate(cfg.array_config(), cfg.target_point(), cfg.offsets(), options);
    } catch (const GridTooSmallError& e) {
        err << "validate: " << e.what() << '\n';
        return kValidationFailed;
    } catch (const NotEllipseError& e) {
        err << "validate: " << e.what() << '\n';
        return kValidationFailed;
    }
    const bool pass = report.range_error <= a.tolerance && report.angle_error <= a.tolerance;
    json doc = io::report_json(report);
    doc["config"] = to_json(cfg);
    doc["tolerance"] = a.tolerance;
    doc["pass"] = pass;
    {
        auto calibrated = calibrate(report.form, report.chosen_kappa);
        const auto metrics = ellipse_metrics(calibrated, report.analytic.center);
        doc["calibrated_ellipse"] = io::metrics_json(metrics);
        doc["calibrated_boundary_curve"] = io::boundary_curve_json(metrics);
    }
    add_stamp(doc, a.stamp, start);
    emit_json(doc, a.out, out);
    if (!a.boundary_csv.empty()) {
        emit_text(a.boundary_csv, out,
                  [&](std::ostream& os) { io::write_crossings_csv(os, report.boundary); });
    }
    if (!pass) {
        err << "validate: relative error above tolerance " << a.tolerance << " (range "
            << report.range_error << ", angle " << report.angle_error << ")\n";
        return kValidationFailed;
    }
    return kSuccess;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string vary;
    std::vector<double> values;
    bool with_oracle = false;
    std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    const auto base = load_run_config(a.config);
    std::ostringstream csv;
    csv << "vary,value,conic_class,delta_range_m,delta_angle_deg,area_m_rad,semi_major,"
           "semi_minor,rotation_rad";
    if (a.with_oracle) csv << ",measured_delta_range_m,measured_delta_angle_deg,oracle_status";
    csv << '\n';

    for (double value : a.values) {
        RunConfig cfg = base;
        if (a.vary == "alpha") {
            cfg.scheme = QuadraticScheme{value};
        } else if (a.vary == "delta") {
            if (value < 0) throw ConfigError("sweep: delta values must be >= 0");
            cfg.scheme = SinusoidalScheme{value};
        } else if (a.vary == "range") {
            if (!(value > 0)) throw ConfigError("sweep: range values must be > 0");
            cfg.target.range_m = value;
        } else if (a.vary == "f_c") {
            if (!(value > 0)) throw ConfigError("sweep: f_c values must be > 0");
            cfg.array.carrier_frequency_hz = value;
        } else if (a.vary == "M") {
            if (!(value >= 1) || value != std::floor(value))
                throw ConfigError("sweep: M values must be positive integers");
            cfg.array.element_count = std::size_t(value);
        } else {
            err << "sweep: unknown variable '" << a.vary << "'\n";
            return kConfigError;
        }
        const auto array = cfg.array_config();
        const auto target = cfg.target_point();
        const auto offsets = cfg.offsets();
        const auto qf = configured_form(cfg, array, target, offsets);
        const auto conic = classify_conic(qf);
        csv << a.vary << ',' << io::format_number(value) << ',' << to_string(conic);
        if (conic == ConicClass::ellipse) {
            const auto e = ellipse_metrics(qf, target);
            for (double x : {e.delta_range, rad_to_deg(e.delta_angle), e.area, e.semi_major,
                             e.semi_minor, e.rotation})
                csv << ',' << io::format_number(x);
        } else {
            csv << ",,,,,,";
        }
        if (a.with_oracle) {
            try {
                const auto r = validate(array, target, offsets, options_from(cfg));
                csv << ',' << io::format_number(r.measured_delta_range) << ','
                    << io::format_number(rad_to_deg(r.measured_delta_angle)) << ",ok";
            } catch (const GridTooSmallError&) {
                csv << ",,,grid_too_small";
            } catch (const NotEllipseError&) {
                csv << ",,,not_ellipse";
            }
        }
        csv << '\n';
    }
    emit_text(a.out, out, [&](std::ostream& os) { os << csv.str(); });
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Near-field beam focusing analysis for uniform linear arrays", "beamfocus"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form half-power ellipse");
    analyze_cmd->add_option("config", analyze.config, "Run config JSON")->required();
    analyze_cmd->add_option("--out", analyze.out, "Output file (default stdout)");
    analyze_cmd->add_flag("--stamp", analyze.stamp, "Add timestamp and runtime");

    DesignArgs design;
    auto* design_cmd = app.add_subcommand("design", "Frequency-offset design");
    design_cmd->add_option("config", design.config, "Run config JSON")->required();
    design_cmd->add_option("--alpha", design.alpha, "Quadratic scheme parameter(s)")
        ->delimiter(',');
    design_cmd->add_option("--delta", design.delta, "Sinusoidal scheme parameter(s) in Hz")
        ->delimiter(',');
    design_cmd->add_option("--target-range-width", design.range_width,
                           "Requested range beamwidth in metres");
    design_cmd->add_option("--scheme", design.scheme, "Scheme for --target-range-width")
        ->check(CLI::IsMember({"quadratic", "sinusoidal"}));
    design_cmd->add_flag("--table-style", design.table_style, "Print an offset table");
    design_cmd->add_option("--columns", design.columns, "Element columns for --table-style")
        ->delimiter(',');
    design_cmd->add_option("--out-dir", design.out_dir, "Directory for offsets.csv/design.json");
    design_cmd->add_flag("--stamp", design.stamp, "Add timestamp and runtime");

    PatternArgs pattern;
    auto* pattern_cmd = app.add_subcommand("pattern", "Sampled beampattern grid as CSV");
    pattern_cmd->add_option("config", pattern.config, "Run config JSON")->required();
    pattern_cmd->add_option("--range-min", pattern.range_min, "Metres");
    pattern_cmd->add_option("--range-max", pattern.range_max, "Metres");
    pattern_cmd->add_option("--angle-min-deg", pattern.angle_min_deg, "Degrees");
    pattern_cmd->add_option("--angle-max-deg", pattern.angle_max_deg, "Degrees");
    pattern_cmd->add_option("--range-samples", pattern.range_samples)->check(CLI::Range(2, 1 << 20));
    pattern_cmd->add_option("--angle-samples", pattern.angle_samples)->check(CLI::Range(2, 1 << 20));
    pattern_cmd->add_option("--mode", pattern.mode, "Distance model")
        ->check(CLI::IsMember({"exact", "approx"}));
    pattern_cmd->add_option("--budget", pattern.budget, "Max grid points x elements");
    pattern_cmd->add_option("--out", pattern.out, "CSV output (default stdout)");
    pattern_cmd->add_option("--json", pattern.json_out, "Also write the JSON envelope here");

    ValidateArgs val;
    auto* validate_cmd = app.add_subcommand("validate", "Compare the ellipse with a field scan");
    validate_cmd->add_option("config", val.config, "Run config JSON")->required();
    validate_cmd->add_option("--tolerance", val.tolerance, "Max relative error")->capture_default_str();
    validate_cmd->add_option("--out", val.out, "Report output (default stdout)");
    validate_cmd->add_option("--boundary-csv", val.boundary_csv, "Write boundary crossings");
    validate_cmd->add_option("--resolution", val.resolution)->check(CLI::Range(3, 1 << 16));
    validate_cmd->add_option("--margin", val.margin)->check(CLI::PositiveNumber);
    validate_cmd->add_option("--max-retries", val.max_retries)->check(CLI::Range(0, 16));
    validate_cmd->add_flag("--stamp", val.stamp, "Add timestamp and runtime");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Analytic metrics over a parameter sweep");
    sweep_cmd->add_option("config", sweep.config, "Run config JSON")->required();
    sweep_cmd->add_option("--vary", sweep.vary, "alpha | delta | range | f_c | M")
        ->required()
        ->check(CLI::IsMember({"alpha", "delta", "range", "f_c", "M"}));
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_flag("--with-oracle", sweep.with_oracle, "Add field-scan measurements");
    sweep_cmd->add_option("--out", sweep.out, "CSV output (default stdout)");

    std::vector<const char*> argv{"beamfocus"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "beamfocus: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(analyze, out);
        if (design_cmd->parsed()) return cmd_design(design, out, err);
        if (pattern_cmd->parsed()) return cmd_pattern(pattern, out, err);
        if (validate_cmd->parsed()) return cmd_validate(val, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ContractViolation& e) {
        err << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const BudgetExceededError& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kBudgetExceeded;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}

}  // namespace beamfocus::cli
