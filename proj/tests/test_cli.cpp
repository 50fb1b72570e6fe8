#include "beamfocus/cli.hpp"
#include "beamfocus/io.hpp"
#include "beamfocus/run_config.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beamfocus;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("beamfocus_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    std::string config(const json& scheme, const json& extra = json::object()) {
        json doc = {{"array", {{"carrier_frequency_hz", 340e9}, {"wave_speed_m_s", 3e8},
                               {"spacing_m", "half_wavelength"}, {"element_count", 680}}},
                    {"target", {{"range_m", 15}, {"angle_deg", 20}}},
                    {"scheme", scheme},
                    {"output", {{"directory", (dir_ / "out").string()}, {"formats", {"json", "csv"}}}}};
        doc.merge_patch(extra);
        return write("config.json", doc.dump());
    }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    json out_json() const { return json::parse(out_.str()); }

    fs::path dir_;
    std::ostringstream out_, err_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_F(CliTest, AnalyzeEllipse) {
    const auto cfg = config({{"kind", "quadratic_alpha"}, {"alpha", 0.2}});
    ASSERT_EQ(run({"analyze", cfg}), 0) << err_.str();
    const auto doc = out_json();
    EXPECT_EQ(doc["conic_class"], "ELLIPSE");
    const double dr = doc["ellipse"]["delta_range_m"];
    EXPECT_TRUE(std::isfinite(dr));
    EXPECT_NEAR(dr, 11.7755469205, 1e-8);
    EXPECT_EQ(doc["boundary_curve"]["range_m"].size(), 256u);
    EXPECT_EQ(doc["boundary_curve"]["angle_deg"].size(), 256u);
    EXPECT_EQ(doc["ellipse"]["normalization"], "uncalibrated");
    // Resolved config carries every default.
    EXPECT_EQ(doc["config"]["grid"]["resolution"], 401);
    EXPECT_EQ(doc["config"]["normalization"]["mode"], "uncalibrated");
    EXPECT_FALSE(doc.contains("stamp"));
}

TEST_F(CliTest, AnalyzeDegenerateAndPhased) {
    ASSERT_EQ(run({"analyze", config({{"kind", "quadratic_alpha"}, {"alpha", 1.0}})}), 0);
    EXPECT_EQ(out_json()["conic_class"], "DEGENERATE_PARALLEL");
    EXPECT_TRUE(out_json()["ellipse"].is_null());
    EXPECT_TRUE(out_json()["degenerate_family"].get<bool>());

    ASSERT_EQ(run({"analyze", config({{"kind", "zero"}})}), 0);
    const auto doc = out_json();
    EXPECT_EQ(doc["conic_class"], "ELLIPSE");
    ASSERT_TRUE(doc.contains("phased_array_comparison"));
}

TEST_F(CliTest, AnalyzeCalibrated) {
    const auto cfg = config({{"kind", "quadratic_alpha"}, {"alpha", 0.2}},
                            {{"normalization", {{"mode", "calibrated"}}}});
    ASSERT_EQ(run({"analyze", cfg}), 0) << err_.str();
    const auto doc = out_json();
    EXPECT_EQ(doc["ellipse"]["normalization"], "calibrated");
    EXPECT_NEAR(doc["ellipse"]["kappa"].get<double>(), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(doc["ellipse"]["delta_range_m"].get<double>(), 11.7755469205 * std::sqrt(2.0), 1e-7);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
    EXPECT_EQ(run({"analyze", write("bad.json", "{\"array\": {")}), 2);
    EXPECT_NE(err_.str().find("line"), std::string::npos);

    EXPECT_EQ(run({"analyze", config({{"kind", "zero"}}, {{"array", {{"bogus", 1}}}})}), 2);
    EXPECT_NE(err_.str().find("array.bogus"), std::string::npos);

    EXPECT_EQ(run({"analyze", config({{"kind", "zero"}}, {{"array", {{"aperture_m", 0.3}}}})}), 2);
    EXPECT_EQ(run({"analyze", config({{"kind", "zero"}}, {{"target", {{"angle_deg", 95}}}})}), 2);
    EXPECT_EQ(run({"analyze", config({{"kind", "triangle"}})}), 2);
    EXPECT_EQ(run({"analyze", (dir_ / "missing.json").string()}), 2);
    EXPECT_EQ(run({"sweep", config({{"kind", "zero"}}), "--vary", "colour", "--values", "1"}), 2);
}

TEST_F(CliTest, DesignAlphaTable) {
    const auto cfg = config({{"kind", "zero"}});
    ASSERT_EQ(run({"design", cfg, "--alpha", "0.2"}), 0) << err_.str();
    std::ifstream csv(dir_ / "out" / "offsets.csv");
    const auto off = io::read_offsets_csv(csv);
    ASSERT_EQ(off.size(), 680);
    EXPECT_EQ(io::format_frequency(off(1)), "29.4Hz");
    EXPECT_NEAR(off(1), 29.4, 0.05);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "design.json"));

    ASSERT_EQ(run({"design", cfg, "--alpha", "0.2,0.4,0.6,0.8", "--table-style"}), 0);
    EXPECT_NE(out_.str().find("29.4Hz"), std::string::npos);
    EXPECT_NE(out_.str().find("54.2MHz"), std::string::npos);
}

TEST_F(CliTest, DesignDelta) {
    ASSERT_EQ(run({"design", config({{"kind", "zero"}}), "--delta", "6e7"}), 0) << err_.str();
    std::ifstream csv(dir_ / "out" / "offsets.csv");
    const auto off = io::read_offsets_csv(csv);
    EXPECT_EQ(io::format_frequency(off(1)), "8.0MHz");
}

TEST_F(CliTest, DesignRangeWidthRoundTrip) {
    const auto cfg = config({{"kind", "quadratic_alpha"}, {"alpha", 0.2}});
    ASSERT_EQ(run({"design", cfg, "--target-range-width", "1.0"}), 0) << err_.str();
    const auto design = out_json();
    const double alpha = design["inversion"]["alpha"];
    EXPECT_NEAR(design["ellipse"]["delta_range_m"].get<double>(), 1.0, 1e-6);

    const auto follow = config({{"kind", "quadratic_alpha"}, {"alpha", alpha}});
    ASSERT_EQ(run({"analyze", follow}), 0);
    EXPECT_NEAR(out_json()["ellipse"]["delta_range_m"].get<double>(), 1.0, 1e-6);

    ASSERT_EQ(run({"design", cfg, "--target-range-width", "1.0", "--scheme", "sinusoidal"}), 0);
    EXPECT_NEAR(out_json()["ellipse"]["delta_range_m"].get<double>(), 1.0, 1e-6);

    EXPECT_EQ(run({"design", cfg, "--target-range-width", "0"}), 2);
}

TEST_F(CliTest, PatternSmokeAndBudget) {
    const auto cfg = config({{"kind", "quadratic_alpha"}, {"alpha", 0.2}});
    ASSERT_EQ(run({"pattern", cfg, "--range-min", "14", "--range-max", "16", "--angle-min-deg", "19",
                   "--angle-max-deg", "21", "--range-samples", "2", "--angle-samples", "2"}),
              0)
        << err_.str();
    std::istringstream lines(out_.str());
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "range_m,angle_deg,power,power_db_normalized");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 4);

    EXPECT_EQ(run({"pattern", cfg, "--budget", "1000"}), 3);
}

TEST_F(CliTest, ValidateFlatArrayExitsFour) {
    json single = {{"array", {{"carrier_frequency_hz", 300e9}, {"spacing_m", 5e-4}, {"element_count", 1}}},
                   {"target", {{"range_m", 5}, {"angle_deg", 0}}}};
    EXPECT_EQ(run({"validate", write("single.json", single.dump())}), 4);
}

TEST_F(CliTest, SweepTrends) {
    const auto cfg = config({{"kind", "zero"}});
    ASSERT_EQ(run({"sweep", cfg, "--vary", "range", "--values", "5,10,20"}), 0) << err_.str();
    std::istringstream lines(out_.str());
    std::string header, line;
    std::getline(lines, header);
    EXPECT_EQ(header.rfind("vary,value,conic_class,delta_range_m", 0), 0u);
    std::vector<double> widths;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 4; ++i) std::getline(ss, field, ',');
        widths.push_back(std::stod(field));
    }
    ASSERT_EQ(widths.size(), 3u);
    EXPECT_NEAR(widths[1] / widths[0], 4.0, 1e-9);
    EXPECT_NEAR(widths[2] / widths[1], 4.0, 1e-9);

    ASSERT_EQ(run({"sweep", cfg, "--vary", "M", "--values", "8,16,32,64"}), 0) << err_.str();
    std::istringstream m_lines(out_.str());
    std::getline(m_lines, header);
    double previous = std::numeric_limits<double>::infinity();
    while (std::getline(m_lines, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 6; ++i) std::getline(ss, field, ',');
        EXPECT_LT(std::stod(field), previous);
        previous = std::stod(field);
    }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    const auto cfg = config({{"kind", "sinusoidal_delta"}, {"delta_hz", 6e7}});
    ASSERT_EQ(run({"analyze", cfg}), 0);
    const std::string first = out_.str();
    ASSERT_EQ(run({"analyze", cfg}), 0);
    EXPECT_EQ(first, out_.str());

    ASSERT_EQ(run({"design", cfg}), 0);
    const std::string csv1 = slurp(dir_ / "out" / "offsets.csv"), json1 = slurp(dir_ / "out" / "design.json");
    ASSERT_EQ(run({"design", cfg}), 0);
    EXPECT_EQ(csv1, slurp(dir_ / "out" / "offsets.csv"));
    EXPECT_EQ(json1, slurp(dir_ / "out" / "design.json"));

    ASSERT_EQ(run({"analyze", cfg, "--stamp"}), 0);
    EXPECT_TRUE(out_json().contains("stamp"));
}

TEST(Io, NumberFormattingRoundTrips) {
    bf_test::Rng rng(83);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
        EXPECT_EQ(std::stod(io::format_number(v)), v);
    }
    EXPECT_EQ(io::format_number(0.1), "0.1");
    EXPECT_EQ(io::format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Io, OffsetsCsvRoundTrip) {
    OffsetVector<double> off(4);
    off << 0.0, 29.41176470588235, 117.6470588235294, 1.5e7;
    std::stringstream ss;
    io::write_offsets_csv(ss, off);
    EXPECT_EQ(ss.str().substr(0, 13), "m,delta_f_hz\n");
    EXPECT_TRUE(io::read_offsets_csv(ss) == off);
    std::istringstream bad("m,delta_f_hz\n1,abc\n");
    EXPECT_THROW(io::read_offsets_csv(bad), ConfigError);
    std::istringstream gap("m,delta_f_hz\n1,0\n3,5\n");
    EXPECT_THROW(io::read_offsets_csv(gap), ConfigError);
}

TEST(Io, FrequencyLabels) {
    EXPECT_EQ(io::format_frequency(0.0), "0");
    EXPECT_EQ(io::format_frequency(117.647), "117.6Hz");
    EXPECT_EQ(io::format_frequency(13.6e6), "13.6MHz");
}

TEST(RunConfigTest, ResolvedConfigReparses) {
    const json doc = {{"array", {{"carrier_frequency_hz", 340e9}, {"aperture_m", 0.3}, {"element_count", 680}}},
                      {"target", {{"range_m", 10}, {"angle_deg", 20}}}};
    const auto cfg = parse_run_config(doc, ".");
    EXPECT_NEAR(cfg.array_config().spacing(), 0.3 / 679, 1e-18);
    EXPECT_DOUBLE_EQ(cfg.array_config().wave_speed(), kSpeedOfLight);
    const auto resolved = to_json(cfg);
    EXPECT_EQ(to_json(parse_run_config(resolved, ".")), resolved);
}
