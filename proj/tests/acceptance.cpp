// Acceptance runner. With no arguments every criterion runs; otherwise only
// the listed numbers. One PASS/FAIL line per criterion, exit status 1 if any
// selected criterion fails.

#include "beamfocus/ellipse_model.hpp"
#include "beamfocus/offset_designer.hpp"
#include "beamfocus/oracle.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace beamfocus;
using bf_test::rel;
using bf_test::Rng;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failed;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed += " [failed: " + what + "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Cell {
    double parameter;
    std::size_t m;
    double printed_hz;
};

void rayleigh(Outcome& o) {
    const auto t0 = Clock::now();
    const double a = rayleigh_distance(0.1, 3e8 / 60e9);
    const double b = rayleigh_distance(0.1, 1e-3);
    const double elapsed = seconds_since(t0);
    o.check(rel(a, 4.0) <= 1e-12, "0.1 m at 60 GHz");
    o.check(rel(b, 20.0) <= 1e-12, "0.1 m at 1 mm");
    o.check(elapsed < 1e-3, "runtime");
    o.detail << "4 m -> " << a << ", 20 m -> " << b << ", " << elapsed * 1e6 << " us";
}

void quadratic_table(Outcome& o) {
    const auto t0 = Clock::now();
    const std::vector<Cell> cells = {
        {0.2, 2, 29.4},    {0.2, 3, 117.6},   {0.2, 679, 13.5e6}, {0.2, 680, 13.6e6},
        {0.4, 2, 58.8},    {0.4, 3, 235.3},   {0.4, 680, 27.1e6},
        {0.6, 2, 88.3},    {0.6, 3, 352.9},   {0.6, 679, 40.5e6}, {0.6, 680, 40.7e6},
        {0.8, 2, 117.6},   {0.8, 3, 470.6},   {0.8, 679, 54.1e6}, {0.8, 680, 54.2e6}};
    const auto cfg = bf_test::table_config();
    const auto target = bf_test::table_target();
    double worst = 0;
    for (const auto& c : cells) {
        const auto off = quadratic_scheme(cfg, target, c.parameter);
        const double e = rel(off(Eigen::Index(c.m - 1)), c.printed_hz);
        worst = std::max(worst, e);
        o.check(e <= 0.01, "alpha " + std::to_string(c.parameter) + " m " + std::to_string(c.m));
        o.check(off(0) == 0.0, "m=1 entry");
    }
    const double odd = quadratic_scheme(cfg, target, 0.4)(678);
    o.check(rel(odd, 30.0e6) > 0.01, "alpha 0.4 m 679 should disagree with the printed 30.0 MHz");
    o.check(rel(odd, 27.0e6) <= 0.01, "alpha 0.4 m 679 near 27.0 MHz");
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 1.0, "runtime");
    o.detail << cells.size() << " cells, worst " << worst * 100 << "%; alpha 0.4 m 679 computes "
             << odd / 1e6 << " MHz vs printed 30.0 MHz (logged as misprint), " << elapsed << " s";
}

void sinusoidal_table(Outcome& o) {
    const auto t0 = Clock::now();
    const std::vector<Cell> cells = {
        {6e7, 2, 8.0e6},   {6e7, 3, 8.7e6},   {6e7, 679, 72.9e6},  {6e7, 680, 71.2e6},
        {12e7, 2, 16.1e6}, {12e7, 3, 17.4e6}, {12e7, 679, 78.1e6}, {12e7, 680, 75.5e6},
        {18e7, 2, 24.1e6}, {18e7, 3, 26.1e6}, {18e7, 679, 83.4e6}, {18e7, 680, 79.3e6},
        {24e7, 2, 32.1e6}, {24e7, 3, 34.7e6}, {24e7, 679, 88.7e6}, {24e7, 680, 83.2e6},
        {30e7, 2, 40.1e6}, {30e7, 3, 43.4e6}, {30e7, 679, 93.9e6}, {30e7, 680, 87.1e6}};
    const auto cfg = bf_test::table_config();
    const auto target = bf_test::table_target();
    double worst_near = 0, worst_far = 0;
    for (const auto& c : cells) {
        const double e = rel(sinusoidal_scheme(cfg, target, c.parameter)(Eigen::Index(c.m - 1)), c.printed_hz);
        const bool near = c.m <= 3;
        (near ? worst_near : worst_far) = std::max(near ? worst_near : worst_far, e);
        o.check(e <= (near ? 0.015 : 0.03), "delta " + std::to_string(c.parameter) + " m " + std::to_string(c.m));
    }
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 1.0, "runtime");
    o.detail << "worst m<=3 " << worst_near * 100 << "%, worst m>=679 " << worst_far * 100 << "%, "
             << elapsed << " s";
}

void calibration(Outcome& o) {
    const auto cfg = bf_test::aperture_config();
    const auto target = bf_test::aperture_target();
    ValidateOptions opt;
    opt.resolution = 401;
    const auto r = validate(cfg, target, zero_offsets(cfg), opt);
    const bool same = r.best_range_kappa == r.best_angle_kappa;
    o.check(r.range_error <= 0.15, "range error at chosen kappa");
    o.check(r.angle_error <= 0.15, "angle error at chosen kappa");
    o.check(same, "one kappa for both axes");
    o.check(r.runtime_seconds <= 60, "runtime");
    const auto& cf = *r.closed_form;
    const bool closed_closer = cf.range_error + cf.angle_error <
                               r.candidates[0].range_error + r.candidates[0].angle_error;
    o.detail << "measured dR " << r.measured_delta_range << " m, dtheta "
             << rad_to_deg(r.measured_delta_angle) << " deg; analytic " << r.analytic.delta_range
             << " m, " << rad_to_deg(r.analytic.delta_angle) << " deg; ";
    for (const auto& k : r.candidates)
        o.detail << "kappa " << k.kappa << ": range " << k.range_error * 100 << "%, angle "
                 << k.angle_error * 100 << "%; ";
    o.detail << "chosen kappa " << r.chosen_kappa << (same ? " (same on both axes)" : " (axes disagree)")
             << "; measurement supports "
             << (closed_closer ? "the phased-array closed forms" : "the general ellipse on the printed coefficients")
             << " (closed-form errors " << cf.range_error * 100 << "%, " << cf.angle_error * 100
             << "%); grid " << opt.resolution << "x" << opt.resolution << ", " << r.retries_used
             << " retries, " << r.runtime_seconds << " s";
}

void quadratic_laws(Outcome& o) {
    const auto t0 = Clock::now();
    const auto cfg = bf_test::table_config();
    const auto target = bf_test::table_target();
    const auto ref = quadratic_beamwidths(cfg, target, 0.2);
    double worst_r = 0, worst_a = 0;
    for (double alpha : {0.2, 0.4, 0.6, 0.8, 1.5}) {
        const auto w = quadratic_beamwidths(cfg, target, alpha);
        worst_r = std::max(worst_r, rel(w.delta_range * std::abs(1 - alpha), ref.delta_range * 0.8));
        worst_a = std::max(worst_a, rel(w.delta_angle, ref.delta_angle));
    }
    const auto qf = quadratic_form(xi_vector(cfg, target, quadratic_scheme(cfg, target, 1.0)), cfg, target);
    const bool degenerate = classify_conic(qf) == ConicClass::degenerate_parallel;
    const double elapsed = seconds_since(t0);
    o.check(worst_r <= 1e-9, "range law");
    o.check(worst_a <= 1e-9, "angle constant");
    o.check(degenerate, "alpha 1 degenerate");
    o.check(elapsed < 1.0, "runtime");
    o.detail << "dR|1-a| spread " << worst_r << ", dtheta spread " << worst_a << ", alpha=1 "
             << to_string(classify_conic(qf)) << ", " << elapsed << " s";
}

void sinusoidal_laws(Outcome& o) {
    const auto t0 = Clock::now();
    const auto cfg = bf_test::table_config();
    const auto target = bf_test::table_target();
    const std::vector<double> deltas = {6e7, 12e7, 18e7, 24e7, 30e7};
    const auto ref = sinusoidal_beamwidths(cfg, target, deltas[0]);
    double worst_r = 0, worst_a = 0;
    for (double delta : deltas) {
        const auto w = sinusoidal_beamwidths(cfg, target, delta);
        worst_r = std::max(worst_r, rel(w.delta_range * delta, ref.delta_range * deltas[0]));
        worst_a = std::max(worst_a, rel(w.delta_angle, ref.delta_angle));
    }
    // Leading constant on other arrays and targets.
    double lo = ref.leading_constant, hi = ref.leading_constant;
    Rng rng(2024);
    for (int i = 0; i < 20; ++i) {
        const auto other = ArrayConfig<double>::with_half_wavelength_spacing(
            std::size_t(rng.integer(8, 800)), rng.uniform(30e9, 1e12), 3e8);
        const FieldPoint<double> t{rng.uniform(2, 40), rng.uniform(-1.2, 1.2)};
        const double k = sinusoidal_beamwidths(other, t, rng.uniform(1e6, 1e9)).leading_constant;
        lo = std::min(lo, k), hi = std::max(hi, k);
    }
    const double elapsed = seconds_since(t0);
    o.check(worst_r <= 1e-9, "range law");
    o.check(worst_a <= 1e-9, "angle constant");
    o.check(hi - lo <= 1e-8 * hi, "leading constant stable");
    o.check(elapsed < 1.0, "runtime");
    o.detail << "dR*delta spread " << worst_r << ", dtheta spread " << worst_a
             << ", leading constant " << ref.leading_constant << "/delta (printed 2/delta), range over 21 configs ["
             << lo << ", " << hi << "], " << elapsed << " s";
}

void trends(Outcome& o) {
    const auto t0 = Clock::now();
    const auto cfg = bf_test::table_config();
    const double th = deg_to_rad(20.0);
    const auto a5 = phased_array_metrics(cfg, FieldPoint<double>{5.0, th});
    const auto a10 = phased_array_metrics(cfg, FieldPoint<double>{10.0, th});
    const auto a20 = phased_array_metrics(cfg, FieldPoint<double>{20.0, th});
    const double e1 = rel(a10.delta_range / a5.delta_range, 4.0);
    const double e2 = rel(a20.delta_range / a10.delta_range, 4.0);
    const double e3 = rel(a20.delta_range / a5.delta_range, 16.0);
    const double ea = std::max(rel(a10.delta_angle, a5.delta_angle), rel(a20.delta_angle, a5.delta_angle));
    bool decreasing = true;
    double previous = std::numeric_limits<double>::infinity();
    std::ostringstream areas;
    for (std::size_t M : {8u, 16u, 32u, 64u}) {
        const auto pa = phased_array_metrics(ArrayConfig<double>::with_half_wavelength_spacing(M, 340e9, 3e8),
                                             FieldPoint<double>{10.0, th});
        decreasing = decreasing && pa.area < previous;
        previous = pa.area;
        areas << pa.area << " ";
    }
    const double elapsed = seconds_since(t0);
    o.check(std::max({e1, e2, e3}) <= 1e-9, "range ratio");
    o.check(ea <= 1e-9, "angle invariance");
    o.check(decreasing, "area decreasing in M");
    o.check(elapsed < 1.0, "runtime");
    o.detail << "R_D-squared law error " << std::max({e1, e2, e3}) << ", dtheta spread " << ea
             << ", areas (m*rad) for M=8,16,32,64: " << areas.str() << "; " << elapsed << " s";
}

void geometry(Outcome& o) {
    const auto t0 = Clock::now();
    Rng rng(808);
    double worst_res = 0, worst_ext = 0, worst_area = 0;
    for (int i = 0; i < 100; ++i) {
        QuadraticForm<double> qf;
        qf.element_count = std::size_t(rng.integer(2, 1000));
        qf.X = std::pow(10.0, rng.uniform(-2, 8));
        qf.Z = std::pow(10.0, rng.uniform(4, 14));
        qf.Y = rng.uniform(-0.999, 0.999) * std::sqrt(qf.X * qf.Z);
        const FieldPoint<double> target{rng.uniform(1, 50), rng.uniform(-1.2, 1.2)};
        const auto e = ellipse_metrics(qf, target);
        worst_area = std::max(worst_area, rel(e.area, kPi<double> * e.semi_major * e.semi_minor));
        double rmin = 1e300, rmax = -1e300, amin = 1e300, amax = -1e300;
        constexpr int kSamples = 20000;
        for (int j = 0; j < kSamples; ++j) {
            const auto p = boundary_point(e, 2 * kPi<double> * j / kSamples);
            if (j % 16 == 0) worst_res = std::max(worst_res, std::abs(boundary_residual(qf, target, p)));
            rmin = std::min(rmin, p.range), rmax = std::max(rmax, p.range);
            amin = std::min(amin, p.angle), amax = std::max(amax, p.angle);
        }
        worst_ext = std::max({worst_ext, rel(rmax - rmin, e.delta_range), rel(amax - amin, e.delta_angle)});
    }
    const double elapsed = seconds_since(t0);
    o.check(worst_res <= 1e-6, "boundary residual");
    o.check(worst_ext <= 1e-6, "dense-t extents");
    o.check(worst_area <= 1e-12, "area = pi a b");
    o.check(elapsed < 5.0, "runtime");
    o.detail << "max |residual| " << worst_res << ", extent error " << worst_ext << ", area error "
             << worst_area << ", " << elapsed << " s";
}

void discriminant(Outcome& o) {
    const auto t0 = Clock::now();
    Rng rng(909);
    int negative = 0;
    int rounding = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t M = std::size_t(rng.integer(2, 700));
        const auto cfg = ArrayConfig<double>(M, rng.uniform(1e-4, 2e-3), rng.uniform(30e9, 1e12), 3e8);
        const FieldPoint<double> t{rng.uniform(1, 50), rng.uniform(-1.4, 1.4)};
        OffsetVector<double> off(static_cast<Eigen::Index>(M));
        const double scale = std::pow(10.0, rng.uniform(0, 9));
        for (Eigen::Index j = 0; j < off.size(); ++j)
            off(j) = (i % 2 == 0) ? scale * rng.uniform(0, 1) : scale * rng.normal();
        const auto qf = quadratic_form(xi_vector(cfg, t, off), cfg, t);
        if (classify_conic(qf) == ConicClass::hyperbola) ++negative;
        if (qf.X * qf.Z < qf.Y * qf.Y) ++rounding;
    }
    int affine_bad = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t M = std::size_t(rng.integer(3, 700));
        const auto cfg = ArrayConfig<double>(M, rng.uniform(1e-4, 2e-3), rng.uniform(30e9, 1e12), 3e8);
        const FieldPoint<double> t{rng.uniform(1, 50), rng.uniform(-1.4, 1.4)};
        const double k = focusing_rate(cfg, t);
        const double beta = rng.uniform(-1e6, 1e6), C = rng.uniform(-1e6, 1e6);
        OffsetVector<double> off(static_cast<Eigen::Index>(M));
        for (Eigen::Index j = 0; j < off.size(); ++j)
            off(j) = beta * double(j + 1) / 2 + k * double(j) * double(j) + C;
        const auto qf = quadratic_form(xi_vector(cfg, t, off), cfg, t);
        const bool flat = std::abs(qf.discriminant()) <= 1e-9 * qf.X * qf.Z;
        if (!flat || !is_degenerate_family(cfg, t, off)) ++affine_bad;
    }
    double worst_path = 0;
    for (int i = 0; i < 60; ++i) {
        const std::size_t M = std::size_t(rng.integer(2, 256));
        const auto cfg = ArrayConfig<double>(M, rng.uniform(1e-4, 2e-3), rng.uniform(30e9, 1e12), 3e8);
        const FieldPoint<double> t{rng.uniform(1, 50), rng.uniform(-1.4, 1.4)};
        OffsetVector<double> off(static_cast<Eigen::Index>(M));
        for (Eigen::Index j = 0; j < off.size(); ++j) off(j) = 1e7 * rng.uniform(0, 1);
        const auto xi = xi_vector(cfg, t, off);
        const auto a = quadratic_form(xi, cfg, t), b = quadratic_form_direct(xi, cfg, t);
        worst_path = std::max({worst_path, rel(a.X, b.X), rel(a.Z, b.Z),
                               std::abs(a.Y - b.Y) / std::sqrt(b.X * b.Z)});
    }
    const double elapsed = seconds_since(t0);
    o.check(negative == 0, "XZ >= Y^2 for random offsets");
    o.check(affine_bad == 0, "affine family degenerate");
    o.check(worst_path <= 1e-10, "O(M) vs O(M^2)");
    o.check(elapsed < 10.0, "runtime");
    o.detail << "random violations " << negative << "/1000 (raw XZ < Y^2 from rounding: " << rounding
             << "), affine misses " << affine_bad
             << "/100, path disagreement " << worst_path << ", " << elapsed << " s";
}

void alpha_sweep(Outcome& o) {
    const auto t0 = Clock::now();
    const auto cfg = bf_test::table_config();
    const auto target = bf_test::table_target();
    ValidateOptions opt;
    opt.max_retries = 4;
    double previous = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
        const auto r = validate(cfg, target, quadratic_scheme(cfg, target, alpha), opt);
        decreasing = decreasing && r.measured_delta_range < previous;
        previous = r.measured_delta_range;
        o.detail << "alpha " << alpha << ": measured " << r.measured_delta_range << " m (analytic "
                 << r.analytic.delta_range << " m, " << r.retries_used << " retries); ";
    }
    const double elapsed = seconds_since(t0);
    o.check(decreasing, "measured range width strictly decreasing");
    o.check(elapsed <= 300, "runtime");
    o.detail << elapsed << " s";
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {1, {"rayleigh distance", rayleigh}},
        {2, {"quadratic offset table", quadratic_table}},
        {3, {"sinusoidal offset table", sinusoidal_table}},
        {4, {"normalization calibration", calibration}},
        {5, {"quadratic scheme laws", quadratic_laws}},
        {6, {"sinusoidal scheme laws", sinusoidal_laws}},
        {7, {"trend laws", trends}},
        {8, {"geometry consistency", geometry}},
        {9, {"discriminant property", discriminant}},
        {10, {"alpha sweep ordering", alpha_sweep}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [id, _] : criteria) selected.push_back(id);

    int failures = 0;
    for (int id : selected) {
        const auto it = criteria.find(id);
        if (it == criteria.end()) {
            std::printf("criterion %d: unknown\n", id);
            ++failures;
            continue;
        }
        Outcome o;
        try {
            it->second.second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.failed += std::string(" [exception: ") + e.what() + "]";
        }
        std::printf("%s criterion %d (%s): %s%s\n", o.pass ? "PASS" : "FAIL", id, it->second.first.c_str(),
                    o.detail.str().c_str(), o.failed.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
