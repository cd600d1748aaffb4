#pragma once

// Experiment presets and file outputs behind the CLI: the two reference
// setups over the unit square, norm-series and snapshot CSVs, the norm table
// at the report times, and the stability summary.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/point_cloud.hpp"
#include "gfd/time_stepper.hpp"

namespace gfd {

struct ExperimentPreset {
    std::string name;
    std::function<double(double, double)> u0;
    std::string gamma_name;  // "exp" or "rational"
    double mu = 0.0;
    double dt = 0.0;
    double t_final = 5.0;
    WeightScheme weights{};
    std::vector<double> report_times;
    bool strict_hypotheses = true;
};

inline MotilityFunction motility_by_name(const std::string& name) {
    if (name == "exp") return gamma_exp();
    if (name == "rational") return gamma_rational();
    throw ConfigError("unknown motility function '" + name + "' (use 'exp' or 'rational')");
}

/// Plateau profile of the second experiment: a quartic ramp from 0.1 that
/// joins the constant 0.5 at x = 0.5 with matching first and second
/// derivatives.
inline double example2_profile(double x) {
    if (x <= 0.5) return ((19.2 * x - 25.6) * x + 9.6) * x * x + 0.1;
    return 0.5;
}

/// u(x, 0) = 4 + cos(3 pi x) + 2 cos(pi y), gamma = e^-s, mu = 3.
inline ExperimentPreset preset_example1() {
    ExperimentPreset p;
    p.name = "example1";
    p.u0 = [](double x, double y) {
        return 4.0 + std::cos(3.0 * std::numbers::pi * x) + 2.0 * std::cos(std::numbers::pi * y);
    };
    p.gamma_name = "exp";
    p.mu = 3.0;
    p.dt = 0.001;
    p.t_final = 5.0;
    p.weights = WeightScheme{2.0};
    p.report_times = {0.05, 0.1, 0.5, 1.0, 5.0};
    p.strict_hypotheses = true;
    return p;
}

/// u(x, 0) = f(x)(1 + cos(2 pi y)), gamma = (1+s)^-2, mu = 4.5. The datum
/// touches zero on the y = 0.5 line, so strict validation is off: the run
/// warns and proceeds.
inline ExperimentPreset preset_example2() {
    ExperimentPreset p;
    p.name = "example2";
    p.u0 = [](double x, double y) {
        return example2_profile(x) * (1.0 + std::cos(2.0 * std::numbers::pi * y));
    };
    p.gamma_name = "rational";
    p.mu = 4.5;
    p.dt = 0.001;
    p.t_final = 5.0;
    p.weights = WeightScheme{2.0};
    p.report_times = {0.05, 0.1, 0.5, 1.0, 5.0};
    p.strict_hypotheses = false;
    return p;
}

inline ExperimentPreset preset_by_name(const std::string& name) {
    if (name == "example1") return preset_example1();
    if (name == "example2") return preset_example2();
    throw ConfigError("unknown preset '" + name + "' (use 'example1' or 'example2')");
}

inline SimulationConfig make_config(const ExperimentPreset& preset) {
    SimulationConfig config;
    config.dt = preset.dt;
    config.t_final = preset.t_final;
    config.gamma = motility_by_name(preset.gamma_name);
    config.params = ModelParameters{preset.mu};
    config.weights = preset.weights;
    config.snapshot_times = preset.report_times;
    config.strict_hypotheses = preset.strict_hypotheses;
    return config;
}

namespace detail {

inline std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace detail

/// `t,norm_u,norm_v`, one row per recorded step.
inline void write_norms_csv(const std::filesystem::path& path,
                            const std::vector<NormSample>& series) {
    auto out = detail::open_out(path);
    out << "t,norm_u,norm_v\n";
    for (const NormSample& s : series)
        out << detail::format_double(s.t) << ',' << detail::format_double(s.norm_u) << ','
            << detail::format_double(s.norm_v) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// `x,y,u,v`, one row per node.
inline void write_snapshot_csv(const std::filesystem::path& path, const PointCloud& cloud,
                               const Snapshot& snap) {
    auto out = detail::open_out(path);
    out << "x,y,u,v\n";
    for (const Node& n : cloud.nodes())
        out << detail::format_double(n.x) << ',' << detail::format_double(n.y) << ','
            << detail::format_double(snap.u(n.index)) << ','
            << detail::format_double(snap.v(n.index)) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Norm value at a report time, read off the per-step series.
inline NormSample norm_at_time(const std::vector<NormSample>& series, double t, double dt) {
    const long idx = std::lround(t / dt);
    if (idx < 0 || idx >= static_cast<long>(series.size()))
        throw Error("report time " + std::to_string(t) + " outside the recorded series");
    return series[static_cast<std::size_t>(idx)];
}

/// Norm table, one row per norm and one column per report time.
inline void write_report(const std::filesystem::path& path,
                         const std::vector<double>& report_times,
                         const std::vector<NormSample>& series, double dt) {
    auto out = detail::open_out(path);
    char buf[32];
    out << "T(t)          ";
    for (double t : report_times) {
        std::snprintf(buf, sizeof buf, "%-12s", detail::format_compact(t).c_str());
        out << "  " << buf;
    }
    out << '\n';
    auto row = [&](const char* label, bool use_u) {
        out << label;
        for (double t : report_times) {
            const NormSample s = norm_at_time(series, t, dt);
            std::snprintf(buf, sizeof buf, "%-12.4e", use_u ? s.norm_u : s.norm_v);
            out << "  " << buf;
        }
        out << '\n';
    };
    row("||U-1||_inf   ", true);
    row("||V-1||_inf   ", false);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_stability_txt(const std::filesystem::path& path, const StabilityReport& rep,
                                double dt) {
    auto out = detail::open_out(path);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", rep.global_bound);
    out << "theorem1_global_bound = " << buf << '\n';
    out << "worst_node = " << rep.worst_node << '\n';
    std::snprintf(buf, sizeof buf, "%.6e", dt);
    out << "dt = " << buf << '\n';
    out << "dt_within_bound = " << (dt < rep.global_bound ? "yes" : "no") << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Runs the simulation and writes norms.csv, snapshot_t<value>.csv files,
/// report.txt and stability.txt into `out_dir`.
inline SimulationResult run_experiment(const PointCloud& cloud, const SimulationConfig& config,
                                       const std::function<double(double, double)>& u0,
                                       const std::vector<double>& report_times,
                                       const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "'");
    SimulationResult result = run(cloud, config, u0);
    write_norms_csv(out_dir / "norms.csv", result.norm_series);
    for (const Snapshot& snap : result.snapshots)
        write_snapshot_csv(out_dir / ("snapshot_t" + detail::format_compact(snap.t) + ".csv"),
                           cloud, snap);
    write_report(out_dir / "report.txt", report_times, result.norm_series, config.dt);
    write_stability_txt(out_dir / "stability.txt", result.initial_stability, config.dt);
    return result;
}

}  // namespace gfd
