#pragma once

// Command-line front end. Subcommands: run, generate-cloud, stability-check,
// validate. Exit codes: 0 success, 1 stability/acceptance failure (also
// divergence), 2 formula/config error, 3 I/O error.
//
// Option precedence: command-line flags > config file (`key = value` lines,
// `#` comments, keys named like the flags without the dashes) > defaults.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "gfd/experiment.hpp"

namespace gfd::cli {

struct GridSize {
    int nx = 21, ny = 21;
};

inline GridSize parse_grid(const std::string& text) {
    GridSize g;
    char trailing = 0;
    if (std::sscanf(text.c_str(), "%dx%d%c", &g.nx, &g.ny, &trailing) != 2)
        throw ConfigError("grid must look like '21x21', got '" + text + "'");
    return g;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

}  // namespace detail

/// Flat `key = value` config file; flags override its entries.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        ConfigFile cfg;
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string body = detail::trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  " is not 'key = value': '" + body + "'");
            const std::string key = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key) const { return values_.at(key); }

    double number(const std::string& key) const {
        const std::string& s = values_.at(key);
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
        return v;
    }

    bool flag(const std::string& key) const {
        const std::string& s = values_.at(key);
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw ConfigError("config key '" + key + "' is not a boolean: '" + s + "'");
    }

    void require_known(std::initializer_list<const char*> known) const {
        for (const auto& [key, value] : values_) {
            bool ok = false;
            for (const char* k : known) ok = ok || key == k;
            if (!ok) throw ConfigError("unknown config key '" + key + "'");
        }
    }

private:
    std::map<std::string, std::string> values_;
};

struct CloudOptions {
    std::string source = "regular";  // regular | irregular | file
    std::string grid = "21x21";
    std::string file;
    double perturbation = 0.2;
    std::uint64_t seed = 1;
};

struct RunOptions {
    CloudOptions cloud;
    std::string preset = "example1";
    std::string config_path;
    double dt = 0.0;
    double t_final = 0.0;
    int star_size = 8;
    double alpha = 0.0;
    std::string gamma;
    double mu = 0.0;
    std::string out_dir = "out";
    bool enforce_stability = false;
    bool gamma_factor = false;
};

inline void add_cloud_options(CLI::App* cmd, CloudOptions& opt) {
    cmd->add_option("--cloud", opt.source, "node source: regular, irregular, or file")
        ->check(CLI::IsMember({"regular", "irregular", "file"}));
    cmd->add_option("--grid", opt.grid, "grid resolution NXxNY (default 21x21)");
    cmd->add_option("--cloud-file", opt.file, "cloud CSV path when --cloud file");
    cmd->add_option("--perturbation", opt.perturbation,
                    "inner-node displacement fraction for irregular clouds");
    cmd->add_option("--seed", opt.seed, "seed for irregular clouds");
}

inline void add_model_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--preset", opt.preset, "example1 or example2")
        ->check(CLI::IsMember({"example1", "example2"}));
    cmd->add_option("--dt", opt.dt, "time step");
    cmd->add_option("--t-final", opt.t_final, "final time");
    cmd->add_option("--s", opt.star_size, "star size (nodes per star)");
    cmd->add_option("--alpha", opt.alpha, "weight exponent");
    cmd->add_option("--gamma", opt.gamma, "motility function: exp or rational");
    cmd->add_option("--mu", opt.mu, "logistic growth rate");
    cmd->add_flag("--gamma-factor", opt.gamma_factor,
                  "include the gamma(V0) factor in the bound's leading term");
    cmd->add_option("--config", opt.config_path, "key = value config file; flags override");
}

// Folds config-file entries into the options wherever the flag was absent.
// Returns the set of flags that ended up provided by the file.
inline std::set<std::string> merge_config(RunOptions& opt, const CLI::App* cmd) {
    if (opt.config_path.empty()) return {};
    const ConfigFile cfg = ConfigFile::load(opt.config_path);
    cfg.require_known({"preset", "cloud", "grid", "cloud-file", "perturbation", "seed", "dt",
                       "t-final", "s", "alpha", "gamma", "mu", "out", "enforce-stability",
                       "gamma-factor"});
    auto absent = [&](const char* flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    auto fill_str = [&](const char* key, const char* flag, std::string& target) {
        if (cfg.has(key) && absent(flag)) target = cfg.str(key);
    };
    auto fill_num = [&](const char* key, const char* flag, auto& target) {
        if (cfg.has(key) && absent(flag))
            target = static_cast<std::remove_reference_t<decltype(target)>>(cfg.number(key));
    };
    fill_str("preset", "--preset", opt.preset);
    fill_str("cloud", "--cloud", opt.cloud.source);
    fill_str("grid", "--grid", opt.cloud.grid);
    fill_str("cloud-file", "--cloud-file", opt.cloud.file);
    fill_num("perturbation", "--perturbation", opt.cloud.perturbation);
    fill_num("seed", "--seed", opt.cloud.seed);
    fill_num("dt", "--dt", opt.dt);
    fill_num("t-final", "--t-final", opt.t_final);
    fill_num("s", "--s", opt.star_size);
    fill_num("alpha", "--alpha", opt.alpha);
    fill_str("gamma", "--gamma", opt.gamma);
    fill_num("mu", "--mu", opt.mu);
    fill_str("out", "--out", opt.out_dir);
    if (cfg.has("enforce-stability") && absent("--enforce-stability"))
        opt.enforce_stability = cfg.flag("enforce-stability");
    if (cfg.has("gamma-factor") && absent("--gamma-factor"))
        opt.gamma_factor = cfg.flag("gamma-factor");
    // values that arrived via the file count as provided
    std::set<std::string> provided;
    for (const char* key : {"dt", "t-final", "alpha", "gamma", "mu"})
        if (cfg.has(key)) provided.insert(std::string("--") + key);
    return provided;
}

inline PointCloud make_cloud(const CloudOptions& opt) {
    if (opt.source == "file") {
        if (opt.file.empty()) throw ConfigError("--cloud file requires --cloud-file PATH");
        return load_cloud(opt.file);
    }
    const GridSize g = parse_grid(opt.grid);
    if (opt.source == "regular") return generate_regular_cloud(g.nx, g.ny);
    if (opt.source == "irregular")
        return generate_irregular_cloud(g.nx, g.ny, opt.perturbation, opt.seed);
    throw ConfigError("unknown cloud source '" + opt.source + "'");
}

inline ExperimentPreset resolve_preset(const RunOptions& opt, const CLI::App* cmd,
                                       const std::set<std::string>& from_file) {
    ExperimentPreset preset = preset_by_name(opt.preset);
    auto provided = [&](const char* flag) {
        if (from_file.count(flag)) return true;
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };
    if (provided("--dt")) preset.dt = opt.dt;
    if (provided("--t-final")) preset.t_final = opt.t_final;
    if (provided("--alpha")) preset.weights = WeightScheme{opt.alpha};
    if (provided("--gamma")) preset.gamma_name = opt.gamma;
    if (provided("--mu")) preset.mu = opt.mu;
    // shortened runs report at whatever times remain reachable
    std::erase_if(preset.report_times, [&](double t) { return t > preset.t_final + 1e-12; });
    if (preset.report_times.empty()) preset.report_times = {preset.t_final};
    return preset;
}

inline int command_run(const RunOptions& opt, const CLI::App* cmd,
                       const std::set<std::string>& from_file) {
    const ExperimentPreset preset = resolve_preset(opt, cmd, from_file);
    SimulationConfig config = make_config(preset);
    config.star_size = opt.star_size;
    config.enforce_stability_bound = opt.enforce_stability;
    config.stability_gamma_factor = opt.gamma_factor;
    const PointCloud cloud = make_cloud(opt.cloud);
    const SimulationResult result =
        run_experiment(cloud, config, preset.u0, preset.report_times, opt.out_dir);
    const NormSample last = result.norm_series.back();
    std::printf("final t = %g, ||U-1||_inf = %.6e, ||V-1||_inf = %.6e\n", last.t, last.norm_u,
                last.norm_v);
    std::printf("outputs written to %s\n", opt.out_dir.c_str());
    return 0;
}

inline int command_stability_check(const RunOptions& opt, const CLI::App* cmd,
                                   const std::set<std::string>& from_file,
                                   const std::string& per_node_csv) {
    const ExperimentPreset preset = resolve_preset(opt, cmd, from_file);
    const MotilityFunction gamma = motility_by_name(preset.gamma_name);
    const PointCloud cloud = make_cloud(opt.cloud);
    const auto stars = build_all_stars(cloud, opt.star_size);
    const auto stencils = compute_all_stencils(stars, preset.weights);
    const EllipticSolver solver(assemble_elliptic(cloud, stencils, preset.weights));
    // the dt under test is free to be anything positive; build the t = 0
    // state directly
    if (!(preset.dt > 0.0)) throw ConfigError("dt must be positive");
    FieldState state;
    state.u.resize(cloud.size());
    for (const Node& n : cloud.nodes()) state.u(n.index) = preset.u0(n.x, n.y);
    state.v = solver.solve(state.u);
    const StabilityReport report =
        max_stable_dt(state, stencils, gamma, preset.mu, opt.gamma_factor);
    if (!per_node_csv.empty()) {
        std::ofstream out(per_node_csv, std::ios::binary);
        if (!out) throw IoError("cannot open '" + per_node_csv + "' for writing");
        write_stability_csv(out, report);
    }
    const bool ok = preset.dt < report.global_bound;
    std::printf("theorem1_global_bound = %.6e (worst node %d)\n", report.global_bound,
                report.worst_node);
    std::printf("dt = %.6e -> %s\n", preset.dt, ok ? "satisfies the bound" : "violates the bound");
    return ok ? 0 : 1;
}

inline int command_validate(const std::string& gamma_name, double mu, double s_max,
                            int n_samples) {
    const MotilityFunction gamma = motility_by_name(gamma_name);
    const HypothesisReport rep = validate_hypotheses(gamma, ModelParameters{mu}, s_max, n_samples);
    std::printf("gamma = %s, mu = %g, sampled on [0, %g] with %d points\n", gamma.name.c_str(),
                mu, s_max, n_samples);
    std::printf("sign conditions: %s\n", rep.signs_ok ? "ok" : "violated");
    std::printf("mu0 = %.6e (must stay below mu)\n", rep.mu0);
    if (rep.c_gamma_unbounded)
        std::printf("c_gamma = unbounded (gamma vanishes with nonzero gamma')\n");
    else
        std::printf("c_gamma = %.6e\n", rep.c_gamma);
    std::printf("result: %s\n", rep.pass ? "pass" : "fail");
    return rep.pass ? 0 : 1;
}

inline int command_generate_cloud(const std::string& kind, int nx, int ny,
                                  const std::string& path, double perturbation,
                                  std::uint64_t seed) {
    if (kind == "regular") {
        save_cloud(generate_regular_cloud(nx, ny), path);
    } else if (kind == "irregular") {
        save_cloud(generate_irregular_cloud(nx, ny, perturbation, seed), path);
    } else {
        throw ConfigError("cloud kind must be 'regular' or 'irregular'");
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

inline int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Meshless GFD solver for the density-suppressed motility system"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run_cmd = app.add_subcommand("run", "run a simulation and write result files");
    add_cloud_options(run_cmd, run_opt.cloud);
    add_model_options(run_cmd, run_opt);
    run_cmd->add_option("--out", run_opt.out_dir, "output directory");
    run_cmd->add_flag("--enforce-stability", run_opt.enforce_stability,
                      "abort when dt violates the stability bound");

    RunOptions stab_opt;
    std::string per_node_csv;
    CLI::App* stab_cmd =
        app.add_subcommand("stability-check", "evaluate the time-step bound at t = 0");
    add_cloud_options(stab_cmd, stab_opt.cloud);
    add_model_options(stab_cmd, stab_opt);
    stab_cmd->add_option("--per-node-csv", per_node_csv, "write per-node bounds to this CSV");

    std::string val_gamma = "exp";
    double val_mu = 3.0, val_s_max = 50.0;
    int val_samples = 100000;
    CLI::App* val_cmd = app.add_subcommand("validate", "check the motility hypotheses");
    val_cmd->add_option("--gamma", val_gamma, "motility function: exp or rational");
    val_cmd->add_option("--mu", val_mu, "logistic growth rate");
    val_cmd->add_option("--s-max", val_s_max, "sampling range upper end");
    val_cmd->add_option("--n-samples", val_samples, "number of samples");

    std::string gen_kind, gen_path;
    int gen_nx = 21, gen_ny = 21;
    double gen_perturbation = 0.2;
    std::uint64_t gen_seed = 1;
    CLI::App* gen_cmd = app.add_subcommand("generate-cloud", "write a cloud CSV");
    gen_cmd->add_option("kind", gen_kind, "regular or irregular")->required();
    gen_cmd->add_option("nx", gen_nx, "nodes along x")->required();
    gen_cmd->add_option("ny", gen_ny, "nodes along y")->required();
    gen_cmd->add_option("path", gen_path, "output CSV path")->required();
    gen_cmd->add_option("--perturbation", gen_perturbation, "displacement fraction");
    gen_cmd->add_option("--seed", gen_seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            const auto from_file = merge_config(run_opt, run_cmd);
            return command_run(run_opt, run_cmd, from_file);
        }
        if (stab_cmd->parsed()) {
            const auto from_file = merge_config(stab_opt, stab_cmd);
            return command_stability_check(stab_opt, stab_cmd, from_file, per_node_csv);
        }
        if (val_cmd->parsed())
            return command_validate(val_gamma, val_mu, val_s_max, val_samples);
        if (gen_cmd->parsed())
            return command_generate_cloud(gen_kind, gen_nx, gen_ny, gen_path, gen_perturbation,
                                          gen_seed);
    } catch (const StabilityViolationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

}  // namespace gfd::cli
