#include "scaccel/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scaccel/estimates.hpp"
#include "scaccel/interpolant.hpp"
#include "scaccel/report_io.hpp"

#include <json.hpp>

namespace scaccel::cli {

namespace {

namespace fs = std::filesystem;

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

AnisotropyWeights parse_weights(const KeyValueConfig& cfg, int n_dims) {
    const std::string spec = cfg.get_or("weights", "isotropic");
    if (spec == "isotropic") return AnisotropyWeights::isotropic(n_dims);
    if (spec == "kl") {
        const AnisotropyWeights full = kl_anisotropy_weights();
        if (n_dims > full.dims()) {
            throw std::runtime_error("kl weights cover at most 11 dimensions");
        }
        std::vector<double> head(full.values().begin(), full.values().begin() + n_dims);
        return AnisotropyWeights(std::move(head));
    }
    std::vector<double> values;
    for (const auto& item : split_list(spec)) values.push_back(std::stod(item));
    if (static_cast<int>(values.size()) != n_dims) {
        throw std::runtime_error("weights list must have one entry per dimension");
    }
    return AnisotropyWeights(std::move(values));
}

} // namespace

std::vector<Mode> parse_modes(const std::string& csv) {
    std::vector<Mode> modes;
    for (const auto& item : split_list(csv)) {
        const auto mode = mode_from_string(item);
        if (!mode) throw std::runtime_error("unknown mode: " + item);
        modes.push_back(*mode);
    }
    if (modes.empty()) throw std::runtime_error("empty mode list");
    return modes;
}

RunConfig build_run_config(const KeyValueConfig& cfg) {
    RunConfig run;
    const std::string problem = cfg.get("problem");
    if (problem == "trig1d") {
        run.problem = make_trig_diffusion_1d();
        run.n_dims = 4;
    } else if (problem == "kl2d") {
        run.n_dims = cfg.get_int("dims", 3);
        run.problem = make_kl_diffusion_2d(run.n_dims, cfg.get_double("correlation_length", 1.0 / 64.0));
    } else if (problem == "nonlinear1d") {
        const std::string f = cfg.get_or("nonlinearity", "u5");
        if (f == "u5") {
            run.problem = make_nonlinear_1d(Nonlinearity::power_five);
        } else if (f == "uup") {
            run.problem = make_nonlinear_1d(Nonlinearity::u_times_du);
        } else {
            throw std::runtime_error("nonlinearity must be u5 or uup");
        }
        run.n_dims = 4;
    } else if (problem == "constant") {
        run.n_dims = cfg.get_int("dims", 2);
        run.problem = make_constant_coefficient_1d(run.n_dims);
    } else {
        throw std::runtime_error("unknown problem: " + problem);
    }
    if (cfg.has("dims") && cfg.get_int("dims", run.n_dims) != run.n_dims) {
        throw std::runtime_error("problem '" + problem + "' fixes dims = " +
                                 std::to_string(run.n_dims));
    }

    run.mesh_cells = cfg.get_int("mesh_cells", run.problem.spatial_dim == 1 ? 64 : 16);
    run.max_level = cfg.get_int("level", 3);
    run.alpha = parse_weights(cfg, run.n_dims);
    run.reference_level = cfg.get_int("reference_level", -1);

    const std::string tol_type = cfg.get_or("tolerance_type", "absolute");
    if (tol_type == "absolute") {
        run.solver.stop.kind = StopRule::Kind::absolute;
    } else if (tol_type == "relative") {
        run.solver.stop.kind = StopRule::Kind::relative;
    } else {
        throw std::runtime_error("tolerance_type must be absolute or relative");
    }
    run.solver.stop.tol = cfg.get_double("tolerance", 1e-8);
    run.solver.nonlinear_rel_tol = cfg.get_double("nonlinear_tolerance", 1e-8);
    run.solver.max_iterations = cfg.get_int("max_iterations", 50000);
    run.solver.max_outer_iterations = cfg.get_int("max_outer_iterations", 200);

    const std::string pc = cfg.get_or("preconditioner", "identity");
    const auto policy = pc_policy_from_string(pc);
    if (!policy) throw std::runtime_error("unknown preconditioner: " + pc);
    run.solver.preconditioner = *policy;
    run.solver.pc_level = cfg.get_int("pc_level", 1);

    run.cost_per_matvec = cfg.get_int("cd", run.problem.spatial_dim == 1 ? 5 : 9);
    run.seed = cfg.get_u64("seed", 0);
    run.workers = cfg.get_int("workers", 0);
    run.measure_condition = cfg.get_bool("measure_condition", false);
    run.grid_cap = static_cast<std::size_t>(cfg.get_u64("grid_cap", kDefaultGridPointCap));
    return run;
}

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& modes_override, const std::string& format, int workers,
            std::uint64_t seed, bool seed_set) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    RunConfig run = build_run_config(cfg);
    if (workers > 0) run.workers = workers;
    if (seed_set) run.seed = seed;
    const std::string modes_csv =
        !modes_override.empty() ? modes_override : cfg.get_or("modes", "zero,accelerated");
    const std::vector<Mode> modes = parse_modes(modes_csv);

    const ExperimentReport report = run_experiment(run, modes);

    fs::create_directories(out_dir);
    const std::string stem = stem_of(config_path);
    const bool want_json = format == "json" || format == "both";
    const bool want_csv = format == "csv" || format == "both";
    if (want_json) {
        write_file(fs::path(out_dir) / (stem + "_report.json"), report_to_json(report));
    }
    if (want_csv) {
        std::ostringstream table;
        write_table_csv(table, report);
        write_file(fs::path(out_dir) / (stem + "_table.csv"), table.str());
        if (!run.problem.is_linear()) {
            std::ostringstream timing;
            write_timing_csv(timing, report);
            write_file(fs::path(out_dir) / (stem + "_timing.csv"), timing.str());
        }
    }

    for (const auto& mode : report.modes) {
        if (mode.failed) {
            std::cerr << "solver did not converge in mode " << to_string(mode.mode) << "\n";
            return 2;
        }
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& out_dir) {
    if (report_paths.size() < 2) throw std::runtime_error("compare needs at least two reports");
    std::vector<ExperimentReport> reports;
    for (const auto& path : report_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open report: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        reports.push_back(report_from_json(buf.str()));
    }
    const GridSummary& base = reports.front().grid;
    for (const auto& r : reports) {
        if (r.grid.n_dims != base.n_dims || r.grid.max_level != base.max_level ||
            r.grid.count != base.count) {
            std::cerr << "reports were produced on different grids\n";
            return 1;
        }
    }

    std::vector<CompareSeries> series;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const auto& mode : reports[i].modes) {
            CompareSeries s;
            s.label = stem_of(report_paths[i]) + ":" + to_string(mode.mode);
            long long cum = 0;
            for (const auto& lv : mode.levels) {
                s.mean_iterations.push_back(lv.mean_iterations);
                for (int it : lv.iterations) cum += it;
                s.cumulative_iters.push_back(cum);
            }
            series.push_back(std::move(s));
        }
    }

    fs::create_directories(out_dir);
    std::ostringstream out;
    write_compare_csv(out, series);
    write_file(fs::path(out_dir) / "compare.csv", out.str());
    return 0;
}

struct BoundRow {
    std::string name;
    double measured;
    double bound;
    bool holds;
};

int cmd_check_bounds(const std::string& report_path, const std::string& params_path,
                     const std::string& out_dir) {
    std::ifstream in(report_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report: " + report_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string report_text = buf.str();
    const ExperimentReport report = report_from_json(report_text);
    const KeyValueConfig params = KeyValueConfig::parse_file(params_path);

    EstimateParams p;
    p.n_dims = report.grid.n_dims;
    p.fe_rate = params.get_double("fe_rate", 1.0);
    p.c_fem = params.get_double("c_fem", 1.0);
    p.c_sc = params.get_double("c_sc", 1.0);
    p.decay_rate = params.get_double("decay_rate", 1.0);
    p.continuity = params.get_double("continuity", 1.0);
    p.coercivity = params.get_double("coercivity", 1.0);
    p.condition_constant = params.get_double("c_kappa", 1.0);
    p.solution_norm_bound = params.get_double("u_norm", 1.0);
    p.cost_per_matvec = report.cost_per_matvec;

    std::vector<BoundRow> rows;

    for (int w = 0; w <= report.grid.max_level; ++w) {
        const double measured = static_cast<double>(report.grid.count[static_cast<std::size_t>(w)]);
        const double bound = point_count_bound(w, report.grid.n_dims);
        rows.push_back({"point_count_level_" + std::to_string(w), measured, bound,
                        measured <= bound});
    }

    // Per-solve CG bound with measured condition numbers and A-norms. Only
    // meaningful for linear runs, where iterations are CG iterations.
    if (report.linear) {
        std::size_t measured_solves = 0;
        double worst_ratio = 0.0;
        std::size_t violations = 0;
        for (const auto& mode : report.modes) {
            for (const auto& s : mode.solves) {
                if (s.guess != GuessSource::zero || s.condition <= 1.0) continue;
                ++measured_solves;
                const double bound =
                    cg_iteration_bound(s.solution_a_norm, report.solver_tolerance, s.condition);
                const double ratio =
                    bound > 0.0 ? s.iterations / bound : (s.iterations > 0 ? 2.0 : 0.0);
                worst_ratio = std::max(worst_ratio, ratio);
                if (s.iterations > bound) ++violations;
            }
        }
        if (measured_solves == 0) {
            std::cerr << "report carries no measured condition numbers; rerun with "
                         "measure_condition = true\n";
            return 1;
        }
        rows.push_back({"cg_iterations_vs_bound_worst_ratio", worst_ratio, 1.0, violations == 0});
    }

    // Sampled Lebesgue constant against the closed-form bound (small cases).
    if (report.grid.n_dims <= 3 && report.grid.max_level <= 4) {
        const auto grid = build_grid(report.grid.max_level, report.grid.n_dims,
                                     AnisotropyWeights(report.grid.alpha));
        const std::size_t samples =
            static_cast<std::size_t>(params.get_u64("lebesgue_samples", 20000));
        const double measured = lebesgue_estimate(grid, report.grid.max_level, samples);
        const double bound = lebesgue_bound(report.grid.max_level, report.grid.n_dims);
        rows.push_back({"lebesgue_estimate", measured, bound, measured <= bound});
    }

    // Work bounds at a target accuracy, with the fitted-constant 2x slack.
    if (params.has("epsilon")) {
        const double eps = params.get_double("epsilon", 0.0);
        const TotalBounds tb = total_bounds(p, eps, report.m_h);
        const ModeResult* zero = find_mode(report, Mode::zero);
        const ModeResult* acc = find_mode(report, Mode::accelerated);
        if (zero) {
            rows.push_back({"total_zero_iterations", static_cast<double>(zero->total_iterations),
                            2.0 * tb.k_zero,
                            static_cast<double>(zero->total_iterations) <= 2.0 * tb.k_zero});
        }
        if (acc) {
            rows.push_back({"total_accelerated_iterations",
                            static_cast<double>(acc->total_iterations), 2.0 * tb.k_acc,
                            static_cast<double>(acc->total_iterations) <= 2.0 * tb.k_acc});
            rows.push_back({"interpolation_cost",
                            static_cast<double>(acc->interpolation_cost),
                            2.0 * tb.interpolation_cost,
                            static_cast<double>(acc->interpolation_cost) <=
                                2.0 * tb.interpolation_cost});
        }
    }

    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "check, measured, bound, holds\n";
    char buf2[256];
    bool all_hold = true;
    for (const auto& row : rows) {
        std::snprintf(buf2, sizeof(buf2), "%s, %.6g, %.6g, %d\n", row.name.c_str(),
                      row.measured, row.bound, row.holds ? 1 : 0);
        csv << buf2;
        all_hold = all_hold && row.holds;
    }
    write_file(fs::path(out_dir) / (stem_of(report_path) + "_bounds.csv"), csv.str());

    // Append the table to the report JSON in place.
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(report_text);
    nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        bounds.push_back({{"check", row.name},
                          {"measured", row.measured},
                          {"bound", row.bound},
                          {"holds", row.holds}});
    }
    j["bounds"] = std::move(bounds);
    write_file(report_path, j.dump(2) + "\n");

    return all_hold ? 0 : 3;
}

int cmd_dump_grid(const std::string& config_path, const std::string& out_dir) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const RunConfig run = build_run_config(cfg);
    const int level = std::max(run.max_level, run.reference_level);
    const CollocationGrid grid = build_grid(level, run.n_dims, run.alpha, run.grid_cap);
    fs::create_directories(out_dir);
    std::ostringstream out;
    grid.dump(out);
    write_file(fs::path(out_dir) / (stem_of(config_path) + "_grid.txt"), out.str());
    return 0;
}

} // namespace

int run_main(int argc, const char* const* argv) {
    CLI::App app{"sparse-grid collocation experiments with warm-started solvers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string modes_csv;
    std::string format = "both";
    int workers = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> report_paths;
    std::string params_path;

    CLI::App* run = app.add_subcommand("run", "run configured experiment modes");
    run->add_option("--config", config_path, "run configuration file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--modes", modes_csv, "comma list: zero,accelerated,nearest_neighbor");
    run->add_option("--format", format, "json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    run->add_option("--workers", workers, "parallel workers (0 = hardware)");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "diagnostic sampling seed");

    CLI::App* compare = app.add_subcommand("compare", "merge reports into plot-ready series");
    compare->add_option("reports", report_paths, "report JSON files")->expected(-1);
    compare->add_option("--out", out_dir, "output directory");

    CLI::App* check = app.add_subcommand("check-bounds", "bound-vs-measured table");
    check->add_option("--report", report_paths, "report JSON file")->expected(1)->required();
    check->add_option("--params", params_path, "estimate parameters file")->required();
    check->add_option("--out", out_dir, "output directory");

    CLI::App* dump = app.add_subcommand("dump-grid", "write the collocation grid table");
    dump->add_option("--config", config_path, "run configuration file")->required();
    dump->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, out_dir, modes_csv, format, workers, seed,
                           seed_opt->count() > 0);
        }
        if (compare->parsed()) return cmd_compare(report_paths, out_dir);
        if (check->parsed()) return cmd_check_bounds(report_paths.at(0), params_path, out_dir);
        if (dump->parsed()) return cmd_dump_grid(config_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace scaccel::cli
