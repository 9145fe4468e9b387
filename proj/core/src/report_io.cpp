#include "scaccel/report_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace scaccel {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string guess_name(GuessSource g) {
    switch (g) {
    case GuessSource::zero: return "zero";
    case GuessSource::interpolant: return "interpolant";
    case GuessSource::nearest_neighbor: return "nearest_neighbor";
    }
    return "?";
}

GuessSource guess_from(const std::string& s) {
    if (s == "interpolant") return GuessSource::interpolant;
    if (s == "nearest_neighbor") return GuessSource::nearest_neighbor;
    return GuessSource::zero;
}

} // namespace

std::string report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["problem"] = report.problem_name;
    j["linear"] = report.linear;
    j["m_h"] = report.m_h;
    j["cost_per_matvec"] = report.cost_per_matvec;
    j["solver_tolerance"] = report.solver_tolerance;
    j["reference_level"] = report.reference_level;
    j["seed"] = report.seed;
    j["grid"] = {{"dims", report.grid.n_dims},
                 {"max_level", report.grid.max_level},
                 {"alpha", report.grid.alpha},
                 {"count", report.grid.count},
                 {"new_count", report.grid.new_count}};
    j["modes"] = ordered_json::array();
    for (const auto& mode : report.modes) {
        ordered_json m;
        m["mode"] = to_string(mode.mode);
        m["total_iterations"] = mode.total_iterations;
        m["iteration_cost"] = mode.iteration_cost;
        m["interpolation_cost"] = mode.interpolation_cost;
        m["total_cost"] = mode.total_cost;
        m["failed"] = mode.failed;
        m["levels"] = ordered_json::array();
        for (const auto& lv : mode.levels) {
            m["levels"].push_back({{"level", lv.level},
                                   {"new_points", lv.new_points},
                                   {"iterations", lv.iterations},
                                   {"mean_iterations", lv.mean_iterations},
                                   {"min_iterations", lv.min_iterations},
                                   {"max_iterations", lv.max_iterations},
                                   {"wall_seconds", lv.wall_seconds},
                                   {"solve_wall_seconds", lv.solve_wall_seconds}});
        }
        if (!mode.error_curve.empty()) {
            ordered_json curve = ordered_json::array();
            for (const auto& [level, err] : mode.error_curve) {
                curve.push_back({level, err});
            }
            m["error_curve"] = std::move(curve);
        }
        m["solves"] = ordered_json::array();
        for (const auto& s : mode.solves) {
            m["solves"].push_back({{"id", s.point_id},
                                   {"level", s.level},
                                   {"iterations", s.iterations},
                                   {"converged", s.converged},
                                   {"final_residual", s.final_residual},
                                   {"a_norm", s.solution_a_norm},
                                   {"initial_error_a_norm", s.initial_error_a_norm},
                                   {"condition", s.condition},
                                   {"guess", guess_name(s.guess)},
                                   {"pc_fallback", s.preconditioner_fallback},
                                   {"flops", s.flops},
                                   {"wall_seconds", s.wall_seconds}});
        }
        j["modes"].push_back(std::move(m));
    }
    if (report.has_savings) {
        j["savings"] = {{"iteration", report.iteration_savings},
                        {"cost", report.cost_savings}};
    }
    return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
        throw std::runtime_error("unsupported report schema version");
    }
    ExperimentReport report;
    report.problem_name = j.at("problem").get<std::string>();
    report.linear = j.at("linear").get<bool>();
    report.m_h = j.at("m_h").get<std::size_t>();
    report.cost_per_matvec = j.at("cost_per_matvec").get<long long>();
    report.solver_tolerance = j.at("solver_tolerance").get<double>();
    report.reference_level = j.at("reference_level").get<int>();
    report.seed = j.at("seed").get<std::uint64_t>();
    const auto& g = j.at("grid");
    report.grid.n_dims = g.at("dims").get<int>();
    report.grid.max_level = g.at("max_level").get<int>();
    report.grid.alpha = g.at("alpha").get<std::vector<double>>();
    report.grid.count = g.at("count").get<std::vector<std::size_t>>();
    report.grid.new_count = g.at("new_count").get<std::vector<std::size_t>>();
    for (const auto& m : j.at("modes")) {
        ModeResult mode;
        const auto name = m.at("mode").get<std::string>();
        const auto parsed = mode_from_string(name);
        if (!parsed) throw std::runtime_error("unknown mode in report: " + name);
        mode.mode = *parsed;
        mode.total_iterations = m.at("total_iterations").get<long long>();
        mode.iteration_cost = m.at("iteration_cost").get<long long>();
        mode.interpolation_cost = m.at("interpolation_cost").get<long long>();
        mode.total_cost = m.at("total_cost").get<long long>();
        mode.failed = m.at("failed").get<bool>();
        for (const auto& lv : m.at("levels")) {
            LevelStats stats;
            stats.level = lv.at("level").get<int>();
            stats.new_points = lv.at("new_points").get<std::size_t>();
            stats.iterations = lv.at("iterations").get<std::vector<int>>();
            stats.mean_iterations = lv.at("mean_iterations").get<double>();
            stats.min_iterations = lv.at("min_iterations").get<int>();
            stats.max_iterations = lv.at("max_iterations").get<int>();
            stats.wall_seconds = lv.at("wall_seconds").get<double>();
            stats.solve_wall_seconds = lv.at("solve_wall_seconds").get<double>();
            mode.levels.push_back(std::move(stats));
        }
        if (m.contains("error_curve")) {
            for (const auto& pair : m.at("error_curve")) {
                mode.error_curve.emplace_back(pair.at(0).get<int>(), pair.at(1).get<double>());
            }
        }
        for (const auto& s : m.at("solves")) {
            SolveRecord rec;
            rec.point_id = s.at("id").get<std::size_t>();
            rec.level = s.at("level").get<int>();
            rec.iterations = s.at("iterations").get<int>();
            rec.converged = s.at("converged").get<bool>();
            rec.final_residual = s.at("final_residual").get<double>();
            rec.solution_a_norm = s.at("a_norm").get<double>();
            rec.initial_error_a_norm = s.at("initial_error_a_norm").get<double>();
            rec.condition = s.at("condition").get<double>();
            rec.guess = guess_from(s.at("guess").get<std::string>());
            rec.preconditioner_fallback = s.at("pc_fallback").get<bool>();
            rec.flops = s.at("flops").get<long long>();
            rec.wall_seconds = s.at("wall_seconds").get<double>();
            mode.solves.push_back(rec);
        }
        report.modes.push_back(std::move(mode));
    }
    if (j.contains("savings")) {
        report.has_savings = true;
        report.iteration_savings = j.at("savings").at("iteration").get<double>();
        report.cost_savings = j.at("savings").at("cost").get<double>();
    }
    return report;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%12s", cells[i].c_str());
        out << buf;
    }
    out << "\n";
}

} // namespace

void write_table_csv(std::ostream& out, const ExperimentReport& report) {
    write_row(out, {"level", "points", "error", "k_zero", "k_acc", "savings_pct",
                    "cost_savings_pct"});
    const ModeResult* zero = find_mode(report, Mode::zero);
    const ModeResult* acc = find_mode(report, Mode::accelerated);
    const ModeResult* any = report.modes.empty() ? nullptr : &report.modes.front();
    if (!any) return;

    long long cum_zero = 0;
    long long cum_acc = 0;
    for (int w = 0; w <= report.grid.max_level; ++w) {
        const std::size_t uw = static_cast<std::size_t>(w);
        std::vector<std::string> cells;
        cells.push_back(std::to_string(w));
        cells.push_back(std::to_string(report.grid.count[uw]));

        std::string err = "";
        const ModeResult* err_mode = acc ? acc : any;
        for (const auto& [level, e] : err_mode->error_curve) {
            if (level == w) err = fmt6(e);
        }
        cells.push_back(err);

        if (zero) {
            for (int it : zero->levels[uw].iterations) cum_zero += it;
            cells.push_back(std::to_string(cum_zero));
        } else {
            cells.push_back("");
        }
        if (acc) {
            for (int it : acc->levels[uw].iterations) cum_acc += it;
            cells.push_back(std::to_string(cum_acc));
        } else {
            cells.push_back("");
        }
        if (zero && acc) {
            cells.push_back(fmt6(100.0 * iteration_savings(cum_zero, cum_acc)));
            long long partial_int = 0; // C_int restricted to levels <= w
            for (int v = 1; v <= w; ++v) {
                const std::size_t uv = static_cast<std::size_t>(v);
                partial_int += static_cast<long long>(report.m_h) *
                               static_cast<long long>(report.grid.new_count[uv]) *
                               (2 * static_cast<long long>(report.grid.count[uv - 1]) - 1);
            }
            cells.push_back(fmt6(100.0 * cost_savings(cum_zero, cum_acc, report.m_h,
                                                      report.cost_per_matvec, partial_int)));
        } else {
            cells.push_back("");
            cells.push_back("");
        }
        write_row(out, cells);
    }
}

void write_timing_csv(std::ostream& out, const ExperimentReport& report) {
    std::vector<std::string> header = {"level"};
    for (const auto& mode : report.modes) header.push_back("seconds_" + to_string(mode.mode));
    for (const auto& mode : report.modes) header.push_back("solve_seconds_" + to_string(mode.mode));
    const bool both = find_mode(report, Mode::zero) && find_mode(report, Mode::accelerated);
    if (both) header.push_back("savings_pct");
    write_row(out, header);

    std::vector<double> cum(report.modes.size(), 0.0);
    std::vector<double> cum_solve(report.modes.size(), 0.0);
    for (int w = 0; w <= report.grid.max_level; ++w) {
        std::vector<std::string> cells = {std::to_string(w)};
        double zero_s = 0.0;
        double acc_s = 0.0;
        for (std::size_t m = 0; m < report.modes.size(); ++m) {
            cum[m] += report.modes[m].levels[static_cast<std::size_t>(w)].wall_seconds;
            cells.push_back(fmt6(cum[m]));
        }
        for (std::size_t m = 0; m < report.modes.size(); ++m) {
            cum_solve[m] += report.modes[m].levels[static_cast<std::size_t>(w)].solve_wall_seconds;
            cells.push_back(fmt6(cum_solve[m]));
            if (report.modes[m].mode == Mode::zero) zero_s = cum_solve[m];
            if (report.modes[m].mode == Mode::accelerated) acc_s = cum_solve[m];
        }
        if (both) {
            cells.push_back(zero_s > 0.0 ? fmt6(100.0 * (zero_s - acc_s) / zero_s) : "");
        }
        write_row(out, cells);
    }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareSeries>& series) {
    std::vector<std::string> header = {"level"};
    for (const auto& s : series) header.push_back("mean_iter_" + s.label);
    for (std::size_t i = 1; i < series.size(); ++i) {
        header.push_back("cum_savings_pct_" + series[i].label);
    }
    write_row(out, header);

    const std::size_t levels = series.empty() ? 0 : series.front().mean_iterations.size();
    for (std::size_t w = 0; w < levels; ++w) {
        std::vector<std::string> cells = {std::to_string(w)};
        for (const auto& s : series) cells.push_back(fmt6(s.mean_iterations[w]));
        for (std::size_t i = 1; i < series.size(); ++i) {
            const long long base = series.front().cumulative_iters[w];
            const long long other = series[i].cumulative_iters[w];
            cells.push_back(base > 0 ? fmt6(100.0 * static_cast<double>(base - other) /
                                            static_cast<double>(base))
                                     : "");
        }
        write_row(out, cells);
    }
}

} // namespace scaccel
