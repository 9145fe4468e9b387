#include "scaccel/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "scaccel/fem.hpp"

namespace scaccel {

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::zero: return "zero";
    case Mode::accelerated: return "accelerated";
    case Mode::nearest_neighbor: return "nearest_neighbor";
    }
    return "?";
}

std::optional<Mode> mode_from_string(const std::string& name) {
    if (name == "zero") return Mode::zero;
    if (name == "accelerated" || name == "accel") return Mode::accelerated;
    if (name == "nearest_neighbor" || name == "nearest-neighbor" || name == "nn") {
        return Mode::nearest_neighbor;
    }
    return std::nullopt;
}

std::string to_string(PcPolicy policy) {
    switch (policy) {
    case PcPolicy::identity: return "identity";
    case PcPolicy::diagonal: return "diagonal";
    case PcPolicy::incomplete_cholesky: return "ic0";
    case PcPolicy::interpolated: return "interpolated";
    }
    return "?";
}

std::optional<PcPolicy> pc_policy_from_string(const std::string& name) {
    if (name == "identity") return PcPolicy::identity;
    if (name == "diagonal") return PcPolicy::diagonal;
    if (name == "ic0") return PcPolicy::incomplete_cholesky;
    if (name == "interpolated") return PcPolicy::interpolated;
    return std::nullopt;
}

const ModeResult* find_mode(const ExperimentReport& report, Mode mode) {
    for (const auto& m : report.modes) {
        if (m.mode == mode) return &m;
    }
    return nullptr;
}

std::vector<double> predict_initial(const VectorValuedInterpolant& prior,
                                    std::span<const double> y) {
    return prior.evaluate(y);
}

std::vector<double> predict_nearest(const CollocationGrid& grid,
                                    const std::vector<std::vector<double>>& solutions,
                                    std::size_t known_count, std::size_t value_dim,
                                    std::span<const double> y) {
    if (known_count == 0) return std::vector<double>(value_dim, 0.0);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < known_count; ++id) {
        const auto& c = grid.point(id).coords;
        double d2 = 0.0;
        for (std::size_t n = 0; n < c.size(); ++n) {
            const double d = c[n] - y[n];
            d2 += d * d;
        }
        if (d2 < best_d2) { // strict: ties keep the lowest id
            best_d2 = d2;
            best = id;
        }
    }
    return solutions[best];
}

long long interpolation_cost(std::size_t m_h, const CollocationGrid& grid, int max_level) {
    long long total = 0;
    for (int w = 1; w <= max_level; ++w) {
        const long long delta = static_cast<long long>(grid.new_count_at(w));
        const long long prev = static_cast<long long>(grid.count_at(w - 1));
        total += static_cast<long long>(m_h) * delta * (2 * prev - 1);
    }
    return total;
}

double iteration_savings(long long k_zero, long long k_acc) {
    if (k_zero <= 0) return 0.0;
    return static_cast<double>(k_zero - k_acc) / static_cast<double>(k_zero);
}

double cost_savings(long long k_zero, long long k_acc, std::size_t m_h,
                    long long cost_per_matvec, long long interp_cost) {
    const long long c_iter = cost_per_matvec * static_cast<long long>(m_h);
    const long long c_zero = c_iter * k_zero;
    if (c_zero <= 0) return 0.0;
    const long long c_acc = c_iter * k_acc + interp_cost;
    return static_cast<double>(c_zero - c_acc) / static_cast<double>(c_zero);
}

namespace {

int worker_count(const RunConfig& config) {
    if (config.workers > 0) return config.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, int workers, Fn&& fn) {
    const std::size_t count = end - begin;
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

Mesh make_mesh(const RunConfig& config) {
    const ProblemSpec& p = config.problem;
    if (p.spatial_dim == 1) {
        return Mesh::interval(config.mesh_cells,
                              p.left.kind == BoundarySpec::Kind::dirichlet,
                              p.right.kind == BoundarySpec::Kind::dirichlet);
    }
    return Mesh::unit_square(config.mesh_cells);
}

} // namespace

ModeResult run_mode(const RunConfig& config, const Mesh& mesh,
                    std::shared_ptr<const CollocationGrid> grid, Mode mode) {
    const int sweep_level = grid->max_level();
    const int report_level = config.max_level;
    if (report_level > sweep_level) throw std::invalid_argument("grid shallower than max level");
    const std::size_t m_h = mesh.free_dof_count();
    const long long iter_flops = config.cost_per_matvec * static_cast<long long>(m_h);
    const bool linear = config.problem.is_linear();
    const int workers = worker_count(config);

    ModeResult result;
    result.mode = mode;
    result.solutions.assign(grid->size(), {});
    result.solves.resize(grid->count_at(std::min(report_level, sweep_level)));

    std::vector<std::shared_ptr<const Preconditioner>> pc_base;
    const bool interpolated_pc =
        linear && config.solver.preconditioner == PcPolicy::interpolated;
    if (interpolated_pc) {
        if (config.solver.pc_level < 0 || config.solver.pc_level > sweep_level) {
            throw std::invalid_argument("preconditioner level outside grid range");
        }
        pc_base.resize(grid->count_at(config.solver.pc_level));
    }

    std::shared_ptr<const Preconditioner> shared_identity =
        std::make_shared<Preconditioner>(Preconditioner::identity());

    for (int w = 0; w <= sweep_level; ++w) {
        const std::size_t first = (w == 0) ? 0 : grid->count_at(w - 1);
        const std::size_t last = grid->count_at(w);

        // Level barrier: predictions below read only this committed snapshot.
        std::optional<VectorValuedInterpolant> snapshot;
        if (mode == Mode::accelerated && w > 0) {
            std::vector<std::vector<double>> data(result.solutions.begin(),
                                                  result.solutions.begin() +
                                                      static_cast<std::ptrdiff_t>(first));
            for (const auto& v : data) {
                if (v.empty()) throw std::logic_error("level barrier violated");
            }
            snapshot.emplace(grid, w - 1, std::move(data));
        }

        const auto level_start = std::chrono::steady_clock::now();

        std::vector<SolveRecord> records(last - first);
        parallel_for(first, last, workers, [&](std::size_t id) {
            const auto& point = grid->point(id);
            const std::span<const double> y(point.coords);
            const auto solve_start = std::chrono::steady_clock::now();

            std::vector<double> x0(m_h, 0.0);
            GuessSource guess = GuessSource::zero;
            if (w > 0) {
                if (mode == Mode::accelerated) {
                    x0 = predict_initial(*snapshot, y);
                    guess = GuessSource::interpolant;
                } else if (mode == Mode::nearest_neighbor) {
                    x0 = predict_nearest(*grid, result.solutions, first, m_h, y);
                    guess = GuessSource::nearest_neighbor;
                }
            }

            std::vector<double> solution;
            SolveReport rep;
            AssembledSystem system = assemble(config.problem, mesh, y);
            if (linear) {
                Preconditioner pc = Preconditioner::identity();
                switch (config.solver.preconditioner) {
                case PcPolicy::identity:
                    break;
                case PcPolicy::diagonal:
                    pc = Preconditioner::diagonal_of(system.matrix);
                    break;
                case PcPolicy::incomplete_cholesky:
                    pc = ic0_factor(system.matrix);
                    break;
                case PcPolicy::interpolated:
                    if (w <= config.solver.pc_level) {
                        auto own = std::make_shared<Preconditioner>(ic0_factor(system.matrix));
                        if (id < pc_base.size()) pc_base[id] = own;
                        std::tie(solution, rep) = cg_solve(system, x0, *own, config.solver.stop,
                                                           config.solver.max_iterations);
                    } else {
                        const Preconditioner interp_pc = interpolate_preconditioner(
                            pc_base, *grid, config.solver.pc_level, y);
                        std::tie(solution, rep) = cg_solve(system, x0, interp_pc,
                                                           config.solver.stop,
                                                           config.solver.max_iterations);
                    }
                    break;
                }
                if (solution.empty()) {
                    std::tie(solution, rep) = cg_solve(system, x0, pc, config.solver.stop,
                                                       config.solver.max_iterations);
                }
            } else {
                std::tie(solution, rep) =
                    nonlinear_solve(config.problem, mesh, y, x0, config.solver.nonlinear_rel_tol,
                                    config.solver.max_outer_iterations);
            }
            const auto solve_end = std::chrono::steady_clock::now();
            rep.guess = guess;
            rep.flops = static_cast<long long>(rep.iterations) * iter_flops;

            SolveRecord rec;
            rec.point_id = id;
            rec.level = w;
            rec.iterations = rep.iterations;
            rec.converged = rep.converged;
            rec.final_residual = rep.final_residual;
            rec.guess = rep.guess;
            rec.preconditioner_fallback = rep.preconditioner_fallback;
            rec.flops = rep.flops;
            rec.wall_seconds = std::chrono::duration<double>(solve_end - solve_start).count();
            rec.solution_a_norm = a_norm(system.matrix, solution);
            std::vector<double> diff(solution);
            axpy(-1.0, x0, diff);
            rec.initial_error_a_norm = a_norm(system.matrix, diff);
            if (config.measure_condition) {
                rec.condition = estimate_condition(system.matrix);
            }

            result.solutions[id] = std::move(solution);
            records[id - first] = rec;
        });

        const auto level_end = std::chrono::steady_clock::now();

        if (w <= report_level) {
            LevelStats stats;
            stats.level = w;
            stats.new_points = last - first;
            stats.iterations.reserve(records.size());
            stats.min_iterations = records.empty() ? 0 : records.front().iterations;
            stats.max_iterations = stats.min_iterations;
            double sum = 0.0;
            for (const auto& rec : records) {
                stats.iterations.push_back(rec.iterations);
                sum += rec.iterations;
                stats.min_iterations = std::min(stats.min_iterations, rec.iterations);
                stats.max_iterations = std::max(stats.max_iterations, rec.iterations);
                stats.solve_wall_seconds += rec.wall_seconds;
                result.total_iterations += rec.iterations;
                if (!rec.converged) result.failed = true;
                result.solves[rec.point_id] = rec;
            }
            stats.mean_iterations = records.empty() ? 0.0 : sum / static_cast<double>(records.size());
            stats.wall_seconds = std::chrono::duration<double>(level_end - level_start).count();
            result.levels.push_back(std::move(stats));
        } else {
            for (const auto& rec : records) {
                if (!rec.converged) result.failed = true;
            }
        }
    }

    result.iteration_cost = iter_flops * result.total_iterations;
    if (mode == Mode::accelerated) {
        result.interpolation_cost = interpolation_cost(m_h, *grid, report_level);
    }
    result.total_cost = result.iteration_cost + result.interpolation_cost;
    return result;
}

std::vector<std::pair<int, double>> error_curve(const Mesh& mesh,
                                                const CollocationGrid& grid, int max_level,
                                                const std::vector<std::vector<double>>& solutions,
                                                const VectorValuedInterpolant& reference) {
    if (reference.value_dim() != mesh.free_dof_count()) {
        throw std::invalid_argument("reference interpolant does not match the mesh");
    }
    const CsrMatrix mass = assemble_mass(mesh);
    const std::vector<double> ref_mean = reference.expectation();

    std::vector<std::pair<int, double>> curve;
    curve.reserve(static_cast<std::size_t>(max_level) + 1);
    for (int w = 0; w <= max_level; ++w) {
        std::vector<std::vector<double>> data(solutions.begin(),
                                              solutions.begin() +
                                                  static_cast<std::ptrdiff_t>(grid.count_at(w)));
        const VectorValuedInterpolant interp(
            std::shared_ptr<const CollocationGrid>(&grid, [](const CollocationGrid*) {}), w,
            std::move(data));
        std::vector<double> mean = interp.expectation();
        axpy(-1.0, ref_mean, mean);
        curve.emplace_back(w, l2_norm(mass, mean));
    }
    return curve;
}

ExperimentReport run_experiment(const RunConfig& config, const std::vector<Mode>& modes) {
    if (modes.empty()) throw std::invalid_argument("no modes requested");
    if (config.max_level < 0) throw std::invalid_argument("max level must be >= 0");
    if (config.n_dims != config.problem.domain.dims()) {
        throw std::invalid_argument("grid dimension does not match the problem");
    }

    const int sweep_level = std::max(config.max_level, config.reference_level);
    auto grid = std::make_shared<const CollocationGrid>(
        build_grid(sweep_level, config.n_dims, config.alpha, config.grid_cap));
    const Mesh mesh = make_mesh(config);

    ExperimentReport report;
    report.problem_name = config.problem.name;
    report.linear = config.problem.is_linear();
    report.m_h = mesh.free_dof_count();
    report.cost_per_matvec = config.cost_per_matvec;
    report.solver_tolerance =
        config.problem.is_linear() ? config.solver.stop.tol : config.solver.nonlinear_rel_tol;
    report.reference_level = config.reference_level;
    report.seed = config.seed;
    report.grid.n_dims = grid->dims();
    report.grid.max_level = config.max_level;
    report.grid.alpha = config.alpha.values();
    for (int w = 0; w <= config.max_level; ++w) {
        report.grid.count.push_back(grid->count_at(w));
        report.grid.new_count.push_back(grid->new_count_at(w));
    }

    const bool want_errors = config.reference_level > config.max_level;
    for (Mode mode : modes) {
        ModeResult r = run_mode(config, mesh, grid, mode);
        if (want_errors) {
            std::vector<std::vector<double>> ref_data(
                r.solutions.begin(),
                r.solutions.begin() +
                    static_cast<std::ptrdiff_t>(grid->count_at(config.reference_level)));
            const VectorValuedInterpolant reference(grid, config.reference_level,
                                                    std::move(ref_data));
            r.error_curve = error_curve(mesh, *grid, config.max_level, r.solutions, reference);
        }
        report.modes.push_back(std::move(r));
    }

    const ModeResult* zero = find_mode(report, Mode::zero);
    const ModeResult* acc = find_mode(report, Mode::accelerated);
    if (zero && acc) {
        report.has_savings = true;
        report.iteration_savings = iteration_savings(zero->total_iterations, acc->total_iterations);
        report.cost_savings = cost_savings(zero->total_iterations, acc->total_iterations,
                                           report.m_h, config.cost_per_matvec,
                                           acc->interpolation_cost);
    }
    return report;
}

} // namespace scaccel
