#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "scaccel/interpolant.hpp"
#include "scaccel/mesh.hpp"
#include "scaccel/model_problems.hpp"
#include "scaccel/solvers.hpp"
#include "scaccel/sparse_grid.hpp"

namespace scaccel {

enum class Mode { zero, accelerated, nearest_neighbor };

std::string to_string(Mode mode);
std::optional<Mode> mode_from_string(const std::string& name);

enum class PcPolicy { identity, diagonal, incomplete_cholesky, interpolated };

std::string to_string(PcPolicy policy);
std::optional<PcPolicy> pc_policy_from_string(const std::string& name);

struct SolverConfig {
    StopRule stop{StopRule::Kind::absolute, 1e-8};
    PcPolicy preconditioner = PcPolicy::identity;
    int pc_level = 1;               // interpolated policy: level of the base set
    double nonlinear_rel_tol = 1e-8;
    int max_iterations = 50000;
    int max_outer_iterations = 200; // nonlinear path
};

struct RunConfig {
    ProblemSpec problem;
    int mesh_cells = 16;
    int n_dims = 1;
    int max_level = 0; // W
    AnisotropyWeights alpha = AnisotropyWeights::isotropic(1);
    SolverConfig solver;
    long long cost_per_matvec = 5; // C_D in the flop model C_iter = C_D * M_h
    std::uint64_t seed = 0;
    int workers = 0;               // 0 = hardware concurrency
    bool measure_condition = false;
    std::size_t grid_cap = kDefaultGridPointCap;
    int reference_level = -1;      // > max_level enables the error curve
};

struct SolveRecord {
    std::size_t point_id = 0;
    int level = 0;
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
    double solution_a_norm = 0.0;      // ||c||_A
    double initial_error_a_norm = 0.0; // ||c - x0||_A
    double condition = 0.0;            // measured kappa, 0 when disabled
    GuessSource guess = GuessSource::zero;
    bool preconditioner_fallback = false;
    long long flops = 0;
    double wall_seconds = 0.0; // prediction + assembly + solve, this point only
};

struct LevelStats {
    int level = 0;
    std::size_t new_points = 0;
    std::vector<int> iterations; // per new point, in point-id order
    double mean_iterations = 0.0;
    int min_iterations = 0;
    int max_iterations = 0;
    double wall_seconds = 0.0;       // barrier-to-barrier clock
    double solve_wall_seconds = 0.0; // sum of per-point work, scheduler independent
};

struct ModeResult {
    Mode mode = Mode::zero;
    std::vector<LevelStats> levels;      // 0..max_level
    long long total_iterations = 0;      // K
    long long iteration_cost = 0;        // C_D * M_h * K
    long long interpolation_cost = 0;    // C_int, accelerated runs only
    long long total_cost = 0;            // iteration_cost + interpolation_cost
    bool failed = false;                 // some solve did not converge
    std::vector<SolveRecord> solves;     // levels 0..max_level
    std::vector<std::vector<double>> solutions; // by point id, whole swept range
    std::vector<std::pair<int, double>> error_curve; // (level, L2 error vs reference)
};

struct GridSummary {
    int n_dims = 0;
    int max_level = 0;
    std::vector<double> alpha;          // anisotropy weights
    std::vector<std::size_t> count;     // M_w
    std::vector<std::size_t> new_count; // delta M_w
};

struct ExperimentReport {
    std::string problem_name;
    bool linear = true;
    GridSummary grid;
    std::size_t m_h = 0;
    long long cost_per_matvec = 5;
    double solver_tolerance = 0.0;
    int reference_level = -1;
    std::uint64_t seed = 0;
    std::vector<ModeResult> modes;
    bool has_savings = false; // zero and accelerated both present
    double iteration_savings = 0.0;
    double cost_savings = 0.0;
};

const ModeResult* find_mode(const ExperimentReport& report, Mode mode);

/// Initial guess at y from the committed previous-level interpolant.
std::vector<double> predict_initial(const VectorValuedInterpolant& prior,
                                    std::span<const double> y);

/// Solution of the Euclidean-nearest committed point; ties go to the lowest
/// id; with no prior points, the zero vector of length value_dim.
std::vector<double> predict_nearest(const CollocationGrid& grid,
                                    const std::vector<std::vector<double>>& solutions,
                                    std::size_t known_count, std::size_t value_dim,
                                    std::span<const double> y);

/// C_int = sum_{w>=1..max_level} M_h * delta M_w * (2 M_{w-1} - 1).
long long interpolation_cost(std::size_t m_h, const CollocationGrid& grid, int max_level);

double iteration_savings(long long k_zero, long long k_acc);
double cost_savings(long long k_zero, long long k_acc, std::size_t m_h,
                    long long cost_per_matvec, long long interp_cost);

/// Level-by-level sweep of one mode over the grid (Algorithm-1 loop):
/// predictions at level w read only the level-(w-1) snapshot; solves within a
/// level run in parallel; solutions commit at the level barrier.
ModeResult run_mode(const RunConfig& config, const Mesh& mesh,
                    std::shared_ptr<const CollocationGrid> grid, Mode mode);

/// Runs the requested modes over a shared grid and mesh, computes savings and
/// (when a reference level is configured) per-mode error curves.
ExperimentReport run_experiment(const RunConfig& config, const std::vector<Mode>& modes);

/// L2(D) errors of per-level expectations against a reference interpolant.
std::vector<std::pair<int, double>> error_curve(const Mesh& mesh,
                                                const CollocationGrid& grid, int max_level,
                                                const std::vector<std::vector<double>>& solutions,
                                                const VectorValuedInterpolant& reference);

} // namespace scaccel
