#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aoilab/aoi.hpp"
#include "aoilab/baselines.hpp"
#include "aoilab/instance.hpp"
#include "aoilab/policy.hpp"

namespace aoilab::harness {

enum class SolverKind { TwaGreedy, TwaSample, TwaBeam, Sa, Ga, Nn, Random, Exact };

SolverKind parse_solver(const std::string& name);  // throws ParameterError
std::string solver_name(SolverKind kind);
bool needs_policy(SolverKind kind);
const std::vector<SolverKind>& all_solvers();

// How node counts are drawn: uniformly from the reference choices, or fixed.
struct NodePolicy {
    std::optional<int> fixed;

    std::string label() const;
    std::vector<int> choices() const;
};
NodePolicy parse_node_policy(const std::string& text);  // "random" or a positive count

struct SolveOptions {
    double omega = 1.2;
    std::size_t width = 16;  // sampling / beam width
    std::uint64_t seed = 0;
    const policy::Policy* policy = nullptr;
    baselines::SaConfig sa;
    baselines::GaConfig ga;
};

struct SolveOutcome {
    Tour tour;
    double total_aoi = 0.0;
    double wall_seconds = 0.0;  // solver call only
};

SolveOutcome run_solver(SolverKind kind, const ProblemInstance& inst, const SolveOptions& options);

struct ResultRow {
    std::string instance_id;
    std::string solver;
    std::size_t m = 0;
    double gamma_th_db = 0.0;
    std::string n_policy;
    double total_aoi = 0.0;
    double oldest_aoi = 0.0;
    double effective_energy = 0.0;
    double fly_time = 0.0;   // legs after the first stop, including the return
    double hover_time = 0.0;
    double wall_seconds = 0.0;
};

// Re-evaluates the tour; throws ContractError if the solver's reported cost
// disagrees with the evaluator by more than 1e-9 relative.
ResultRow make_row(std::string instance_id, SolverKind kind, const ProblemInstance& inst, double gamma_th_db,
                   const NodePolicy& nodes, const SolveOutcome& outcome);

std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

struct FlyHoverSplit {
    double fly = 0.0;
    double hover = 0.0;
};

// Shares of flying and hovering in the oldest packet's age.
FlyHoverSplit fly_hover_split(const aoi::AoIReport& report);

struct SweepSpec {
    std::vector<std::size_t> m_values{10};
    std::vector<double> gamma_db_values{20.0};
    std::vector<NodePolicy> node_policies{NodePolicy{}};
    std::size_t count = 20;
    int l_sub = 5;
    double area_side = 3000.0;
    std::uint64_t seed = 1;
    std::vector<SolverKind> solvers;
    SolveOptions options;
};

// Instance k of a sweep cell uses layout seed mix_seed(seed, k), so the same
// cluster layout is reused across threshold values. Rows are ordered by
// (M, threshold, node policy, instance, solver) whatever the thread count.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

ProblemInstance sweep_instance(const SweepSpec& spec, std::size_t m, double gamma_db, const NodePolicy& nodes,
                               std::size_t k);

// x/y series for external plotting: one file per solver holding the mean of
// `y_column` for each value of `x_column`.
void write_plot_data(const std::vector<ResultRow>& rows, const std::string& x_column, const std::string& y_column,
                     const std::filesystem::path& out_dir);

// CLI entry point. Returns 0 on success, 2 for invalid input, 3 for an
// infeasible instance and 4 for file errors.
int run(int argc, char** argv);

}  // namespace aoilab::harness
