#pragma once

#include "opinionlab/admin.hpp"
#include "opinionlab/fj.hpp"
#include "opinionlab/graph.hpp"
#include "opinionlab/metrics.hpp"
#include "opinionlab/sbm.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace opinionlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs fn(0..count-1) on a pool of worker threads; fn must not throw.
/// workers <= 0 means one per logical core.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Loads a graph + opinion pair; the node count is inferred from the opinion
/// file (one opinion per node).
struct Dataset {
    WeightedGraph graph;
    OpinionVector opinions;
};
Dataset load_dataset(const std::string& graph_path, const std::string& opinions_path);

struct EquilibriumResult {
    OpinionVector z_star;
    MetricsReport metrics;
};
EquilibriumResult run_equilibrium(const WeightedGraph& g, const OpinionVector& s,
                                  const FjSolverConfig& cfg = {});

struct AdminSweepOptions {
    std::vector<double> epsilon_grid;  // nonnegative, ascending
    double gamma = 0.0;
    SupportMode support = SupportMode::full;
    int workers = 1;
    AdminConfig admin;
    FjSolverConfig fj;
    bool capture_trajectories = false;
};

struct AdminSweepRow {
    double epsilon = 0.0;
    /// Final equilibrium polarization relative to the no-admin baseline.
    double pol_ratio = 1.0;
    double disagreement_ratio = 1.0;
    int rounds = 0;
    bool converged = false;
    std::string status = "ok";
};

struct AdminSweepResult {
    std::vector<AdminSweepRow> rows;  // grid order
    std::vector<AdminTrajectory> trajectories;  // aligned with rows when captured
    double baseline_polarization = 0.0;
    double baseline_disagreement = 0.0;
    bool all_ok = true;
};

/// One admin_dynamics run per epsilon, compared against the epsilon = 0
/// equilibrium baseline. Per-epsilon failures land in the row status and the
/// sweep continues.
AdminSweepResult run_admin_sweep(const WeightedGraph& g0, const OpinionVector& s,
                                 const AdminSweepOptions& opts);

struct SbmVerifyRow {
    int trial = 0;
    std::uint64_t seed = 0;
    double polarization = 0.0;
    double lemma_value = 0.0;
    double ratio = 0.0;
};

struct SbmVerifyResult {
    std::vector<SbmVerifyRow> rows;
    double median_ratio = 0.0;
    double pass_fraction = 0.0;
    bool pass = false;
};

/// use_expected_graph replaces sampling with the deterministic expected
/// adjacency (every row then has ratio 1).
SbmVerifyResult run_sbm_verify(const SbmParams& params, int trials, bool use_expected_graph,
                               const FjSolverConfig& cfg = {});

std::vector<SbmSweepPoint> run_sbm_sweep(Eigen::Index community_size, double p,
                                         const std::vector<double>& q_grid, int trials,
                                         std::uint64_t seed, int workers,
                                         const FjSolverConfig& cfg = {});

// CSV emission; every file starts with "# opinionlab <version>".
void write_equilibrium_csv(const std::string& path, const EquilibriumResult& result);
void write_trajectory_csv(const std::string& path, const AdminTrajectory& traj);
void write_admin_sweep_csv(const std::string& path, const AdminSweepResult& result);
void write_sbm_verify_csv(const std::string& path, const SbmVerifyResult& result);
void write_sbm_sweep_csv(const std::string& path, const std::vector<SbmSweepPoint>& points);

}  // namespace opinionlab
