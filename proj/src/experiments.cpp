#include "opinionlab/experiments.hpp"

#include "opinionlab/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace opinionlab {

namespace {

std::string version_comment() {
    return std::string("opinionlab ") + kToolVersion;
}

/// Ratio with a guard for degenerate zero baselines.
double safe_ratio(double value, double baseline) {
    if (baseline == 0.0) {
        return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return value / baseline;
}

}  // namespace

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    std::size_t pool = workers > 0 ? static_cast<std::size_t>(workers)
                                   : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min(pool, count);
    if (pool <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) {
        threads.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (auto& thread : threads) {
        thread.join();
    }
}

Dataset load_dataset(const std::string& graph_path, const std::string& opinions_path) {
    // Node count comes from the opinion file: one opinion per node.
    std::ifstream in(opinions_path);
    if (!in) {
        throw std::invalid_argument("cannot open opinion file: " + opinions_path);
    }
    Eigen::Index n = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] != '#') {
            ++n;
        }
    }
    in.close();
    return Dataset{load_edge_list(graph_path, n), load_opinions(opinions_path, n)};
}

EquilibriumResult run_equilibrium(const WeightedGraph& g, const OpinionVector& s,
                                  const FjSolverConfig& cfg) {
    EquilibriumResult result;
    result.z_star = fj_equilibrium(g, s, cfg);
    result.metrics = conservation_check(g, s, cfg);
    return result;
}

AdminSweepResult run_admin_sweep(const WeightedGraph& g0, const OpinionVector& s,
                                 const AdminSweepOptions& opts) {
    if (opts.epsilon_grid.empty()) {
        throw std::invalid_argument("run_admin_sweep: epsilon grid must be nonempty");
    }
    for (size_t i = 0; i < opts.epsilon_grid.size(); ++i) {
        if (opts.epsilon_grid[i] < 0.0) {
            throw std::invalid_argument("run_admin_sweep: epsilon values must be >= 0");
        }
        if (i > 0 && opts.epsilon_grid[i] < opts.epsilon_grid[i - 1]) {
            throw std::invalid_argument("run_admin_sweep: epsilon grid must be ascending");
        }
    }

    AdminSweepResult result;
    const OpinionVector z_baseline = fj_equilibrium(g0, s, opts.fj);
    result.baseline_polarization = polarization(z_baseline);
    result.baseline_disagreement = global_disagreement(g0, z_baseline);

    const size_t points = opts.epsilon_grid.size();
    result.rows.resize(points);
    result.trajectories.resize(opts.capture_trajectories ? points : 0);

    parallel_for(points, opts.workers, [&](std::size_t i) {
        AdminSweepRow& row = result.rows[i];
        row.epsilon = opts.epsilon_grid[i];
        try {
            AdminConfig cfg = opts.admin;
            cfg.gamma = opts.gamma;
            const ConstraintSet cs = ConstraintSet::from_graph(g0, row.epsilon, opts.support);
            AdminTrajectory traj = admin_dynamics(g0, s, cs, cfg, opts.fj);
            row.rounds = static_cast<int>(traj.rounds.size()) - 1;
            row.converged = traj.converged;
            if (row.epsilon == 0.0) {
                // Baseline against itself.
                row.pol_ratio = 1.0;
                row.disagreement_ratio = 1.0;
            } else {
                const WeightedGraph final_graph(traj.rounds.back().weights);
                const OpinionVector z_final = fj_equilibrium(final_graph, s, opts.fj);
                row.pol_ratio =
                    safe_ratio(polarization(z_final), result.baseline_polarization);
                row.disagreement_ratio = safe_ratio(global_disagreement(final_graph, z_final),
                                                    result.baseline_disagreement);
            }
            if (opts.capture_trajectories) {
                result.trajectories[i] = std::move(traj);
            }
        } catch (const std::exception& e) {
            row.status = e.what();
        }
    });

    for (const auto& row : result.rows) {
        if (row.status != "ok") {
            result.all_ok = false;
        }
    }
    return result;
}

SbmVerifyResult run_sbm_verify(const SbmParams& params, int trials, bool use_expected_graph,
                               const FjSolverConfig& cfg) {
    SbmVerifyResult result;
    if (use_expected_graph) {
        params.validate();
        if (trials < 1) {
            throw std::invalid_argument("run_sbm_verify: trials must be >= 1");
        }
        const WeightedGraph expected = sbm_expected_graph(params);
        const OpinionVector s = polarized_innate_opinions(params.community_size);
        const double pol = polarization(fj_equilibrium(expected, s, cfg));
        const double lemma = expected_sbm_polarization(params.community_size, params.q);
        const double ratio = pol / lemma;
        for (int t = 0; t < trials; ++t) {
            result.rows.push_back(SbmVerifyRow{t, 0, pol, lemma, ratio});
        }
        result.median_ratio = ratio;
        const bool in_bracket = ratio >= kRatioLowerBound && ratio <= kRatioUpperBound;
        result.pass_fraction = in_bracket ? 1.0 : 0.0;
        result.pass = in_bracket;
        return result;
    }

    const FragileConsensusReport report = verify_fragile_consensus(params, trials, cfg);
    for (int t = 0; t < trials; ++t) {
        SbmVerifyRow row;
        row.trial = t;
        row.seed = derive_trial_seed(params.seed, static_cast<std::uint64_t>(t));
        row.polarization = report.polarizations[t];
        row.lemma_value = report.lemma_value;
        row.ratio = report.ratios[t];
        result.rows.push_back(row);
    }
    result.median_ratio = report.median_ratio;
    result.pass_fraction = report.pass_fraction;
    result.pass = report.pass;
    return result;
}

std::vector<SbmSweepPoint> run_sbm_sweep(Eigen::Index community_size, double p,
                                         const std::vector<double>& q_grid, int trials,
                                         std::uint64_t seed, int workers,
                                         const FjSolverConfig& cfg) {
    if (q_grid.empty()) {
        throw std::invalid_argument("run_sbm_sweep: q grid must be nonempty");
    }
    if (trials < 1) {
        throw std::invalid_argument("run_sbm_sweep: trials must be >= 1");
    }
    for (double q : q_grid) {
        if (q < 0.0 || q > 1.0) {
            throw std::invalid_argument("run_sbm_sweep: q values must lie in [0, 1]");
        }
    }
    // Same per-trial seed derivation as fragile_consensus_sweep, so the
    // parallel and sequential paths emit identical numbers.
    std::vector<SbmSweepPoint> points(q_grid.size());
    std::vector<std::string> errors(q_grid.size());
    parallel_for(q_grid.size(), workers, [&](std::size_t gi) {
        try {
            SbmParams params;
            params.community_size = community_size;
            params.p = p;
            params.q = q_grid[gi];
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int t = 0; t < trials; ++t) {
                params.seed = derive_trial_seed(
                    seed, static_cast<std::uint64_t>(gi) * static_cast<std::uint64_t>(trials) +
                              static_cast<std::uint64_t>(t));
                const double pol = sampled_equilibrium_polarization(params, cfg);
                sum += pol;
                sum_sq += pol * pol;
            }
            SbmSweepPoint& point = points[gi];
            point.community_size = community_size;
            point.p = p;
            point.q = q_grid[gi];
            point.nq = static_cast<double>(community_size) * q_grid[gi];
            point.trials = trials;
            point.mean_polarization = sum / trials;
            const double variance =
                trials > 1 ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1)) : 0.0;
            point.std_polarization = std::sqrt(variance);
            point.lemma_value = expected_sbm_polarization(community_size, q_grid[gi]);
        } catch (const std::exception& e) {
            errors[gi] = e.what();
        }
    });
    for (const auto& err : errors) {
        if (!err.empty()) {
            throw std::invalid_argument(err);
        }
    }
    return points;
}

void write_equilibrium_csv(const std::string& path, const EquilibriumResult& result) {
    csv::Writer out(path, version_comment(),
                    {"round", "polarization", "disagreement", "internal_conflict",
                     "conservation_residual", "mean_opinion"});
    const MetricsReport& m = result.metrics;
    out.row({csv::number(0LL), csv::number(m.polarization), csv::number(m.global_disagreement),
             csv::number(m.global_internal_conflict), csv::number(m.conservation_residual),
             csv::number(m.mean_opinion)});
    out.close();
}

void write_trajectory_csv(const std::string& path, const AdminTrajectory& traj) {
    csv::Writer out(path, version_comment(),
                    {"round", "polarization", "disagreement", "internal_conflict",
                     "conservation_residual", "mean_opinion"});
    for (size_t r = 0; r < traj.rounds.size(); ++r) {
        const MetricsReport& m = traj.rounds[r].metrics;
        out.row({csv::number(static_cast<long long>(r)), csv::number(m.polarization),
                 csv::number(m.global_disagreement), csv::number(m.global_internal_conflict),
                 csv::number(m.conservation_residual), csv::number(m.mean_opinion)});
    }
    out.close();
}

void write_admin_sweep_csv(const std::string& path, const AdminSweepResult& result) {
    csv::Writer out(path, version_comment(),
                    {"epsilon", "pol_ratio", "disagreement_ratio", "rounds", "converged",
                     "status"});
    for (const auto& row : result.rows) {
        out.row({csv::number(row.epsilon), csv::number(row.pol_ratio),
                 csv::number(row.disagreement_ratio), csv::number(static_cast<long long>(row.rounds)),
                 row.converged ? "true" : "false", row.status});
    }
    out.close();
}

void write_sbm_verify_csv(const std::string& path, const SbmVerifyResult& result) {
    csv::Writer out(path, version_comment(),
                    {"trial", "seed", "polarization", "lemma_value", "ratio", "pass"});
    for (const auto& row : result.rows) {
        const bool in_bracket = row.ratio >= kRatioLowerBound && row.ratio <= kRatioUpperBound;
        out.row({csv::number(static_cast<long long>(row.trial)), std::to_string(row.seed),
                 csv::number(row.polarization), csv::number(row.lemma_value),
                 csv::number(row.ratio), in_bracket ? "true" : "false"});
    }
    out.close();
}

void write_sbm_sweep_csv(const std::string& path, const std::vector<SbmSweepPoint>& points) {
    csv::Writer out(path, version_comment(),
                    {"n", "p", "q", "nq", "trials", "mean_polarization", "std_polarization",
                     "lemma_value"});
    for (const auto& point : points) {
        out.row({csv::number(static_cast<long long>(point.community_size)), csv::number(point.p),
                 csv::number(point.q), csv::number(point.nq),
                 csv::number(static_cast<long long>(point.trials)),
                 csv::number(point.mean_polarization), csv::number(point.std_polarization),
                 csv::number(point.lemma_value)});
    }
    out.close();
}

}  // namespace opinionlab
