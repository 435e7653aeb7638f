#include "opinionlab/admin.hpp"
#include "opinionlab/csv.hpp"
#include "opinionlab/experiments.hpp"
#include "opinionlab/fj.hpp"
#include "opinionlab/graph.hpp"
#include "opinionlab/metrics.hpp"
#include "opinionlab/sbm.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace opinionlab;

namespace {

struct CommonIo {
    std::string graph_path;
    std::string opinions_path;
    bool opinions_are_expressed = false;
    std::string out_dir = ".";
};

struct SolverFlags {
    FjSolverConfig fj;
    AdminConfig admin;
};

void add_dataset_options(CLI::App* cmd, CommonIo& io) {
    cmd->add_option("--graph", io.graph_path, "Edge-list file (lines 'i j w', 0-based)")
        ->required();
    cmd->add_option("--opinions", io.opinions_path, "Opinion file, one value per node")
        ->required();
    cmd->add_flag("--opinions-are-expressed", io.opinions_are_expressed,
                  "Treat the opinion file as expressed equilibria and recover innate "
                  "opinions via (L+I)z, clamped to [-1,1]");
}

void add_out_dir_option(CLI::App* cmd, CommonIo& io) {
    cmd->add_option("--out-dir", io.out_dir, "Output directory for CSV files");
}

void add_solver_options(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--solve-tolerance", flags.fj.solve_tolerance,
                    "Relative residual bound for equilibrium solves");
    cmd->add_option("--inner-max-iters", flags.admin.inner_max_iters,
                    "Projected gradient iteration cap per admin step");
    cmd->add_option("--inner-tolerance", flags.admin.inner_tolerance,
                    "Relative objective-change stop for the admin step");
    cmd->add_option("--dykstra-max-iters", flags.admin.dykstra_max_iters,
                    "Dykstra projection cycle cap");
    cmd->add_option("--dykstra-tolerance", flags.admin.dykstra_tolerance,
                    "Dykstra cycle-change stop");
    cmd->add_option("--outer-max-rounds", flags.admin.outer_max_rounds,
                    "Administrator dynamics round cap");
    cmd->add_option("--outer-tolerance", flags.admin.outer_tolerance,
                    "Relative combined-objective stop for the dynamics");
}

std::string out_path(const CommonIo& io, const std::string& name) {
    fs::create_directories(io.out_dir);
    return (fs::path(io.out_dir) / name).string();
}

std::string epsilon_tag(double epsilon) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", epsilon);
    return buf;
}

Dataset load_with_recovery(const CommonIo& io) {
    Dataset data = load_dataset(io.graph_path, io.opinions_path);
    if (io.opinions_are_expressed) {
        data.opinions = recover_innate(data.graph, data.opinions);
    }
    return data;
}

int cmd_equilibrium(const CommonIo& io, const SolverFlags& flags) {
    const Dataset data = load_with_recovery(io);
    const EquilibriumResult result = run_equilibrium(data.graph, data.opinions, flags.fj);
    write_equilibrium_csv(out_path(io, "equilibrium_metrics.csv"), result);
    save_opinions(result.z_star, out_path(io, "equilibrium_opinions.txt"));
    if (io.opinions_are_expressed) {
        save_opinions(data.opinions, out_path(io, "innate_opinions.txt"));
    }
    std::cout << "n=" << data.graph.size()
              << " polarization=" << csv::number(result.metrics.polarization)
              << " disagreement=" << csv::number(result.metrics.global_disagreement)
              << " internal_conflict=" << csv::number(result.metrics.global_internal_conflict)
              << " conservation_residual="
              << csv::number(result.metrics.conservation_residual) << "\n";
    return 0;
}

int cmd_admin_sweep(const CommonIo& io, const SolverFlags& flags,
                    const std::vector<double>& epsilon_grid, double gamma,
                    const std::string& support, int workers, bool regularized) {
    if (regularized && gamma <= 0.0) {
        throw CLI::ValidationError("reg-sweep requires --gamma > 0");
    }
    const Dataset data = load_with_recovery(io);

    AdminSweepOptions opts;
    opts.epsilon_grid = epsilon_grid;
    opts.gamma = gamma;
    opts.support = support == "original" ? SupportMode::original : SupportMode::full;
    opts.workers = workers;
    opts.admin = flags.admin;
    opts.fj = flags.fj;
    opts.capture_trajectories = true;

    const AdminSweepResult result = run_admin_sweep(data.graph, data.opinions, opts);
    write_admin_sweep_csv(out_path(io, regularized ? "reg_sweep.csv" : "admin_sweep.csv"),
                          result);
    for (size_t i = 0; i < result.rows.size(); ++i) {
        if (result.rows[i].status != "ok") {
            continue;
        }
        const std::string tag = epsilon_tag(result.rows[i].epsilon);
        write_trajectory_csv(out_path(io, "trajectory_eps" + tag + ".csv"),
                             result.trajectories[i]);
        save_edge_list(WeightedGraph(result.trajectories[i].rounds.back().weights),
                       out_path(io, "final_graph_eps" + tag + ".txt"));
    }
    for (const auto& row : result.rows) {
        std::cout << "epsilon=" << csv::number(row.epsilon)
                  << " pol_ratio=" << csv::number(row.pol_ratio)
                  << " disagreement_ratio=" << csv::number(row.disagreement_ratio)
                  << " rounds=" << row.rounds << " converged=" << (row.converged ? "yes" : "no")
                  << " status=" << row.status << "\n";
    }
    return result.all_ok ? 0 : 2;
}

int cmd_sbm_verify(Eigen::Index n, double p, double q, int trials, std::uint64_t seed,
                   bool expected, const CommonIo& io, const SolverFlags& flags) {
    SbmParams params;
    params.community_size = n;
    params.p = p;
    params.q = q;
    params.seed = seed;
    const SbmVerifyResult result = run_sbm_verify(params, trials, expected, flags.fj);
    write_sbm_verify_csv(out_path(io, "sbm_verify.csv"), result);
    std::cout << "lemma=" << csv::number(expected_sbm_polarization(n, q))
              << " median_ratio=" << csv::number(result.median_ratio)
              << " pass_fraction=" << csv::number(result.pass_fraction)
              << " pass=" << (result.pass ? "yes" : "no") << "\n";
    return 0;
}

int cmd_sbm_sweep(Eigen::Index n, double p, const std::vector<double>& q_grid, int trials,
                  std::uint64_t seed, int workers, const CommonIo& io,
                  const SolverFlags& flags) {
    for (double q : q_grid) {
        if (q < 0.0 || q > 1.0) {
            throw CLI::ValidationError("--q-grid values must lie in [0, 1]");
        }
    }
    const auto points = run_sbm_sweep(n, p, q_grid, trials, seed, workers, flags.fj);
    write_sbm_sweep_csv(out_path(io, "sbm_sweep.csv"), points);
    for (const auto& point : points) {
        std::cout << "nq=" << csv::number(point.nq)
                  << " mean_polarization=" << csv::number(point.mean_polarization)
                  << " lemma=" << csv::number(point.lemma_value) << "\n";
    }
    return 0;
}

int cmd_ingest_check(const CommonIo& io) {
    const Dataset data = load_dataset(io.graph_path, io.opinions_path);
    const Eigen::Index n = data.graph.size();
    long long edges = 0;
    double total_weight = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (data.graph.weights()(i, j) > 0.0) {
                ++edges;
                total_weight += data.graph.weights()(i, j);
            }
        }
    }

    // Round-trip both files and verify the reload matches.
    const std::string graph_copy = out_path(io, "ingest_graph_roundtrip.txt");
    const std::string opinions_copy = out_path(io, "ingest_opinions_roundtrip.txt");
    save_edge_list(data.graph, graph_copy);
    save_opinions(data.opinions, opinions_copy);
    const WeightedGraph g2 = load_edge_list(graph_copy, n);
    const OpinionVector o2 = load_opinions(opinions_copy, n);
    const bool graph_ok = (g2.weights() - data.graph.weights()).lpNorm<Eigen::Infinity>() == 0.0;
    const bool opinions_ok = (o2 - data.opinions).lpNorm<Eigen::Infinity>() == 0.0;

    std::cout << "n=" << n << " edges=" << edges << " total_weight=" << csv::number(total_weight)
              << " opinion_min=" << csv::number(data.opinions.minCoeff())
              << " opinion_max=" << csv::number(data.opinions.maxCoeff())
              << " roundtrip=" << ((graph_ok && opinions_ok) ? "ok" : "MISMATCH") << "\n";
    return (graph_ok && opinions_ok) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Friedkin-Johnsen opinion dynamics with a network administrator"};
    app.set_config("--config", "", "Flat key=value config file; command-line flags win");
    app.require_subcommand(1);

    CommonIo io;
    SolverFlags flags;
    std::vector<double> epsilon_grid;
    double gamma = 0.0;
    std::string support = "full";
    int workers = 0;
    Eigen::Index sbm_n = 100;
    double sbm_p = 0.1;
    double sbm_q = 0.05;
    std::vector<double> q_grid;
    int trials = 50;
    std::uint64_t seed = 0;
    bool expected = false;

    auto* equilibrium = app.add_subcommand(
        "equilibrium", "Solve the opinion equilibrium and report metrics");
    add_dataset_options(equilibrium, io);
    add_out_dir_option(equilibrium, io);
    add_solver_options(equilibrium, flags);

    auto* admin_sweep = app.add_subcommand(
        "admin-sweep", "Run administrator dynamics over an epsilon grid");
    add_dataset_options(admin_sweep, io);
    add_out_dir_option(admin_sweep, io);
    add_solver_options(admin_sweep, flags);
    admin_sweep->add_option("--epsilon-grid", epsilon_grid, "Ascending Frobenius budgets")
        ->required()
        ->delimiter(',');
    admin_sweep->add_option("--gamma", gamma, "L2 regularization strength (default 0)");
    admin_sweep->add_option("--support", support, "Admissible edge set")
        ->check(CLI::IsMember({"original", "full"}));
    admin_sweep->add_option("--workers", workers, "Worker threads (0 = logical cores)");

    auto* reg_sweep = app.add_subcommand(
        "reg-sweep", "Administrator sweep with the regularized objective");
    add_dataset_options(reg_sweep, io);
    add_out_dir_option(reg_sweep, io);
    add_solver_options(reg_sweep, flags);
    reg_sweep->add_option("--epsilon-grid", epsilon_grid, "Ascending Frobenius budgets")
        ->required()
        ->delimiter(',');
    double reg_gamma = 0.2;
    reg_sweep->add_option("--gamma", reg_gamma, "L2 regularization strength (default 0.2)");
    reg_sweep->add_option("--support", support, "Admissible edge set")
        ->check(CLI::IsMember({"original", "full"}));
    reg_sweep->add_option("--workers", workers, "Worker threads (0 = logical cores)");

    auto* sbm = app.add_subcommand("sbm", "Stochastic block model experiments");
    sbm->require_subcommand(1);

    auto* verify = sbm->add_subcommand("verify", "Monte Carlo fragile-consensus check");
    verify->add_option("--n", sbm_n, "Community size (graph has 2n nodes)")->required();
    verify->add_option("--p", sbm_p, "In-community edge probability")->required();
    verify->add_option("--q", sbm_q, "Cross-community edge probability")->required();
    verify->add_option("--trials", trials, "Trial count");
    verify->add_option("--seed", seed, "Master seed")->envname("OPINIONLAB_SEED");
    verify->add_flag("--expected", expected, "Use the deterministic expected adjacency");
    add_out_dir_option(verify, io);
    add_solver_options(verify, flags);

    auto* sweep = sbm->add_subcommand("sweep", "Polarization vs nq sweep");
    sweep->add_option("--n", sbm_n, "Community size (graph has 2n nodes)")->required();
    sweep->add_option("--p", sbm_p, "In-community edge probability")->required();
    sweep->add_option("--q-grid", q_grid, "Cross-community probabilities")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", trials, "Trials per grid point");
    sweep->add_option("--seed", seed, "Master seed")->envname("OPINIONLAB_SEED");
    sweep->add_option("--workers", workers, "Worker threads (0 = logical cores)");
    add_out_dir_option(sweep, io);
    add_solver_options(sweep, flags);

    auto* ingest = app.add_subcommand("ingest-check", "Validate and round-trip input files");
    add_dataset_options(ingest, io);
    add_out_dir_option(ingest, io);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(equilibrium)) {
            return cmd_equilibrium(io, flags);
        }
        if (app.got_subcommand(admin_sweep)) {
            return cmd_admin_sweep(io, flags, epsilon_grid, gamma, support, workers, false);
        }
        if (app.got_subcommand(reg_sweep)) {
            return cmd_admin_sweep(io, flags, epsilon_grid, reg_gamma, support, workers, true);
        }
        if (app.got_subcommand(sbm)) {
            if (sbm->got_subcommand(verify)) {
                return cmd_sbm_verify(sbm_n, sbm_p, sbm_q, trials, seed, expected, io, flags);
            }
            return cmd_sbm_sweep(sbm_n, sbm_p, q_grid, trials, seed, workers, io, flags);
        }
        return cmd_ingest_check(io);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CLI::ExitCodes::ValidationError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
