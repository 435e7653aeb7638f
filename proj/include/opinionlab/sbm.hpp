#pragma once

#include "opinionlab/fj.hpp"
#include "opinionlab/graph.hpp"

#include <cstdint>
#include <vector>

namespace opinionlab {

/// Two-community stochastic block model: 2n nodes, unit-weight edges drawn
/// independently with probability p inside a community and q across.
struct SbmParams {
    Eigen::Index community_size = 0;  // n; the graph has 2n nodes
    double p = 0.0;
    double q = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Empirical bracket standing in for the unstated theorem constants: a trial
/// passes when its polarization / closed-form ratio lies in
/// [kRatioLowerBound, kRatioUpperBound]; the run passes when at least
/// kRequiredPassFraction of trials do.
inline constexpr double kRatioLowerBound = 0.2;
inline constexpr double kRatioUpperBound = 5.0;
inline constexpr double kRequiredPassFraction = 0.95;

/// SplitMix64 mix of (master seed, trial index); every trial owns an
/// independent, platform-stable stream.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// Samples a graph; deterministic given params. Weights are all 0/1.
WeightedGraph sbm_generate(const SbmParams& params);

/// The deterministic expectation of the model: p on in-community
/// off-diagonal entries, q across communities, zero diagonal.
WeightedGraph sbm_expected_graph(const SbmParams& params);

/// s_i = +1 on the first community, -1 on the second. Mean exactly zero.
OpinionVector polarized_innate_opinions(Eigen::Index community_size);

/// Closed form for the equilibrium polarization of the expected graph:
/// 2n / (2nq + 1)^2. Independent of p.
double expected_sbm_polarization(Eigen::Index community_size, double q);

/// Equilibrium polarization of one sampled graph under the polarized
/// innate opinions.
double sampled_equilibrium_polarization(const SbmParams& params,
                                        const FjSolverConfig& cfg = {});

struct FragileConsensusReport {
    std::vector<double> polarizations;  // by trial index
    std::vector<double> ratios;         // polarization / lemma value
    double lemma_value = 0.0;
    double median_ratio = 0.0;
    double pass_fraction = 0.0;
    bool pass = false;
};

/// Monte Carlo check of the fragile-consensus bracket. Requires the theorem
/// regime 1/n <= q <= p and at least 30 trials.
FragileConsensusReport verify_fragile_consensus(const SbmParams& params, int trials,
                                                const FjSolverConfig& cfg = {});

struct SbmSweepPoint {
    Eigen::Index community_size = 0;
    double p = 0.0;
    double q = 0.0;
    double nq = 0.0;
    int trials = 0;
    double mean_polarization = 0.0;
    double std_polarization = 0.0;
    double lemma_value = 0.0;
};

/// Mean/stddev of equilibrium polarization per q-grid point, with the
/// closed-form curve for overlay.
std::vector<SbmSweepPoint> fragile_consensus_sweep(Eigen::Index community_size, double p,
                                                   const std::vector<double>& q_grid,
                                                   int trials, std::uint64_t master_seed,
                                                   const FjSolverConfig& cfg = {});

}  // namespace opinionlab
