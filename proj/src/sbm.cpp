#include "opinionlab/sbm.hpp"

#include "opinionlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace opinionlab {

namespace {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
/// std::uniform_real_distribution is implementation-defined, this is not.
double canonical_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double median_of(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    const size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
    return 0.5 * (values[mid - 1] + upper);
}

}  // namespace

void SbmParams::validate() const {
    if (community_size < 1) {
        throw std::invalid_argument("SbmParams: community size must be >= 1");
    }
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("SbmParams: p and q must lie in [0, 1]");
    }
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    std::uint64_t x = master_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

WeightedGraph sbm_generate(const SbmParams& params) {
    params.validate();
    const Eigen::Index n = params.community_size;
    const Eigen::Index total = 2 * n;
    std::mt19937_64 rng(params.seed);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(total, total);
    for (Eigen::Index i = 0; i < total; ++i) {
        for (Eigen::Index j = i + 1; j < total; ++j) {
            const bool same_block = (i < n) == (j < n);
            const double prob = same_block ? params.p : params.q;
            if (canonical_double(rng) < prob) {
                w(i, j) = 1.0;
                w(j, i) = 1.0;
            }
        }
    }
    return WeightedGraph(std::move(w));
}

WeightedGraph sbm_expected_graph(const SbmParams& params) {
    params.validate();
    const Eigen::Index n = params.community_size;
    const Eigen::Index total = 2 * n;
    Eigen::MatrixXd w(total, total);
    for (Eigen::Index i = 0; i < total; ++i) {
        for (Eigen::Index j = 0; j < total; ++j) {
            const bool same_block = (i < n) == (j < n);
            w(i, j) = (i == j) ? 0.0 : (same_block ? params.p : params.q);
        }
    }
    return WeightedGraph(std::move(w));
}

OpinionVector polarized_innate_opinions(Eigen::Index community_size) {
    if (community_size < 1) {
        throw std::invalid_argument("polarized_innate_opinions: community size must be >= 1");
    }
    OpinionVector s(2 * community_size);
    s.head(community_size).setConstant(1.0);
    s.tail(community_size).setConstant(-1.0);
    return s;
}

double expected_sbm_polarization(Eigen::Index community_size, double q) {
    if (community_size < 1 || q < 0.0) {
        throw std::invalid_argument("expected_sbm_polarization: need n >= 1 and q >= 0");
    }
    const double n = static_cast<double>(community_size);
    const double denom = 2.0 * n * q + 1.0;
    return 2.0 * n / (denom * denom);
}

double sampled_equilibrium_polarization(const SbmParams& params, const FjSolverConfig& cfg) {
    const WeightedGraph g = sbm_generate(params);
    const OpinionVector s = polarized_innate_opinions(params.community_size);
    return polarization(fj_equilibrium(g, s, cfg));
}

FragileConsensusReport verify_fragile_consensus(const SbmParams& params, int trials,
                                                const FjSolverConfig& cfg) {
    params.validate();
    const double n = static_cast<double>(params.community_size);
    if (params.q < 1.0 / n || params.q > params.p) {
        throw std::invalid_argument(
            "verify_fragile_consensus: theorem regime requires 1/n <= q <= p");
    }
    if (trials < 30) {
        throw std::invalid_argument("verify_fragile_consensus: need at least 30 trials");
    }

    FragileConsensusReport report;
    report.lemma_value = expected_sbm_polarization(params.community_size, params.q);
    report.polarizations.reserve(trials);
    report.ratios.reserve(trials);
    int in_bracket = 0;
    for (int t = 0; t < trials; ++t) {
        SbmParams trial_params = params;
        trial_params.seed = derive_trial_seed(params.seed, static_cast<std::uint64_t>(t));
        const double pol = sampled_equilibrium_polarization(trial_params, cfg);
        const double ratio = pol / report.lemma_value;
        report.polarizations.push_back(pol);
        report.ratios.push_back(ratio);
        if (ratio >= kRatioLowerBound && ratio <= kRatioUpperBound) {
            ++in_bracket;
        }
    }
    report.median_ratio = median_of(report.ratios);
    report.pass_fraction = static_cast<double>(in_bracket) / static_cast<double>(trials);
    report.pass = report.pass_fraction >= kRequiredPassFraction;
    return report;
}

std::vector<SbmSweepPoint> fragile_consensus_sweep(Eigen::Index community_size, double p,
                                                   const std::vector<double>& q_grid,
                                                   int trials, std::uint64_t master_seed,
                                                   const FjSolverConfig& cfg) {
    if (q_grid.empty()) {
        throw std::invalid_argument("fragile_consensus_sweep: q grid must be nonempty");
    }
    if (trials < 1) {
        throw std::invalid_argument("fragile_consensus_sweep: trials must be >= 1");
    }
    std::vector<SbmSweepPoint> points;
    points.reserve(q_grid.size());
    for (size_t gi = 0; gi < q_grid.size(); ++gi) {
        SbmParams params;
        params.community_size = community_size;
        params.p = p;
        params.q = q_grid[gi];
        params.validate();

        double sum = 0.0;
        double sum_sq = 0.0;
        for (int t = 0; t < trials; ++t) {
            params.seed = derive_trial_seed(
                master_seed, static_cast<std::uint64_t>(gi) * static_cast<std::uint64_t>(trials) +
                                 static_cast<std::uint64_t>(t));
            const double pol = sampled_equilibrium_polarization(params, cfg);
            sum += pol;
            sum_sq += pol * pol;
        }
        SbmSweepPoint point;
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
        points.push_back(point);
    }
    return points;
}

}  // namespace opinionlab
