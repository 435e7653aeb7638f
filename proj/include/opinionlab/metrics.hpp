#pragma once

#include "opinionlab/fj.hpp"
#include "opinionlab/graph.hpp"

#include <string>

namespace opinionlab {

struct MetricsReport {
    double polarization = 0.0;
    double global_disagreement = 0.0;
    double global_internal_conflict = 0.0;
    /// P + 2D + I - s̄ᵀs̄ at equilibrium; should be numerically zero.
    double conservation_residual = 0.0;
    double mean_opinion = 0.0;
};

/// CSV header matching to_csv_row: round,polarization,disagreement,
/// internal_conflict,conservation_residual,mean_opinion
std::string metrics_csv_header();
std::string to_csv_row(const MetricsReport& report, int round);

/// Variance-style spread: sum_i (z_i - mean(z))^2. Ranges over [0, n].
double polarization(const OpinionVector& z);

/// sum_{j != i} w_ij (z_i - z_j)^2.
double local_disagreement(const WeightedGraph& g, const OpinionVector& z, Eigen::Index i);

/// (1/2) sum_i local_disagreement(g, z, i), evaluated as zᵀLz.
double global_disagreement(const WeightedGraph& g, const OpinionVector& z);

/// ||z - s||^2.
double internal_conflict(const OpinionVector& z, const OpinionVector& s);

/// Computes the equilibrium for (g, s) and reports all metrics together with
/// the conservation identity residual P + 2D + I - s̄ᵀs̄.
MetricsReport conservation_check(const WeightedGraph& g, const OpinionVector& s,
                                 const FjSolverConfig& cfg = {});

/// Equilibrium polarization as the quadratic form s̄ᵀ(L+I)^{-2}s̄, evaluated
/// through two sequential SPD solves.
double equilibrium_polarization_quadform(const WeightedGraph& g, const OpinionVector& s,
                                         const FjSolverConfig& cfg = {});

}  // namespace opinionlab
