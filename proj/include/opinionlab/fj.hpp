#pragma once

#include "opinionlab/graph.hpp"

#include <vector>

namespace opinionlab {

struct FjSolverConfig {
    /// Relative infinity-norm residual bound for the equilibrium solve.
    double solve_tolerance = 1e-10;
    /// Cap for the fixed-point iteration (trajectory / oracle path).
    int max_fixed_point_iters = 100000;
    /// Max-norm change below which the fixed-point iteration is stationary.
    double fixed_point_tolerance = 1e-12;

    void validate() const;
};

/// One synchronous update: z_i = (s_i + sum_j w_ij z_j) / (d_i + 1).
/// Isolated nodes reduce to z_i = s_i.
OpinionVector fj_step(const WeightedGraph& g, const OpinionVector& z_prev,
                      const OpinionVector& s);

/// Equilibrium z* = (L+I)^{-1} s, computed by an SPD solve with iterative
/// refinement until ||(L+I)z* - s||_inf <= solve_tolerance * ||s||_inf.
/// Dense Cholesky up to 2000 nodes, conjugate gradient above.
/// Throws std::runtime_error if the residual contract cannot be met.
OpinionVector fj_equilibrium(const WeightedGraph& g, const OpinionVector& s,
                             const FjSolverConfig& cfg = {});

struct FjTrajectory {
    /// states[t] = z^(t), with z^(0) = s.
    std::vector<OpinionVector> states;
    /// Index of the last computed state (== states.size() - 1).
    int stop_index = 0;
    /// True when the iteration went stationary before t_max.
    bool truncated = false;
};

/// Iterates fj_step from z^(0) = s for t_max steps, stopping early once the
/// max-norm change drops below fixed_point_tolerance.
FjTrajectory fj_trajectory(const WeightedGraph& g, const OpinionVector& s, int t_max,
                           const FjSolverConfig& cfg = {});

}  // namespace opinionlab
