#pragma once

#include "opinionlab/fj.hpp"
#include "opinionlab/graph.hpp"
#include "opinionlab/metrics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace opinionlab {

enum class SupportMode {
    /// Any off-diagonal entry may become nonzero (new edges allowed).
    full,
    /// Only entries that carry weight in the reference graph may be nonzero.
    original,
};

/// Feasible region S of the administrator: symmetric nonnegative matrices
/// with zero diagonal, supported on support_mask, with prescribed row sums,
/// inside a Frobenius ball of radius epsilon * ||reference||_F around the
/// reference adjacency.
struct ConstraintSet {
    Eigen::MatrixXd reference_weights;
    double epsilon = 0.0;
    Eigen::VectorXd degree_targets;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support_mask;

    static ConstraintSet from_graph(const WeightedGraph& g, double epsilon,
                                    SupportMode mode = SupportMode::full);

    /// Ball radius; +inf disables the ball constraint.
    double frobenius_radius() const;

    /// Throws std::invalid_argument if the reference itself is not feasible.
    void validate() const;
};

struct AdminConfig {
    /// L2 regularization strength on the adjacency matrix; 0 disables it.
    double gamma = 0.0;
    int inner_max_iters = 5000;
    /// Relative objective-change stop for the projected gradient loop.
    double inner_tolerance = 1e-8;
    int dykstra_max_iters = 2000;
    /// Frobenius-norm change between Dykstra cycles at which to stop.
    double dykstra_tolerance = 1e-10;
    int outer_max_rounds = 100;
    /// Relative combined-objective (D + I) change stop for the outer loop.
    double outer_tolerance = 1e-6;

    void validate() const;
};

/// Euclidean projection onto a ConstraintSet via cyclic Dykstra iteration
/// over the elementary projections (affine row-sum/support set, nonnegative
/// orthant, Frobenius ball). The affine projection solve is factorized once
/// at construction, so one projector instance should be reused across calls.
class FeasibleProjector {
public:
    FeasibleProjector(const ConstraintSet& cs, const AdminConfig& cfg);

    /// Throws std::runtime_error if dykstra_max_iters is exhausted before the
    /// cycle-to-cycle change drops below dykstra_tolerance.
    Eigen::MatrixXd project(const Eigen::MatrixXd& w) const;

    /// Same iteration with an explicit stopping tolerance; the line search in
    /// admin_step runs loose and polishes only the final iterate.
    Eigen::MatrixXd project(const Eigen::MatrixXd& w, double tolerance) const;

    /// Projection onto the affine part alone (symmetric, zero diagonal,
    /// masked support, exact row sums). Exposed for testing.
    Eigen::MatrixXd project_affine(const Eigen::MatrixXd& w) const;

private:
    Eigen::VectorXd solve_rowsum_system(const Eigen::VectorXd& excess) const;

    Eigen::MatrixXd center_;
    Eigen::MatrixXd mask_;  // 0/1 valued
    Eigen::VectorXd targets_;
    double radius_;
    int max_cycles_;
    double tolerance_;
    bool full_mask_;  // complete off-diagonal support: analytic row-sum solve
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> rowsum_solver_;
};

Eigen::MatrixXd project_feasible(const Eigen::MatrixXd& w, const ConstraintSet& cs,
                                 const AdminConfig& cfg);

/// How far a matrix sits from each constraint; all fields are zero for an
/// exactly feasible matrix.
struct FeasibilityReport {
    double max_asymmetry = 0.0;
    double max_diagonal = 0.0;
    double min_entry = 0.0;        // most negative entry (0 when none)
    double max_rowsum_error = 0.0;
    double ball_excess = 0.0;      // ||W - ref||_F - radius, clamped at 0
    double max_off_support = 0.0;  // largest weight outside the mask
};
FeasibilityReport feasibility_report(const ConstraintSet& cs, const Eigen::MatrixXd& w);

/// Disagreement of an adjacency matrix against fixed opinions,
/// sum_{i<j} W_ij (z_i - z_j)^2.
double disagreement_of(const Eigen::MatrixXd& weights, const OpinionVector& z);

/// The administrator's objective D + gamma * ||W||_F^2.
double admin_objective(const Eigen::MatrixXd& weights, const OpinionVector& z, double gamma);

struct AdminStepResult {
    Eigen::MatrixXd weights;
    /// D + gamma ||W||_F^2 at the returned matrix.
    double objective = 0.0;
    double disagreement = 0.0;
    int iterations = 0;
    /// False when the iteration cap was hit before the inner tolerance;
    /// the returned matrix is still the best feasible iterate.
    bool converged = false;
    /// ||W - P_S(W - grad f(W))||_F at the returned point.
    double projected_gradient_norm = 0.0;
};

/// One administrator move: minimize D(W, z) + gamma ||W||_F^2 over the
/// constraint set by projected gradient descent with backtracking, starting
/// from warm_start (the reference adjacency when absent). Ties between the
/// final iterate and the reference resolve to the reference.
AdminStepResult admin_step(const OpinionVector& z, const ConstraintSet& cs,
                           const AdminConfig& cfg);
AdminStepResult admin_step(const OpinionVector& z, const ConstraintSet& cs,
                           const AdminConfig& cfg, const Eigen::MatrixXd& warm_start,
                           const FeasibleProjector& projector);

enum class StopReason { tolerance, round_cap };

struct AdminRound {
    Eigen::MatrixXd weights;  // G^(r)
    OpinionVector opinions;   // z^(r); z^(0) = s
    MetricsReport metrics;    // evaluated on the (weights, opinions) snapshot
    /// D + I + gamma ||W||_F^2 at the snapshot: the objective the alternating
    /// minimization descends. Equals D + I when gamma = 0.
    double combined_objective = 0.0;
};

struct AdminTrajectory {
    std::vector<AdminRound> rounds;
    bool converged = false;
    StopReason stop_reason = StopReason::round_cap;
};

/// Alternating dynamics: users equilibrate on the current graph, then the
/// administrator reweights it. The combined objective (D + I, plus the
/// gamma regularizer when active) is non-increasing across rounds; the loop
/// stops when its relative change falls below outer_tolerance or after
/// outer_max_rounds.
AdminTrajectory admin_dynamics(const WeightedGraph& g0, const OpinionVector& s,
                               const ConstraintSet& cs, const AdminConfig& cfg = {},
                               const FjSolverConfig& fj_cfg = {});

}  // namespace opinionlab
