#include "opinionlab/admin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace opinionlab {

namespace {

Eigen::MatrixXd squared_gap_matrix(const OpinionVector& z) {
    const Eigen::Index n = z.size();
    Eigen::MatrixXd gap(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        gap.col(j) = (z.array() - z(j)).square().matrix();
    }
    return gap;
}

// Exact symmetry, zero diagonal, no negative entries. Clipping the tiny
// negatives left by Dykstra can only move the matrix toward the reference,
// so the ball constraint survives.
Eigen::MatrixXd sanitize(const Eigen::MatrixXd& w) {
    Eigen::MatrixXd out = 0.5 * (w + w.transpose());
    out = out.cwiseMax(0.0);
    out.diagonal().setZero();
    return out;
}

MetricsReport snapshot_metrics(const Eigen::MatrixXd& weights, const OpinionVector& z,
                               const OpinionVector& s) {
    MetricsReport m;
    m.polarization = polarization(z);
    m.global_disagreement = disagreement_of(weights, z);
    m.global_internal_conflict = internal_conflict(z, s);
    m.mean_opinion = z.mean();
    const double centered_energy = (s.array() - s.mean()).matrix().squaredNorm();
    m.conservation_residual = m.polarization + 2.0 * m.global_disagreement +
                              m.global_internal_conflict - centered_energy;
    return m;
}

}  // namespace

ConstraintSet ConstraintSet::from_graph(const WeightedGraph& g, double epsilon,
                                        SupportMode mode) {
    ConstraintSet cs;
    cs.reference_weights = g.weights();
    cs.epsilon = epsilon;
    cs.degree_targets = g.degrees();
    const Eigen::Index n = g.size();
    if (mode == SupportMode::full) {
        cs.support_mask.setConstant(n, n, true);
        for (Eigen::Index i = 0; i < n; ++i) {
            cs.support_mask(i, i) = false;
        }
    } else {
        cs.support_mask = (g.weights().array() > 0.0).matrix();
    }
    cs.validate();
    return cs;
}

double ConstraintSet::frobenius_radius() const {
    if (std::isinf(epsilon)) {
        return std::numeric_limits<double>::infinity();
    }
    return epsilon * reference_weights.norm();
}

void ConstraintSet::validate() const {
    const Eigen::Index n = reference_weights.rows();
    if (reference_weights.cols() != n) {
        throw std::invalid_argument("ConstraintSet: reference matrix must be square");
    }
    if (std::isnan(epsilon) || epsilon < 0.0) {
        throw std::invalid_argument("ConstraintSet: epsilon must be >= 0");
    }
    if (degree_targets.size() != n || support_mask.rows() != n || support_mask.cols() != n) {
        throw std::invalid_argument("ConstraintSet: field dimensions disagree");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (support_mask(i, i)) {
            throw std::invalid_argument("ConstraintSet: support mask must exclude the diagonal");
        }
        if (reference_weights(i, i) != 0.0) {
            throw std::invalid_argument("ConstraintSet: reference has a nonzero diagonal");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (support_mask(i, j) != support_mask(j, i)) {
                throw std::invalid_argument("ConstraintSet: support mask must be symmetric");
            }
            if (reference_weights(i, j) != reference_weights(j, i)) {
                throw std::invalid_argument("ConstraintSet: reference must be symmetric");
            }
            if (reference_weights(i, j) < 0.0) {
                throw std::invalid_argument("ConstraintSet: reference has negative weights");
            }
            if (reference_weights(i, j) > 0.0 && !support_mask(i, j)) {
                throw std::invalid_argument(
                    "ConstraintSet: support mask must cover every reference edge");
            }
        }
    }
    const Eigen::VectorXd rowsums = reference_weights.rowwise().sum();
    const double scale = std::max(1.0, rowsums.lpNorm<Eigen::Infinity>());
    if ((rowsums - degree_targets).lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
        throw std::invalid_argument(
            "ConstraintSet: degree targets must equal the reference row sums");
    }
}

void AdminConfig::validate() const {
    if (std::isnan(gamma) || gamma < 0.0) {
        throw std::invalid_argument("AdminConfig: gamma must be >= 0");
    }
    if (inner_max_iters < 1 || dykstra_max_iters < 1 || outer_max_rounds < 1) {
        throw std::invalid_argument("AdminConfig: iteration caps must be >= 1");
    }
    if (inner_tolerance <= 0.0 || dykstra_tolerance <= 0.0 || outer_tolerance <= 0.0) {
        throw std::invalid_argument("AdminConfig: tolerances must be positive");
    }
}

FeasibleProjector::FeasibleProjector(const ConstraintSet& cs, const AdminConfig& cfg)
    : center_(cs.reference_weights),
      mask_(cs.support_mask.cast<double>()),
      targets_(cs.degree_targets),
      radius_(cs.frobenius_radius()),
      max_cycles_(cfg.dykstra_max_iters),
      tolerance_(cfg.dykstra_tolerance) {
    cs.validate();
    cfg.validate();
    const Eigen::Index n = center_.rows();
    full_mask_ = n > 2;
    for (Eigen::Index i = 0; i < n && full_mask_; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && mask_(i, j) != 1.0) {
                full_mask_ = false;
                break;
            }
        }
    }
    if (!full_mask_) {
        // Gram matrix of the row-sum functionals restricted to the masked
        // symmetric subspace. Singular when the support graph has a bipartite
        // component, so a rank-revealing decomposition provides the
        // minimum-norm multiplier (the restricted system is always
        // consistent).
        Eigen::MatrixXd gram = mask_;
        gram.diagonal() = mask_.rowwise().sum();
        rowsum_solver_.compute(0.5 * gram);
    }
}

Eigen::VectorXd FeasibleProjector::solve_rowsum_system(const Eigen::VectorXd& excess) const {
    if (!full_mask_) {
        return rowsum_solver_.solve(excess);
    }
    // Full support: the Gram matrix is ((n-2) I + J) / 2 with the analytic
    // inverse (2/(n-2)) I - (1/((n-2)(n-1))) J.
    const double n = static_cast<double>(center_.rows());
    return (2.0 / (n - 2.0)) * excess.array() -
           excess.sum() / ((n - 2.0) * (n - 1.0));
}

Eigen::MatrixXd FeasibleProjector::project_affine(const Eigen::MatrixXd& w) const {
    const Eigen::Index n = center_.rows();
    Eigen::MatrixXd masked = 0.5 * (w + w.transpose());
    if (full_mask_) {
        masked.diagonal().setZero();
    } else {
        masked = mask_.cwiseProduct(masked).eval();
    }
    const Eigen::VectorXd excess = masked.rowwise().sum() - targets_;
    const Eigen::VectorXd mu = solve_rowsum_system(excess);
    if (full_mask_) {
        masked.colwise() -= (0.5 * mu).eval();
        masked.rowwise() -= (0.5 * mu).transpose().eval();
        masked.diagonal().setZero();
        return masked;
    }
    const Eigen::MatrixXd pair_mean =
        0.5 * (mu.replicate(1, n) + mu.transpose().replicate(n, 1));
    return masked - mask_.cwiseProduct(pair_mean);
}

Eigen::MatrixXd FeasibleProjector::project(const Eigen::MatrixXd& w) const {
    return project(w, tolerance_);
}

Eigen::MatrixXd FeasibleProjector::project(const Eigen::MatrixXd& w, double tolerance) const {
    if (w.rows() != center_.rows() || w.cols() != center_.cols()) {
        throw std::invalid_argument("FeasibleProjector: dimension mismatch");
    }
    const Eigen::Index n = center_.rows();
    // Two-set Dykstra: (affine ∩ ball) has a closed-form projection because
    // the ball center lies in the affine set (project onto the affine set,
    // then scale radially toward the center inside it), so only the coupling
    // with the nonnegative orthant needs iteration.
    Eigen::MatrixXd x = w;
    Eigen::MatrixXd inc_capped = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd inc_nonneg = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd previous(n, n);
    Eigen::MatrixXd y(n, n);

    double gap = std::numeric_limits<double>::infinity();
    for (int cycle = 0; cycle < max_cycles_; ++cycle) {
        previous = x;

        y = x + inc_capped;
        x = project_affine(y);
        if (!std::isinf(radius_)) {
            x -= center_;
            const double dist = x.norm();
            if (dist > radius_) {
                x *= (radius_ == 0.0 ? 0.0 : radius_ / dist);
            }
            x += center_;
        }
        inc_capped = y - x;

        y = x + inc_nonneg;
        x = y.cwiseMax(0.0);
        inc_nonneg = y - x;

        gap = (x - previous).norm();
        if (gap < tolerance) {
            return x;
        }
    }
    throw std::runtime_error("FeasibleProjector: Dykstra iteration did not converge within " +
                             std::to_string(max_cycles_) + " cycles (last change " +
                             std::to_string(gap) + ")");
}

Eigen::MatrixXd project_feasible(const Eigen::MatrixXd& w, const ConstraintSet& cs,
                                 const AdminConfig& cfg) {
    return FeasibleProjector(cs, cfg).project(w);
}

FeasibilityReport feasibility_report(const ConstraintSet& cs, const Eigen::MatrixXd& w) {
    FeasibilityReport report;
    report.max_asymmetry = (w - w.transpose()).lpNorm<Eigen::Infinity>();
    report.max_diagonal = w.diagonal().cwiseAbs().maxCoeff();
    report.min_entry = std::min(0.0, w.minCoeff());
    report.max_rowsum_error =
        (w.rowwise().sum() - cs.degree_targets).lpNorm<Eigen::Infinity>();
    const double radius = cs.frobenius_radius();
    report.ball_excess =
        std::isinf(radius) ? 0.0 : std::max(0.0, (w - cs.reference_weights).norm() - radius);
    double off_support = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (i != j && !cs.support_mask(i, j)) {
                off_support = std::max(off_support, std::abs(w(i, j)));
            }
        }
    }
    report.max_off_support = off_support;
    return report;
}

double disagreement_of(const Eigen::MatrixXd& weights, const OpinionVector& z) {
    return 0.5 * weights.cwiseProduct(squared_gap_matrix(z)).sum();
}

double admin_objective(const Eigen::MatrixXd& weights, const OpinionVector& z, double gamma) {
    double value = disagreement_of(weights, z);
    if (gamma > 0.0) {
        value += gamma * weights.squaredNorm();
    }
    return value;
}

AdminStepResult admin_step(const OpinionVector& z, const ConstraintSet& cs,
                           const AdminConfig& cfg) {
    const FeasibleProjector projector(cs, cfg);
    return admin_step(z, cs, cfg, cs.reference_weights, projector);
}

AdminStepResult admin_step(const OpinionVector& z, const ConstraintSet& cs,
                           const AdminConfig& cfg, const Eigen::MatrixXd& warm_start,
                           const FeasibleProjector& projector) {
    if (z.size() != cs.reference_weights.rows()) {
        throw std::invalid_argument("admin_step: opinion vector dimension mismatch");
    }
    cfg.validate();

    const Eigen::MatrixXd gap = squared_gap_matrix(z);
    const double gamma = cfg.gamma;
    const auto objective = [&](const Eigen::MatrixXd& w) {
        double value = 0.5 * w.cwiseProduct(gap).sum();
        if (gamma > 0.0) {
            value += gamma * w.squaredNorm();
        }
        return value;
    };
    const auto gradient = [&](const Eigen::MatrixXd& w) -> Eigen::MatrixXd {
        if (gamma > 0.0) {
            return 0.5 * gap + (2.0 * gamma) * w;
        }
        return 0.5 * gap;
    };

    Eigen::MatrixXd w = warm_start;
    double f = objective(w);

    // The initial step reaches across the feasible set in one move for the
    // linear (gamma = 0) objective; growth is capped so projection inputs
    // stay within the Dykstra budget.
    const double scale = 1.0 + cs.reference_weights.norm();
    double step = scale / (1.0 + gradient(w).norm());
    const double step_max = 8.0 * step;
    const double step_min = 1e-14 * step;

    // Line-search projections run loose; only the final iterate is polished
    // at the configured tolerance.
    const double loose_tolerance = std::max(cfg.dykstra_tolerance, 1e-6);

    bool converged = false;
    int small_change_streak = 0;
    int iters = 0;
    while (iters < cfg.inner_max_iters) {
        ++iters;
        const Eigen::MatrixXd grad = gradient(w);

        // Backtracking on the usual quadratic upper bound; for gamma = 0 the
        // objective is linear and any accepted projection descends. A Dykstra
        // budget overrun counts as a failed trial and shrinks the step.
        Eigen::MatrixXd candidate;
        double f_candidate = f;
        bool accepted = false;
        while (step >= step_min) {
            try {
                candidate = projector.project(w - step * grad, loose_tolerance);
            } catch (const std::runtime_error&) {
                step *= 0.5;
                continue;
            }
            f_candidate = objective(candidate);
            const Eigen::MatrixXd delta = candidate - w;
            const double bound = f + grad.cwiseProduct(delta).sum() +
                                 delta.squaredNorm() / (2.0 * step) +
                                 1e-12 * (1.0 + std::abs(f));
            if (f_candidate <= bound) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }

        const double change = std::abs(f - f_candidate);
        w = std::move(candidate);
        f = f_candidate;
        step = std::min(step * 2.0, step_max);

        if (change <= cfg.inner_tolerance * std::max(1.0, std::abs(f))) {
            if (++small_change_streak >= 2) {
                converged = true;
                break;
            }
        } else {
            small_change_streak = 0;
        }
    }

    Eigen::MatrixXd polished;
    try {
        polished = sanitize(projector.project(w));
    } catch (const std::runtime_error&) {
        // Never return an infeasible matrix; the warm start is feasible.
        polished = warm_start;
        converged = false;
    }
    double f_polished = objective(polished);

    // Deterministic selection among the polished iterate, the warm start and
    // the reference; both fallbacks are feasible, so the step can never lose
    // ground. Near-ties resolve to the reference.
    const double f_warm = objective(warm_start);
    const double f_reference = objective(cs.reference_weights);
    if (f_reference <= std::min(f_polished, f_warm) + 1e-12) {
        polished = cs.reference_weights;
        f_polished = f_reference;
        converged = true;
    } else if (f_warm < f_polished) {
        polished = warm_start;
        f_polished = f_warm;
        converged = true;
    }

    AdminStepResult result;
    try {
        result.projected_gradient_norm =
            (polished - projector.project(polished - gradient(polished))).norm();
    } catch (const std::runtime_error&) {
        result.projected_gradient_norm = std::numeric_limits<double>::infinity();
    }
    result.objective = f_polished;
    result.disagreement = 0.5 * polished.cwiseProduct(gap).sum();
    result.iterations = iters;
    result.converged = converged;
    result.weights = std::move(polished);
    return result;
}

AdminTrajectory admin_dynamics(const WeightedGraph& g0, const OpinionVector& s,
                               const ConstraintSet& cs, const AdminConfig& cfg,
                               const FjSolverConfig& fj_cfg) {
    cs.validate();
    cfg.validate();
    fj_cfg.validate();
    if (s.size() != g0.size()) {
        throw std::invalid_argument("admin_dynamics: opinion vector dimension mismatch");
    }
    if (cs.reference_weights.rows() != g0.size() ||
        (cs.reference_weights - g0.weights()).lpNorm<Eigen::Infinity>() != 0.0) {
        throw std::invalid_argument(
            "admin_dynamics: constraint set must reference the initial graph");
    }

    const FeasibleProjector projector(cs, cfg);
    AdminTrajectory traj;

    // The objective the alternating scheme descends: D + I for gamma = 0,
    // D + I + gamma ||W||_F^2 otherwise.
    const auto combined = [&](const AdminRound& round) {
        double value =
            round.metrics.global_disagreement + round.metrics.global_internal_conflict;
        if (cfg.gamma > 0.0) {
            value += cfg.gamma * round.weights.squaredNorm();
        }
        return value;
    };

    Eigen::MatrixXd w = cs.reference_weights;
    AdminRound initial;
    initial.weights = w;
    initial.opinions = s;
    initial.metrics = snapshot_metrics(w, s, s);
    initial.combined_objective = combined(initial);
    traj.rounds.push_back(std::move(initial));
    double previous = traj.rounds.back().combined_objective;

    for (int round = 1; round <= cfg.outer_max_rounds; ++round) {
        try {
            const WeightedGraph current(w);
            OpinionVector z = fj_equilibrium(current, s, fj_cfg);
            AdminStepResult update = admin_step(z, cs, cfg, w, projector);
            w = update.weights;

            AdminRound record;
            record.weights = w;
            record.opinions = std::move(z);
            record.metrics = snapshot_metrics(w, record.opinions, s);
            record.combined_objective = combined(record);
            traj.rounds.push_back(std::move(record));
        } catch (const std::exception& e) {
            throw std::runtime_error("admin_dynamics: round " + std::to_string(round) + ": " +
                                     e.what());
        }

        const double combined = traj.rounds.back().combined_objective;
        if (std::abs(previous - combined) <= cfg.outer_tolerance * std::max(1.0, std::abs(previous))) {
            traj.converged = true;
            traj.stop_reason = StopReason::tolerance;
            return traj;
        }
        previous = combined;
    }
    traj.converged = false;
    traj.stop_reason = StopReason::round_cap;
    return traj;
}

}  // namespace opinionlab
