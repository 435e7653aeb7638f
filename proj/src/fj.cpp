#include "opinionlab/fj.hpp"

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include <stdexcept>
#include <string>

namespace opinionlab {

namespace {

// Above this size the dense Cholesky is replaced by conjugate gradient.
constexpr Eigen::Index kDirectSolveLimit = 2000;

void check_dims(const WeightedGraph& g, const OpinionVector& v, const char* what) {
    if (v.size() != g.size()) {
        throw std::invalid_argument(std::string(what) + ": opinion vector has dimension " +
                                    std::to_string(v.size()) + ", graph has " +
                                    std::to_string(g.size()) + " nodes");
    }
}

}  // namespace

void FjSolverConfig::validate() const {
    if (solve_tolerance <= 0.0 || fixed_point_tolerance <= 0.0) {
        throw std::invalid_argument("FjSolverConfig: tolerances must be positive");
    }
    if (max_fixed_point_iters < 1) {
        throw std::invalid_argument("FjSolverConfig: iteration cap must be >= 1");
    }
}

OpinionVector fj_step(const WeightedGraph& g, const OpinionVector& z_prev,
                      const OpinionVector& s) {
    check_dims(g, z_prev, "fj_step");
    check_dims(g, s, "fj_step");
    const Eigen::VectorXd denom = g.degrees().array() + 1.0;
    return (s + g.weights() * z_prev).cwiseQuotient(denom);
}

OpinionVector fj_equilibrium(const WeightedGraph& g, const OpinionVector& s,
                             const FjSolverConfig& cfg) {
    check_dims(g, s, "fj_equilibrium");
    cfg.validate();
    const Eigen::Index n = g.size();
    if (n == 0) {
        return s;
    }

    Eigen::MatrixXd system = laplacian(g);
    system.diagonal().array() += 1.0;

    const double s_scale = s.lpNorm<Eigen::Infinity>();
    const double bound = cfg.solve_tolerance * s_scale;

    OpinionVector z(n);
    if (n <= kDirectSolveLimit) {
        Eigen::LLT<Eigen::MatrixXd> llt(system);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("fj_equilibrium: Cholesky factorization failed");
        }
        z = llt.solve(s);
        // L+I has eigenvalues >= 1, so a couple of refinement steps reach
        // the inf-norm residual contract.
        for (int pass = 0; pass < 4; ++pass) {
            const OpinionVector residual = s - system * z;
            if (residual.lpNorm<Eigen::Infinity>() <= bound) {
                return z;
            }
            z += llt.solve(residual);
        }
    } else {
        Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(cfg.solve_tolerance / std::sqrt(static_cast<double>(n)));
        cg.setMaxIterations(10 * n);
        cg.compute(system);
        z = cg.solve(s);
        for (int pass = 0; pass < 4; ++pass) {
            const OpinionVector residual = s - system * z;
            if (residual.lpNorm<Eigen::Infinity>() <= bound) {
                return z;
            }
            z += cg.solve(residual);
        }
    }

    const double final_residual = (s - system * z).lpNorm<Eigen::Infinity>();
    if (final_residual <= bound) {
        return z;
    }
    throw std::runtime_error("fj_equilibrium: solver did not reach residual bound " +
                             std::to_string(bound) + " (got " + std::to_string(final_residual) +
                             ", n=" + std::to_string(n) + ")");
}

FjTrajectory fj_trajectory(const WeightedGraph& g, const OpinionVector& s, int t_max,
                           const FjSolverConfig& cfg) {
    check_dims(g, s, "fj_trajectory");
    cfg.validate();
    if (t_max < 0) {
        throw std::invalid_argument("fj_trajectory: t_max must be >= 0");
    }

    FjTrajectory traj;
    traj.states.reserve(static_cast<size_t>(t_max) + 1);
    traj.states.push_back(s);
    for (int t = 1; t <= t_max; ++t) {
        OpinionVector next = fj_step(g, traj.states.back(), s);
        const double change = (next - traj.states.back()).lpNorm<Eigen::Infinity>();
        traj.states.push_back(std::move(next));
        if (change < cfg.fixed_point_tolerance) {
            traj.truncated = true;
            break;
        }
    }
    traj.stop_index = static_cast<int>(traj.states.size()) - 1;
    return traj;
}

}  // namespace opinionlab
