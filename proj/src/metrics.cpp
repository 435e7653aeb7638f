#include "opinionlab/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace opinionlab {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

OpinionVector mean_centered(const OpinionVector& v) {
    return v.array() - v.mean();
}

}  // namespace

std::string metrics_csv_header() {
    return "round,polarization,disagreement,internal_conflict,conservation_residual,"
           "mean_opinion";
}

std::string to_csv_row(const MetricsReport& r, int round) {
    std::string row = std::to_string(round);
    for (double v : {r.polarization, r.global_disagreement, r.global_internal_conflict,
                     r.conservation_residual, r.mean_opinion}) {
        row += ',';
        row += format_value(v);
    }
    return row;
}

double polarization(const OpinionVector& z) {
    if (z.size() < 1) {
        throw std::invalid_argument("polarization: empty opinion vector");
    }
    return mean_centered(z).squaredNorm();
}

double local_disagreement(const WeightedGraph& g, const OpinionVector& z, Eigen::Index i) {
    if (z.size() != g.size()) {
        throw std::invalid_argument("local_disagreement: dimension mismatch");
    }
    if (i < 0 || i >= g.size()) {
        throw std::out_of_range("local_disagreement: node index " + std::to_string(i) +
                                " out of range");
    }
    const Eigen::ArrayXd gaps = (z.array() - z(i)).square();
    return (g.weights().row(i).transpose().array() * gaps).sum();
}

double global_disagreement(const WeightedGraph& g, const OpinionVector& z) {
    if (z.size() != g.size()) {
        throw std::invalid_argument("global_disagreement: dimension mismatch");
    }
    return z.dot(laplacian(g) * z);
}

double internal_conflict(const OpinionVector& z, const OpinionVector& s) {
    if (z.size() != s.size()) {
        throw std::invalid_argument("internal_conflict: dimension mismatch");
    }
    return (z - s).squaredNorm();
}

MetricsReport conservation_check(const WeightedGraph& g, const OpinionVector& s,
                                 const FjSolverConfig& cfg) {
    const OpinionVector z_star = fj_equilibrium(g, s, cfg);
    MetricsReport report;
    report.polarization = polarization(z_star);
    report.global_disagreement = global_disagreement(g, z_star);
    report.global_internal_conflict = internal_conflict(z_star, s);
    report.mean_opinion = z_star.mean();
    const double centered_energy = mean_centered(s).squaredNorm();
    report.conservation_residual = report.polarization + 2.0 * report.global_disagreement +
                                   report.global_internal_conflict - centered_energy;
    return report;
}

double equilibrium_polarization_quadform(const WeightedGraph& g, const OpinionVector& s,
                                         const FjSolverConfig& cfg) {
    const OpinionVector s_bar = mean_centered(s);
    const OpinionVector first = fj_equilibrium(g, s_bar, cfg);
    const OpinionVector second = fj_equilibrium(g, first, cfg);
    return s_bar.dot(second);
}

}  // namespace opinionlab
