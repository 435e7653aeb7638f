#pragma once

#include <Eigen/Dense>
#include <string>

namespace opinionlab {

/// Opinions live on the continuous scale [-1, 1]; -1 and 1 are the poles.
/// Clamping into that range happens at ingestion (load_opinions,
/// recover_innate); equilibrium computations preserve it on their own.
using OpinionVector = Eigen::VectorXd;

/// Undirected weighted graph stored as a dense symmetric adjacency matrix
/// with zero diagonal and nonnegative weights. Immutable after construction.
class WeightedGraph {
public:
    /// Validates symmetry, zero diagonal and nonnegativity; throws
    /// std::invalid_argument on violation.
    explicit WeightedGraph(Eigen::MatrixXd weights);

    static WeightedGraph empty(Eigen::Index n);

    Eigen::Index size() const { return weights_.rows(); }
    const Eigen::MatrixXd& weights() const { return weights_; }

    /// Weighted degree d_i = sum_j w_ij.
    Eigen::VectorXd degrees() const { return weights_.rowwise().sum(); }

private:
    Eigen::MatrixXd weights_;
};

/// L = D - A. Positive semidefinite, annihilates the all-ones vector.
Eigen::MatrixXd laplacian(const WeightedGraph& g);

/// Reads a graph from a whitespace-separated edge list, one "i j w" line per
/// unordered pair (0-based indices, w >= 0). Blank lines and lines starting
/// with '#' are ignored. Rejects self-loops, negative weights, out-of-range
/// indices and duplicate pairs, reporting offending line numbers.
WeightedGraph load_edge_list(const std::string& path, Eigen::Index n);

/// Writes the graph in the load_edge_list format (upper triangle, w > 0).
void save_edge_list(const WeightedGraph& g, const std::string& path);

/// Reads n opinions, one real per line, each clamped to [-1, 1].
/// Blank lines and '#' comments are ignored. Rejects wrong counts and
/// non-numeric entries.
OpinionVector load_opinions(const std::string& path, Eigen::Index n);

void save_opinions(const OpinionVector& opinions, const std::string& path);

/// Inverts the equilibrium map: s = clamp((L+I) z*, -1, 1). This is how
/// innate opinions are estimated from observed expressed opinions.
OpinionVector recover_innate(const WeightedGraph& g, const OpinionVector& z_star);

}  // namespace opinionlab
