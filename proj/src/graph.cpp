#include "opinionlab/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace opinionlab {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

std::string format_weight(double w) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        fail("WeightedGraph: matrix must be square");
    }
    const Eigen::Index n = weights_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights_(i, i) != 0.0) {
            fail("WeightedGraph: nonzero diagonal at node " + std::to_string(i));
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (weights_(i, j) != weights_(j, i)) {
                fail("WeightedGraph: asymmetric entry at (" + std::to_string(i) + "," +
                     std::to_string(j) + ")");
            }
            if (weights_(i, j) < 0.0) {
                fail("WeightedGraph: negative weight at (" + std::to_string(i) + "," +
                     std::to_string(j) + ")");
            }
        }
    }
}

WeightedGraph WeightedGraph::empty(Eigen::Index n) {
    return WeightedGraph(Eigen::MatrixXd::Zero(n, n));
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
    Eigen::MatrixXd l = -g.weights();
    l.diagonal() = g.degrees();
    return l;
}

WeightedGraph load_edge_list(const std::string& path, Eigen::Index n) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open edge list file: " + path);
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    // unordered pair -> line number, for duplicate reporting
    std::map<std::pair<Eigen::Index, Eigen::Index>, long> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream ls(line);
        long long i = 0, j = 0;
        double weight = 0.0;
        std::string extra;
        if (!(ls >> i >> j >> weight) || (ls >> extra)) {
            fail(path + ":" + std::to_string(line_no) + ": expected 'i j w'");
        }
        if (i < 0 || i >= n || j < 0 || j >= n) {
            fail(path + ":" + std::to_string(line_no) + ": node index out of range [0," +
                 std::to_string(n) + ")");
        }
        if (i == j) {
            fail(path + ":" + std::to_string(line_no) + ": self-loop on node " + std::to_string(i));
        }
        if (weight < 0.0) {
            fail(path + ":" + std::to_string(line_no) + ": negative weight");
        }
        const auto key = std::minmax<Eigen::Index>(i, j);
        auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted) {
            fail(path + ": duplicate pair (" + std::to_string(key.first) + "," +
                 std::to_string(key.second) + ") at lines " + std::to_string(it->second) +
                 " and " + std::to_string(line_no));
        }
        w(i, j) = weight;
        w(j, i) = weight;
    }
    return WeightedGraph(std::move(w));
}

void save_edge_list(const WeightedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        fail("cannot open file for writing: " + path);
    }
    const Eigen::Index n = g.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = g.weights()(i, j);
            if (w > 0.0) {
                out << i << ' ' << j << ' ' << format_weight(w) << '\n';
            }
        }
    }
    if (!out) {
        fail("write failed: " + path);
    }
}

OpinionVector load_opinions(const std::string& path, Eigen::Index n) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open opinion file: " + path);
    }
    OpinionVector values(n);
    Eigen::Index count = 0;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream ls(line);
        double v = 0.0;
        std::string extra;
        if (!(ls >> v) || (ls >> extra)) {
            fail(path + ":" + std::to_string(line_no) + ": expected one real number");
        }
        if (count >= n) {
            fail(path + ": more than " + std::to_string(n) + " opinions");
        }
        values(count++) = std::clamp(v, -1.0, 1.0);
    }
    if (count != n) {
        fail(path + ": expected " + std::to_string(n) + " opinions, found " +
             std::to_string(count));
    }
    return values;
}

void save_opinions(const OpinionVector& opinions, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        fail("cannot open file for writing: " + path);
    }
    for (Eigen::Index i = 0; i < opinions.size(); ++i) {
        out << format_weight(opinions(i)) << '\n';
    }
    if (!out) {
        fail("write failed: " + path);
    }
}

OpinionVector recover_innate(const WeightedGraph& g, const OpinionVector& z_star) {
    if (z_star.size() != g.size()) {
        fail("recover_innate: opinion vector has dimension " + std::to_string(z_star.size()) +
             ", graph has " + std::to_string(g.size()) + " nodes");
    }
    OpinionVector s = laplacian(g) * z_star + z_star;
    return s.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace opinionlab
