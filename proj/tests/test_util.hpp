#pragma once

#include "opinionlab/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

/// Deterministic uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random symmetric nonnegative graph: each pair carries weight with the
/// given density, weights uniform in (0, w_max].
inline opinionlab::WeightedGraph random_graph(Eigen::Index n, double density, double w_max,
                                              std::mt19937_64& rng) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (uniform01(rng) < density) {
                const double weight = w_max * (1.0 - uniform01(rng));
                w(i, j) = weight;
                w(j, i) = weight;
            }
        }
    }
    return opinionlab::WeightedGraph(std::move(w));
}

inline opinionlab::OpinionVector random_opinions(Eigen::Index n, std::mt19937_64& rng,
                                                 double lo = -1.0, double hi = 1.0) {
    opinionlab::OpinionVector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i) = lo + (hi - lo) * uniform01(rng);
    }
    return s;
}

/// Writes content to a unique temp file, removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& content, const std::string& suffix = ".txt") {
        static std::uint64_t counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("opinionlab_test_" + std::to_string(++counter) + suffix))
                    .string();
        std::ofstream out(path_);
        out << content;
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace testutil
