#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace amdcast {

/// Binary isolation tree over feature vectors. Splits pick a random
/// feature with nonzero range and a uniform value strictly inside it;
/// nodes at the height limit (or with degenerate samples) become leaves
/// recording the remaining sample size.
struct IsoNode {
    bool is_leaf = true;
    std::size_t sample_size = 0;      // leaves only
    std::size_t split_feature = 0;
    double split_value = 0.0;
    std::unique_ptr<IsoNode> left;
    std::unique_ptr<IsoNode> right;
};

struct IsoTree {
    std::unique_ptr<IsoNode> root;
    std::size_t height_limit = 0;
};

struct IsolationForestModel {
    std::vector<IsoTree> trees;
    std::size_t subsample_size = 0;
    std::size_t feature_count = 0;
    double contamination = 0.2;
    std::uint64_t seed = 0;
};

/// Average unsuccessful-search path length c(n) = 2 H(n-1) - 2(n-1)/n with
/// H(i) = ln(i) + Euler-Mascheroni; c(0) = c(1) = 0.
double expected_path_c(std::size_t n);

/// Builds `tree_count` trees, each on a subsample of min(psi, n) points
/// drawn without replacement, with height limit ceil(log2(psi)).
IsolationForestModel build_forest(const std::vector<std::vector<double>>& points,
                                  std::size_t tree_count, std::size_t psi, double contamination,
                                  std::uint64_t seed);

/// Score 2^(-E[h(x)] / c(psi)); the path length h adds c(leaf size) at the
/// reached leaf. Higher score = more anomalous.
std::vector<double> anomaly_scores(const IsolationForestModel& model,
                                   const std::vector<std::vector<double>>& points);

/// Flags exactly ceil(contamination * n) points with the highest scores,
/// ties broken toward the lower index. The returned indices are ascending.
std::vector<std::size_t> detect(const IsolationForestModel& model,
                                const std::vector<std::vector<double>>& points);

} // namespace amdcast
