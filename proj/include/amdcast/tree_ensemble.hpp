#pragma once

#include "amdcast/matrix.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace amdcast {

/// Binary regression tree node. Points with feature < threshold go left.
/// Leaves predict the mean of the training targets routed to them.
struct CartNode {
    bool is_leaf = true;
    double prediction = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::unique_ptr<CartNode> left;
    std::unique_ptr<CartNode> right;

    std::size_t node_count() const;
};

enum class ThresholdMode {
    BestSplit,     // exhaustive midpoint scan per candidate feature
    UniformRandom  // one uniform cut per candidate feature (extra-trees)
};

enum class GrowthMode {
    DepthFirst, // grow greedily to the depth limit
    BestFirst   // split the highest-gain leaf until the leaf limit
};

struct CartConfig {
    std::size_t max_depth = std::numeric_limits<std::size_t>::max();
    std::size_t min_leaf = 1;
    std::size_t feature_subset = 0; // 0 = all features
    ThresholdMode threshold_mode = ThresholdMode::BestSplit;
    GrowthMode growth = GrowthMode::DepthFirst;
    std::size_t max_leaves = std::numeric_limits<std::size_t>::max();
};

/// Greedy variance-reduction CART. Throws DataError when there are fewer
/// than 2*min_leaf samples.
std::unique_ptr<CartNode> fit_cart(const Matrix& features, const std::vector<double>& targets,
                                   const CartConfig& config, std::uint64_t seed);

double cart_predict(const CartNode& node, const std::vector<double>& x);

enum class ForestMode {
    RandomForest, // bootstrap rows, ceil(sqrt(d)) features per split
    ExtraTrees    // full sample, all features, uniform random thresholds
};

struct ForestHyper {
    std::size_t tree_count = 200;
    std::size_t max_depth = std::numeric_limits<std::size_t>::max();
    std::size_t min_leaf = 2;
    bool bootstrap = true; // honored by RandomForest only
};

struct ForestModel {
    ForestMode mode = ForestMode::RandomForest;
    std::vector<std::unique_ptr<CartNode>> trees;
    ForestHyper hyper;
    std::uint64_t seed = 0;
};

ForestModel fit_forest(const Matrix& features, const std::vector<double>& targets, ForestMode mode,
                       const ForestHyper& hyper, std::uint64_t seed);

/// Arithmetic mean over member trees.
double forest_predict(const ForestModel& model, const std::vector<double>& x);

enum class GbmGrowth { DepthWise, LeafWise };

struct GbmHyper {
    GbmGrowth growth = GbmGrowth::DepthWise;
    std::size_t stages = 200;
    double learning_rate = 0.1;
    std::size_t max_depth = 3;  // DepthWise
    std::size_t max_leaves = 8; // LeafWise
    std::size_t min_leaf = 2;
};

struct GbmModel {
    double base_prediction = 0.0;
    std::vector<std::unique_ptr<CartNode>> stages;
    GbmHyper hyper;
    std::uint64_t seed = 0;
    /// Squared-error training loss after each stage.
    std::vector<double> train_loss;
};

/// Stage-wise boosting on squared-error residuals: stage t fits
/// y - F_{t-1}(x) and F_t = F_{t-1} + eta * tree_t.
GbmModel fit_gbm(const Matrix& features, const std::vector<double>& targets, const GbmHyper& hyper,
                 std::uint64_t seed);

double gbm_predict(const GbmModel& model, const std::vector<double>& x);

} // namespace amdcast
