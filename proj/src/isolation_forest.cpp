#include "amdcast/isolation_forest.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace amdcast {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

std::unique_ptr<IsoNode> grow(const std::vector<std::vector<double>>& points,
                              std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
                              std::size_t depth, std::size_t height_limit, Rng& rng) {
    auto node = std::make_unique<IsoNode>();
    const std::size_t count = hi - lo;
    if (count <= 1 || depth >= height_limit) {
        node->sample_size = count;
        return node;
    }

    // Candidate features are those with nonzero range on this sample.
    const std::size_t n_features = points[idx[lo]].size();
    std::vector<std::size_t> usable;
    std::vector<std::pair<double, double>> ranges(n_features,
        {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t f = 0; f < n_features; ++f) {
            const double v = points[idx[i]][f];
            ranges[f].first = std::min(ranges[f].first, v);
            ranges[f].second = std::max(ranges[f].second, v);
        }
    }
    for (std::size_t f = 0; f < n_features; ++f) {
        if (ranges[f].second > ranges[f].first) usable.push_back(f);
    }
    if (usable.empty()) {
        node->sample_size = count;
        return node;
    }

    const std::size_t feature = usable[rng.uniform_index(usable.size())];
    const auto [fmin, fmax] = ranges[feature];
    double split = rng.uniform(fmin, fmax);
    // Keep the split strictly interior so both children are nonempty.
    if (split <= fmin || split >= fmax) {
        split = std::nextafter(fmax, fmin);
    }

    auto mid_it = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                                 idx.begin() + static_cast<std::ptrdiff_t>(hi),
                                 [&](std::size_t i) { return points[i][feature] < split; });
    const std::size_t mid = static_cast<std::size_t>(mid_it - idx.begin());

    node->is_leaf = false;
    node->split_feature = feature;
    node->split_value = split;
    node->left = grow(points, idx, lo, mid, depth + 1, height_limit, rng);
    node->right = grow(points, idx, mid, hi, depth + 1, height_limit, rng);
    return node;
}

double path_length(const IsoNode& node, const std::vector<double>& point, double depth) {
    if (node.is_leaf) {
        return depth + expected_path_c(node.sample_size);
    }
    const IsoNode& child = point[node.split_feature] < node.split_value ? *node.left : *node.right;
    return path_length(child, point, depth + 1.0);
}

} // namespace

double expected_path_c(std::size_t n) {
    if (n <= 1) return 0.0;
    const double m = static_cast<double>(n - 1);
    const double harmonic = std::log(m) + kEulerGamma;
    return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

IsolationForestModel build_forest(const std::vector<std::vector<double>>& points,
                                  std::size_t tree_count, std::size_t psi, double contamination,
                                  std::uint64_t seed) {
    if (points.size() < 2) {
        throw DataError("build_forest: need at least 2 points");
    }
    if (tree_count < 1 || psi < 2) {
        throw ConfigError("build_forest: tree count must be >= 1 and subsample size >= 2");
    }
    if (!(contamination > 0.0 && contamination <= 0.5)) {
        throw ConfigError("build_forest: contamination must lie in (0, 0.5]");
    }
    const std::size_t n_features = points[0].size();
    for (const auto& p : points) {
        if (p.size() != n_features) {
            throw DimensionError("build_forest: inconsistent feature counts");
        }
    }

    IsolationForestModel model;
    model.subsample_size = std::min(psi, points.size());
    model.feature_count = n_features;
    model.contamination = contamination;
    model.seed = seed;

    const std::size_t height_limit =
        static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(model.subsample_size))));

    for (std::size_t t = 0; t < tree_count; ++t) {
        Rng rng(mix_seed(seed, t));

        // Partial Fisher-Yates draw of the subsample, without replacement.
        std::vector<std::size_t> pool(points.size());
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<std::size_t> sample(model.subsample_size);
        for (std::size_t i = 0; i < model.subsample_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
            std::swap(pool[i], pool[j]);
            sample[i] = pool[i];
        }

        IsoTree tree;
        tree.height_limit = height_limit;
        tree.root = grow(points, sample, 0, sample.size(), 0, height_limit, rng);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> anomaly_scores(const IsolationForestModel& model,
                                   const std::vector<std::vector<double>>& points) {
    if (model.trees.empty()) {
        throw DataError("anomaly_scores: model has no trees");
    }
    const double c_psi = std::max(expected_path_c(model.subsample_size),
                                  std::numeric_limits<double>::min());
    std::vector<double> scores;
    scores.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != model.feature_count) {
            throw DimensionError("anomaly_scores: point has " + std::to_string(p.size()) +
                                 " features, model expects " + std::to_string(model.feature_count));
        }
        double total = 0.0;
        for (const auto& tree : model.trees) {
            total += path_length(*tree.root, p, 0.0);
        }
        const double mean_path = total / static_cast<double>(model.trees.size());
        scores.push_back(std::exp2(-mean_path / c_psi));
    }
    return scores;
}

std::vector<std::size_t> detect(const IsolationForestModel& model,
                                const std::vector<std::vector<double>>& points) {
    const std::vector<double> scores = anomaly_scores(model, points);
    const std::size_t n = points.size();
    const std::size_t flag_count = static_cast<std::size_t>(
        std::ceil(model.contamination * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<std::size_t> flagged(order.begin(),
                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(flag_count, n)));
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

} // namespace amdcast
