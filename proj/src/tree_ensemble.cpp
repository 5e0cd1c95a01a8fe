#include "amdcast/tree_ensemble.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace amdcast {

namespace {

constexpr double kGainEps = 1e-12;

struct NodeStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    double mean() const { return sum / static_cast<double>(count); }
    double sse() const {
        const double raw = sum_sq - sum * sum / static_cast<double>(count);
        return raw > 0.0 ? raw : 0.0;
    }
    bool pure() const { return sse() <= kGainEps * std::max(1.0, sum_sq); }
};

struct SplitChoice {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Grows one regression tree over an index window of the training data.
class TreeGrower {
public:
    TreeGrower(const Matrix& features, const std::vector<double>& targets,
               const CartConfig& config, std::uint64_t seed)
        : x_(features), y_(targets), config_(config), rng_(seed) {}

    std::unique_ptr<CartNode> grow(std::vector<std::size_t> indices) {
        idx_ = std::move(indices);
        if (config_.growth == GrowthMode::BestFirst) {
            return grow_best_first();
        }
        return grow_depth_first(0, idx_.size(), 0);
    }

private:
    NodeStats stats(std::size_t lo, std::size_t hi) const {
        NodeStats s;
        for (std::size_t i = lo; i < hi; ++i) {
            const double t = y_[idx_[i]];
            s.sum += t;
            s.sum_sq += t * t;
        }
        s.count = hi - lo;
        return s;
    }

    std::unique_ptr<CartNode> make_leaf(const NodeStats& s) const {
        auto node = std::make_unique<CartNode>();
        node->prediction = s.mean();
        return node;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t d = x_.cols();
        if (config_.feature_subset == 0 || config_.feature_subset >= d) {
            std::vector<std::size_t> all(d);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<std::size_t> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<std::size_t> chosen(config_.feature_subset);
        for (std::size_t i = 0; i < config_.feature_subset; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.uniform_index(d - i));
            std::swap(pool[i], pool[j]);
            chosen[i] = pool[i];
        }
        return chosen;
    }

    SplitChoice find_split(std::size_t lo, std::size_t hi, const NodeStats& parent) {
        SplitChoice best;
        if (parent.count < 2 * config_.min_leaf || parent.pure()) {
            return best;
        }
        const double parent_sse = parent.sse();
        for (std::size_t f : candidate_features()) {
            if (config_.threshold_mode == ThresholdMode::BestSplit) {
                scan_best_threshold(f, lo, hi, parent, parent_sse, best);
            } else {
                try_random_threshold(f, lo, hi, parent, parent_sse, best);
            }
        }
        return best;
    }

    void scan_best_threshold(std::size_t f, std::size_t lo, std::size_t hi,
                             const NodeStats& parent, double parent_sse, SplitChoice& best) {
        scratch_.clear();
        for (std::size_t i = lo; i < hi; ++i) {
            scratch_.push_back({x_(idx_[i], f), y_[idx_[i]]});
        }
        std::sort(scratch_.begin(), scratch_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        NodeStats left;
        for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
            left.sum += scratch_[i].second;
            left.sum_sq += scratch_[i].second * scratch_[i].second;
            left.count = i + 1;
            if (scratch_[i].first == scratch_[i + 1].first) continue;
            if (left.count < config_.min_leaf) continue;
            const std::size_t right_count = scratch_.size() - left.count;
            if (right_count < config_.min_leaf) break;

            NodeStats right;
            right.sum = parent.sum - left.sum;
            right.sum_sq = parent.sum_sq - left.sum_sq;
            right.count = right_count;
            const double gain = parent_sse - left.sse() - right.sse();
            if (gain > kGainEps * std::max(1.0, parent_sse) && gain > best.gain) {
                double mid = 0.5 * (scratch_[i].first + scratch_[i + 1].first);
                if (!(mid > scratch_[i].first && mid <= scratch_[i + 1].first)) {
                    mid = scratch_[i + 1].first;
                }
                best.valid = true;
                best.feature = f;
                best.threshold = mid;
                best.gain = gain;
            }
        }
    }

    void try_random_threshold(std::size_t f, std::size_t lo, std::size_t hi,
                              const NodeStats& parent, double parent_sse, SplitChoice& best) {
        double fmin = x_(idx_[lo], f);
        double fmax = fmin;
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const double v = x_(idx_[i], f);
            fmin = std::min(fmin, v);
            fmax = std::max(fmax, v);
        }
        if (!(fmax > fmin)) return;
        double thr = rng_.uniform(fmin, fmax);
        if (thr <= fmin) thr = std::nextafter(fmin, fmax);

        NodeStats left;
        for (std::size_t i = lo; i < hi; ++i) {
            const double v = x_(idx_[i], f);
            if (v < thr) {
                const double t = y_[idx_[i]];
                left.sum += t;
                left.sum_sq += t * t;
                ++left.count;
            }
        }
        const std::size_t right_count = parent.count - left.count;
        if (left.count < config_.min_leaf || right_count < config_.min_leaf) return;

        NodeStats right;
        right.sum = parent.sum - left.sum;
        right.sum_sq = parent.sum_sq - left.sum_sq;
        right.count = right_count;
        const double gain = parent_sse - left.sse() - right.sse();
        if (gain > kGainEps * std::max(1.0, parent_sse) && gain > best.gain) {
            best.valid = true;
            best.feature = f;
            best.threshold = thr;
            best.gain = gain;
        }
    }

    std::size_t apply_split(std::size_t lo, std::size_t hi, const SplitChoice& split) {
        auto mid = std::partition(idx_.begin() + static_cast<std::ptrdiff_t>(lo),
                                  idx_.begin() + static_cast<std::ptrdiff_t>(hi),
                                  [&](std::size_t i) { return x_(i, split.feature) < split.threshold; });
        return static_cast<std::size_t>(mid - idx_.begin());
    }

    std::unique_ptr<CartNode> grow_depth_first(std::size_t lo, std::size_t hi, std::size_t depth) {
        const NodeStats s = stats(lo, hi);
        if (depth >= config_.max_depth) {
            return make_leaf(s);
        }
        const SplitChoice split = find_split(lo, hi, s);
        if (!split.valid) {
            return make_leaf(s);
        }
        const std::size_t mid = apply_split(lo, hi, split);
        auto node = std::make_unique<CartNode>();
        node->is_leaf = false;
        node->feature = split.feature;
        node->threshold = split.threshold;
        node->prediction = s.mean();
        node->left = grow_depth_first(lo, mid, depth + 1);
        node->right = grow_depth_first(mid, hi, depth + 1);
        return node;
    }

    struct Candidate {
        double gain;
        std::size_t seq;
        CartNode* node;
        std::size_t lo, hi, depth;
        SplitChoice split;

        bool operator<(const Candidate& other) const {
            if (gain != other.gain) return gain < other.gain; // max-heap on gain
            return seq > other.seq;                           // FIFO among ties
        }
    };

    std::unique_ptr<CartNode> grow_best_first() {
        const NodeStats root_stats = stats(0, idx_.size());
        auto root = make_leaf(root_stats);

        std::priority_queue<Candidate> frontier;
        std::size_t seq = 0;
        auto consider = [&](CartNode* node, std::size_t lo, std::size_t hi, std::size_t depth,
                            const NodeStats& s) {
            if (depth >= config_.max_depth) return;
            const SplitChoice split = find_split(lo, hi, s);
            if (split.valid) {
                frontier.push({split.gain, seq++, node, lo, hi, depth, split});
            }
        };
        consider(root.get(), 0, idx_.size(), 0, root_stats);

        std::size_t leaves = 1;
        while (leaves < config_.max_leaves && !frontier.empty()) {
            const Candidate cand = frontier.top();
            frontier.pop();
            const std::size_t mid = apply_split(cand.lo, cand.hi, cand.split);

            CartNode* node = cand.node;
            node->is_leaf = false;
            node->feature = cand.split.feature;
            node->threshold = cand.split.threshold;
            const NodeStats ls = stats(cand.lo, mid);
            const NodeStats rs = stats(mid, cand.hi);
            node->left = make_leaf(ls);
            node->right = make_leaf(rs);
            ++leaves;

            consider(node->left.get(), cand.lo, mid, cand.depth + 1, ls);
            consider(node->right.get(), mid, cand.hi, cand.depth + 1, rs);
        }
        return root;
    }

    const Matrix& x_;
    const std::vector<double>& y_;
    CartConfig config_;
    Rng rng_;
    std::vector<std::size_t> idx_;
    std::vector<std::pair<double, double>> scratch_;
};

void check_training_data(const Matrix& features, const std::vector<double>& targets,
                         std::size_t min_leaf) {
    if (features.rows() != targets.size()) {
        throw DimensionError("tree fit: feature rows do not match target count");
    }
    if (targets.size() < 2 * std::max<std::size_t>(min_leaf, 1)) {
        throw DataError("tree fit: too few samples (" + std::to_string(targets.size()) + ")");
    }
}

} // namespace

std::size_t CartNode::node_count() const {
    if (is_leaf) return 1;
    return 1 + left->node_count() + right->node_count();
}

std::unique_ptr<CartNode> fit_cart(const Matrix& features, const std::vector<double>& targets,
                                   const CartConfig& config, std::uint64_t seed) {
    check_training_data(features, targets, config.min_leaf);
    std::vector<std::size_t> indices(targets.size());
    std::iota(indices.begin(), indices.end(), 0);
    TreeGrower grower(features, targets, config, seed);
    return grower.grow(std::move(indices));
}

double cart_predict(const CartNode& node, const std::vector<double>& x) {
    const CartNode* cur = &node;
    while (!cur->is_leaf) {
        cur = x[cur->feature] < cur->threshold ? cur->left.get() : cur->right.get();
    }
    return cur->prediction;
}

ForestModel fit_forest(const Matrix& features, const std::vector<double>& targets, ForestMode mode,
                       const ForestHyper& hyper, std::uint64_t seed) {
    check_training_data(features, targets, hyper.min_leaf);
    if (hyper.tree_count < 1) {
        throw ConfigError("fit_forest: tree count must be >= 1");
    }

    CartConfig config;
    config.max_depth = hyper.max_depth;
    config.min_leaf = hyper.min_leaf;
    if (mode == ForestMode::RandomForest) {
        config.feature_subset = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(features.cols()))));
        config.threshold_mode = ThresholdMode::BestSplit;
    } else {
        config.feature_subset = 0;
        config.threshold_mode = ThresholdMode::UniformRandom;
    }

    ForestModel model;
    model.mode = mode;
    model.hyper = hyper;
    model.seed = seed;

    const std::size_t n = targets.size();
    for (std::size_t t = 0; t < hyper.tree_count; ++t) {
        const std::uint64_t tree_seed = mix_seed(seed, t);
        std::vector<std::size_t> indices;
        if (mode == ForestMode::RandomForest && hyper.bootstrap) {
            Rng boot(mix_seed(tree_seed, 0x6f));
            indices.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                indices[i] = static_cast<std::size_t>(boot.uniform_index(n));
            }
        } else {
            indices.resize(n);
            std::iota(indices.begin(), indices.end(), 0);
        }
        TreeGrower grower(features, targets, config, tree_seed);
        model.trees.push_back(grower.grow(std::move(indices)));
    }
    return model;
}

double forest_predict(const ForestModel& model, const std::vector<double>& x) {
    double total = 0.0;
    for (const auto& tree : model.trees) {
        total += cart_predict(*tree, x);
    }
    return total / static_cast<double>(model.trees.size());
}

GbmModel fit_gbm(const Matrix& features, const std::vector<double>& targets, const GbmHyper& hyper,
                 std::uint64_t seed) {
    check_training_data(features, targets, hyper.min_leaf);
    if (!(hyper.learning_rate > 0.0 && hyper.learning_rate <= 1.0)) {
        throw ConfigError("fit_gbm: learning rate must lie in (0, 1]");
    }

    CartConfig config;
    config.min_leaf = hyper.min_leaf;
    if (hyper.growth == GbmGrowth::DepthWise) {
        config.max_depth = hyper.max_depth;
        config.growth = GrowthMode::DepthFirst;
    } else {
        config.growth = GrowthMode::BestFirst;
        config.max_leaves = hyper.max_leaves;
    }

    GbmModel model;
    model.hyper = hyper;
    model.seed = seed;

    const std::size_t n = targets.size();
    double base = 0.0;
    for (double t : targets) base += t;
    base /= static_cast<double>(n);
    model.base_prediction = base;

    std::vector<double> current(n, base);
    std::vector<double> residuals(n);
    for (std::size_t stage = 0; stage < hyper.stages; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            residuals[i] = targets[i] - current[i];
        }
        TreeGrower grower(features, residuals, config, mix_seed(seed, stage));
        std::vector<std::size_t> indices(n);
        std::iota(indices.begin(), indices.end(), 0);
        auto tree = grower.grow(std::move(indices));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            current[i] += hyper.learning_rate * cart_predict(*tree, features.row(i));
            const double r = targets[i] - current[i];
            loss += r * r;
        }
        model.train_loss.push_back(loss / static_cast<double>(n));
        model.stages.push_back(std::move(tree));
    }
    return model;
}

double gbm_predict(const GbmModel& model, const std::vector<double>& x) {
    double total = model.base_prediction;
    for (const auto& stage : model.stages) {
        total += model.hyper.learning_rate * cart_predict(*stage, x);
    }
    return total;
}

} // namespace amdcast
