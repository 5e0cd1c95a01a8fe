#include "doctest.h"

#include "amdcast/errors.hpp"
#include "amdcast/rng.hpp"
#include "amdcast/tree_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

using namespace amdcast;

namespace {

double subset_sse(const std::vector<double>& y, const std::vector<bool>& mask, bool side) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (mask[i] == side) {
            sum += y[i];
            ++n;
        }
    if (n == 0) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (mask[i] == side) sse += (y[i] - mean) * (y[i] - mean);
    return sse;
}

// Exhaustive single-split search: every feature, every midpoint between
// adjacent sorted values. Returns the lowest achievable total child SSE
// (the no-split SSE when nothing improves).
double brute_force_stump_sse(const Matrix& x, const std::vector<double>& y) {
    const std::vector<bool> none(y.size(), true);
    double best = subset_sse(y, none, true);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
        std::sort(vals.begin(), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            if (vals[k] == vals[k + 1]) continue;
            const double thr = vals[k] + 0.5 * (vals[k + 1] - vals[k]);
            std::vector<bool> left(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) left[i] = x(i, f) < thr;
            best = std::min(best, subset_sse(y, left, true) + subset_sse(y, left, false));
        }
    }
    return best;
}

double training_sse(const CartNode& tree, const Matrix& x, const std::vector<double>& y) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double d = y[i] - cart_predict(tree, x.row(i));
        sse += d * d;
    }
    return sse;
}

const CartNode* route(const CartNode& node, const std::vector<double>& x) {
    if (node.is_leaf) return &node;
    return x[node.feature] < node.threshold ? route(*node.left, x) : route(*node.right, x);
}

std::size_t leaf_count(const CartNode& node) {
    if (node.is_leaf) return 1;
    return leaf_count(*node.left) + leaf_count(*node.right);
}

struct Friedman {
    Matrix x;
    std::vector<double> y;
};

Friedman friedman(std::size_t n, std::uint64_t seed, double noise = 1.0) {
    Rng rng(seed);
    Friedman d{Matrix(n, 3), std::vector<double>(n)};
    constexpr double pi = 3.141592653589793238462643383279;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < 3; ++f) d.x(i, f) = rng.uniform();
        d.y[i] = 10.0 * std::sin(pi * d.x(i, 0) * d.x(i, 1)) +
                 20.0 * (d.x(i, 2) - 0.5) * (d.x(i, 2) - 0.5) + noise * rng.normal();
    }
    return d;
}

double holdout_mse(const std::vector<double>& y, const std::vector<double>& yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

} // namespace

TEST_CASE("constant targets produce a single leaf") {
    Matrix x = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}});
    const std::vector<double> y(4, 2.5);
    const auto tree = fit_cart(x, y, CartConfig{}, 1);
    CHECK(tree->is_leaf);
    CHECK(tree->node_count() == 1);
    CHECK(cart_predict(*tree, {9.0}) == 2.5);
}

TEST_CASE("a step function splits at the gap midpoint") {
    Matrix x(10, 1);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
        y[i] = i < 5 ? 0.0 : 10.0;
    }
    const auto tree = fit_cart(x, y, CartConfig{}, 3);
    REQUIRE_FALSE(tree->is_leaf);
    CHECK(tree->feature == 0);
    CHECK(tree->threshold == doctest::Approx(4.5).epsilon(1e-12));
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(cart_predict(*tree, x.row(i)) == y[i]);
}

TEST_CASE("depth-1 split matches an exhaustive oracle") {
    Rng rng(17);
    Matrix x(18, 2);
    std::vector<double> y(18);
    for (std::size_t i = 0; i < 18; ++i) {
        x(i, 0) = rng.uniform(-3.0, 3.0);
        x(i, 1) = rng.uniform(0.0, 1.0);
        y[i] = x(i, 0) * 1.5 + std::cos(4.0 * x(i, 1)) + 0.2 * rng.normal();
    }
    CartConfig config;
    config.max_depth = 1;
    const auto tree = fit_cart(x, y, config, 5);
    CHECK(tree->node_count() <= 3);
    CHECK(training_sse(*tree, x, y) ==
          doctest::Approx(brute_force_stump_sse(x, y)).epsilon(1e-9));
}

TEST_CASE("min_leaf bounds every leaf cohort") {
    Rng rng(23);
    Matrix x(20, 2);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x(i, 0) = rng.uniform();
        x(i, 1) = rng.uniform();
        y[i] = rng.normal();
    }
    CartConfig config;
    config.min_leaf = 3;
    const auto tree = fit_cart(x, y, config, 7);
    std::map<const CartNode*, std::size_t> cohort;
    for (std::size_t i = 0; i < 20; ++i) ++cohort[route(*tree, x.row(i))];
    for (const auto& [leaf, n] : cohort) CHECK(n >= 3);
}

TEST_CASE("best-first growth respects the leaf budget") {
    const Friedman d = friedman(120, 31);
    CartConfig config;
    config.growth = GrowthMode::BestFirst;
    config.max_leaves = 6;
    const auto tree = fit_cart(d.x, d.y, config, 1);
    CHECK(leaf_count(*tree) <= 6);
    CHECK(leaf_count(*tree) >= 2);  // plenty of structure to find

    config.max_leaves = 2;
    const auto stump = fit_cart(d.x, d.y, config, 1);
    CHECK(leaf_count(*stump) <= 2);
}

TEST_CASE("fit guards") {
    Matrix x = Matrix::from_rows({{1.0}, {2.0}});
    CHECK_THROWS_AS(fit_cart(x, {1.0}, CartConfig{}, 1), DimensionError);
    CartConfig config;
    config.min_leaf = 2;
    CHECK_THROWS_AS(fit_cart(x, {1.0, 2.0}, config, 1), DataError);  // n < 2*min_leaf

    // Enough rows that the sample-size guard passes and the config guard fires.
    Matrix wide = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}, {5.0}, {6.0}});
    const std::vector<double> wide_y = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    CHECK_THROWS_AS(fit_forest(wide, wide_y, ForestMode::RandomForest,
                               ForestHyper{.tree_count = 0}, 1),
                    ConfigError);
    GbmHyper bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_gbm(wide, wide_y, bad, 1), ConfigError);
    bad.learning_rate = 1.5;
    CHECK_THROWS_AS(fit_gbm(wide, wide_y, bad, 1), ConfigError);
}

TEST_CASE("forest prediction is the mean over member trees") {
    const Friedman d = friedman(80, 3);
    ForestHyper hyper;
    hyper.tree_count = 7;
    const ForestModel model = fit_forest(d.x, d.y, ForestMode::RandomForest, hyper, 11);
    REQUIRE(model.trees.size() == 7);
    const std::vector<double> probe = {0.3, 0.6, 0.9};
    double mean = 0.0;
    for (const auto& t : model.trees) mean += cart_predict(*t, probe);
    mean /= 7.0;
    CHECK(forest_predict(model, probe) == doctest::Approx(mean).epsilon(1e-15));
}

TEST_CASE("forests are seed-deterministic") {
    const Friedman d = friedman(100, 13);
    const std::vector<double> probe = {0.5, 0.25, 0.75};
    for (ForestMode mode : {ForestMode::RandomForest, ForestMode::ExtraTrees}) {
        ForestHyper hyper;
        hyper.tree_count = 20;
        const ForestModel a = fit_forest(d.x, d.y, mode, hyper, 99);
        const ForestModel b = fit_forest(d.x, d.y, mode, hyper, 99);
        CHECK(forest_predict(a, probe) == forest_predict(b, probe));
        const ForestModel c = fit_forest(d.x, d.y, mode, hyper, 100);
        CHECK(forest_predict(a, probe) != forest_predict(c, probe));
    }
}

TEST_CASE("single-stage unit-rate boosting reduces to a tree on residuals") {
    const Friedman d = friedman(90, 41);
    GbmHyper hyper;
    hyper.stages = 1;
    hyper.learning_rate = 1.0;
    const GbmModel gbm = fit_gbm(d.x, d.y, hyper, 55);

    double base = 0.0;
    for (double v : d.y) base += v;
    base /= static_cast<double>(d.y.size());
    CHECK(gbm.base_prediction == doctest::Approx(base).epsilon(1e-15));

    std::vector<double> resid;
    for (double v : d.y) resid.push_back(v - gbm.base_prediction);
    CartConfig config;
    config.max_depth = hyper.max_depth;
    config.min_leaf = hyper.min_leaf;
    const auto tree = fit_cart(d.x, resid, config, mix_seed(55, 0));

    for (std::size_t i = 0; i < 5; ++i) {
        const auto probe = d.x.row(i);
        CHECK(gbm_predict(gbm, probe) ==
              doctest::Approx(gbm.base_prediction + cart_predict(*tree, probe)).epsilon(1e-12));
    }
}

TEST_CASE("boosting training loss is monotone non-increasing") {
    const Friedman d = friedman(150, 8);
    for (GbmGrowth growth : {GbmGrowth::DepthWise, GbmGrowth::LeafWise}) {
        GbmHyper hyper;
        hyper.growth = growth;
        hyper.stages = 60;
        const GbmModel model = fit_gbm(d.x, d.y, hyper, 77);
        REQUIRE(model.train_loss.size() == 60);
        for (std::size_t s = 1; s < model.train_loss.size(); ++s)
            CHECK(model.train_loss[s] <= model.train_loss[s - 1] + 1e-12);
        CHECK(model.train_loss.back() < model.train_loss.front());
    }
}

TEST_CASE("ensembles beat a lone tree on held-out data") {
    const Friedman train = friedman(150, 61);
    const Friedman val = friedman(50, 62);

    const auto cart = fit_cart(train.x, train.y, CartConfig{}, 1);
    std::vector<double> cart_pred, forest_pred_v, gbm_pred;
    ForestHyper fh;
    fh.tree_count = 100;
    const ForestModel forest = fit_forest(train.x, train.y, ForestMode::RandomForest, fh, 1);
    GbmHyper gh;
    gh.stages = 100;
    const GbmModel gbm = fit_gbm(train.x, train.y, gh, 1);
    for (std::size_t i = 0; i < val.x.rows(); ++i) {
        const auto probe = val.x.row(i);
        cart_pred.push_back(cart_predict(*cart, probe));
        forest_pred_v.push_back(forest_predict(forest, probe));
        gbm_pred.push_back(gbm_predict(gbm, probe));
    }
    const double cart_mse = holdout_mse(val.y, cart_pred);
    CHECK(holdout_mse(val.y, forest_pred_v) < cart_mse);
    CHECK(holdout_mse(val.y, gbm_pred) < cart_mse);
}
