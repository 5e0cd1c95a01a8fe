#include "amdcast/interpolation.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/metrics.hpp"
#include "amdcast/rng.hpp"
#include "amdcast/tree_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace amdcast {

namespace {

constexpr std::size_t kMinObserved = 20;

const std::vector<InterpPreset>& all_presets() {
    static const std::vector<InterpPreset> presets = {
        InterpPreset::RandomForest,
        InterpPreset::ExtraTrees,
        InterpPreset::GbmDepthWise,
        InterpPreset::GbmLeafWise,
    };
    return presets;
}

/// Calendar features for one date: annual sine/cosine plus a linear day
/// index anchored at `origin` so the trees can express trend.
std::vector<double> date_features(const Date& date, const Date& origin) {
    const double theta = 2.0 * 3.14159265358979323846 * (date.day_of_year() - 1) / 365.25;
    return {std::sin(theta), std::cos(theta),
            static_cast<double>(date.epoch_days() - origin.epoch_days())};
}

Matrix feature_matrix(const std::vector<Date>& dates, const Date& origin) {
    std::vector<double> data;
    data.reserve(dates.size() * 3);
    for (const Date& d : dates) {
        for (double v : date_features(d, origin)) data.push_back(v);
    }
    return Matrix(dates.size(), 3, std::move(data));
}

ForestHyper forest_hyper(const InterpolationConfig& config) {
    ForestHyper hyper;
    hyper.tree_count = config.tree_count;
    hyper.min_leaf = config.min_leaf;
    return hyper;
}

GbmHyper gbm_hyper(const InterpolationConfig& config, GbmGrowth growth) {
    GbmHyper hyper;
    hyper.growth = growth;
    hyper.stages = config.gbm_stages;
    hyper.learning_rate = config.learning_rate;
    hyper.max_depth = config.max_depth;
    hyper.max_leaves = config.max_leaves;
    hyper.min_leaf = config.min_leaf;
    return hyper;
}

/// Fits one preset and returns its predictions on `query` rows.
std::vector<double> fit_and_predict(InterpPreset preset, const Matrix& features,
                                    const std::vector<double>& targets, const Matrix& query,
                                    const InterpolationConfig& config, std::uint64_t seed) {
    std::vector<double> out(query.rows());
    switch (preset) {
    case InterpPreset::RandomForest: {
        ForestModel model = fit_forest(features, targets, ForestMode::RandomForest,
                                       forest_hyper(config), seed);
        for (std::size_t i = 0; i < query.rows(); ++i) out[i] = forest_predict(model, query.row(i));
        break;
    }
    case InterpPreset::ExtraTrees: {
        ForestModel model = fit_forest(features, targets, ForestMode::ExtraTrees,
                                       forest_hyper(config), seed);
        for (std::size_t i = 0; i < query.rows(); ++i) out[i] = forest_predict(model, query.row(i));
        break;
    }
    case InterpPreset::GbmDepthWise: {
        GbmModel model = fit_gbm(features, targets, gbm_hyper(config, GbmGrowth::DepthWise), seed);
        for (std::size_t i = 0; i < query.rows(); ++i) out[i] = gbm_predict(model, query.row(i));
        break;
    }
    case InterpPreset::GbmLeafWise: {
        GbmModel model = fit_gbm(features, targets, gbm_hyper(config, GbmGrowth::LeafWise), seed);
        for (std::size_t i = 0; i < query.rows(); ++i) out[i] = gbm_predict(model, query.row(i));
        break;
    }
    }
    return out;
}

} // namespace

std::string to_string(InterpPreset preset) {
    switch (preset) {
    case InterpPreset::RandomForest: return "random_forest";
    case InterpPreset::ExtraTrees: return "extra_trees";
    case InterpPreset::GbmDepthWise: return "gbm_depthwise";
    case InterpPreset::GbmLeafWise: return "gbm_leafwise";
    }
    throw ConfigError("unknown interpolation preset");
}

InterpolationResult interpolate(const TimeSeriesFrame& frame, const InterpolationConfig& config,
                                std::uint64_t seed) {
    if (frame.row_count() < 2) {
        throw DataError("interpolate: need at least two rows to span a grid");
    }
    if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0)) {
        throw ConfigError("interpolate: split fraction must lie in (0, 1)");
    }

    const Date origin = frame.dates.front();
    const std::int64_t span = frame.dates.back().epoch_days() - origin.epoch_days();

    InterpolationResult result;
    result.daily.columns = frame.columns;
    result.daily.dates.reserve(static_cast<std::size_t>(span) + 1);
    for (std::int64_t d = 0; d <= span; ++d) {
        result.daily.dates.push_back(origin.plus_days(d));
    }
    const Matrix daily_features = feature_matrix(result.daily.dates, origin);
    result.plan.feature_note =
        "features per date: sin/cos of the annual cycle plus a linear day index "
        "(the linear index is an extension so trees can track trend)";

    for (std::size_t c = 0; c < frame.column_count(); ++c) {
        std::vector<Date> observed_dates;
        std::vector<double> observed_values;
        for (std::size_t r = 0; r < frame.row_count(); ++r) {
            if (!frame.is_missing(r, c)) {
                observed_dates.push_back(frame.dates[r]);
                observed_values.push_back(frame.values[c][r]);
            }
        }
        if (observed_values.size() < kMinObserved) {
            throw DataError("interpolate: column " + frame.columns[c] + " has only " +
                            std::to_string(observed_values.size()) + " observed rows (need " +
                            std::to_string(kMinObserved) + ")");
        }

        const Matrix observed_features = feature_matrix(observed_dates, origin);
        const std::size_t n = observed_values.size();
        const auto train_count = static_cast<std::size_t>(
            std::floor(config.split_fraction * static_cast<double>(n)));

        Matrix train_features(train_count, 3, [&] {
            std::vector<double> data;
            data.reserve(train_count * 3);
            for (std::size_t i = 0; i < train_count; ++i) {
                for (double v : observed_features.row(i)) data.push_back(v);
            }
            return data;
        }());
        Matrix val_features(n - train_count, 3, [&] {
            std::vector<double> data;
            data.reserve((n - train_count) * 3);
            for (std::size_t i = train_count; i < n; ++i) {
                for (double v : observed_features.row(i)) data.push_back(v);
            }
            return data;
        }());
        const std::vector<double> train_targets(observed_values.begin(),
                                                observed_values.begin() +
                                                    static_cast<std::ptrdiff_t>(train_count));
        const std::vector<double> val_targets(observed_values.begin() +
                                                  static_cast<std::ptrdiff_t>(train_count),
                                              observed_values.end());

        const std::uint64_t column_seed = mix_seed(seed, c);
        ParameterPlan plan;
        plan.parameter = frame.columns[c];
        for (std::size_t p = 0; p < all_presets().size(); ++p) {
            const InterpPreset preset = all_presets()[p];
            const std::vector<double> val_pred =
                fit_and_predict(preset, train_features, train_targets, val_features, config,
                                mix_seed(column_seed, p));
            plan.ranking.push_back({preset, mse(val_targets, val_pred), mae(val_targets, val_pred)});
        }
        std::stable_sort(plan.ranking.begin(), plan.ranking.end(),
                         [](const ModelScore& a, const ModelScore& b) {
                             return a.validation_mse < b.validation_mse;
                         });

        if (frame.columns[c] == "Mn") {
            plan.fixed_choice = true;
            plan.chosen = {InterpPreset::RandomForest, InterpPreset::GbmDepthWise,
                           InterpPreset::ExtraTrees};
        } else {
            for (std::size_t k = 0; k < 3; ++k) plan.chosen.push_back(plan.ranking[k].preset);
        }

        // The split above only ranks the presets; the chosen three are refit
        // on every observed row so the grid does not extrapolate past the
        // ranking split point.
        std::vector<double> averaged(result.daily.dates.size(), 0.0);
        for (std::size_t k = 0; k < plan.chosen.size(); ++k) {
            const std::size_t preset_index = static_cast<std::size_t>(
                std::find(all_presets().begin(), all_presets().end(), plan.chosen[k]) -
                all_presets().begin());
            const std::vector<double> pred =
                fit_and_predict(plan.chosen[k], observed_features, observed_values, daily_features,
                                config, mix_seed(column_seed, 4 + preset_index));
            for (std::size_t i = 0; i < averaged.size(); ++i) averaged[i] += pred[i];
        }
        for (double& v : averaged) v /= static_cast<double>(plan.chosen.size());

        // Observed dates keep their measured values verbatim.
        std::size_t next_observed = 0;
        for (std::size_t i = 0; i < result.daily.dates.size(); ++i) {
            if (next_observed < observed_dates.size() &&
                result.daily.dates[i] == observed_dates[next_observed]) {
                averaged[i] = observed_values[next_observed];
                ++next_observed;
            }
        }

        plan.daily_values = averaged;
        result.daily.values.push_back(std::move(averaged));
        result.plan.parameters.push_back(std::move(plan));
    }
    return result;
}

} // namespace amdcast
