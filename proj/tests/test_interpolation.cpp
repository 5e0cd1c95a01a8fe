#include "doctest.h"

#include "amdcast/errors.hpp"
#include "amdcast/interpolation.hpp"

#include <cmath>
#include <vector>

using namespace amdcast;

namespace {

// Weekly frame with smooth seasonal structure; selected cells knocked out.
TimeSeriesFrame gappy_frame(std::size_t rows) {
    TimeSeriesFrame frame;
    frame.columns = parameter_names();
    frame.values.assign(frame.columns.size(), {});
    for (std::size_t r = 0; r < rows; ++r) {
        frame.dates.push_back(Date(2021, 3, 2).plus_days(static_cast<std::int64_t>(7 * r)));
        for (std::size_t c = 0; c < frame.columns.size(); ++c) {
            const double base = 4.0 + 2.0 * static_cast<double>(c);
            frame.values[c].push_back(
                base + std::sin(2.0 * 3.141592653589793 * static_cast<double>(r) / 26.0 +
                                0.5 * static_cast<double>(c)));
        }
    }
    // Missing cells scattered across columns, none dropping below 20 observed.
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
        frame.values[c][3 + c] = std::nan("");
        frame.values[c][15 + c] = std::nan("");
    }
    return frame;
}

InterpolationConfig quick_config() {
    InterpolationConfig config;
    config.tree_count = 25;
    config.gbm_stages = 30;
    return config;
}

} // namespace

TEST_CASE("interpolation fills a contiguous daily grid") {
    const TimeSeriesFrame frame = gappy_frame(30);
    const InterpolationResult result = interpolate(frame, quick_config(), 5);

    const std::size_t expected_days = 29 * 7 + 1;
    REQUIRE(result.daily.row_count() == expected_days);
    CHECK(result.daily.dates.front() == frame.dates.front());
    CHECK(result.daily.dates.back() == frame.dates.back());
    for (std::size_t r = 1; r < result.daily.row_count(); ++r)
        CHECK(result.daily.dates[r].epoch_days() == result.daily.dates[r - 1].epoch_days() + 1);
    CHECK(result.daily.missing_count() == 0);
}

TEST_CASE("observed weekly values are carried over verbatim") {
    const TimeSeriesFrame frame = gappy_frame(26);
    const InterpolationResult result = interpolate(frame, quick_config(), 5);
    for (std::size_t c = 0; c < frame.column_count(); ++c) {
        for (std::size_t r = 0; r < frame.row_count(); ++r) {
            if (frame.is_missing(r, c)) continue;
            const std::size_t daily_row = static_cast<std::size_t>(
                frame.dates[r].epoch_days() - frame.dates.front().epoch_days());
            CHECK(result.daily.values[c][daily_row] == frame.values[c][r]);
        }
    }
}

TEST_CASE("plan ranks all four presets and averages the top three") {
    const TimeSeriesFrame frame = gappy_frame(26);
    const InterpolationResult result = interpolate(frame, quick_config(), 5);
    REQUIRE(result.plan.parameters.size() == 7);
    CHECK(!result.plan.feature_note.empty());

    for (const ParameterPlan& plan : result.plan.parameters) {
        REQUIRE(plan.ranking.size() == 4);
        for (std::size_t k = 1; k < 4; ++k)
            CHECK(plan.ranking[k - 1].validation_mse <= plan.ranking[k].validation_mse);
        CHECK(plan.chosen.size() == 3);
        CHECK(plan.daily_values.size() == result.daily.row_count());
        if (plan.parameter == "Mn") {
            CHECK(plan.fixed_choice);
            REQUIRE(plan.chosen.size() == 3);
            CHECK(plan.chosen[0] == InterpPreset::RandomForest);
            CHECK(plan.chosen[1] == InterpPreset::GbmDepthWise);
            CHECK(plan.chosen[2] == InterpPreset::ExtraTrees);
        } else {
            CHECK_FALSE(plan.fixed_choice);
            // Non-pinned parameters take the ranking's top three.
            for (std::size_t k = 0; k < 3; ++k)
                CHECK(plan.chosen[k] == plan.ranking[k].preset);
        }
    }
}

TEST_CASE("interpolation is seed-deterministic") {
    const TimeSeriesFrame frame = gappy_frame(24);
    const InterpolationResult a = interpolate(frame, quick_config(), 9);
    const InterpolationResult b = interpolate(frame, quick_config(), 9);
    for (std::size_t c = 0; c < a.daily.column_count(); ++c)
        CHECK(a.daily.values[c] == b.daily.values[c]);

    const InterpolationResult other = interpolate(frame, quick_config(), 10);
    bool any_diff = false;
    for (std::size_t c = 0; c < a.daily.column_count(); ++c)
        any_diff = any_diff || (a.daily.values[c] != other.daily.values[c]);
    CHECK(any_diff);
}

TEST_CASE("preset names") {
    CHECK(to_string(InterpPreset::RandomForest) == "random_forest");
    CHECK(to_string(InterpPreset::ExtraTrees) == "extra_trees");
    CHECK(to_string(InterpPreset::GbmDepthWise) == "gbm_depthwise");
    CHECK(to_string(InterpPreset::GbmLeafWise) == "gbm_leafwise");
}

TEST_CASE("interpolation guards") {
    TimeSeriesFrame sparse = gappy_frame(24);
    for (std::size_t r = 0; r < 14; ++r) sparse.values[4][r] = std::nan("");
    CHECK_THROWS_AS(interpolate(sparse, quick_config(), 1), DataError);  // SO4 < 20 observed

    TimeSeriesFrame single = gappy_frame(24);
    single.dates.resize(1);
    for (auto& col : single.values) col.resize(1);
    CHECK_THROWS_AS(interpolate(single, quick_config(), 1), DataError);

    InterpolationConfig bad = quick_config();
    bad.split_fraction = 1.0;
    CHECK_THROWS_AS(interpolate(gappy_frame(24), bad, 1), ConfigError);
}
