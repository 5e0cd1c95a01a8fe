#pragma once

#include "amdcast/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace amdcast {

/// The four ensemble presets raced against each other per parameter.
enum class InterpPreset { RandomForest, ExtraTrees, GbmDepthWise, GbmLeafWise };

std::string to_string(InterpPreset preset);

struct InterpolationConfig {
    double split_fraction = 0.8;   ///< chronological train share for ranking fits
    std::size_t tree_count = 200;  ///< forest presets
    std::size_t gbm_stages = 200;
    double learning_rate = 0.1;
    std::size_t max_depth = 3;   ///< depth-wise GBM
    std::size_t max_leaves = 8;  ///< leaf-wise GBM
    std::size_t min_leaf = 2;
};

struct ModelScore {
    InterpPreset preset;
    double validation_mse = 0.0;
    double validation_mae = 0.0;
};

struct ParameterPlan {
    std::string parameter;
    std::vector<ModelScore> ranking;     ///< all presets, best validation MSE first
    std::vector<InterpPreset> chosen;    ///< exactly three, averaged for the output
    bool fixed_choice = false;           ///< true when the preset set was pinned (Mn)
    std::vector<double> daily_values;    ///< averaged series on the daily grid
};

struct InterpolationPlan {
    std::string feature_note;  ///< documents the (sin, cos, linear index) feature set
    std::vector<ParameterPlan> parameters;
};

struct InterpolationResult {
    TimeSeriesFrame daily;
    InterpolationPlan plan;
};

/// Fills missing cells by racing tree ensembles on calendar features and
/// emitting a daily grid; observed cells are carried over verbatim.
InterpolationResult interpolate(const TimeSeriesFrame& frame, const InterpolationConfig& config,
                                std::uint64_t seed);

} // namespace amdcast
