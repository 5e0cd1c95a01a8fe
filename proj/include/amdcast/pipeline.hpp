#pragma once

#include "amdcast/interpolation.hpp"
#include "amdcast/nn.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace amdcast {

struct AnomalyConfig {
    double contamination = 0.2;
    std::size_t trees = 100;
    std::size_t subsample = 64;
};

struct ModelConfig {
    ModelVariant variant = ModelVariant::EncoderDecoder;
    std::size_t window = 7;
    std::size_t epochs = 0;  ///< 0 selects the reported preset for variant/window
    std::size_t batch_size = 4;
    std::size_t hidden = 32;
    std::vector<std::size_t> head = {16};
    std::vector<std::size_t> fnn_hidden = {64, 32};
    std::size_t patience = 0;
    double learning_rate = 1e-3;
};

struct ForecastOptions {
    std::size_t horizon = 60;
    std::string measured;  ///< optional sparse measurement CSV
};

struct PipelineConfig {
    std::string input;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    AnomalyConfig anomaly;
    InterpolationConfig interpolation;
    ModelConfig model;
    double train_fraction = 0.7;
    ForecastOptions forecast;
};

/// Parses the JSON config. Unknown keys and out-of-range values raise
/// ConfigError naming the offending key.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Stationarity report: prints one line per parameter and writes adf.csv.
void cmd_inspect(const PipelineConfig& config, std::ostream& out);

/// Anomaly flagging + tree-ensemble interpolation onto the daily grid;
/// writes anomalies.csv, daily.csv and interp_models.csv.
void cmd_clean(const PipelineConfig& config, std::ostream& out);

/// Trains the configured model on daily.csv; writes model.json,
/// history.csv and metrics.csv and prints the fit diagnosis.
void cmd_train(const PipelineConfig& config, std::ostream& out);

/// Rolls the checkpoint forward over the horizon; writes the report bundle
/// under <output_dir>/forecast/.
void cmd_forecast(const PipelineConfig& config, std::ostream& out);

/// Writes the synthetic weekly dataset plus ground-truth files.
void cmd_synth(const PipelineConfig& config, std::ostream& out);

} // namespace amdcast
