#pragma once

#include "amdcast/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace amdcast {

/// Paths of the files a synthesis run writes.
struct SynthFiles {
    std::string weekly;
    std::string measured;
    std::string truth_daily;
    std::string truth_anomalies;
    std::vector<std::size_t> planted;  ///< anomalous weekly row indices
};

/// Generates the desk-scale stand-in dataset: an 83-row weekly CSV of the 7
/// monitored parameters built from trend + annual seasonality + noise with a
/// handful of planted anomalous rows, a sparse measured file inside the
/// 60-day forecast horizon, and ground-truth files (noiseless daily signal,
/// planted anomaly rows).
SynthFiles synthesize(const std::string& out_dir, std::uint64_t seed);

} // namespace amdcast
