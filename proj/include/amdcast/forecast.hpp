#pragma once

#include "amdcast/nn.hpp"
#include "amdcast/timeseries.hpp"

#include <string>
#include <vector>

namespace amdcast {

struct ForecastResult {
    ModelSpec spec;
    std::vector<Date> dates;    // contiguous daily horizon
    Matrix predictions;         // H x outputs, original units
    Matrix scaled_predictions;  // H x outputs, model space
};

/// Rolls the model forward over `future_dates`, feeding each prediction back
/// into the sliding window (autoregressive closure). `recent_history` is the
/// last `window` rows in scaled space; predictions are inverse-scaled for
/// the result but the closure stays in scaled space.
ForecastResult rollout(const ModelSpec& spec, const ModelParams& params,
                       const ScalerParams& scaler, const Matrix& recent_history,
                       const std::vector<Date>& future_dates);

struct SparseParameterError {
    std::string name;
    double mse = 0.0;
    double mae = 0.0;
};

struct SparseEvaluation {
    std::vector<Date> matched_dates;
    std::vector<SparseParameterError> per_parameter;  // original units
};

/// Scores the forecast against sparse measurements on exactly the dates
/// both sides share. Throws DataError when no measured date falls inside
/// the horizon.
SparseEvaluation evaluate_sparse(const ForecastResult& forecast,
                                 const TimeSeriesFrame& measured);

/// Writes forecast.csv, metrics.csv and one SVG per parameter (history tail,
/// forecast line, measured markers) into `out_dir`. `evaluation` and
/// `measured` may be null, which drops the metric rows and the markers.
void emit_report(const ForecastResult& forecast, const TimeSeriesFrame& history,
                 const SparseEvaluation* evaluation, const TimeSeriesFrame* measured,
                 const std::string& out_dir);

} // namespace amdcast
