#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace amdcast {

/// Mean squared error. Throws on length mismatch or empty input.
double mse(const std::vector<double>& y, const std::vector<double>& yhat);

/// Mean absolute error.
double mae(const std::vector<double>& y, const std::vector<double>& yhat);

/// Nash-Sutcliffe efficiency: 1 - SSR / observed variance sum. Throws
/// DataError when the observed values are all equal.
double nse(const std::vector<double>& y, const std::vector<double>& yhat);

struct ParameterMetrics {
    std::string name;
    double mse = 0.0;
    double mae = 0.0;
    double nse = 0.0;
};

/// Per-parameter and overall scores; the overall NSE is computed on the
/// concatenation of all per-parameter series.
struct MetricReport {
    std::vector<ParameterMetrics> per_parameter;
    double overall_mse = 0.0;
    double overall_mae = 0.0;
    double overall_nse = 0.0;
    std::size_t sample_count = 0;
};

/// observed[c] and simulated[c] are the per-parameter series.
MetricReport metric_report(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& observed,
                           const std::vector<std::vector<double>>& simulated);

enum class FitVerdict { GoodFit, OverfitRisk, UnderfitRisk };

std::string to_string(FitVerdict verdict);

/// Compares best-epoch losses: val/train above the ratio flags overfit
/// risk, val below train flags underfit risk.
FitVerdict fit_diagnosis(double best_train_loss, double best_val_loss, double ratio_threshold = 1.5);

} // namespace amdcast
