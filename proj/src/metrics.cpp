#include "amdcast/metrics.hpp"

#include "amdcast/errors.hpp"

#include <cmath>

namespace amdcast {

namespace {

void check_pair(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size()) {
        throw DimensionError("metric inputs have different lengths");
    }
    if (y.empty()) {
        throw DataError("metric inputs are empty");
    }
}

} // namespace

double mse(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_pair(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_pair(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += std::abs(y[i] - yhat[i]);
    }
    return s / static_cast<double>(y.size());
}

double nse(const std::vector<double>& y, const std::vector<double>& yhat) {
    check_pair(y, yhat);
    if (y.size() < 2) {
        throw DataError("nse needs at least 2 observations");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - yhat[i];
        const double d = y[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        throw DataError("nse undefined: observed series has zero variance");
    }
    return 1.0 - ss_res / ss_tot;
}

MetricReport metric_report(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& observed,
                           const std::vector<std::vector<double>>& simulated) {
    if (names.size() != observed.size() || names.size() != simulated.size()) {
        throw DimensionError("metric_report: mismatched series counts");
    }
    MetricReport report;
    std::vector<double> all_obs;
    std::vector<double> all_sim;
    for (std::size_t c = 0; c < names.size(); ++c) {
        ParameterMetrics pm;
        pm.name = names[c];
        pm.mse = mse(observed[c], simulated[c]);
        pm.mae = mae(observed[c], simulated[c]);
        pm.nse = nse(observed[c], simulated[c]);
        report.per_parameter.push_back(pm);
        all_obs.insert(all_obs.end(), observed[c].begin(), observed[c].end());
        all_sim.insert(all_sim.end(), simulated[c].begin(), simulated[c].end());
    }
    report.overall_mse = mse(all_obs, all_sim);
    report.overall_mae = mae(all_obs, all_sim);
    report.overall_nse = nse(all_obs, all_sim);
    report.sample_count = observed.empty() ? 0 : observed[0].size();
    return report;
}

std::string to_string(FitVerdict verdict) {
    switch (verdict) {
        case FitVerdict::GoodFit: return "good fit";
        case FitVerdict::OverfitRisk: return "overfit risk";
        case FitVerdict::UnderfitRisk: return "underfit risk";
    }
    return "unknown";
}

FitVerdict fit_diagnosis(double best_train_loss, double best_val_loss, double ratio_threshold) {
    if (best_val_loss < best_train_loss) {
        return FitVerdict::UnderfitRisk;
    }
    if (best_val_loss > best_train_loss * ratio_threshold) {
        return FitVerdict::OverfitRisk;
    }
    return FitVerdict::GoodFit;
}

} // namespace amdcast
