#include "amdcast/forecast.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/io_util.hpp"
#include "amdcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

namespace amdcast {

namespace {

/// Days of history drawn into each plot before the forecast starts.
constexpr std::size_t kPlotTail = 120;

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct PlotRange {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isnan(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        const double span = hi - lo;
        const double margin = span > 0.0 ? 0.05 * span : std::max(0.5, std::abs(hi) * 0.05);
        lo -= margin;
        hi += margin;
    }
};

} // namespace

ForecastResult rollout(const ModelSpec& spec, const ModelParams& params,
                       const ScalerParams& scaler, const Matrix& recent_history,
                       const std::vector<Date>& future_dates) {
    if (recent_history.rows() != spec.window) {
        throw DimensionError("rollout: history has " + std::to_string(recent_history.rows()) +
                             " rows, model window is " + std::to_string(spec.window));
    }
    if (spec.window > 0 && recent_history.cols() != spec.feature_count) {
        throw DimensionError("rollout: history feature width mismatch");
    }
    if (scaler.columns.size() != spec.output_count) {
        throw DimensionError("rollout: scaler covers " + std::to_string(scaler.columns.size()) +
                             " columns, model emits " + std::to_string(spec.output_count));
    }
    for (std::size_t h = 1; h < future_dates.size(); ++h) {
        if (future_dates[h].epoch_days() != future_dates[h - 1].epoch_days() + 1) {
            throw DataError("rollout: horizon dates must be contiguous daily");
        }
    }

    const std::size_t horizon = future_dates.size();
    ForecastResult result;
    result.spec = spec;
    result.dates = future_dates;
    result.predictions = Matrix(horizon, spec.output_count);
    result.scaled_predictions = Matrix(horizon, spec.output_count);
    if (horizon == 0) {
        return result;
    }

    const Matrix covariates = cyclic_encode(future_dates);
    Matrix window = recent_history;
    for (std::size_t h = 0; h < horizon; ++h) {
        WindowSample sample;
        sample.past = window;
        sample.target_cov = covariates.row(h);
        sample.target_date = future_dates[h];
        const std::vector<double> scaled = model_forward(spec, params, sample);
        for (std::size_t c = 0; c < spec.output_count; ++c) {
            result.scaled_predictions(h, c) = scaled[c];
            result.predictions(h, c) = scaler.invert_value(c, scaled[c]);
        }
        if (spec.window > 0) {
            // Slide: drop the oldest row, append the prediction.
            for (std::size_t t = 0; t + 1 < window.rows(); ++t) {
                for (std::size_t c = 0; c < window.cols(); ++c) {
                    window(t, c) = window(t + 1, c);
                }
            }
            for (std::size_t c = 0; c < window.cols(); ++c) {
                window(window.rows() - 1, c) = scaled[c];
            }
        }
    }
    return result;
}

SparseEvaluation evaluate_sparse(const ForecastResult& forecast,
                                 const TimeSeriesFrame& measured) {
    if (measured.columns.size() != forecast.predictions.cols()) {
        throw DimensionError("evaluate_sparse: measured frame has " +
                             std::to_string(measured.columns.size()) +
                             " columns, forecast has " +
                             std::to_string(forecast.predictions.cols()));
    }

    std::vector<std::size_t> forecast_rows;
    std::vector<std::size_t> measured_rows;
    std::size_t cursor = 0;
    for (std::size_t m = 0; m < measured.row_count(); ++m) {
        while (cursor < forecast.dates.size() && forecast.dates[cursor] < measured.dates[m]) {
            ++cursor;
        }
        if (cursor < forecast.dates.size() && forecast.dates[cursor] == measured.dates[m]) {
            forecast_rows.push_back(cursor);
            measured_rows.push_back(m);
        }
    }
    if (forecast_rows.empty()) {
        throw DataError("evaluate_sparse: no measured date falls inside the forecast horizon");
    }

    SparseEvaluation eval;
    for (std::size_t k : forecast_rows) {
        eval.matched_dates.push_back(forecast.dates[k]);
    }
    for (std::size_t c = 0; c < measured.columns.size(); ++c) {
        std::vector<double> y, yhat;
        for (std::size_t k = 0; k < measured_rows.size(); ++k) {
            if (measured.is_missing(measured_rows[k], c)) continue;
            y.push_back(measured.values[c][measured_rows[k]]);
            yhat.push_back(forecast.predictions(forecast_rows[k], c));
        }
        if (y.empty()) {
            throw DataError("evaluate_sparse: column " + measured.columns[c] +
                            " has no measured values inside the horizon");
        }
        eval.per_parameter.push_back({measured.columns[c], mse(y, yhat), mae(y, yhat)});
    }
    return eval;
}

void emit_report(const ForecastResult& forecast, const TimeSeriesFrame& history,
                 const SparseEvaluation* evaluation, const TimeSeriesFrame* measured,
                 const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    const std::filesystem::path dir(out_dir);

    TimeSeriesFrame forecast_frame;
    forecast_frame.columns = history.columns;
    forecast_frame.dates = forecast.dates;
    forecast_frame.values.assign(history.columns.size(),
                                 std::vector<double>(forecast.dates.size(), 0.0));
    for (std::size_t c = 0; c < forecast.predictions.cols(); ++c) {
        for (std::size_t r = 0; r < forecast.predictions.rows(); ++r) {
            forecast_frame.values[c][r] = forecast.predictions(r, c);
        }
    }
    write_csv(forecast_frame, (dir / "forecast.csv").string());

    {
        std::string table = "parameter,mse,mae\n";
        if (evaluation != nullptr) {
            for (const SparseParameterError& row : evaluation->per_parameter) {
                table += row.name + "," + format_double(row.mse) + "," + format_double(row.mae) +
                         "\n";
            }
        }
        write_file((dir / "metrics.csv").string(), table);
    }

    if (forecast.dates.empty()) {
        return;
    }

    const std::size_t tail_start =
        history.row_count() > kPlotTail ? history.row_count() - kPlotTail : 0;
    const double t0 = static_cast<double>(history.dates[tail_start].epoch_days());
    const double t1 = static_cast<double>(forecast.dates.back().epoch_days());
    const double tspan = std::max(1.0, t1 - t0);
    auto x_at = [&](const Date& d) {
        return 40.0 + 750.0 * (static_cast<double>(d.epoch_days()) - t0) / tspan;
    };

    for (std::size_t c = 0; c < forecast_frame.columns.size(); ++c) {
        PlotRange range;
        for (std::size_t r = tail_start; r < history.row_count(); ++r) {
            range.include(history.values[c][r]);
        }
        for (std::size_t r = 0; r < forecast.dates.size(); ++r) {
            range.include(forecast.predictions(r, c));
        }
        if (measured != nullptr) {
            for (double v : measured->values[c]) range.include(v);
        }
        range.pad();
        auto y_at = [&](double v) {
            return 280.0 - 260.0 * (v - range.lo) / (range.hi - range.lo);
        };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 300\">\n";
        svg << "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"300\" fill=\"white\"/>\n";
        svg << "  <line x1=\"40\" y1=\"280\" x2=\"790\" y2=\"280\" stroke=\"#444\"/>\n";
        svg << "  <line x1=\"40\" y1=\"20\" x2=\"40\" y2=\"280\" stroke=\"#444\"/>\n";
        svg << "  <text x=\"45\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">"
            << forecast_frame.columns[c] << " (" << history.dates[tail_start].to_iso() << " to "
            << forecast.dates.back().to_iso() << ")</text>\n";
        svg << "  <text x=\"4\" y=\"28\" font-family=\"sans-serif\" font-size=\"10\">"
            << fixed2(range.hi) << "</text>\n";
        svg << "  <text x=\"4\" y=\"278\" font-family=\"sans-serif\" font-size=\"10\">"
            << fixed2(range.lo) << "</text>\n";

        svg << "  <polyline fill=\"none\" stroke=\"#777\" stroke-width=\"1\" points=\"";
        for (std::size_t r = tail_start; r < history.row_count(); ++r) {
            if (std::isnan(history.values[c][r])) continue;
            svg << fixed2(x_at(history.dates[r])) << "," << fixed2(y_at(history.values[c][r]))
                << " ";
        }
        svg << "\"/>\n";

        svg << "  <polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
        for (std::size_t r = 0; r < forecast.dates.size(); ++r) {
            svg << fixed2(x_at(forecast.dates[r])) << ","
                << fixed2(y_at(forecast.predictions(r, c))) << " ";
        }
        svg << "\"/>\n";

        if (measured != nullptr) {
            for (std::size_t r = 0; r < measured->row_count(); ++r) {
                if (measured->is_missing(r, c)) continue;
                if (measured->dates[r] < history.dates[tail_start] ||
                    forecast.dates.back() < measured->dates[r]) {
                    continue;
                }
                svg << "  <circle cx=\"" << fixed2(x_at(measured->dates[r])) << "\" cy=\""
                    << fixed2(y_at(measured->values[c][r]))
                    << "\" r=\"3\" fill=\"#c23b22\"/>\n";
            }
        }
        svg << "</svg>\n";
        write_file((dir / (forecast_frame.columns[c] + ".svg")).string(), svg.str());
    }
}

} // namespace amdcast
