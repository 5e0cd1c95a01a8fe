#include "amdcast/timeseries.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace amdcast {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

const std::vector<std::string>& parameter_names() {
    static const std::vector<std::string> names = {"pH", "ORP", "Conductivity", "TDS",
                                                   "SO4", "Fe", "Mn"};
    return names;
}

std::size_t TimeSeriesFrame::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) return c;
    }
    throw DataError("no column named '" + name + "'");
}

bool TimeSeriesFrame::is_missing(std::size_t row, std::size_t col) const {
    return std::isnan(values[col][row]);
}

std::size_t TimeSeriesFrame::missing_count() const {
    std::size_t n = 0;
    for (const auto& col : values) {
        for (double x : col) {
            if (std::isnan(x)) ++n;
        }
    }
    return n;
}

std::vector<double> TimeSeriesFrame::row(std::size_t r) const {
    std::vector<double> out(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) out[c] = values[c][r];
    return out;
}

TimeSeriesFrame load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("file not found: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty file: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "date") {
        throw DataError("header of " + path + " must start with 'date'");
    }
    const auto& expected = parameter_names();
    if (header.size() != expected.size() + 1) {
        throw DataError("header of " + path + " must name the " +
                        std::to_string(expected.size()) + " parameter columns");
    }
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (header[c + 1] != expected[c]) {
            throw DataError("unexpected column '" + header[c + 1] + "' in " + path +
                            ", expected '" + expected[c] + "'");
        }
    }

    TimeSeriesFrame frame;
    frame.columns = expected;
    frame.values.resize(expected.size());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }
        frame.dates.push_back(Date::parse_iso(cells[0]));
        const std::size_t row = frame.dates.size() - 1;
        for (std::size_t c = 0; c < expected.size(); ++c) {
            const std::string& cell = cells[c + 1];
            if (cell.empty()) {
                frame.values[c].push_back(kNaN);
                continue;
            }
            std::size_t consumed = 0;
            double parsed = 0.0;
            try {
                parsed = std::stod(cell, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            if (consumed != cell.size() || std::isnan(parsed)) {
                throw DataError("parse error at row " + std::to_string(row) + ", column " +
                                expected[c] + ": non-numeric cell '" + cell + "'");
            }
            frame.values[c].push_back(parsed);
        }
    }

    // Re-sort ascending by date, rejecting duplicates.
    std::vector<std::size_t> order(frame.row_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frame.dates[a] < frame.dates[b]; });

    TimeSeriesFrame sorted;
    sorted.columns = frame.columns;
    sorted.values.resize(frame.columns.size());
    for (std::size_t i : order) {
        if (!sorted.dates.empty() && sorted.dates.back() == frame.dates[i]) {
            throw DataError("duplicate timestamp " + frame.dates[i].to_iso() + " in " + path);
        }
        sorted.dates.push_back(frame.dates[i]);
        for (std::size_t c = 0; c < frame.columns.size(); ++c) {
            sorted.values[c].push_back(frame.values[c][i]);
        }
    }
    return sorted;
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << "date";
    for (const auto& name : frame.columns) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < frame.row_count(); ++r) {
        out << frame.dates[r].to_iso();
        for (std::size_t c = 0; c < frame.column_count(); ++c) {
            out << ',';
            if (!frame.is_missing(r, c)) out << format_double(frame.values[c][r]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

Matrix cyclic_encode(const std::vector<Date>& dates) {
    Matrix out(dates.size(), 2);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double theta = kTwoPi * (dates[i].day_of_year() - 1) / 365.25;
        out(i, 0) = std::sin(theta);
        out(i, 1) = std::cos(theta);
    }
    return out;
}

double ScalerParams::apply_value(std::size_t col, double x) const {
    if (std::isnan(x)) return x;
    const ColumnScaler& s = scalers[col];
    double t = x;
    if (s.kind == TransformKind::Log1pMinMax) {
        if (x < 0.0) {
            throw DataError("negative value " + std::to_string(x) + " under log transform in column " +
                            columns[col]);
        }
        t = std::log1p(x);
    }
    const double range = s.max - s.min;
    if (range <= 0.0) return 0.0;
    return (t - s.min) / range;
}

double ScalerParams::invert_value(std::size_t col, double y) const {
    if (std::isnan(y)) return y;
    const ColumnScaler& s = scalers[col];
    const double range = s.max - s.min;
    double t = range <= 0.0 ? s.min : s.min + y * range;
    if (s.kind == TransformKind::Log1pMinMax) {
        t = std::expm1(t);
    }
    return t;
}

std::vector<TransformKind> default_transforms(const std::vector<std::string>& columns) {
    std::vector<TransformKind> kinds;
    kinds.reserve(columns.size());
    for (const auto& name : columns) {
        const bool raw = name == "pH" || name == "ORP";
        kinds.push_back(raw ? TransformKind::MinMax : TransformKind::Log1pMinMax);
    }
    return kinds;
}

ScalerParams fit_scaler(const TimeSeriesFrame& frame, const std::vector<TransformKind>& kinds) {
    if (kinds.size() != frame.column_count()) {
        throw DimensionError("fit_scaler: " + std::to_string(kinds.size()) + " transforms for " +
                             std::to_string(frame.column_count()) + " columns");
    }
    ScalerParams params;
    params.columns = frame.columns;
    params.scalers.resize(frame.column_count());
    for (std::size_t c = 0; c < frame.column_count(); ++c) {
        ColumnScaler& s = params.scalers[c];
        s.kind = kinds[c];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double x : frame.values[c]) {
            if (std::isnan(x)) continue;
            double t = x;
            if (s.kind == TransformKind::Log1pMinMax) {
                if (x < 0.0) {
                    throw DataError("negative value " + std::to_string(x) +
                                    " under log transform in column " + frame.columns[c]);
                }
                t = std::log1p(x);
            }
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        if (!(lo <= hi)) {
            throw DataError("column " + frame.columns[c] + " has no observed values to scale");
        }
        s.min = lo;
        s.max = hi;
    }
    return params;
}

namespace {

TimeSeriesFrame map_frame(const ScalerParams& params, const TimeSeriesFrame& frame, bool forward) {
    if (params.columns != frame.columns) {
        throw DimensionError("scaler columns do not match frame columns");
    }
    TimeSeriesFrame out = frame;
    for (std::size_t c = 0; c < frame.column_count(); ++c) {
        for (double& x : out.values[c]) {
            x = forward ? params.apply_value(c, x) : params.invert_value(c, x);
        }
    }
    return out;
}

} // namespace

TimeSeriesFrame apply_scaler(const ScalerParams& params, const TimeSeriesFrame& frame) {
    return map_frame(params, frame, true);
}

TimeSeriesFrame invert_scaler(const ScalerParams& params, const TimeSeriesFrame& frame) {
    return map_frame(params, frame, false);
}

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window,
                             const Matrix& covariates) {
    if (frame.row_count() < window + 1) {
        throw DataError("too short: " + std::to_string(frame.row_count()) +
                        " rows cannot form windows of " + std::to_string(window));
    }
    if (covariates.rows() != frame.row_count()) {
        throw DimensionError("covariates must have one row per frame row");
    }
    if (frame.missing_count() > 0) {
        throw DataError("frame still has missing cells; interpolate before windowing");
    }

    WindowedDataset ds;
    ds.window = window;
    ds.feature_count = frame.column_count();
    ds.covariate_count = covariates.cols();
    ds.feature_names = frame.columns;

    const std::size_t n_samples = frame.row_count() - window;
    ds.samples.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        WindowSample s;
        s.past = Matrix(window, frame.column_count());
        for (std::size_t t = 0; t < window; ++t) {
            for (std::size_t c = 0; c < frame.column_count(); ++c) {
                s.past(t, c) = frame.values[c][k + t];
            }
        }
        s.target_cov = covariates.row(k + window);
        s.target = frame.row(k + window);
        s.target_date = frame.dates[k + window];
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

std::pair<WindowedDataset, WindowedDataset> chrono_split(const WindowedDataset& dataset,
                                                         const SplitSpec& spec) {
    if (dataset.samples.empty()) {
        throw DataError("cannot split an empty dataset");
    }
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie strictly inside (0, 1)");
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(dataset.size())));

    WindowedDataset train = dataset;
    WindowedDataset val = dataset;
    train.samples.assign(dataset.samples.begin(),
                         dataset.samples.begin() + static_cast<std::ptrdiff_t>(n_train));
    val.samples.assign(dataset.samples.begin() + static_cast<std::ptrdiff_t>(n_train),
                       dataset.samples.end());
    return {std::move(train), std::move(val)};
}

} // namespace amdcast
