#pragma once

#include "amdcast/dates.hpp"
#include "amdcast/matrix.hpp"

#include <string>
#include <utility>
#include <vector>

namespace amdcast {

/// Canonical column order of the monitored parameters.
const std::vector<std::string>& parameter_names();

/// Timestamped table of monitored parameters, one row per date, stored
/// column-major. Missing cells are NaN.
struct TimeSeriesFrame {
    std::vector<Date> dates;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values; // values[c][r]

    std::size_t row_count() const { return dates.size(); }
    std::size_t column_count() const { return columns.size(); }

    /// Index of a named column; throws DataError if absent.
    std::size_t column_index(const std::string& name) const;

    bool is_missing(std::size_t row, std::size_t col) const;
    std::size_t missing_count() const;

    /// Row as a (possibly NaN-bearing) vector across all columns.
    std::vector<double> row(std::size_t r) const;
};

/// Reads the weekly CSV (header `date,pH,ORP,Conductivity,TDS,SO4,Fe,Mn`,
/// ISO dates, empty cell = missing) and returns the frame sorted by date.
TimeSeriesFrame load_csv(const std::string& path);

/// Writes a frame in the same CSV layout (round-trip safe formatting).
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

/// Annual-cycle time encoding: theta = 2*pi*(day_of_year - 1)/365.25,
/// one (sin theta, cos theta) row per timestamp.
Matrix cyclic_encode(const std::vector<Date>& dates);

enum class TransformKind { MinMax, Log1pMinMax };

struct ColumnScaler {
    TransformKind kind = TransformKind::MinMax;
    double min = 0.0;
    double max = 0.0;
};

/// Per-column scaling parameters. Log1pMinMax columns are log(1+x)
/// transformed before the min/max capture; a constant column maps to 0.
struct ScalerParams {
    std::vector<std::string> columns;
    std::vector<ColumnScaler> scalers;

    double apply_value(std::size_t col, double x) const;
    double invert_value(std::size_t col, double y) const;
};

/// Default transform assignment: pH and ORP MinMax, the five
/// concentration-like columns Log1pMinMax.
std::vector<TransformKind> default_transforms(const std::vector<std::string>& columns);

ScalerParams fit_scaler(const TimeSeriesFrame& frame, const std::vector<TransformKind>& kinds);
TimeSeriesFrame apply_scaler(const ScalerParams& params, const TimeSeriesFrame& frame);
TimeSeriesFrame invert_scaler(const ScalerParams& params, const TimeSeriesFrame& frame);

/// One supervised sample: `window` chronological feature rows, the time
/// covariates of the target step, and the target feature row.
struct WindowSample {
    Matrix past;                     // window x features
    std::vector<double> target_cov;  // covariates at the target date
    std::vector<double> target;      // features at the target date
    Date target_date;
};

struct WindowedDataset {
    std::size_t window = 0;
    std::size_t feature_count = 0;
    std::size_t covariate_count = 0;
    std::vector<std::string> feature_names;
    std::vector<WindowSample> samples;

    std::size_t size() const { return samples.size(); }
};

/// Builds rows-minus-window supervised samples; sample k covers input rows
/// [k, k+window) and targets row k+window. Residual missing cells are
/// rejected. `covariates` has one row per frame row.
WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window,
                             const Matrix& covariates);

/// Chronological train fraction, strictly inside (0, 1).
struct SplitSpec {
    double train_fraction = 0.7;
};

/// First floor(fraction*n) samples to train, remainder to validation,
/// order preserved.
std::pair<WindowedDataset, WindowedDataset> chrono_split(const WindowedDataset& dataset,
                                                         const SplitSpec& spec);

} // namespace amdcast
