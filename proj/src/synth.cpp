#include "amdcast/synth.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/io_util.hpp"
#include "amdcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace amdcast {

namespace {

constexpr std::size_t kWeeklyRows = 83;
constexpr std::size_t kPlantedAnomalies = 6;
constexpr std::int64_t kSpanDays = 7 * (kWeeklyRows - 1);

struct SignalShape {
    double base;
    double trend;      // total drift over the full span
    double amplitude;  // annual cycle
    double phase;
    double noise;      // stddev
};

// Seasonal-dominant curves with a mild drift, in realistic ranges for
// each parameter.
const SignalShape kShapes[7] = {
    {7.45, -0.05, 0.32, 0.4, 0.012},    // pH
    {228.0, 6.0, 42.0, 2.1, 1.6},       // ORP
    {1300.0, 30.0, 240.0, 5.3, 8.0},    // Conductivity
    {850.0, 20.0, 160.0, 5.0, 5.5},     // TDS
    {425.0, 14.0, 110.0, 4.4, 3.5},     // SO4
    {2.90, 0.15, 1.20, 1.0, 0.040},     // Fe
    {1.55, 0.08, 0.65, 1.6, 0.025},     // Mn
};

// Offsets after the last weekly date where sparse measurements exist;
// nine points inside the 60-day horizon.
const std::int64_t kMeasuredOffsets[9] = {4, 11, 18, 25, 32, 39, 46, 53, 60};

double signal_value(std::size_t column, const Date& date, const Date& origin) {
    const SignalShape& s = kShapes[column];
    const double t = static_cast<double>(date.epoch_days() - origin.epoch_days());
    const double theta = 2.0 * 3.14159265358979323846 * (date.day_of_year() - 1) / 365.25;
    return s.base + s.trend * (t / static_cast<double>(kSpanDays)) +
           s.amplitude * std::sin(theta + s.phase);
}

// Pushes one row far outside the normal spread on every parameter.
void distort_row(std::vector<std::vector<double>>& values, std::size_t row) {
    values[0][row] -= 1.9;         // pH crash
    values[1][row] += 130.0;       // ORP spike
    values[2][row] *= 2.4;         // Conductivity
    values[3][row] *= 2.5;         // TDS
    values[4][row] *= 2.7;         // SO4
    values[5][row] *= 5.0;         // Fe
    values[6][row] *= 4.5;         // Mn
}

} // namespace

SynthFiles synthesize(const std::string& out_dir, std::uint64_t seed) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    const std::filesystem::path dir(out_dir);
    const Date origin(2021, 2, 9);

    TimeSeriesFrame weekly;
    weekly.columns = parameter_names();
    for (std::size_t r = 0; r < kWeeklyRows; ++r) {
        weekly.dates.push_back(origin.plus_days(static_cast<std::int64_t>(7 * r)));
    }
    weekly.values.assign(7, std::vector<double>(kWeeklyRows, 0.0));

    Rng noise_rng(mix_seed(seed, 10));
    for (std::size_t c = 0; c < 7; ++c) {
        for (std::size_t r = 0; r < kWeeklyRows; ++r) {
            weekly.values[c][r] = signal_value(c, weekly.dates[r], origin) +
                                  noise_rng.normal(0.0, kShapes[c].noise);
        }
    }

    // Plant anomalies away from the edges so every window size still sees
    // clean margins.
    Rng pick_rng(mix_seed(seed, 11));
    std::vector<std::size_t> planted;
    while (planted.size() < kPlantedAnomalies) {
        const auto row = static_cast<std::size_t>(5 + pick_rng.uniform_index(kWeeklyRows - 10));
        if (std::find(planted.begin(), planted.end(), row) == planted.end()) {
            planted.push_back(row);
        }
    }
    std::sort(planted.begin(), planted.end());
    for (std::size_t row : planted) {
        distort_row(weekly.values, row);
    }

    SynthFiles files;
    files.planted = planted;
    files.weekly = (dir / "weekly.csv").string();
    write_csv(weekly, files.weekly);

    {
        TimeSeriesFrame truth;
        truth.columns = weekly.columns;
        for (std::int64_t d = 0; d <= kSpanDays; ++d) {
            truth.dates.push_back(origin.plus_days(d));
        }
        truth.values.assign(7, std::vector<double>(truth.dates.size(), 0.0));
        for (std::size_t c = 0; c < 7; ++c) {
            for (std::size_t r = 0; r < truth.dates.size(); ++r) {
                truth.values[c][r] = signal_value(c, truth.dates[r], origin);
            }
        }
        files.truth_daily = (dir / "truth_daily.csv").string();
        write_csv(truth, files.truth_daily);
    }

    {
        TimeSeriesFrame measured;
        measured.columns = weekly.columns;
        const Date last = weekly.dates.back();
        for (std::int64_t offset : kMeasuredOffsets) {
            measured.dates.push_back(last.plus_days(offset));
        }
        measured.values.assign(7, std::vector<double>(measured.dates.size(), 0.0));
        Rng measured_rng(mix_seed(seed, 12));
        for (std::size_t c = 0; c < 7; ++c) {
            for (std::size_t r = 0; r < measured.dates.size(); ++r) {
                measured.values[c][r] = signal_value(c, measured.dates[r], origin) +
                                        measured_rng.normal(0.0, kShapes[c].noise);
            }
        }
        files.measured = (dir / "measured.csv").string();
        write_csv(measured, files.measured);
    }

    {
        std::string truth = "index,date\n";
        for (std::size_t row : planted) {
            truth += std::to_string(row) + "," + weekly.dates[row].to_iso() + "\n";
        }
        files.truth_anomalies = (dir / "truth_anomalies.csv").string();
        write_file(files.truth_anomalies, truth);
    }
    return files;
}

} // namespace amdcast
