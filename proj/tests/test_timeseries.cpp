#include "doctest.h"

#include "amdcast/errors.hpp"
#include "amdcast/io_util.hpp"
#include "amdcast/timeseries.hpp"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

using namespace amdcast;

namespace {

std::string tmp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "amdcast_ts_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

constexpr const char* kHeader = "date,pH,ORP,Conductivity,TDS,SO4,Fe,Mn";

// Fully observed frame with deterministic positive values, weekly cadence.
TimeSeriesFrame full_frame(std::size_t rows) {
    TimeSeriesFrame frame;
    frame.columns = parameter_names();
    frame.values.assign(frame.columns.size(), {});
    for (std::size_t r = 0; r < rows; ++r) {
        frame.dates.push_back(Date(2021, 2, 9).plus_days(static_cast<std::int64_t>(7 * r)));
        for (std::size_t c = 0; c < frame.columns.size(); ++c)
            frame.values[c].push_back(1.0 + 10.0 * static_cast<double>(c) +
                                      0.5 * static_cast<double>(r));
    }
    return frame;
}

} // namespace

TEST_CASE("load_csv parses, sorts by date and keeps missing cells as NaN") {
    const std::string path = tmp_file("basic.csv");
    write_file(path, std::string(kHeader) +
                         "\n2021-03-01,7.2,210,1500,900,450,3.1,1.6"
                         "\n2021-02-01,7.0,,1400,850,440,2.9,1.5\n");
    const TimeSeriesFrame frame = load_csv(path);
    REQUIRE(frame.row_count() == 2);
    CHECK(frame.dates[0] == Date(2021, 2, 1));  // sorted even though written second
    CHECK(frame.dates[1] == Date(2021, 3, 1));
    CHECK(frame.columns == parameter_names());
    CHECK(frame.values[0][0] == 7.0);
    CHECK(frame.values[0][1] == 7.2);
    CHECK(frame.is_missing(0, 1));
    CHECK_FALSE(frame.is_missing(1, 1));
    CHECK(frame.missing_count() == 1);
    CHECK(frame.column_index("Fe") == 5);
    CHECK_THROWS_AS(frame.column_index("xx"), DataError);
}

TEST_CASE("load_csv input guards") {
    CHECK_THROWS_AS(load_csv(tmp_file("does_not_exist.csv")), DataError);

    const std::string empty = tmp_file("empty.csv");
    write_file(empty, "");
    CHECK_THROWS_AS(load_csv(empty), DataError);

    const std::string bad_header = tmp_file("bad_header.csv");
    write_file(bad_header, "time,pH,ORP,Conductivity,TDS,SO4,Fe,Mn\n");
    CHECK_THROWS_AS(load_csv(bad_header), DataError);

    const std::string bad_col = tmp_file("bad_col.csv");
    write_file(bad_col, "date,pH,ORP,Conductivity,TDS,SO4,Fe,Zn\n");
    CHECK_THROWS_AS(load_csv(bad_col), DataError);

    const std::string short_row = tmp_file("short_row.csv");
    write_file(short_row, std::string(kHeader) + "\n2021-02-01,7.0,210\n");
    CHECK_THROWS_AS(load_csv(short_row), DataError);

    const std::string bad_cell = tmp_file("bad_cell.csv");
    write_file(bad_cell, std::string(kHeader) + "\n2021-02-01,7.0,oops,1400,850,440,2.9,1.5\n");
    CHECK_THROWS_AS(load_csv(bad_cell), DataError);

    const std::string dup = tmp_file("dup.csv");
    write_file(dup, std::string(kHeader) +
                        "\n2021-02-01,7.0,210,1400,850,440,2.9,1.5"
                        "\n2021-02-01,7.1,211,1410,860,445,3.0,1.6\n");
    CHECK_THROWS_AS(load_csv(dup), DataError);
}

TEST_CASE("write_csv round trip is byte stable") {
    const TimeSeriesFrame frame = full_frame(5);
    const std::string p1 = tmp_file("rt1.csv");
    const std::string p2 = tmp_file("rt2.csv");
    write_csv(frame, p1);
    const TimeSeriesFrame reloaded = load_csv(p1);
    write_csv(reloaded, p2);
    CHECK(read_file(p1) == read_file(p2));
    for (std::size_t c = 0; c < frame.column_count(); ++c)
        for (std::size_t r = 0; r < frame.row_count(); ++r)
            CHECK(reloaded.values[c][r] == frame.values[c][r]);
}

TEST_CASE("cyclic encoding wraps the annual cycle") {
    const std::vector<Date> dates = {Date(2021, 1, 1), Date(2021, 4, 2), Date(2021, 12, 31)};
    const Matrix enc = cyclic_encode(dates);
    REQUIRE(enc.rows() == 3);
    REQUIRE(enc.cols() == 2);
    CHECK(enc(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));  // Jan 1: theta = 0
    CHECK(enc(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(enc(r, 0) * enc(r, 0) + enc(r, 1) * enc(r, 1) ==
              doctest::Approx(1.0).epsilon(1e-12));
    // Apr 2 is day 92; check against the formula directly.
    const double theta = 2.0 * 3.141592653589793238462643383279 * 91.0 / 365.25;
    CHECK(enc(1, 0) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
    CHECK(enc(1, 1) == doctest::Approx(std::cos(theta)).epsilon(1e-12));
}

TEST_CASE("default transform assignment") {
    const auto kinds = default_transforms(parameter_names());
    REQUIRE(kinds.size() == 7);
    CHECK(kinds[0] == TransformKind::MinMax);        // pH
    CHECK(kinds[1] == TransformKind::MinMax);        // ORP
    for (std::size_t c = 2; c < 7; ++c) CHECK(kinds[c] == TransformKind::Log1pMinMax);
}

TEST_CASE("minmax scaler maps the observed range onto [0,1]") {
    TimeSeriesFrame frame = full_frame(3);
    frame.values[0] = {2.0, 4.0, 3.0};
    const ScalerParams scaler =
        fit_scaler(frame, std::vector<TransformKind>(7, TransformKind::MinMax));
    CHECK(scaler.apply_value(0, 2.0) == 0.0);
    CHECK(scaler.apply_value(0, 4.0) == 1.0);
    CHECK(scaler.apply_value(0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scaler.invert_value(0, 0.5) == doctest::Approx(3.0).epsilon(1e-12));

    const TimeSeriesFrame scaled = apply_scaler(scaler, frame);
    CHECK(scaled.values[0][1] == 1.0);
    const TimeSeriesFrame back = invert_scaler(scaler, scaled);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(back.values[0][r] == doctest::Approx(frame.values[0][r]).epsilon(1e-12));
}

TEST_CASE("log transform compresses before the minmax capture") {
    TimeSeriesFrame frame = full_frame(3);
    frame.values[2] = {0.0, 99.0, 9.0};  // log1p -> 0, ln(100), ln(10)
    const ScalerParams scaler = fit_scaler(frame, default_transforms(frame.columns));
    CHECK(scaler.apply_value(2, 0.0) == 0.0);
    CHECK(scaler.apply_value(2, 99.0) == 1.0);
    CHECK(scaler.apply_value(2, 9.0) ==
          doctest::Approx(std::log(10.0) / std::log(100.0)).epsilon(1e-12));
    CHECK(scaler.invert_value(2, scaler.apply_value(2, 9.0)) ==
          doctest::Approx(9.0).epsilon(1e-10));
}

TEST_CASE("scaler edge cases") {
    TimeSeriesFrame frame = full_frame(3);
    frame.values[0] = {5.5, 5.5, 5.5};  // constant column
    const ScalerParams scaler = fit_scaler(frame, default_transforms(frame.columns));
    CHECK(scaler.apply_value(0, 5.5) == 0.0);
    CHECK(scaler.invert_value(0, 0.0) == doctest::Approx(5.5).epsilon(1e-12));

    TimeSeriesFrame neg = full_frame(3);
    neg.values[3] = {-1.0, 2.0, 3.0};  // TDS is log-transformed
    CHECK_THROWS_AS(fit_scaler(neg, default_transforms(neg.columns)), DataError);

    CHECK_THROWS_AS(fit_scaler(frame, std::vector<TransformKind>(3, TransformKind::MinMax)),
                    DimensionError);
}

TEST_CASE("scaler skips missing cells") {
    TimeSeriesFrame frame = full_frame(4);
    frame.values[1][2] = std::nan("");
    const ScalerParams scaler = fit_scaler(frame, default_transforms(frame.columns));
    const TimeSeriesFrame scaled = apply_scaler(scaler, frame);
    CHECK(scaled.is_missing(2, 1));
    CHECK_FALSE(scaled.is_missing(0, 1));
}

TEST_CASE("window counts over an 83-row weekly table") {
    const TimeSeriesFrame frame = full_frame(83);
    const Matrix cov = cyclic_encode(frame.dates);
    CHECK(make_windows(frame, 7, cov).size() == 76);
    CHECK(make_windows(frame, 14, cov).size() == 69);
    CHECK(make_windows(frame, 28, cov).size() == 55);
    CHECK(make_windows(frame, 0, cov).size() == 83);
}

TEST_CASE("window samples carry the right slices") {
    const TimeSeriesFrame frame = full_frame(10);
    const Matrix cov = cyclic_encode(frame.dates);
    const WindowedDataset ds = make_windows(frame, 3, cov);
    REQUIRE(ds.size() == 7);
    CHECK(ds.window == 3);
    CHECK(ds.feature_count == 7);
    CHECK(ds.covariate_count == 2);

    const WindowSample& s0 = ds.samples[0];
    REQUIRE(s0.past.rows() == 3);
    REQUIRE(s0.past.cols() == 7);
    CHECK(s0.past(0, 0) == frame.values[0][0]);
    CHECK(s0.past(2, 6) == frame.values[6][2]);
    CHECK(s0.target[4] == frame.values[4][3]);  // target is row 3
    CHECK(s0.target_date == frame.dates[3]);
    CHECK(s0.target_cov[0] == cov(3, 0));
    CHECK(s0.target_cov[1] == cov(3, 1));

    const WindowSample& last = ds.samples.back();
    CHECK(last.target_date == frame.dates[9]);
}

TEST_CASE("make_windows guards") {
    TimeSeriesFrame frame = full_frame(10);
    const Matrix cov = cyclic_encode(frame.dates);
    CHECK_THROWS_AS(make_windows(frame, 10, cov), DataError);  // nothing left to target
    Matrix short_cov(4, 2);
    CHECK_THROWS_AS(make_windows(frame, 3, short_cov), DimensionError);
    frame.values[2][5] = std::nan("");
    CHECK_THROWS_AS(make_windows(frame, 3, cov), DataError);  // residual missing cell
}

TEST_CASE("chronological split uses floor arithmetic and keeps order") {
    const TimeSeriesFrame frame = full_frame(83);
    const Matrix cov = cyclic_encode(frame.dates);
    const WindowedDataset ds = make_windows(frame, 7, cov);  // 76 samples
    const auto [train, val] = chrono_split(ds, SplitSpec{0.7});
    CHECK(train.size() == 53);  // floor(0.7 * 76)
    CHECK(val.size() == 23);
    CHECK(train.samples.front().target_date == ds.samples.front().target_date);
    CHECK(val.samples.back().target_date == ds.samples.back().target_date);
    CHECK(train.samples.back().target_date < val.samples.front().target_date);

    CHECK_THROWS_AS(chrono_split(ds, SplitSpec{0.0}), ConfigError);
    CHECK_THROWS_AS(chrono_split(ds, SplitSpec{1.0}), ConfigError);
    CHECK_THROWS_AS(chrono_split(WindowedDataset{}, SplitSpec{0.5}), DataError);
}
