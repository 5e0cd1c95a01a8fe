#include "doctest.h"

#include "amdcast/errors.hpp"
#include "amdcast/metrics.hpp"

#include <algorithm>
#include <vector>

using namespace amdcast;

TEST_CASE("mse and mae hand values") {
    const std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> yhat = {2.0, 4.0, 2.0};
    // errors -1, -2, 1
    CHECK(mse(y, yhat) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mae(y, yhat) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(mse(y, y) == 0.0);
    CHECK(mae(y, y) == 0.0);
}

TEST_CASE("mse and mae are permutation invariant over pairs") {
    const std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> yhat = {1.5, 1.0, 3.25, 6.0};
    const std::vector<double> yp = {4.0, 1.0, 3.0, 2.0};
    const std::vector<double> yhatp = {6.0, 1.5, 3.25, 1.0};
    CHECK(mse(y, yhat) == doctest::Approx(mse(yp, yhatp)).epsilon(1e-15));
    CHECK(mae(y, yhat) == doctest::Approx(mae(yp, yhatp)).epsilon(1e-15));
}

TEST_CASE("nse identities hold to 1e-12") {
    const std::vector<double> y = {3.0, 7.0, 1.0, 9.0, 4.5};
    CHECK(nse(y, y) == doctest::Approx(1.0).epsilon(1e-12));

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    const std::vector<double> ybar(y.size(), mean);
    CHECK(nse(y, ybar) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("nse hand value") {
    const std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> yhat = {1.0, 2.0, 4.0};
    // ssr = 1, ss_tot = 2 -> nse = 0.5
    CHECK(nse(y, yhat) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("metric guards") {
    const std::vector<double> y = {1.0, 2.0};
    CHECK_THROWS_AS(mse(y, {1.0}), DimensionError);
    CHECK_THROWS_AS(mae({}, {}), DataError);
    CHECK_THROWS_AS(nse({5.0, 5.0, 5.0}, {4.0, 5.0, 6.0}), DataError);  // zero variance
    CHECK_THROWS_AS(nse({1.0}, {1.0}), DataError);
}

TEST_CASE("metric_report aggregates over the concatenated series") {
    const std::vector<std::string> names = {"a", "b"};
    const std::vector<std::vector<double>> obs = {{1.0, 2.0, 3.0}, {10.0, 20.0, 30.0}};
    const std::vector<std::vector<double>> sim = {{1.5, 2.0, 2.5}, {11.0, 19.0, 33.0}};
    const MetricReport rep = metric_report(names, obs, sim);

    REQUIRE(rep.per_parameter.size() == 2);
    CHECK(rep.per_parameter[0].name == "a");
    CHECK(rep.per_parameter[0].mse == doctest::Approx(mse(obs[0], sim[0])).epsilon(1e-15));
    CHECK(rep.per_parameter[1].mae == doctest::Approx(mae(obs[1], sim[1])).epsilon(1e-15));
    CHECK(rep.sample_count == 3);  // rows per parameter, not pooled points

    std::vector<double> all_obs = obs[0];
    all_obs.insert(all_obs.end(), obs[1].begin(), obs[1].end());
    std::vector<double> all_sim = sim[0];
    all_sim.insert(all_sim.end(), sim[1].begin(), sim[1].end());
    CHECK(rep.overall_mse == doctest::Approx(mse(all_obs, all_sim)).epsilon(1e-15));
    CHECK(rep.overall_mae == doctest::Approx(mae(all_obs, all_sim)).epsilon(1e-15));
    CHECK(rep.overall_nse == doctest::Approx(nse(all_obs, all_sim)).epsilon(1e-12));

    CHECK_THROWS_AS(metric_report(names, obs, {sim[0]}), DimensionError);
}

TEST_CASE("fit diagnosis thresholds") {
    CHECK(fit_diagnosis(1.0, 1.2) == FitVerdict::GoodFit);
    CHECK(fit_diagnosis(1.0, 1.8) == FitVerdict::OverfitRisk);
    CHECK(fit_diagnosis(1.0, 0.9) == FitVerdict::UnderfitRisk);
    CHECK(fit_diagnosis(1.0, 1.5) == FitVerdict::GoodFit);   // boundary is inclusive
    CHECK(fit_diagnosis(0.0, 0.0) == FitVerdict::GoodFit);   // degenerate perfect fit
    CHECK(fit_diagnosis(2.0, 4.0, 2.5) == FitVerdict::GoodFit);  // custom ratio

    CHECK(to_string(FitVerdict::GoodFit) == "good fit");
    CHECK(to_string(FitVerdict::OverfitRisk) == "overfit risk");
    CHECK(to_string(FitVerdict::UnderfitRisk) == "underfit risk");
}
