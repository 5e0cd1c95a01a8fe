#include "amdcast/stattests.hpp"

#include "amdcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace amdcast {

namespace {

constexpr double kPivotTolerance = 1e-10;

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

// MacKinnon (1994) response-surface coefficients, constant-only case, one
// I(1) variable. Small-p regime applies at tau <= -1.61, large-p up to 2.74.
constexpr double kTauStar = -1.61;
constexpr double kTauMin = -18.83;
constexpr double kTauMax = 2.74;
constexpr double kSmallP[3] = {2.1659, 1.4412, 0.038269};
constexpr double kLargeP[4] = {1.7339, 0.93202, -0.12745, -0.010368};

double mackinnon_p(double tau) {
    if (tau > kTauMax) return 0.999;
    if (tau < kTauMin) return 0.001;
    double poly;
    if (tau <= kTauStar) {
        poly = kSmallP[0] + tau * (kSmallP[1] + tau * kSmallP[2]);
    } else {
        poly = kLargeP[0] + tau * (kLargeP[1] + tau * (kLargeP[2] + tau * kLargeP[3]));
    }
    return normal_cdf(poly);
}

struct AdfRegression {
    double statistic;
    double ssr;
    std::size_t nobs;
    std::size_t n_regressors;
};

// One ADF regression with `lags` difference lags, using observations
// dy[start_t .. n-2]. start_t >= lags so every lag is in range.
AdfRegression adf_regress(const std::vector<double>& y, std::size_t lags, std::size_t start_t) {
    const std::size_t n = y.size();
    const std::size_t nobs = (n - 1) - start_t;
    const std::size_t k = lags + 2;

    Matrix design(nobs, k);
    std::vector<double> response(nobs);
    for (std::size_t i = 0; i < nobs; ++i) {
        const std::size_t t = start_t + i;
        response[i] = y[t + 1] - y[t];
        design(i, 0) = 1.0;
        design(i, 1) = y[t];
        for (std::size_t j = 1; j <= lags; ++j) {
            design(i, 1 + j) = y[t - j + 1] - y[t - j];
        }
    }

    OlsFit fit = ols_fit(design, response);
    AdfRegression out;
    out.statistic = fit.coefficients[1] / fit.standard_errors[1];
    out.ssr = fit.ssr;
    out.nobs = nobs;
    out.n_regressors = k;
    return out;
}

} // namespace

OlsFit ols_fit(const Matrix& design, const std::vector<double>& response) {
    const std::size_t n = design.rows();
    const std::size_t k = design.cols();
    if (response.size() != n) {
        throw DimensionError("ols_fit: response length " + std::to_string(response.size()) +
                             " does not match " + std::to_string(n) + " design rows");
    }
    if (n <= k) {
        throw DataError("ols_fit: need more rows than regressors");
    }

    // Householder QR of [design | response] worked in place.
    Matrix a = design;
    std::vector<double> qty = response;
    std::vector<double> diag(k, 0.0);

    for (std::size_t col = 0; col < k; ++col) {
        double norm = 0.0;
        for (std::size_t i = col; i < n; ++i) norm += a(i, col) * a(i, col);
        norm = std::sqrt(norm);
        // Reflect toward -sign(x0)*||x|| so the scaled pivot 1 + |x0|/||x||
        // never cancels; the resulting R diagonal is -norm.
        if (a(col, col) < 0.0) norm = -norm;
        diag[col] = -norm;
        if (norm == 0.0) continue;

        for (std::size_t i = col; i < n; ++i) a(i, col) /= norm;
        a(col, col) += 1.0;

        for (std::size_t j = col + 1; j < k; ++j) {
            double s = 0.0;
            for (std::size_t i = col; i < n; ++i) s += a(i, col) * a(i, j);
            s = -s / a(col, col);
            for (std::size_t i = col; i < n; ++i) a(i, j) += s * a(i, col);
        }
        double s = 0.0;
        for (std::size_t i = col; i < n; ++i) s += a(i, col) * qty[i];
        s = -s / a(col, col);
        for (std::size_t i = col; i < n; ++i) qty[i] += s * a(i, col);
    }

    double max_pivot = 0.0;
    for (double d : diag) max_pivot = std::max(max_pivot, std::abs(d));
    for (double d : diag) {
        if (std::abs(d) <= kPivotTolerance * max_pivot) {
            throw NumericError("ols_fit: rank-deficient design (singular normal matrix)");
        }
    }

    // Back substitution: R beta = Q'y. R's strict upper triangle lives in
    // a's upper triangle, its diagonal in `diag`.
    OlsFit fit;
    fit.coefficients.assign(k, 0.0);
    for (std::size_t ri = k; ri-- > 0;) {
        double s = qty[ri];
        for (std::size_t j = ri + 1; j < k; ++j) s -= a(ri, j) * fit.coefficients[j];
        fit.coefficients[ri] = s / diag[ri];
    }

    fit.residuals.assign(n, 0.0);
    fit.ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < k; ++j) pred += design(i, j) * fit.coefficients[j];
        fit.residuals[i] = response[i] - pred;
        fit.ssr += fit.residuals[i] * fit.residuals[i];
    }

    fit.degrees_of_freedom = n - k;
    fit.residual_variance = fit.ssr / static_cast<double>(fit.degrees_of_freedom);

    // (X'X)^-1 = R^-1 R^-T; its diagonal entries are squared row norms of
    // R^-1, solved column by column.
    Matrix rinv(k, k);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        for (std::size_t ri = k; ri-- > 0;) {
            double s = e[ri];
            for (std::size_t j = ri + 1; j < k; ++j) s -= a(ri, j) * rinv(j, col);
            rinv(ri, col) = ri <= col ? s / diag[ri] : 0.0;
        }
    }
    fit.standard_errors.assign(k, 0.0);
    for (std::size_t ri = 0; ri < k; ++ri) {
        double row_norm_sq = 0.0;
        for (std::size_t j = ri; j < k; ++j) row_norm_sq += rinv(ri, j) * rinv(ri, j);
        fit.standard_errors[ri] = std::sqrt(fit.residual_variance * row_norm_sq);
    }
    return fit;
}

AdfResult adf_test(const std::vector<double>& series, std::size_t lag) {
    const std::size_t n = series.size();
    if (n < 4) {
        throw DataError("adf_test: series too short");
    }

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : series) var += (x - mean) * (x - mean);
    if (var == 0.0) {
        throw DataError("adf_test: constant series has no unit-root structure");
    }

    constexpr std::size_t kMinObs = 20;
    std::size_t lags_used;
    AdfRegression reg;

    if (lag == kAdfAutoLag) {
        // Schwert bound, then AIC over a common sample trimmed at the bound.
        std::size_t p_max = static_cast<std::size_t>(
            std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
        if (n - 1 < kMinObs) {
            throw DataError("adf_test: fewer than 20 usable observations");
        }
        p_max = std::min(p_max, (n - 1) - kMinObs);
        p_max = std::min(p_max, n / 2 - 2);

        double best_aic = std::numeric_limits<double>::infinity();
        std::size_t best_p = 0;
        for (std::size_t p = 0; p <= p_max; ++p) {
            AdfRegression r = adf_regress(series, p, p_max);
            const double ssr = std::max(r.ssr, 1e-300);
            const double nobs = static_cast<double>(r.nobs);
            const double aic = nobs * std::log(ssr / nobs) + 2.0 * static_cast<double>(r.n_regressors);
            if (aic < best_aic) {
                best_aic = aic;
                best_p = p;
            }
        }
        lags_used = best_p;
        reg = adf_regress(series, best_p, best_p);
    } else {
        lags_used = lag;
        if (n - 1 < lag + kMinObs) {
            throw DataError("adf_test: fewer than 20 observations after lag trimming");
        }
        reg = adf_regress(series, lag, lag);
    }

    AdfResult result;
    result.statistic = reg.statistic;
    result.p_value = mackinnon_p(reg.statistic);
    result.lags_used = lags_used;
    result.stationary_at_5pct = result.p_value < 0.05;
    return result;
}

} // namespace amdcast
