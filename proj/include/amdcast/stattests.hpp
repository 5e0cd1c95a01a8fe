#pragma once

#include "amdcast/matrix.hpp"

#include <cstddef>
#include <vector>

namespace amdcast {

struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    double residual_variance = 0.0;
    std::size_t degrees_of_freedom = 0;
    std::vector<double> residuals;
    double ssr = 0.0;
};

/// Least squares via Householder QR. Throws NumericError (rank deficient)
/// when a pivot of the triangular factor falls below 1e-10 relative to the
/// largest pivot, and DataError when rows <= cols.
OlsFit ols_fit(const Matrix& design, const std::vector<double>& response);

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t lags_used = 0;
    bool stationary_at_5pct = false;
};

/// Sentinel for automatic lag selection (Schwert bound, then AIC).
inline constexpr std::size_t kAdfAutoLag = static_cast<std::size_t>(-1);

/// Augmented Dickey-Fuller unit-root test with a constant term. Regresses
/// dy_t on [1, y_{t-1}, dy_{t-1}..dy_{t-p}]; the statistic is the t-ratio
/// on the lagged level and the p-value comes from the MacKinnon (1994)
/// response surface for the constant-only case, clamped to [0.001, 0.999]
/// outside the tabulated range. An explicit `lag` uses exactly that many
/// difference lags.
AdfResult adf_test(const std::vector<double>& series, std::size_t lag = kAdfAutoLag);

} // namespace amdcast
