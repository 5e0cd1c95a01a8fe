#include "amdcast/matrix.hpp"

#include "amdcast/errors.hpp"

#include <cmath>
#include <string>

namespace amdcast {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix payload has " + std::to_string(data_.size()) +
                             " entries, expected " + std::to_string(rows_ * cols_));
    }
    if (!all_finite()) {
        throw NumericError("matrix payload contains NaN or Inf");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimensionError("ragged row in matrix literal");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::column(std::vector<double> values) {
    std::size_t n = values.size();
    return Matrix(n, 1, std::move(values));
}

std::vector<double> Matrix::row(std::size_t r) const {
    return std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                               data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

bool Matrix::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    if (!out.all_finite()) {
        throw NumericError("matmul produced a non-finite result");
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(j, i) = m(i, j);
        }
    }
    return out;
}

double sigmoid(double x) {
    // Split on sign so exp never overflows.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix activate(ActivationKind kind, const Matrix& v) {
    Matrix out(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v.data()[i];
        double y = x;
        switch (kind) {
            case ActivationKind::Sigmoid: y = sigmoid(x); break;
            case ActivationKind::Tanh: y = std::tanh(x); break;
            case ActivationKind::Relu: y = x > 0.0 ? x : 0.0; break;
            case ActivationKind::Identity: break;
        }
        out.data()[i] = y;
    }
    return out;
}

Matrix activate_grad(ActivationKind kind, const Matrix& v) {
    Matrix out(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v.data()[i];
        double g = 1.0;
        switch (kind) {
            case ActivationKind::Sigmoid: {
                const double s = sigmoid(x);
                g = s * (1.0 - s);
                break;
            }
            case ActivationKind::Tanh: {
                const double t = std::tanh(x);
                g = 1.0 - t * t;
                break;
            }
            case ActivationKind::Relu:
                g = x > 0.0 ? 1.0 : 0.0;
                break;
            case ActivationKind::Identity:
                break;
        }
        out.data()[i] = g;
    }
    return out;
}

} // namespace amdcast
