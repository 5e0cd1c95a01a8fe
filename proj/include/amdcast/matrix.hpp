#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace amdcast {

/// Dense row-major matrix of doubles. The payload constructor rejects
/// NaN/Inf entries; a default-constructed or sized matrix is all zeros.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    /// n x 1 column vector.
    static Matrix column(std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    /// Contents of row r as a plain vector.
    std::vector<double> row(std::size_t r) const;

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class ActivationKind { Sigmoid, Tanh, Relu, Identity };

/// Standard product. Throws DimensionError unless a.cols == b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

/// Elementwise activation.
Matrix activate(ActivationKind kind, const Matrix& v);

/// Elementwise derivative of the activation, evaluated at the
/// pre-activation v. Relu'(0) is defined as 0.
Matrix activate_grad(ActivationKind kind, const Matrix& v);

double sigmoid(double x);

} // namespace amdcast
