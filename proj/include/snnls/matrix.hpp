#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace snnls {

// Thrown on shape mismatches, negative entries, malformed inputs. CLI maps it
// to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown on NaN mid-run, non-convergent quadrature, singular subproblems.
// CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix of doubles. Row-major layout and sequential
// reduction order are part of the determinism contract: repeated runs on the
// same machine produce bit-identical results.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0)
            throw ValidationError("Matrix: negative dimensions " + shape_str(rows, cols));
    }
    Matrix(int rows, int cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows < 0 || cols < 0 || data_.size() != static_cast<size_t>(rows) * cols)
            throw ValidationError("Matrix: data size " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_str(rows, cols));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row_ptr(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const double* row_ptr(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    std::string shape() const { return shape_str(rows_, cols_); }

    static std::string shape_str(int r, int c) {
        return std::to_string(r) + "x" + std::to_string(c);
    }

private:
    int rows_, cols_;
    std::vector<double> data_;
};

// Validated wrapper: every entry finite and >= 0. Construction throws
// ValidationError naming the offending coordinate.
class NonNegMatrix {
public:
    NonNegMatrix() = default;
    explicit NonNegMatrix(Matrix m);

    int rows() const { return m_.rows(); }
    int cols() const { return m_.cols(); }
    double operator()(int i, int j) const { return m_(i, j); }
    const Matrix& mat() const { return m_; }
    Matrix take() && { return std::move(m_); }

private:
    Matrix m_;
};

// Transpose (deterministic copy).
Matrix transpose(const Matrix& a);

}  // namespace snnls
