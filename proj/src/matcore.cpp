#include "snnls/matcore.hpp"
#include "snnls/kernels.hpp"

#include <cmath>

namespace snnls {

NonNegMatrix::NonNegMatrix(Matrix m) : m_(std::move(m)) {
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = 0; j < m_.cols(); ++j) {
            const double v = m_(i, j);
            if (!std::isfinite(v))
                throw ValidationError("NonNegMatrix: non-finite entry at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            if (v < 0.0)
                throw ValidationError("NonNegMatrix: negative entry " + std::to_string(v) +
                                      " at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix gemm(const Matrix& a, const Matrix& b, bool transpose_a) {
    const int m = transpose_a ? a.cols() : a.rows();
    const int p = transpose_a ? a.rows() : a.cols();
    if (p != b.rows())
        throw ValidationError("gemm: inner dimensions disagree, " +
                              (transpose_a ? Matrix::shape_str(a.cols(), a.rows()) : a.shape()) +
                              " * " + b.shape());
    Matrix c(m, b.cols());
    if (transpose_a)
        kern::ops().gemm_tn(a.data(), b.data(), c.data(), m, p, b.cols());
    else
        kern::ops().gemm_nn(a.data(), b.data(), c.data(), m, p, b.cols());
    return c;
}

Matrix hadamard_quotient(const Matrix& num, const Matrix& den, double floor) {
    if (!num.same_shape(den))
        throw ValidationError("hadamard_quotient: shape mismatch " + num.shape() + " vs " +
                              den.shape());
    Matrix out(num.rows(), num.cols());
    kern::ops().hadamard_quotient(num.data(), den.data(), floor, out.data(),
                                  static_cast<int>(num.size()));
    return out;
}

double rel_frobenius_error(const Matrix& a, const Matrix& ref) {
    if (!a.same_shape(ref))
        throw ValidationError("rel_frobenius_error: shape mismatch " + a.shape() + " vs " +
                              ref.shape());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - ref.data()[i];
        num += d * d;
        den += ref.data()[i] * ref.data()[i];
    }
    if (den == 0.0)
        throw ValidationError("rel_frobenius_error: reference matrix is zero");
    return std::sqrt(num) / std::sqrt(den);
}

std::vector<double> normalize_columns(Matrix& m) {
    std::vector<double> scales(m.cols(), 0.0);
    for (int j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
        const double norm = std::sqrt(s);
        scales[j] = norm;
        if (norm > 0.0)
            for (int i = 0; i < m.rows(); ++i) m(i, j) /= norm;
    }
    return scales;
}

double frobenius_norm_sq(const Matrix& m) {
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
    return s;
}

double residual_sum_squares(const Matrix& x, const Matrix& w, const Matrix& h) {
    const Matrix wh = gemm(w, h);
    if (!x.same_shape(wh))
        throw ValidationError("residual_sum_squares: product shape " + wh.shape() +
                              " does not match data shape " + x.shape());
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = x.data()[i] - wh.data()[i];
        s += e * e;
    }
    return s;
}

double dot(const double* a, const double* b, int len) {
    double s = 0.0;
    for (int i = 0; i < len; ++i) s += a[i] * b[i];
    return s;
}

double sum_abs(const Matrix& m) {
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i) s += std::fabs(m.data()[i]);
    return s;
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
        const double v = std::fabs(m.data()[i]);
        if (v > s) s = v;
    }
    return s;
}

double max_entry(const Matrix& m) {
    if (m.size() == 0) throw ValidationError("max_entry: empty matrix");
    double s = m.data()[0];
    for (size_t i = 1; i < m.size(); ++i)
        if (m.data()[i] > s) s = m.data()[i];
    return s;
}

}  // namespace snnls
