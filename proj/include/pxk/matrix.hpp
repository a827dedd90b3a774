#pragma once

#include <complex>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxk {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Value type, no views; sizes here are
/// small enough (a few thousand per side) that copies are acceptable.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("ComplexMatrix: negative dimension");
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const Complex& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    Complex* row_ptr(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const Complex* row_ptr(int i) const {
        return data_.data() + static_cast<std::size_t>(i) * cols_;
    }

    const std::vector<Complex>& data() const { return data_; }

    ComplexMatrix conj_transpose() const {
        ComplexMatrix T(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) T(j, i) = std::conj((*this)(i, j));
        return T;
    }

    ComplexMatrix select_rows(const std::vector<int>& idx) const {
        ComplexMatrix S(static_cast<int>(idx.size()), cols_);
        for (int i = 0; i < S.rows(); ++i) {
            if (idx[i] < 0 || idx[i] >= rows_)
                throw std::invalid_argument("select_rows: index out of range");
            for (int j = 0; j < cols_; ++j) S(i, j) = (*this)(idx[i], j);
        }
        return S;
    }

    ComplexMatrix select_cols(const std::vector<int>& idx) const {
        ComplexMatrix S(rows_, static_cast<int>(idx.size()));
        for (int j = 0; j < S.cols(); ++j) {
            if (idx[j] < 0 || idx[j] >= cols_)
                throw std::invalid_argument("select_cols: index out of range");
            for (int i = 0; i < rows_; ++i) S(i, j) = (*this)(i, idx[j]);
        }
        return S;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

inline ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    const int m = A.rows(), k = A.cols(), n = B.cols();
    ComplexMatrix C(m, n);
    // B is traversed row-wise in the inner accumulation to stay cache friendly.
    for (int i = 0; i < m; ++i) {
        Complex* ci = C.row_ptr(i);
        const Complex* ai = A.row_ptr(i);
        for (int p = 0; p < k; ++p) {
            const Complex a = ai[p];
            if (a == Complex(0.0, 0.0)) continue;
            const Complex* bp = B.row_ptr(p);
            for (int j = 0; j < n; ++j) ci[j] += a * bp[j];
        }
    }
    return C;
}

inline ComplexMatrix subtract(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("subtract: shape mismatch");
    ComplexMatrix C(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) - B(i, j);
    return C;
}

inline double fro_norm(const ComplexMatrix& M) {
    double s = 0.0;
    for (const Complex& v : M.data()) s += std::norm(v);
    return std::sqrt(s);
}

/// ||A - B||_F / ||A||_F. Requires matching shapes and ||A||_F > 0.
inline double rel_fro_error(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("rel_fro_error: shape mismatch");
    const double na = fro_norm(A);
    if (na == 0.0) throw std::invalid_argument("rel_fro_error: reference matrix has zero norm");
    double s = 0.0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) s += std::norm(A(i, j) - B(i, j));
    return std::sqrt(s) / na;
}

}  // namespace pxk
