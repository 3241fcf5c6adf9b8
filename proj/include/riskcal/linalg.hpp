#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace riskcal {

// Small dense row-major matrix. Sized for item-level problems (p <= ~50)
// and design matrices with a handful of columns.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::vector<double> column(std::size_t c) const;
    std::vector<double> diag() const;
    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transpose() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol);

// Eigenvalues sorted descending; eigenvectors are the matching columns.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
// tol * max(1, ||A||_F).
SymmetricEigen eigen_symmetric(const Matrix& a, double tol = 1e-12);

// Thin SVD of an n x k matrix with n >= k (one-sided Jacobi). Singular values
// sorted descending.
struct Svd {
    Matrix u;
    std::vector<double> singular;
    Matrix v;
};

Svd svd_thin(const Matrix& a);

// Inverse of a symmetric matrix through its eigendecomposition. Throws
// SingularMatrix when max|eig| / min|eig| exceeds max_condition.
Matrix inverse_symmetric(const Matrix& a, double max_condition = 1e12);

// Inverse of a general square matrix (Gauss-Jordan, partial pivoting).
// Throws SingularMatrix on a zero pivot.
Matrix inverse(const Matrix& a);

}  // namespace riskcal
