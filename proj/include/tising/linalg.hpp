#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tising {

/// Row-major dense matrix, sized for the small blocks used in diagnostics.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    double& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }
    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    static Matrix identity(int n);
    Matrix transpose() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

struct SymmetricEigen {
    std::vector<double> values; // ascending
    Matrix vectors;             // columns are eigenvectors
    int sweeps = 0;
};

/// Cyclic Jacobi rotations; `a` must be symmetric.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-12, int max_sweeps = 100);

/// Max absolute asymmetry |a_ij - a_ji|.
double asymmetry(const Matrix& a);

/// Solves A X = B for symmetric positive definite A by Cholesky; throws when
/// A is not numerically positive definite.
Matrix cholesky_solve(const Matrix& a, const Matrix& b);

/// Maximum absolute row sum.
double inf_norm(const Matrix& a);

struct PowerResult {
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Largest eigenvalue of a symmetric PSD operator given as v -> Av.
PowerResult power_iteration(int dim, const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            double tol = 1e-8, int max_iters = 10000);

} // namespace tising
