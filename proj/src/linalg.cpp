#include "tising/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tising/errors.hpp"

namespace tising {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double asymmetry(const Matrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

SymmetricEigen jacobi_eigen(const Matrix& a_in, double tol, int max_sweeps) {
    if (a_in.rows() != a_in.cols()) throw DimensionError("jacobi_eigen: matrix must be square");
    const int n = a_in.rows();
    Matrix a = a_in;
    Matrix v = Matrix::identity(n);
    double scale = 0.0;
    for (double x : a.data()) scale = std::max(scale, std::abs(x));
    SymmetricEigen out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(a(i, j)));
        out.sweeps = sweep;
        if (off <= tol * std::max(scale, 1e-300)) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (int r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

Matrix cholesky_solve(const Matrix& a, const Matrix& b) {
    const int n = a.rows();
    if (a.cols() != n || b.rows() != n) throw DimensionError("cholesky_solve: dimension mismatch");
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw DiagnosticError("cholesky_solve: matrix is not positive definite");
        l(j, j) = std::sqrt(diag);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    Matrix x = b;
    for (int c = 0; c < b.cols(); ++c) {
        for (int i = 0; i < n; ++i) {
            double s = x(i, c);
            for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x(i, c);
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

double inf_norm(const Matrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

PowerResult power_iteration(int dim, const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            double tol, int max_iters) {
    PowerResult res;
    if (dim == 0) {
        res.converged = true;
        return res;
    }
    // A fixed, non-symmetric start vector avoids orthogonality to the top
    // eigenvector in the symmetric cases that show up here.
    std::vector<double> v(dim), av(dim);
    for (int i = 0; i < dim; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + i);
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;
    double lambda = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        apply(v, av);
        lambda = std::inner_product(v.begin(), v.end(), av.begin(), 0.0);
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) r2 += (av[i] - lambda * v[i]) * (av[i] - lambda * v[i]);
        res.iterations = it;
        res.residual = std::sqrt(r2);
        res.value = lambda;
        if (res.residual <= tol * std::max(1.0, std::abs(lambda))) {
            res.converged = true;
            return res;
        }
        norm = std::sqrt(std::inner_product(av.begin(), av.end(), av.begin(), 0.0));
        if (norm == 0.0) {
            res.converged = true;
            res.value = 0.0;
            return res;
        }
        for (int i = 0; i < dim; ++i) v[i] = av[i] / norm;
    }
    return res;
}

} // namespace tising
