#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tising/design.hpp"
#include "tising/samples.hpp"
#include "tising/tensor.hpp"

namespace tising {

/// Node-wise coefficients on the J scale, keyed by (k-1)-subsets of T_r.
struct SparseCoefVector {
    std::map<Subset, double> entries;

    std::size_t nonzeros() const { return entries.size(); }
    bool operator==(const SparseCoefVector&) const = default;
};

/// The row of the true tensor at r, as node coefficients.
SparseCoefVector node_coefficients(const InteractionTensor& t, int r);

struct SolveOptions {
    int max_iters = 10000;
    double kkt_tol = 1e-6;
    double objective_rel_tol = 1e-9;
    double zero_threshold = 1e-8;
    double backtrack_factor = 2.0;
    int kkt_check_every = 5;
    /// Optional post-hoc filter |J| >= magnitude_filter; 0 disables it.
    double magnitude_filter = 0.0;
    bool record_objective = false;
    std::uint64_t feature_budget = kDefaultFeatureBudget;
    std::size_t materialize_cap = kDefaultMaterializeCap;
};

struct SolveResult {
    SparseCoefVector coef;
    std::vector<double> dense; // J scale, indexed like NodeDesign::features()
    int iterations = 0;
    double kkt = 0.0;
    double objective = 0.0;
    bool converged = false;
    bool diverging = false;
    std::vector<double> objective_trace;
};

/// Per-node regression data: T_r, its ±1 feature matrix and the loss/gradient
/// on the J scale. Holds a reference to `samples`, which must outlive it.
class NodeProblem {
public:
    NodeProblem(const SampleMatrix& samples, int r, int k,
                std::uint64_t feature_budget = kDefaultFeatureBudget,
                std::size_t materialize_cap = kDefaultMaterializeCap);

    int r() const { return design_.r(); }
    int k() const { return design_.k(); }
    int n() const { return features_.rows(); }
    int dim() const { return design_.size(); }
    const NodeDesign& design() const { return design_; }
    const FeatureMatrix& features() const { return features_; }
    /// 2 k!: the factor mapping J-scale coefficients to logistic log-odds weights.
    double scale() const { return scale_; }

    std::vector<double> to_dense(const SparseCoefVector& coef) const;
    SparseCoefVector to_sparse(std::span<const double> dense, double zero_threshold) const;

    /// Log-odds 2k m_r(x_i) for every sample.
    std::vector<double> log_odds(std::span<const double> dense) const;
    double loss(std::span<const double> dense) const;
    std::vector<double> gradient(std::span<const double> dense) const;

private:
    NodeDesign design_;
    FeatureMatrix features_;
    double scale_;
};

/// Mean negative log conditional likelihood of x_r (penalty excluded).
double pseudo_loss(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k);

/// Gradient of pseudo_loss over T_r (dense, NodeDesign order).
std::vector<double> pseudo_grad(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k);

/// max_j of |g_j + λ sgn(c_j)| on the support and (|g_j| - λ)_+ off it.
double kkt_residual(std::span<const double> dense_coef, std::span<const double> grad, double lambda);
double kkt_residual(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k, double lambda);

/// ℓ1-penalized pseudolikelihood fit by accelerated proximal gradient with
/// backtracking and monotone restarts. Never throws on non-convergence.
SolveResult solve_l1_detailed(const NodeProblem& problem, double lambda, const SolveOptions& opts = {},
                              std::span<const double> warm_start = {});

/// As solve_l1_detailed, throwing SolverError when not converged.
SparseCoefVector solve_l1(const SampleMatrix& samples, int r, int k, double lambda,
                          const SolveOptions& opts = {});

/// Smallest λ for which the zero vector is optimal: ||∇ℓ(0)||_∞.
double lambda_max(const NodeProblem& problem);

/// 16 k! ((2-α)/α) sqrt(log C(p-1,k-1) / n).
double lambda_theory(std::int64_t n, int p, int k, double alpha);

/// c sqrt(k log p / n).
double lambda_practice(std::int64_t n, int p, int k, double c);

struct BicScore {
    double c;
    double lambda;
    double loss;
    int df;
    double bic;
};

struct BicSelection {
    double lambda;
    double c;
    std::vector<BicScore> scores; // in the order of the input grid
};

/// Default c grid 0.5, 1.0, ..., 12.0. The loss here is on the coupling scale,
/// where the noise level of the score is about k! sqrt(2 log C(p-1,k-1) / n);
/// BIC minima for k = 3 sit near c = 4.
std::vector<double> default_c_grid();

/// BIC(c) = 2 n ℓ(Ĵ_c) + df log n over the grid; ties go to the smaller c.
BicSelection bic_select(const NodeProblem& problem, std::span<const double> c_grid,
                        const SolveOptions& opts = {});
BicSelection bic_select(const SampleMatrix& samples, int r, int k, std::span<const double> c_grid,
                        const SolveOptions& opts = {});

/// `r | v1 ... v{k-1} | value`, one nonzero per line.
void write_coefficients(std::ostream& os, int r, const SparseCoefVector& coef);

} // namespace tising
