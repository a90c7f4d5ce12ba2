#include "tising/nodewise.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <string>

#include "tising/errors.hpp"
#include "tising/kernels.hpp"

namespace tising {

namespace kp = kernels::parallel;

SparseCoefVector node_coefficients(const InteractionTensor& t, int r) {
    return SparseCoefVector{t.neighborhood(r)};
}

NodeProblem::NodeProblem(const SampleMatrix& samples, int r, int k, std::uint64_t feature_budget,
                         std::size_t materialize_cap)
    : design_(samples.p(), k, r, feature_budget),
      features_(samples, design_, materialize_cap),
      scale_(2.0 * factorial(k)) {
    if (samples.n() < 1) throw ArgumentError("node problem: need at least one sample");
}

std::vector<double> NodeProblem::to_dense(const SparseCoefVector& coef) const {
    std::vector<double> out(dim(), 0.0);
    for (const auto& [s, v] : coef.entries) {
        const int j = design_.index_of(s);
        if (j < 0) throw DimensionError("coefficient subset is not a member of T_r");
        out[j] = v;
    }
    return out;
}

SparseCoefVector NodeProblem::to_sparse(std::span<const double> dense, double zero_threshold) const {
    SparseCoefVector out;
    for (int j = 0; j < dim(); ++j)
        if (std::abs(dense[j]) > zero_threshold) out.entries.emplace(design_.feature(j), dense[j]);
    return out;
}

namespace {

std::vector<int> support_of(std::span<const double> v) {
    std::vector<int> idx;
    for (int j = 0; j < static_cast<int>(v.size()); ++j)
        if (v[j] != 0.0) idx.push_back(j);
    return idx;
}

// w_i = -y_i σ(-y_i t_i) / n, so that Z^T w is the gradient of the mean
// logistic loss in the log-odds parameterization.
void score_weights(std::span<const double> margin, std::span<const Spin> labels, std::vector<double>& w) {
    const double inv_n = 1.0 / double(margin.size());
    w.resize(margin.size());
    for (std::size_t i = 0; i < margin.size(); ++i)
        w[i] = -labels[i] * logistic(-labels[i] * margin[i]) * inv_n;
}

} // namespace

std::vector<double> NodeProblem::log_odds(std::span<const double> dense) const {
    if (static_cast<int>(dense.size()) != dim()) throw DimensionError("coefficient vector length");
    std::vector<double> theta(dense.begin(), dense.end());
    for (double& v : theta) v *= scale_;
    std::vector<double> t(n());
    kp::margins(features_, theta, support_of(theta), t);
    return t;
}

double NodeProblem::loss(std::span<const double> dense) const {
    return kp::logistic_loss(log_odds(dense), features_.labels());
}

std::vector<double> NodeProblem::gradient(std::span<const double> dense) const {
    std::vector<double> w;
    score_weights(log_odds(dense), features_.labels(), w);
    std::vector<double> g(dim());
    kp::gradient(features_, w, g);
    for (double& v : g) v *= scale_;
    return g;
}

double pseudo_loss(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k) {
    NodeProblem prob(samples, r, k);
    return prob.loss(prob.to_dense(coef));
}

std::vector<double> pseudo_grad(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k) {
    NodeProblem prob(samples, r, k);
    return prob.gradient(prob.to_dense(coef));
}

double kkt_residual(std::span<const double> coef, std::span<const double> grad, double lambda) {
    if (coef.size() != grad.size()) throw DimensionError("kkt_residual: length mismatch");
    double res = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
        const double r = coef[j] != 0.0 ? std::abs(grad[j] + lambda * (coef[j] > 0 ? 1.0 : -1.0))
                                        : std::max(0.0, std::abs(grad[j]) - lambda);
        res = std::max(res, r);
    }
    return res;
}

double kkt_residual(const SparseCoefVector& coef, const SampleMatrix& samples, int r, int k, double lambda) {
    NodeProblem prob(samples, r, k);
    const auto dense = prob.to_dense(coef);
    return kkt_residual(dense, prob.gradient(dense), lambda);
}

double lambda_max(const NodeProblem& problem) {
    const auto g = problem.gradient(std::vector<double>(problem.dim(), 0.0));
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Relative noise floor of a mean of softplus terms; objective comparisons
// below it carry no information.
constexpr double kRoundingSlack = 1e-13;

double soft_threshold(double v, double tau) {
    if (v > tau) return v - tau;
    if (v < -tau) return v + tau;
    return 0.0;
}

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

// Largest eigenvalue of Z^T Z / (4n) by a few power iterations; a starting
// guess for the Lipschitz constant, refined upward by backtracking.
double lipschitz_estimate(const FeatureMatrix& z) {
    const int n = z.rows(), d = z.cols();
    std::vector<double> v(d, 1.0 / std::sqrt(double(d))), u(n), next(d);
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
        kp::margins(z, v, all, u);
        kp::gradient(z, u, next);
        const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        if (norm == 0.0) break;
        const double prev = est;
        est = norm;
        for (int j = 0; j < d; ++j) v[j] = next[j] / norm;
        if (std::abs(est - prev) <= 1e-6 * est) break;
    }
    return std::max(est / (4.0 * n), 1e-12);
}

} // namespace

SolveResult solve_l1_detailed(const NodeProblem& problem, double lambda, const SolveOptions& opts,
                              std::span<const double> warm_start) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("solve_l1: λ must be finite and nonnegative");
    if (opts.max_iters < 1 || opts.kkt_tol <= 0 || opts.objective_rel_tol <= 0 || opts.zero_threshold <= 0 ||
        opts.backtrack_factor <= 1.0)
        throw ArgumentError("solve_l1: invalid solver options");
    const FeatureMatrix& z = problem.features();
    const auto labels = z.labels();
    const int n = z.rows(), d = z.cols();
    const double s = problem.scale();
    const double mu = lambda / s; // penalty on the log-odds scale

    // x: current iterate (log-odds scale), y: extrapolated point.
    std::vector<double> x(d, 0.0);
    if (!warm_start.empty()) {
        if (static_cast<int>(warm_start.size()) != d) throw DimensionError("solve_l1: warm start length");
        for (int j = 0; j < d; ++j) x[j] = warm_start[j] * s;
    }
    std::vector<double> mx(n), my(n), mz(n), mprev(n), w, g(d), gx(d), y(d), cand(d), xprev(d);
    kp::margins(z, x, support_of(x), mx);
    double fx = kp::logistic_loss(mx, labels) + mu * l1_norm(x);

    SolveResult res;
    double lip = lipschitz_estimate(z);
    double t = 1.0;
    y = x;
    my = mx;
    xprev = x;
    mprev = mx;

    auto kkt_at_x = [&]() {
        score_weights(mx, labels, w);
        kp::gradient(z, w, gx);
        return s * kkt_residual(x, gx, mu);
    };

    // One backtracked proximal step from (y, my); fills cand/mz, returns smooth loss at cand.
    auto prox_step = [&]() {
        score_weights(my, labels, w);
        kp::gradient(z, w, g);
        const double ly = kp::logistic_loss(my, labels);
        while (true) {
            for (int j = 0; j < d; ++j) cand[j] = soft_threshold(y[j] - g[j] / lip, mu / lip);
            kp::margins(z, cand, support_of(cand), mz);
            const double lz = kp::logistic_loss(mz, labels);
            double lin = 0.0, quad = 0.0;
            for (int j = 0; j < d; ++j) {
                const double dj = cand[j] - y[j];
                lin += g[j] * dj;
                quad += dj * dj;
            }
            if (lz <= ly + lin + 0.5 * lip * quad + kRoundingSlack * std::max(1.0, std::abs(ly)) || lip > 1e12)
                return lz;
            lip *= opts.backtrack_factor;
        }
    };

    double norm_mid = 0.0;
    if (opts.record_objective) res.objective_trace.push_back(fx);
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        res.iterations = iter;
        double fz = prox_step() + mu * l1_norm(cand);
        bool restarted = false;
        if (fz > fx) {
            // Momentum overshot: restart from x with a plain proximal step.
            restarted = true;
            t = 1.0;
            y = x;
            my = mx;
            fz = prox_step() + mu * l1_norm(cand);
            // A backtracked plain step cannot increase the objective in exact
            // arithmetic; near the optimum the comparison is all rounding.
            if (fz > fx + kRoundingSlack * std::max(1.0, std::abs(fx))) {
                cand = x;
                mz = mx;
                fz = fx;
            }
        }
        xprev.swap(x);
        mprev.swap(mx);
        x = cand;
        mx = mz;
        const double fprev = fx;
        fx = fz;
        if (opts.record_objective) res.objective_trace.push_back(fx);

        const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / tnext;
        t = tnext;
        for (int j = 0; j < d; ++j) y[j] = x[j] + beta * (x[j] - xprev[j]);
        for (int i = 0; i < n; ++i) my[i] = mx[i] + beta * (mx[i] - mprev[i]);

        const double rel = (fprev - fx) / std::max(1.0, std::abs(fx));
        const bool small_change = !restarted && rel < opts.objective_rel_tol;
        // A stalled objective only triggers a KKT check; the stopping test is
        // always the KKT residual, so returned solutions meet kkt_tol.
        if (small_change || iter % opts.kkt_check_every == 0) {
            if (kkt_at_x() < opts.kkt_tol) {
                res.converged = true;
                break;
            }
        }
        if (iter == opts.max_iters / 2) norm_mid = l1_norm(x);
    }

    // Back to the J scale, with hard zeros and the optional magnitude filter.
    res.dense.assign(d, 0.0);
    for (int j = 0; j < d; ++j) {
        const double v = x[j] / s;
        if (std::abs(v) > opts.zero_threshold && std::abs(v) >= opts.magnitude_filter) res.dense[j] = v;
    }
    res.coef = problem.to_sparse(res.dense, 0.0);
    res.objective = problem.loss(res.dense) + lambda * l1_norm(res.dense);
    res.kkt = kkt_residual(res.dense, problem.gradient(res.dense), lambda);
    if (!res.converged) {
        const double norm_end = l1_norm(x);
        res.diverging = norm_end > 1.05 * norm_mid && norm_end > 10.0;
    }
    return res;
}

SparseCoefVector solve_l1(const SampleMatrix& samples, int r, int k, double lambda, const SolveOptions& opts) {
    if (lambda < 0) throw ArgumentError("solve_l1: λ must be nonnegative");
    NodeProblem prob(samples, r, k, opts.feature_budget, opts.materialize_cap);
    auto res = solve_l1_detailed(prob, lambda, opts);
    if (!res.converged)
        throw SolverError("solve_l1: no convergence after " + std::to_string(res.iterations) +
                              " iterations (KKT residual " + std::to_string(res.kkt) + ")" +
                              (res.diverging ? "; coefficient norm diverging (separable data?)" : ""),
                          res.kkt, res.diverging);
    return res.coef;
}

double lambda_theory(std::int64_t n, int p, int k, double alpha) {
    if (n < 1) throw ArgumentError("lambda_theory: n must be at least 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("lambda_theory: α must lie in (0, 1]");
    if (binomial(p - 1, k - 1) < 2) throw ArgumentError("lambda_theory: need C(p-1,k-1) >= 2");
    return 16.0 * factorial(k) * ((2.0 - alpha) / alpha) * std::sqrt(log_binomial(p - 1, k - 1) / double(n));
}

double lambda_practice(std::int64_t n, int p, int k, double c) {
    if (n < 1) throw ArgumentError("lambda_practice: n must be at least 1");
    if (p < 2) throw ArgumentError("lambda_practice: p must be at least 2");
    if (!(c > 0.0)) throw ArgumentError("lambda_practice: c must be positive");
    return c * std::sqrt(k * std::log(double(p)) / double(n));
}

std::vector<double> default_c_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 24; ++i) g.push_back(i / 2.0);
    return g;
}

BicSelection bic_select(const NodeProblem& problem, std::span<const double> c_grid, const SolveOptions& opts) {
    if (c_grid.empty()) throw ArgumentError("bic_select: empty c grid");
    for (double c : c_grid)
        if (!(c > 0.0)) throw ArgumentError("bic_select: grid values must be positive");
    const int n = problem.n();
    const int p = problem.design().p();
    const int k = problem.k();

    // Fit from the largest λ down, warm-starting each fit from the previous one.
    std::vector<std::size_t> order(c_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c_grid[a] > c_grid[b]; });

    BicSelection sel;
    sel.scores.resize(c_grid.size());
    std::vector<double> warm;
    for (std::size_t idx : order) {
        const double c = c_grid[idx];
        const double lambda = lambda_practice(n, p, k, c);
        auto fit = solve_l1_detailed(problem, lambda, opts, warm);
        if (!fit.converged)
            throw SolverError("bic_select: solver did not converge at c=" + std::to_string(c), fit.kkt, fit.diverging);
        warm = fit.dense;
        const double loss = problem.loss(fit.dense);
        const int df = static_cast<int>(fit.coef.nonzeros());
        sel.scores[idx] = {c, lambda, loss, df, 2.0 * n * loss + df * std::log(double(n))};
    }
    const BicScore* best = nullptr;
    for (const auto& sc : sel.scores)
        if (!best || sc.bic < best->bic || (sc.bic == best->bic && sc.c < best->c)) best = &sc;
    sel.lambda = best->lambda;
    sel.c = best->c;
    return sel;
}

BicSelection bic_select(const SampleMatrix& samples, int r, int k, std::span<const double> c_grid,
                        const SolveOptions& opts) {
    NodeProblem prob(samples, r, k, opts.feature_budget, opts.materialize_cap);
    return bic_select(prob, c_grid, opts);
}

void write_coefficients(std::ostream& os, int r, const SparseCoefVector& coef) {
    for (const auto& [s, v] : coef.entries) {
        os << r << " |";
        for (int u : s) os << ' ' << u;
        os << " | " << std::setprecision(17) << v << '\n';
    }
}

} // namespace tising
