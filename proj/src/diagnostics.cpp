#include "tising/diagnostics.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>

#include "tising/design.hpp"
#include "tising/errors.hpp"
#include "tising/kernels.hpp"
#include "tising/rng.hpp"
#include "tising/sampler.hpp"

namespace tising {

namespace kp = kernels::parallel;

double eta_from_field(int k, double field) {
    const double kf = factorial(k);
    const double e = std::exp(-2.0 * std::abs(k * field));
    return kf * kf * 4.0 * e / ((1.0 + e) * (1.0 + e));
}

double eta(const InteractionTensor& t, const SpinConfiguration& x, int r) {
    return eta_from_field(t.k(), local_field(t, x, r));
}

std::vector<Subset> true_support(const InteractionTensor& t, int r) {
    std::vector<Subset> s;
    for (const auto& [sub, c] : t.neighborhood(r)) s.push_back(sub);
    return s;
}

namespace {

std::uint64_t mask_of(const Subset& s) {
    std::uint64_t m = 0;
    for (int v : s) m |= std::uint64_t{1} << v;
    return m;
}

inline int chi(std::uint64_t state, std::uint64_t mask) {
    return (std::popcount(~state & mask) & 1) ? -1 : 1;
}

struct SplitIndex {
    std::vector<int> support;
    std::vector<int> complement;
};

SplitIndex split_design(const NodeDesign& design, const std::vector<Subset>& support) {
    SplitIndex idx;
    std::vector<char> in_s(design.size(), 0);
    for (const auto& s : support) {
        const int j = design.index_of(s);
        if (j < 0) throw ArgumentError("Fisher blocks: support subset is not a member of T_r");
        if (in_s[j]) throw ArgumentError("Fisher blocks: repeated support subset");
        in_s[j] = 1;
        idx.support.push_back(j);
    }
    for (int j = 0; j < design.size(); ++j)
        if (!in_s[j]) idx.complement.push_back(j);
    return idx;
}

// w_s = P(s) η_r(s) over all states.
std::vector<double> fisher_state_weights(const InteractionTensor& t, int r, const ExactDistribution& dist) {
    const double km1 = factorial(t.k() - 1);
    std::vector<std::uint64_t> masks;
    std::vector<double> coefs;
    for (int idx : t.incident(r)) {
        masks.push_back(mask_of(t.edges()[idx].vertices) & ~(std::uint64_t{1} << r));
        coefs.push_back(t.edges()[idx].coef);
    }
    const auto states = static_cast<std::int64_t>(dist.probs.size());
    std::vector<double> w(dist.probs.size());
#pragma omp parallel for schedule(static) if (states > 4096)
    for (std::int64_t s = 0; s < states; ++s) {
        double m = 0.0;
        for (std::size_t e = 0; e < masks.size(); ++e) m += chi(std::uint64_t(s), masks[e]) * coefs[e];
        w[s] = dist.probs[s] * eta_from_field(t.k(), km1 * m);
    }
    return w;
}

// out(a, b) = sum_s w_s chi(rows[a] ^ cols[b])(s).
Matrix enumerated_cross(std::span<const double> w, const std::vector<std::uint64_t>& rows,
                        const std::vector<std::uint64_t>& cols) {
    Matrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    const auto entries = static_cast<std::int64_t>(rows.size() * cols.size());
    const auto states = static_cast<std::int64_t>(w.size());
#pragma omp parallel for schedule(static) if (entries * states > 32768)
    for (std::int64_t e = 0; e < entries; ++e) {
        const std::size_t a = std::size_t(e) / cols.size();
        const std::size_t b = std::size_t(e) % cols.size();
        const std::uint64_t m = rows[a] ^ cols[b];
        double acc = 0.0;
        for (std::int64_t s = 0; s < states; ++s) acc += chi(std::uint64_t(s), m) > 0 ? w[s] : -w[s];
        out(int(a), int(b)) = acc;
    }
    return out;
}

} // namespace

FisherBlocks population_fisher(const InteractionTensor& t, int r, const std::vector<Subset>& support, int cap,
                               std::uint64_t feature_budget) {
    const NodeDesign design(t.p(), t.k(), r, feature_budget);
    const auto split = split_design(design, support);
    const auto dist = exact_distribution(t, cap);
    const auto w = fisher_state_weights(t, r, dist);
    std::vector<std::uint64_t> sm, cm;
    FisherBlocks fb;
    fb.r = r;
    fb.k = t.k();
    fb.source = FisherSource::population;
    for (int j : split.support) {
        sm.push_back(mask_of(design.feature(j)));
        fb.support.push_back(design.feature(j));
    }
    for (int j : split.complement) {
        cm.push_back(mask_of(design.feature(j)));
        fb.complement.push_back(design.feature(j));
    }
    fb.q_ss = enumerated_cross(w, sm, sm);
    fb.q_scs = enumerated_cross(w, cm, sm);
    return fb;
}

FisherBlocks population_fisher(const InteractionTensor& t, int r, int cap, std::uint64_t feature_budget) {
    return population_fisher(t, r, true_support(t, r), cap, feature_budget);
}

FisherBlocks sample_fisher_blocks(const SampleMatrix& samples, int r, const InteractionTensor& j_ref,
                                  const std::vector<Subset>& support, std::uint64_t feature_budget) {
    if (samples.p() != j_ref.p()) throw DimensionError("sample_fisher_blocks: samples and tensor disagree on p");
    if (samples.n() < 1) throw ArgumentError("sample_fisher_blocks: no samples");
    const NodeDesign design(j_ref.p(), j_ref.k(), r, feature_budget);
    const FeatureMatrix z(samples, design);
    const auto split = split_design(design, support);
    std::vector<double> w(samples.n());
    for (int i = 0; i < samples.n(); ++i) w[i] = eta_from_field(j_ref.k(), local_field(j_ref, samples.row(i), r));
    FisherBlocks fb;
    fb.r = r;
    fb.k = j_ref.k();
    fb.source = FisherSource::sample;
    for (int j : split.support) fb.support.push_back(design.feature(j));
    for (int j : split.complement) fb.complement.push_back(design.feature(j));
    const int ds = static_cast<int>(split.support.size());
    const int dc = static_cast<int>(split.complement.size());
    fb.q_ss = Matrix(ds, ds);
    fb.q_scs = Matrix(dc, ds);
    kp::weighted_cross(z, w, split.support, split.support, fb.q_ss.data());
    kp::weighted_cross(z, w, split.complement, split.support, fb.q_scs.data());
    return fb;
}

FisherBlocks sample_fisher_blocks(const SampleMatrix& samples, int r, const InteractionTensor& j_ref,
                                  std::uint64_t feature_budget) {
    return sample_fisher_blocks(samples, r, j_ref, true_support(j_ref, r), feature_budget);
}

double min_fisher_eigenvalue(const FisherBlocks& blocks) {
    if (blocks.q_ss.rows() == 0) throw DiagnosticError("C_min is undefined for an empty support");
    return jacobi_eigen(blocks.q_ss, 1e-14).values.front();
}

double population_d_max(const InteractionTensor& t, int r, int cap, std::uint64_t feature_budget) {
    const NodeDesign design(t.p(), t.k(), r, feature_budget);
    const auto dist = exact_distribution(t, cap);
    std::vector<std::uint64_t> masks;
    for (const auto& f : design.features()) masks.push_back(mask_of(f));
    const auto states = static_cast<std::int64_t>(dist.probs.size());
    const auto dim = static_cast<std::int64_t>(masks.size());
    std::vector<double> u(dist.probs.size());
    auto apply = [&](std::span<const double> v, std::span<double> out) {
#pragma omp parallel for schedule(static) if (states * dim > 32768)
        for (std::int64_t s = 0; s < states; ++s) {
            double acc = 0.0;
            for (std::int64_t c = 0; c < dim; ++c) acc += chi(std::uint64_t(s), masks[c]) * v[c];
            u[s] = dist.probs[s] * acc;
        }
#pragma omp parallel for schedule(static) if (states * dim > 32768)
        for (std::int64_t c = 0; c < dim; ++c) {
            double acc = 0.0;
            for (std::int64_t s = 0; s < states; ++s) acc += chi(std::uint64_t(s), masks[c]) > 0 ? u[s] : -u[s];
            out[c] = acc;
        }
    };
    const auto res = power_iteration(static_cast<int>(dim), apply, 1e-8, 10000);
    if (!res.converged) throw DiagnosticError("population D_max: power iteration did not converge", res.residual);
    return res.value;
}

double sample_d_max(const SampleMatrix& samples, int r, int k, std::uint64_t feature_budget) {
    if (samples.n() < 1) throw ArgumentError("sample_d_max: no samples");
    const NodeDesign design(samples.p(), k, r, feature_budget);
    const FeatureMatrix z(samples, design);
    std::vector<int> all(design.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> u(samples.n());
    const double inv_n = 1.0 / samples.n();
    auto apply = [&](std::span<const double> v, std::span<double> out) {
        kp::margins(z, v, all, u);
        kp::gradient(z, u, out);
        for (double& x : out) x *= inv_n;
    };
    const auto res = power_iteration(design.size(), apply, 1e-8, 10000);
    if (!res.converged) throw DiagnosticError("sample D_max: power iteration did not converge", res.residual);
    return res.value;
}

DependencyConstants dependency_constants(const FisherBlocks& blocks, const InteractionTensor& t) {
    return {min_fisher_eigenvalue(blocks), population_d_max(t, blocks.r)};
}

DependencyConstants dependency_constants(const FisherBlocks& blocks, const SampleMatrix& samples) {
    return {min_fisher_eigenvalue(blocks), sample_d_max(samples, blocks.r, blocks.k)};
}

double incoherence(const FisherBlocks& blocks) {
    if (blocks.q_scs.rows() == 0 || blocks.q_ss.rows() == 0) return 0.0;
    const double cmin = min_fisher_eigenvalue(blocks);
    if (cmin < 1e-12) throw DiagnosticError("incoherence: Q_SS is singular (C_min < 1e-12)", cmin);
    // X = Q_SS^{-1} Q_{S S^c}; the rows of Q_{S^c S} Q_SS^{-1} are the columns of X.
    const Matrix x = cholesky_solve(blocks.q_ss, blocks.q_scs.transpose());
    double best = 0.0;
    for (int c = 0; c < x.cols(); ++c) {
        double s = 0.0;
        for (int a = 0; a < x.rows(); ++a) s += std::abs(x(a, c));
        best = std::max(best, s);
    }
    return best;
}

double score_sup(const SampleMatrix& samples, int r, const InteractionTensor& truth) {
    if (samples.p() != truth.p()) throw DimensionError("score_sup: samples and tensor disagree on p");
    NodeProblem prob(samples, r, truth.k());
    const auto g = prob.gradient(prob.to_dense(node_coefficients(truth, r)));
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

double population_score_sup(const InteractionTensor& t, int r, int cap) {
    const NodeDesign design(t.p(), t.k(), r);
    const auto dist = exact_distribution(t, cap);
    const double kf = factorial(t.k());
    std::vector<double> resid(dist.probs.size());
    for (std::size_t s = 0; s < resid.size(); ++s) {
        const auto x = SpinConfiguration::from_index(s, t.p());
        resid[s] = dist.probs[s] * (x[r] - std::tanh(t.k() * local_field(t, x, r)));
    }
    double m = 0.0;
    for (const auto& f : design.features()) {
        const std::uint64_t mask = mask_of(f);
        double acc = 0.0;
        for (std::size_t s = 0; s < resid.size(); ++s) acc += chi(s, mask) * resid[s];
        m = std::max(m, std::abs(kf * acc));
    }
    return m;
}

double score_tail_bound(std::int64_t n, int p, int k, double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("score_tail_bound: α must lie in (0, 1]");
    const double kf = factorial(k);
    const double expo = -double(n) * alpha * alpha * lambda * lambda /
                            (128.0 * (2.0 - alpha) * (2.0 - alpha) * kf * kf) +
                        log_binomial(p - 1, k - 1);
    return 2.0 * std::exp(expo);
}

UniquenessCertificate uniqueness_certificate(const SparseCoefVector& coef, const SampleMatrix& samples, int r,
                                             int k, double lambda) {
    if (!(lambda > 0.0)) throw ArgumentError("uniqueness_certificate: not applicable at λ = 0");
    NodeProblem prob(samples, r, k);
    const auto dense = prob.to_dense(coef);
    const auto g = prob.gradient(dense);
    UniquenessCertificate cert;
    std::vector<int> active;
    for (int j = 0; j < prob.dim(); ++j) {
        if (dense[j] != 0.0) active.push_back(j);
        else cert.max_inactive_dual = std::max(cert.max_inactive_dual, std::abs(g[j]) / lambda);
    }
    cert.dual_strict = cert.max_inactive_dual < 1.0 - 1e-8;
    if (active.empty()) {
        cert.hessian_pd = true;
        cert.min_active_eigenvalue = 0.0;
        return cert;
    }
    const auto t = prob.log_odds(dense);
    std::vector<double> w(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) w[i] = eta_from_field(k, t[i] / (2.0 * k));
    Matrix h(static_cast<int>(active.size()), static_cast<int>(active.size()));
    kp::weighted_cross(prob.features(), w, active, active, h.data());
    cert.min_active_eigenvalue = jacobi_eigen(h, 1e-14).values.front();
    cert.hessian_pd = cert.min_active_eigenvalue > 1e-10;
    return cert;
}

L2BoundCheck l2_bound_check(const SampleMatrix& samples, int r, const InteractionTensor& truth, double lambda,
                            const SolveOptions& opts) {
    L2BoundCheck out;
    const auto blocks = sample_fisher_blocks(samples, r, truth);
    if (blocks.support.empty()) throw ArgumentError("l2_bound_check: node has no incident edges");
    const auto dc = dependency_constants(blocks, samples);
    const int d = degrees(truth).max;
    const double kf = factorial(truth.k());
    out.lambda_limit = dc.c_min * dc.c_min / (40.0 * d * dc.d_max * kf * kf * kf);
    out.w_sup = score_sup(samples, r, truth);
    out.hypotheses_hold = lambda <= out.lambda_limit && out.w_sup <= lambda / 4.0;
    NodeProblem prob(samples, r, truth.k(), opts.feature_budget, opts.materialize_cap);
    const auto fit = solve_l1_detailed(prob, lambda, opts);
    double err2 = 0.0;
    for (const auto& [s, v] : truth.neighborhood(r)) {
        const double diff = fit.dense[prob.design().index_of(s)] - v;
        err2 += diff * diff;
    }
    out.error = std::sqrt(err2);
    out.bound = 5.0 / (2.0 * dc.c_min) * lambda * std::sqrt(double(d));
    out.holds = out.error <= out.bound;
    if (out.hypotheses_hold && !out.holds)
        std::clog << "note: l2 bound violated at r=" << r << " (error " << out.error << " > bound " << out.bound
                  << ")\n";
    return out;
}

std::vector<ConcentrationRow> concentration_probe(const InteractionTensor& t, int r, std::span<const int> n_grid,
                                                  std::uint64_t seed, int cap) {
    const auto pop = population_fisher(t, r, cap);
    if (pop.support.empty()) throw ArgumentError("concentration_probe: node has no incident edges");
    ConcentrationRow base;
    base.population = true;
    base.c_min = min_fisher_eigenvalue(pop);
    base.d_max = population_d_max(t, r, cap);
    base.incoherence = incoherence(pop);
    std::vector<ConcentrationRow> rows{base};
    const auto dist = exact_distribution(t, cap);
    for (int n : n_grid) {
        ConcentrationRow row;
        row.n = n;
        row.seed = splitmix64(seed ^ (std::uint64_t(n) * 0x9e3779b97f4a7c15ULL));
        const auto samples = exact_sample(dist, n, row.seed);
        const auto blocks = sample_fisher_blocks(samples, r, t);
        row.c_min = min_fisher_eigenvalue(blocks);
        row.d_max = sample_d_max(samples, r, t.k());
        row.incoherence = incoherence(blocks);
        row.dev_c_min = std::abs(row.c_min - base.c_min);
        row.dev_d_max = std::abs(row.d_max - base.d_max);
        row.dev_incoherence = std::abs(row.incoherence - base.incoherence);
        rows.push_back(row);
    }
    return rows;
}

void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows) {
    os << "n,C_min_hat,D_max_hat,incoherence_hat,dev_C_min,dev_D_max,dev_incoherence,source,seed\n";
    os << std::setprecision(12);
    for (const auto& r : rows)
        os << r.n << ',' << r.c_min << ',' << r.d_max << ',' << r.incoherence << ',' << r.dev_c_min << ','
           << r.dev_d_max << ',' << r.dev_incoherence << ',' << (r.population ? "population" : "sample") << ','
           << r.seed << '\n';
}

DiagnosticsReport node_diagnostics(const InteractionTensor& t, int r, const SampleMatrix* samples,
                                   std::optional<double> lambda, const SolveOptions& opts, int cap) {
    DiagnosticsReport rep;
    rep.r = r;
    const auto support = true_support(t, r);
    rep.degree = static_cast<int>(support.size());
    if (support.empty()) {
        const NodeDesign design(t.p(), t.k(), r, opts.feature_budget);
        rep.c_min = min_fisher_eigenvalue(population_fisher(t, r, design.features(), cap, opts.feature_budget));
        rep.incoherence = 0.0;
    } else {
        const auto blocks = population_fisher(t, r, support, cap, opts.feature_budget);
        rep.c_min = min_fisher_eigenvalue(blocks);
        rep.incoherence = incoherence(blocks);
    }
    rep.d_max = population_d_max(t, r, cap, opts.feature_budget);
    if (rep.incoherence < 1.0) rep.implied_alpha = 1.0 - rep.incoherence;
    if (samples) {
        rep.w_sup = score_sup(*samples, r, t);
        if (lambda && *lambda > 0.0) {
            rep.lambda = *lambda;
            NodeProblem prob(*samples, r, t.k(), opts.feature_budget, opts.materialize_cap);
            const auto fit = solve_l1_detailed(prob, *lambda, opts);
            const auto cert = uniqueness_certificate(fit.coef, *samples, r, t.k(), *lambda);
            rep.dual_strict = cert.dual_strict;
            rep.hessian_pd = cert.hessian_pd;
        }
    }
    return rep;
}

nlohmann::json to_json(const DiagnosticsReport& rep) {
    nlohmann::json j;
    j["r"] = rep.r;
    j["degree"] = rep.degree;
    j["C_min"] = rep.c_min;
    j["D_max"] = rep.d_max;
    j["incoherence"] = rep.incoherence;
    j["implied_alpha"] = rep.implied_alpha ? nlohmann::json(*rep.implied_alpha) : nlohmann::json();
    j["W_sup"] = rep.w_sup ? nlohmann::json(*rep.w_sup) : nlohmann::json();
    j["lambda"] = rep.lambda ? nlohmann::json(*rep.lambda) : nlohmann::json();
    j["dual_strict"] = rep.dual_strict ? nlohmann::json(*rep.dual_strict) : nlohmann::json();
    j["hessian_pd"] = rep.hessian_pd ? nlohmann::json(*rep.hessian_pd) : nlohmann::json();
    return j;
}

nlohmann::json summarize(const std::vector<DiagnosticsReport>& reports) {
    nlohmann::json j;
    if (reports.empty()) return j;
    double cmin = reports.front().c_min, dmax = reports.front().d_max, inc = reports.front().incoherence;
    for (const auto& r : reports) {
        cmin = std::min(cmin, r.c_min);
        dmax = std::max(dmax, r.d_max);
        inc = std::max(inc, r.incoherence);
    }
    j["C_min_over_nodes"] = cmin;
    j["D_max_over_nodes"] = dmax;
    j["incoherence_over_nodes"] = inc;
    j["implied_alpha"] = inc < 1.0 ? nlohmann::json(1.0 - inc) : nlohmann::json();
    return j;
}

} // namespace tising
