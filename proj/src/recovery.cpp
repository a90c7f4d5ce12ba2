#include "tising/recovery.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

#include "tising/errors.hpp"

namespace tising {

SignedSupport SignedSupport::of(const InteractionTensor& t) {
    SignedSupport s;
    for (const auto& e : t.edges()) s.edges.emplace(e.vertices, e.coef > 0 ? 1 : -1);
    return s;
}

SignedNeighborhood neighborhood_from(int r, const SparseCoefVector& coef, double zero_threshold) {
    SignedNeighborhood nb;
    nb.r = r;
    for (const auto& [s, v] : coef.entries)
        if (std::abs(v) > zero_threshold) nb.entries.push_back({s, v > 0 ? 1 : -1, std::abs(v)});
    return nb;
}

SignedNeighborhood fit_node(const SampleMatrix& samples, int r, int k, double lambda, const SolveOptions& opts) {
    return neighborhood_from(r, solve_l1(samples, r, k, lambda, opts), opts.zero_threshold);
}

SignedSupport aggregate(std::span<const SignedNeighborhood> reports, int p, int k, const AggregationRule& rule) {
    if (static_cast<int>(reports.size()) != p) throw ArgumentError("aggregate: need one report per vertex");
    for (int v = 0; v < p; ++v)
        if (reports[v].r != v) throw ArgumentError("aggregate: missing report for vertex " + std::to_string(v));

    struct Vote {
        int reporter;
        int sign;
        double magnitude;
    };
    std::map<Subset, std::vector<Vote>> votes;
    for (const auto& rep : reports)
        for (const auto& e : rep.entries) {
            if (static_cast<int>(e.others.size()) != k - 1)
                throw ArgumentError("aggregate: neighborhood entry of wrong order");
            votes[insert_vertex(e.others, rep.r)].push_back({rep.r, e.sign, e.magnitude});
        }

    SignedSupport out;
    for (const auto& [edge, vs] : votes) {
        if (rule.mode == AggregationMode::and_strict) {
            if (static_cast<int>(vs.size()) != k) continue;
            bool agree = true;
            for (const auto& v : vs) agree = agree && v.sign == vs.front().sign;
            if (agree) out.edges.emplace(edge, vs.front().sign);
        } else {
            const Vote* best = nullptr;
            for (const auto& v : vs)
                if (!best || v.magnitude > best->magnitude ||
                    (v.magnitude == best->magnitude && v.reporter < best->reporter))
                    best = &v;
            out.edges.emplace(edge, best->sign);
        }
    }
    return out;
}

double recovery_rate(const SignedSupport& estimated, const InteractionTensor& truth) {
    if (truth.edge_count() == 0) throw ArgumentError("recovery_rate: undefined for an empty true edge set");
    int hit = 0;
    for (const auto& e : truth.edges()) {
        auto it = estimated.edges.find(e.vertices);
        if (it != estimated.edges.end() && it->second == (e.coef > 0 ? 1 : -1)) ++hit;
    }
    return double(hit) / double(truth.edge_count());
}

bool success(const SignedSupport& estimated, const InteractionTensor& truth, bool signed_match) {
    if (estimated.edges.size() != truth.edge_count()) return false;
    for (const auto& e : truth.edges()) {
        auto it = estimated.edges.find(e.vertices);
        if (it == estimated.edges.end()) return false;
        if (signed_match && it->second != (e.coef > 0 ? 1 : -1)) return false;
    }
    return true;
}

int false_positives(const SignedSupport& estimated, const InteractionTensor& truth) {
    int fp = 0;
    for (const auto& [edge, sign] : estimated.edges)
        if (truth.coefficient(edge) == 0.0) ++fp;
    return fp;
}

namespace {

// Runs body(r) for every vertex in parallel; rethrows the lowest-r failure.
template <class Body>
void for_each_node(int p, Body&& body) {
    std::vector<std::exception_ptr> errors(p);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < p; ++r) {
        try {
            body(r);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

RecoveryReport run_pipeline(const SampleMatrix& samples, int k, const std::optional<InteractionTensor>& truth,
                            const LambdaSpec& lambda, const AggregationRule& rule, const SolveOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    const int p = samples.p();
    const int n = samples.n();
    if (n < 1) throw ArgumentError("run_pipeline: no samples");
    if (truth && (truth->p() != p || truth->k() != k))
        throw DimensionError("run_pipeline: truth tensor dimensions do not match the samples");

    RecoveryReport rep;
    rep.p = p;
    rep.k = k;
    rep.n = n;
    rep.node_lambda.assign(p, 0.0);

    switch (lambda.mode) {
    case LambdaMode::theory:
        rep.lambda_used = lambda_theory(n, p, k, lambda.alpha);
        break;
    case LambdaMode::fixed:
        if (!(lambda.lambda >= 0.0)) throw ArgumentError("run_pipeline: fixed λ must be nonnegative");
        rep.lambda_used = lambda.lambda;
        break;
    case LambdaMode::practice: {
        for_each_node(p, [&](int r) {
            NodeProblem prob(samples, r, k, opts.feature_budget, opts.materialize_cap);
            rep.node_lambda[r] = bic_select(prob, lambda.c_grid, opts).lambda;
        });
        double sum = 0.0;
        for (double l : rep.node_lambda) sum += l;
        rep.lambda_used = sum / p;
        break;
    }
    }
    if (lambda.mode != LambdaMode::practice) rep.node_lambda.assign(p, rep.lambda_used);

    rep.neighborhoods.resize(p);
    for_each_node(p, [&](int r) {
        NodeProblem prob(samples, r, k, opts.feature_budget, opts.materialize_cap);
        auto fit = solve_l1_detailed(prob, rep.lambda_used, opts);
        if (!fit.converged)
            throw SolverError("run_pipeline: node " + std::to_string(r) + " did not converge", fit.kkt, fit.diverging);
        rep.neighborhoods[r] = neighborhood_from(r, fit.coef, opts.zero_threshold);
    });
    rep.estimated = aggregate(rep.neighborhoods, p, k, rule);

    if (truth) {
        if (truth->edge_count() > 0) rep.recovery_rate = recovery_rate(rep.estimated, *truth);
        rep.success = success(rep.estimated, *truth, true);
        rep.success_unsigned = success(rep.estimated, *truth, false);
        rep.false_positives = false_positives(rep.estimated, *truth);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

nlohmann::json to_json(const RecoveryReport& r) {
    nlohmann::json j;
    j["p"] = r.p;
    j["k"] = r.k;
    j["n"] = r.n;
    auto edges = nlohmann::json::array();
    for (const auto& [e, s] : r.estimated.edges) edges.push_back({{"vertices", e}, {"sign", s}});
    j["estimated_edges"] = edges;
    auto nbs = nlohmann::json::array();
    for (const auto& nb : r.neighborhoods) {
        auto entries = nlohmann::json::array();
        for (const auto& e : nb.entries)
            entries.push_back({{"others", e.others}, {"sign", e.sign}, {"magnitude", e.magnitude}});
        nbs.push_back({{"r", nb.r}, {"entries", entries}});
    }
    j["neighborhoods"] = nbs;
    j["node_lambda"] = r.node_lambda;
    j["lambda_used"] = r.lambda_used;
    nlohmann::json metrics = nlohmann::json::object();
    if (r.recovery_rate) metrics["recovery_rate"] = *r.recovery_rate;
    if (r.success) metrics["success"] = *r.success;
    if (r.success_unsigned) metrics["success_unsigned"] = *r.success_unsigned;
    if (r.false_positives) metrics["false_positives"] = *r.false_positives;
    j["metrics"] = metrics;
    j["seed"] = r.seed;
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

std::string to_string(AggregationMode m) { return m == AggregationMode::and_strict ? "and" : "or"; }

AggregationMode parse_aggregation(const std::string& s) {
    if (s == "and" || s == "AND_STRICT" || s == "and_strict") return AggregationMode::and_strict;
    if (s == "or" || s == "OR_MAX" || s == "or_max") return AggregationMode::or_max;
    throw ArgumentError("unknown aggregation rule '" + s + "' (expected and|or)");
}

std::string to_string(LambdaMode m) {
    switch (m) {
    case LambdaMode::theory: return "theory";
    case LambdaMode::practice: return "practice";
    case LambdaMode::fixed: return "fixed";
    }
    return "?";
}

LambdaMode parse_lambda_mode(const std::string& s) {
    if (s == "theory") return LambdaMode::theory;
    if (s == "practice") return LambdaMode::practice;
    if (s == "fixed") return LambdaMode::fixed;
    throw ArgumentError("unknown λ mode '" + s + "' (expected theory|practice|fixed)");
}

} // namespace tising
