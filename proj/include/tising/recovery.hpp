#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tising/nodewise.hpp"
#include "tising/samples.hpp"
#include "tising/tensor.hpp"

namespace tising {

/// Sorted k-subsets -> ±1.
struct SignedSupport {
    std::map<Subset, int> edges;

    static SignedSupport of(const InteractionTensor& t);
    bool operator==(const SignedSupport&) const = default;
};

struct NeighborhoodEntry {
    Subset others; // e \ {r}
    int sign;
    double magnitude;
};

/// Estimated signed neighborhood of one vertex.
struct SignedNeighborhood {
    int r = 0;
    std::vector<NeighborhoodEntry> entries;
};

enum class AggregationMode { and_strict, or_max };

struct AggregationRule {
    AggregationMode mode = AggregationMode::and_strict;
};

SignedNeighborhood fit_node(const SampleMatrix& samples, int r, int k, double lambda,
                            const SolveOptions& opts = {});
SignedNeighborhood neighborhood_from(int r, const SparseCoefVector& coef, double zero_threshold);

/// Combines one report per vertex (reports[v].r == v) into a signed k-edge set.
SignedSupport aggregate(std::span<const SignedNeighborhood> reports, int p, int k,
                        const AggregationRule& rule = {});

/// Fraction of true edges whose estimated sign matches; false positives ignored.
double recovery_rate(const SignedSupport& estimated, const InteractionTensor& truth);
/// Exact equality of edge sets; `signed_match` additionally requires equal signs.
bool success(const SignedSupport& estimated, const InteractionTensor& truth, bool signed_match = true);
int false_positives(const SignedSupport& estimated, const InteractionTensor& truth);

enum class LambdaMode { theory, practice, fixed };

struct LambdaSpec {
    LambdaMode mode = LambdaMode::practice;
    double alpha = 1.0;                 // theory mode: incoherence parameter
    std::vector<double> c_grid = default_c_grid(); // practice mode
    double lambda = 0.0;                // fixed mode
};

struct RecoveryReport {
    int p = 0;
    int k = 0;
    int n = 0;
    SignedSupport estimated;
    std::vector<SignedNeighborhood> neighborhoods;
    std::vector<double> node_lambda;   // per-node selected λ (practice) or the common λ
    double lambda_used = 0.0;          // λ every node was finally fit at
    std::optional<double> recovery_rate;
    std::optional<bool> success;
    std::optional<bool> success_unsigned;
    std::optional<int> false_positives;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Fits all p nodes, aggregates, and scores against `truth` when given.
/// Practice mode runs per-node BIC, averages the selected λ over nodes, and
/// refits every node at the average.
RecoveryReport run_pipeline(const SampleMatrix& samples, int k, const std::optional<InteractionTensor>& truth,
                            const LambdaSpec& lambda, const AggregationRule& rule = {},
                            const SolveOptions& opts = {});

nlohmann::json to_json(const RecoveryReport& report);

std::string to_string(AggregationMode m);
AggregationMode parse_aggregation(const std::string& s);
std::string to_string(LambdaMode m);
LambdaMode parse_lambda_mode(const std::string& s);

} // namespace tising
