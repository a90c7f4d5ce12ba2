#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "tising/linalg.hpp"
#include "tising/nodewise.hpp"
#include "tising/samples.hpp"
#include "tising/tensor.hpp"

namespace tising {

/// (k!)^2 / cosh^2(k m): the conditional-variance weight of one configuration.
double eta_from_field(int k, double field);
double eta(const InteractionTensor& t, const SpinConfiguration& x, int r);

enum class FisherSource { population, sample };

/// Q_SS and Q_{S^c S} of the node-r Fisher matrix. `support` lists the
/// (k-1)-subsets indexing S; `complement` lists the rest of T_r in design order.
struct FisherBlocks {
    int r = 0;
    int k = 0;
    std::vector<Subset> support;
    std::vector<Subset> complement;
    Matrix q_ss;
    Matrix q_scs;
    FisherSource source = FisherSource::population;
};

/// Support of node r in t: e \ {r} for every edge e through r.
std::vector<Subset> true_support(const InteractionTensor& t, int r);

FisherBlocks population_fisher(const InteractionTensor& t, int r, int cap = kDefaultEnumerationCap,
                               std::uint64_t feature_budget = kDefaultFeatureBudget);
FisherBlocks population_fisher(const InteractionTensor& t, int r, const std::vector<Subset>& support,
                               int cap = kDefaultEnumerationCap,
                               std::uint64_t feature_budget = kDefaultFeatureBudget);

/// Sample Fisher blocks with η evaluated at `j_ref`.
FisherBlocks sample_fisher_blocks(const SampleMatrix& samples, int r, const InteractionTensor& j_ref,
                                  const std::vector<Subset>& support,
                                  std::uint64_t feature_budget = kDefaultFeatureBudget);
FisherBlocks sample_fisher_blocks(const SampleMatrix& samples, int r, const InteractionTensor& j_ref,
                                  std::uint64_t feature_budget = kDefaultFeatureBudget);

struct DependencyConstants {
    double c_min = 0.0;
    double d_max = 0.0;
};

/// Λ_min(Q_SS) by Jacobi rotations.
double min_fisher_eigenvalue(const FisherBlocks& blocks);

/// Λ_max(E[X_{·r} X_{·r}^T]) by matrix-free power iteration over the
/// enumerated distribution, or over the samples.
double population_d_max(const InteractionTensor& t, int r, int cap = kDefaultEnumerationCap,
                        std::uint64_t feature_budget = kDefaultFeatureBudget);
double sample_d_max(const SampleMatrix& samples, int r, int k,
                    std::uint64_t feature_budget = kDefaultFeatureBudget);

DependencyConstants dependency_constants(const FisherBlocks& blocks, const InteractionTensor& t);
DependencyConstants dependency_constants(const FisherBlocks& blocks, const SampleMatrix& samples);

/// ||Q_{S^c S} Q_SS^{-1}||_∞, via Cholesky solves; 0 when S^c is empty.
double incoherence(const FisherBlocks& blocks);

/// ||W||_∞ with W = -∇ℓ at the true node coefficients.
double score_sup(const SampleMatrix& samples, int r, const InteractionTensor& truth);
/// ||E_J[W]||_∞ by enumeration (identically zero in exact arithmetic).
double population_score_sup(const InteractionTensor& t, int r, int cap = kDefaultEnumerationCap);

/// 2 exp(-n α² λ² / (128 (2-α)² (k!)²) + log C(p-1,k-1)).
double score_tail_bound(std::int64_t n, int p, int k, double alpha, double lambda);

struct UniquenessCertificate {
    bool dual_strict = false;
    bool hessian_pd = false;
    double max_inactive_dual = 0.0;
    double min_active_eigenvalue = 0.0;
    bool certified() const { return dual_strict && hessian_pd; }
};

UniquenessCertificate uniqueness_certificate(const SparseCoefVector& coef, const SampleMatrix& samples, int r,
                                             int k, double lambda);

/// Empirical check of the ℓ2 bound ||Ĵ_S - J_S||_2 <= 5 λ sqrt(d) / (2 C_min),
/// evaluated with sample constants at the truth.
struct L2BoundCheck {
    bool hypotheses_hold = false;
    double lambda_limit = 0.0; // C_min² / (40 d D_max (k!)³)
    double w_sup = 0.0;
    double error = 0.0;
    double bound = 0.0;
    bool holds = false;
};

L2BoundCheck l2_bound_check(const SampleMatrix& samples, int r, const InteractionTensor& truth, double lambda,
                            const SolveOptions& opts = {});

struct ConcentrationRow {
    bool population = false;
    int n = 0;
    std::uint64_t seed = 0;
    double c_min = 0.0;
    double d_max = 0.0;
    double incoherence = 0.0;
    double dev_c_min = 0.0;
    double dev_d_max = 0.0;
    double dev_incoherence = 0.0;
};

/// First row: population values. Then one row per n, from exact samples drawn
/// with a seed derived from (seed, n).
std::vector<ConcentrationRow> concentration_probe(const InteractionTensor& t, int r, std::span<const int> n_grid,
                                                  std::uint64_t seed, int cap = kDefaultEnumerationCap);
void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows);

struct DiagnosticsReport {
    int r = 0;
    int degree = 0;
    double c_min = 0.0;
    double d_max = 0.0;
    double incoherence = 0.0;
    std::optional<double> implied_alpha;
    std::optional<double> w_sup;
    std::optional<double> lambda;
    std::optional<bool> dual_strict;
    std::optional<bool> hessian_pd;
};

/// Population C_min, D_max and incoherence for node r. When the node has no
/// incident edges, C_min is Λ_min of the full Fisher matrix over T_r (a lower
/// bound for every principal block) and incoherence is 0. With samples, also
/// ||W||_∞ and the uniqueness certificate of a fit at `lambda`.
DiagnosticsReport node_diagnostics(const InteractionTensor& t, int r, const SampleMatrix* samples = nullptr,
                                   std::optional<double> lambda = std::nullopt, const SolveOptions& opts = {},
                                   int cap = kDefaultEnumerationCap);

nlohmann::json to_json(const DiagnosticsReport& rep);
nlohmann::json summarize(const std::vector<DiagnosticsReport>& reports);

} // namespace tising
