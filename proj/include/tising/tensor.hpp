#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tising/combinatorics.hpp"

namespace tising {

using Spin = std::int8_t;

inline constexpr int kDefaultEnumerationCap = 20;

/// One ±1 configuration of length p.
class SpinConfiguration {
public:
    SpinConfiguration() = default;
    explicit SpinConfiguration(std::vector<Spin> spins);
    /// Decodes bit b of `index` as spin b (bit 1 -> +1).
    static SpinConfiguration from_index(std::uint64_t index, int p);

    int size() const { return static_cast<int>(spins_.size()); }
    Spin operator[](int i) const { return spins_[i]; }
    void set(int i, Spin s) { spins_[i] = s; }
    void flip(int i) { spins_[i] = static_cast<Spin>(-spins_[i]); }
    std::span<const Spin> view() const { return spins_; }
    std::uint64_t index() const;

    bool operator==(const SpinConfiguration&) const = default;

private:
    std::vector<Spin> spins_;
};

struct Edge {
    Subset vertices;
    double coef;
};

/// Sparse symmetric k-tensor with zero diagonals, stored as sorted k-subsets.
/// Coefficients are stored on the unsymmetrized scale; the k! and (k-1)!
/// multiplicities of the ordered-tuple sums are applied at evaluation time.
class InteractionTensor {
public:
    InteractionTensor(int p, int k, const std::map<Subset, double>& edges = {});

    int p() const { return p_; }
    int k() const { return k_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    /// Indices into edges() of the edges containing vertex v.
    const std::vector<int>& incident(int v) const { return incidence_.at(v); }
    /// Coefficient of the k-subset e, or 0 when absent.
    double coefficient(const Subset& e) const;
    std::map<Subset, double> edge_map() const;

    /// The (k-1)-subset -> coefficient map of the edges through r.
    std::map<Subset, double> neighborhood(int r) const;

    /// Rebuilds the incidence index from the edge list.
    std::vector<std::vector<int>> rebuild_incidence() const;

    /// p below the theoretical p >= 4 bound.
    bool below_theory_bound() const { return p_ < 4; }

    InteractionTensor relabeled(std::span<const int> perm) const;

private:
    int p_;
    int k_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incidence_;
};

/// H(x) = k! * sum_e J_e prod_{v in e} x_v.
double hamiltonian(const InteractionTensor& t, std::span<const Spin> x);
double hamiltonian(const InteractionTensor& t, const SpinConfiguration& x);

/// m_r(x) = (k-1)! * sum_{e ∋ r} J_e prod_{v in e, v != r} x_v.
double local_field(const InteractionTensor& t, std::span<const Spin> x, int r);
double local_field(const InteractionTensor& t, const SpinConfiguration& x, int r);

/// 1 / (1 + exp(-t)) evaluated without overflow.
double logistic(double t);

/// P(x_r = s | x_{-r}) = exp(k s m_r) / (2 cosh(k m_r)).
double conditional_prob(const InteractionTensor& t, const SpinConfiguration& x, int r, int s);

struct ExactDistribution {
    int p = 0;
    std::vector<double> probs;
    double log_z = 0.0;
};

ExactDistribution exact_distribution(const InteractionTensor& t,
                                     int cap = kDefaultEnumerationCap);

/// E_J[prod_{v in subset} X_v] by enumeration.
double exact_moment(const InteractionTensor& t, const Subset& subset,
                    int cap = kDefaultEnumerationCap);
double exact_moment(const ExactDistribution& dist, const Subset& subset);

struct DegreeSummary {
    std::vector<int> per_vertex;
    int max = 0;
};

DegreeSummary degrees(const InteractionTensor& t);

void write_tensor(std::ostream& os, const InteractionTensor& t);
InteractionTensor read_tensor(std::istream& is);
void save_tensor(const std::string& path, const InteractionTensor& t);
InteractionTensor load_tensor(const std::string& path);

} // namespace tising
