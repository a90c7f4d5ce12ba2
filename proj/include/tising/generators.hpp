#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tising/combinatorics.hpp"
#include "tising/samples.hpp"
#include "tising/tensor.hpp"

namespace tising {

/// Sorted k-subsets of [p] without coefficients.
struct HypergraphSupport {
    int p = 0;
    int k = 0;
    std::vector<Subset> edges; // sorted, distinct
    std::vector<int> degrees() const;
};

inline constexpr int kHypergraphAttempts = 1000;

/// Uniformly shuffled configuration model: d stubs per vertex cut into groups
/// of k; a pairing with a repeated vertex in a group or a duplicate edge is
/// thrown away and redrawn.
HypergraphSupport regular_hypergraph(int p, int k, int d, std::uint64_t seed,
                                     int max_attempts = kHypergraphAttempts);

enum class SignMode { all_plus, rademacher };

struct CoefficientScheme {
    double magnitude = 0.0; // 0 selects 0.5 / k!
    SignMode sign_mode = SignMode::all_plus;
    std::uint64_t seed = 0;
};

double default_coupling(int k);

InteractionTensor assign_coefficients(const HypergraphSupport& support, const CoefficientScheme& scheme = {});

inline constexpr double kRateDivisor = 6e6;
inline constexpr double kSuccessDivisor = 1.5e6;

/// ceil(α (k!)^8 d^3 ln C(p-1, k-1) / divisor).
std::int64_t scaling_n(double alpha, int p, int k, int d, double divisor = kRateDivisor);

using GraphEdges = std::vector<std::pair<int, int>>;

/// `u v` per line, 0-based; blank lines and `#` comments are skipped.
GraphEdges read_edge_list(std::istream& is);

/// All triples whose three pairs are edges of the graph; p = max vertex + 1.
HypergraphSupport triangles_from_graph(const GraphEdges& edges);

/// Real time series, one column per node.
struct Series {
    std::vector<std::vector<double>> columns;
    int length() const { return columns.empty() ? 0 : static_cast<int>(columns.front().size()); }
};

/// CSV, one column per node and one row per time point; a non-numeric first
/// line is taken as a header.
Series read_series_csv(std::istream& is);

/// Signs of first differences. Time points where any node's difference is
/// zero are dropped first; of the M survivors, positions j (0-based) with
/// (j + 1) % thin == 0 are kept, giving floor(M / thin) rows.
SampleMatrix binarize_series(const Series& series, int thin = 3);

void write_hypergraph(std::ostream& os, const HypergraphSupport& h);

} // namespace tising
