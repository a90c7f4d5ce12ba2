#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tising {

/// Sorted, strictly increasing list of vertex indices.
using Subset = std::vector<int>;

inline constexpr int kMaxOrder = 20;

/// k! in floating point; k is capped at kMaxOrder.
double factorial(int k);

/// Natural log of C(n, r) via log-gamma.
double log_binomial(std::int64_t n, std::int64_t r);

/// Exact C(n, r), saturating at UINT64_MAX.
std::uint64_t binomial(std::int64_t n, std::int64_t r);

/// All size-`size` subsets of `universe` (assumed sorted), in lexicographic order.
std::vector<Subset> enumerate_subsets(std::span<const int> universe, int size);

bool is_strictly_increasing(std::span<const int> s);

/// s with vertex v removed; v must be present.
Subset remove_vertex(const Subset& s, int v);

/// s with vertex v inserted in sorted position; v must be absent.
Subset insert_vertex(const Subset& s, int v);

} // namespace tising
