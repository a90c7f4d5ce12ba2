#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tising/combinatorics.hpp"
#include "tising/samples.hpp"

namespace tising {

inline constexpr std::uint64_t kDefaultFeatureBudget = 200000;
inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 30;

/// Index set T_r: the sorted (k-1)-subsets of [p] \ {r}, lexicographic.
class NodeDesign {
public:
    NodeDesign(int p, int k, int r, std::uint64_t feature_budget = kDefaultFeatureBudget);

    int p() const { return p_; }
    int k() const { return k_; }
    int r() const { return r_; }
    int size() const { return static_cast<int>(features_.size()); }
    const std::vector<Subset>& features() const { return features_; }
    const Subset& feature(int j) const { return features_[j]; }
    /// Position of a (k-1)-subset in T_r, or -1.
    int index_of(const Subset& s) const;

private:
    int p_, k_, r_;
    std::vector<Subset> features_;
    std::map<Subset, int> index_;
};

/// Labels y_i = x_r^(i) and ±1 product features z_{i,j} over T_r. Features are
/// materialized as int8 when n*|T_r| fits under the cap; otherwise rows are
/// recomputed from the referenced samples on demand (the samples must then
/// outlive this object).
class FeatureMatrix {
public:
    FeatureMatrix(const SampleMatrix& samples, const NodeDesign& design,
                  std::size_t materialize_cap = kDefaultMaterializeCap);

    int rows() const { return n_; }
    int cols() const { return cols_; }
    int order() const { return k_; }
    bool materialized() const { return !data_.empty() || n_ == 0 || cols_ == 0; }
    std::span<const Spin> labels() const { return labels_; }

    /// Row i; in implicit mode `scratch` (length cols()) is filled and returned.
    const Spin* row(int i, Spin* scratch) const;
    Spin at(int i, int j) const;

private:
    int n_ = 0;
    int cols_ = 0;
    int k_ = 0;
    int width_ = 0; // k - 1
    std::vector<Spin> labels_;
    std::vector<Spin> data_;
    std::vector<int> feature_vertices_; // cols_ * width_
    const SampleMatrix* samples_ = nullptr;
};

} // namespace tising
