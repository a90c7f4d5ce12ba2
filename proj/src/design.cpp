#include "tising/design.hpp"

#include <numeric>

#include "tising/errors.hpp"

namespace tising {

NodeDesign::NodeDesign(int p, int k, int r, std::uint64_t feature_budget) : p_(p), k_(k), r_(r) {
    if (r < 0 || r >= p) throw ArgumentError("node design: vertex out of range");
    if (k < 2 || k > p - 1) throw ArgumentError("node design: need 2 <= k <= p-1");
    const std::uint64_t count = binomial(p - 1, k - 1);
    if (count > feature_budget)
        throw CapacityError("node design: C(p-1,k-1)=" + std::to_string(count) +
                            " features exceeds the budget of " + std::to_string(feature_budget));
    std::vector<int> others;
    others.reserve(p - 1);
    for (int v = 0; v < p; ++v)
        if (v != r) others.push_back(v);
    features_ = enumerate_subsets(others, k - 1);
    for (int j = 0; j < size(); ++j) index_.emplace(features_[j], j);
}

int NodeDesign::index_of(const Subset& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

FeatureMatrix::FeatureMatrix(const SampleMatrix& samples, const NodeDesign& design,
                             std::size_t materialize_cap)
    : n_(samples.n()), cols_(design.size()), k_(design.k()), width_(design.k() - 1),
      samples_(&samples) {
    if (samples.p() != design.p())
        throw DimensionError("feature matrix: samples have p=" + std::to_string(samples.p()) +
                             ", design expects p=" + std::to_string(design.p()));
    labels_.resize(n_);
    for (int i = 0; i < n_; ++i) labels_[i] = samples.at(i, design.r());
    feature_vertices_.reserve(std::size_t(cols_) * width_);
    for (const auto& f : design.features())
        feature_vertices_.insert(feature_vertices_.end(), f.begin(), f.end());
    const std::size_t bytes = std::size_t(n_) * std::size_t(cols_);
    if (bytes <= materialize_cap && bytes > 0) {
        data_.resize(bytes);
        for (int i = 0; i < n_; ++i) {
            const auto x = samples.row(i);
            Spin* out = data_.data() + std::size_t(i) * cols_;
            for (int j = 0; j < cols_; ++j) {
                const int* fv = feature_vertices_.data() + std::size_t(j) * width_;
                int prod = 1;
                for (int a = 0; a < width_; ++a) prod *= x[fv[a]];
                out[j] = static_cast<Spin>(prod);
            }
        }
    }
}

const Spin* FeatureMatrix::row(int i, Spin* scratch) const {
    if (!data_.empty()) return data_.data() + std::size_t(i) * cols_;
    const auto x = samples_->row(i);
    for (int j = 0; j < cols_; ++j) {
        const int* fv = feature_vertices_.data() + std::size_t(j) * width_;
        int prod = 1;
        for (int a = 0; a < width_; ++a) prod *= x[fv[a]];
        scratch[j] = static_cast<Spin>(prod);
    }
    return scratch;
}

Spin FeatureMatrix::at(int i, int j) const {
    if (!data_.empty()) return data_[std::size_t(i) * cols_ + j];
    const auto x = samples_->row(i);
    const int* fv = feature_vertices_.data() + std::size_t(j) * width_;
    int prod = 1;
    for (int a = 0; a < width_; ++a) prod *= x[fv[a]];
    return static_cast<Spin>(prod);
}

} // namespace tising
