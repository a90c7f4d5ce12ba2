#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tising/tensor.hpp"

namespace tising {

/// n stacked ±1 configurations, row-major.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(int n, int p);
    SampleMatrix(int n, int p, std::vector<Spin> data);

    int n() const { return n_; }
    int p() const { return p_; }
    std::span<const Spin> row(int i) const {
        return {data_.data() + std::size_t(i) * p_, std::size_t(p_)};
    }
    std::span<Spin> row(int i) { return {data_.data() + std::size_t(i) * p_, std::size_t(p_)}; }
    Spin at(int i, int v) const { return data_[std::size_t(i) * p_ + v]; }
    std::span<const Spin> data() const { return data_; }

    /// Copy of rows [first, first + count).
    SampleMatrix head(int count) const;

    bool operator==(const SampleMatrix&) const = default;

private:
    int n_ = 0;
    int p_ = 0;
    std::vector<Spin> data_;
};

/// CSV with header s0,...,s{p-1} and -1/1 integer rows.
void write_samples_csv(std::ostream& os, const SampleMatrix& m);
SampleMatrix read_samples_csv(std::istream& is);
void save_samples(const std::string& path, const SampleMatrix& m);
SampleMatrix load_samples(const std::string& path);

} // namespace tising
