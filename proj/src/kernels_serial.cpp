#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "tising/kernels.hpp"

namespace tising::kernels::serial {

void state_hamiltonians(const InteractionTensor& t, std::span<double> out) {
    const double kfact = factorial(t.k());
    std::vector<std::uint64_t> masks;
    for (const auto& e : t.edges()) {
        std::uint64_t m = 0;
        for (int v : e.vertices) m |= std::uint64_t{1} << v;
        masks.push_back(m);
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        double h = 0.0;
        for (std::size_t e = 0; e < masks.size(); ++e) {
            const bool negative = std::popcount(~s & masks[e]) & 1;
            h += negative ? -t.edges()[e].coef : t.edges()[e].coef;
        }
        out[s] = kfact * h;
    }
}

void margins(const FeatureMatrix& z, std::span<const double> theta, std::span<const int> active,
             std::span<double> out) {
    for (int i = 0; i < z.rows(); ++i) {
        double acc = 0.0;
        for (int j : active) acc += theta[j] * z.at(i, j);
        out[i] = acc;
    }
}

void gradient(const FeatureMatrix& z, std::span<const double> w, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<Spin> scratch(z.cols());
    for (int i = 0; i < z.rows(); ++i) {
        const Spin* row = z.row(i, scratch.data());
        const double wi = w[i];
        for (int j = 0; j < z.cols(); ++j) out[j] += wi * row[j];
    }
}

double logistic_loss(std::span<const double> margin, std::span<const Spin> labels) {
    double acc = 0.0;
    for (std::size_t i = 0; i < margin.size(); ++i) acc += softplus(-labels[i] * margin[i]);
    return margin.empty() ? 0.0 : acc / double(margin.size());
}

void weighted_cross(const FeatureMatrix& z, std::span<const double> w, std::span<const int> rows,
                    std::span<const int> cols, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < z.rows(); ++i)
        for (std::size_t a = 0; a < rows.size(); ++a) {
            const double wa = w[i] * z.at(i, rows[a]);
            for (std::size_t b = 0; b < cols.size(); ++b) out[a * cols.size() + b] += wa * z.at(i, cols[b]);
        }
    if (z.rows() > 0)
        for (double& v : out) v /= double(z.rows());
}

double ordered_sum(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

} // namespace tising::kernels::serial
