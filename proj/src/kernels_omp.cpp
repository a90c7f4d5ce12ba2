#include <omp.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "tising/kernels.hpp"

namespace tising::kernels::parallel {

namespace {
constexpr int kColumnBlock = 512;
constexpr std::size_t kSumChunk = 4096;
constexpr std::size_t kMinParallelWork = 1 << 15;
} // namespace

void state_hamiltonians(const InteractionTensor& t, std::span<double> out) {
    const double kfact = factorial(t.k());
    const std::size_t ne = t.edge_count();
    std::vector<std::uint64_t> masks(ne);
    std::vector<double> coefs(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        for (int v : t.edges()[e].vertices) masks[e] |= std::uint64_t{1} << v;
        coefs[e] = t.edges()[e].coef;
    }
    const auto states = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * (ne + 1) > kMinParallelWork)
    for (std::int64_t s = 0; s < states; ++s) {
        double h = 0.0;
        for (std::size_t e = 0; e < ne; ++e)
            h += (std::popcount(~static_cast<std::uint64_t>(s) & masks[e]) & 1) ? -coefs[e] : coefs[e];
        out[s] = kfact * h;
    }
}

void margins(const FeatureMatrix& z, std::span<const double> theta, std::span<const int> active,
             std::span<double> out) {
    const int n = z.rows();
#pragma omp parallel for schedule(static) if (std::size_t(n) * active.size() > kMinParallelWork)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j : active) acc += theta[j] * z.at(i, j);
        out[i] = acc;
    }
}

void gradient(const FeatureMatrix& z, std::span<const double> w, std::span<double> out) {
    const int n = z.rows();
    const int cols = z.cols();
    const int blocks = (cols + kColumnBlock - 1) / kColumnBlock;
    const bool go_parallel = blocks > 1 && std::size_t(n) * cols > kMinParallelWork;
    if (z.materialized()) {
#pragma omp parallel for schedule(static) if (go_parallel)
        for (int b = 0; b < blocks; ++b) {
            const int j0 = b * kColumnBlock;
            const int j1 = std::min(cols, j0 + kColumnBlock);
            std::fill(out.begin() + j0, out.begin() + j1, 0.0);
            for (int i = 0; i < n; ++i) {
                const Spin* row = z.row(i, nullptr);
                const double wi = w[i];
                for (int j = j0; j < j1; ++j) out[j] += wi * row[j];
            }
        }
    } else {
#pragma omp parallel for schedule(static) if (go_parallel)
        for (int b = 0; b < blocks; ++b) {
            const int j0 = b * kColumnBlock;
            const int j1 = std::min(cols, j0 + kColumnBlock);
            std::fill(out.begin() + j0, out.begin() + j1, 0.0);
            for (int i = 0; i < n; ++i) {
                const double wi = w[i];
                for (int j = j0; j < j1; ++j) out[j] += wi * z.at(i, j);
            }
        }
    }
}

double logistic_loss(std::span<const double> margin, std::span<const Spin> labels) {
    const std::size_t n = margin.size();
    if (n == 0) return 0.0;
    const std::size_t chunks = (n + kRowChunk - 1) / kRowChunk;
    std::vector<double> partial(chunks, 0.0);
    const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static) if (n > kMinParallelWork)
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::size_t i0 = std::size_t(c) * kRowChunk;
        const std::size_t i1 = std::min(n, i0 + kRowChunk);
        double acc = 0.0;
        for (std::size_t i = i0; i < i1; ++i) acc += softplus(-labels[i] * margin[i]);
        partial[c] = acc;
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total / double(n);
}

void weighted_cross(const FeatureMatrix& z, std::span<const double> w, std::span<const int> rows,
                    std::span<const int> cols, std::span<double> out) {
    const int n = z.rows();
    const auto nr = static_cast<std::int64_t>(rows.size());
    const std::size_t nc = cols.size();
    const bool go_parallel = std::size_t(n) * rows.size() * (nc + 1) > kMinParallelWork;
#pragma omp parallel for schedule(static) if (go_parallel)
    for (std::int64_t a = 0; a < nr; ++a) {
        double* dst = out.data() + std::size_t(a) * nc;
        std::fill(dst, dst + nc, 0.0);
        for (int i = 0; i < n; ++i) {
            const double wa = w[i] * z.at(i, rows[a]);
            for (std::size_t b = 0; b < nc; ++b) dst[b] += wa * z.at(i, cols[b]);
        }
        if (n > 0)
            for (std::size_t b = 0; b < nc; ++b) dst[b] /= double(n);
    }
}

double ordered_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    const std::size_t chunks = (n + kSumChunk - 1) / kSumChunk;
    std::vector<double> partial(chunks, 0.0);
    const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static) if (n > kMinParallelWork)
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::size_t i0 = std::size_t(c) * kSumChunk;
        const std::size_t i1 = std::min(n, i0 + kSumChunk);
        double acc = 0.0;
        for (std::size_t i = i0; i < i1; ++i) acc += v[i];
        partial[c] = acc;
    }
    double total = 0.0;
    for (double x : partial) total += x;
    return total;
}

} // namespace tising::kernels::parallel
