#pragma once

#include <cmath>
#include <span>

#include "tising/design.hpp"
#include "tising/tensor.hpp"

// Data-parallel inner loops. `serial` is the plain reference kept for tests and
// benchmarks; `parallel` is the OpenMP version the library calls. Reductions in
// `parallel` use a fixed row-chunk partition combined in chunk order, so their
// results do not depend on the thread count.
namespace tising::kernels {

inline constexpr int kRowChunk = 256;

namespace serial {

/// out[s] = H(state s) for every s in [0, 2^p).
void state_hamiltonians(const InteractionTensor& t, std::span<double> out);
/// out[i] = sum_{j in active} theta[j] * z_{i,j}.
void margins(const FeatureMatrix& z, std::span<const double> theta, std::span<const int> active,
             std::span<double> out);
/// out = Z^T w.
void gradient(const FeatureMatrix& z, std::span<const double> w, std::span<double> out);
/// mean_i log(1 + exp(-y_i t_i)).
double logistic_loss(std::span<const double> margin, std::span<const Spin> labels);
/// out[a * |cols| + b] = (1/n) sum_i w_i z_{i,rows[a]} z_{i,cols[b]}.
void weighted_cross(const FeatureMatrix& z, std::span<const double> w, std::span<const int> rows,
                    std::span<const int> cols, std::span<double> out);
double ordered_sum(std::span<const double> v);

} // namespace serial

namespace parallel {

void state_hamiltonians(const InteractionTensor& t, std::span<double> out);
void margins(const FeatureMatrix& z, std::span<const double> theta, std::span<const int> active,
             std::span<double> out);
void gradient(const FeatureMatrix& z, std::span<const double> w, std::span<double> out);
double logistic_loss(std::span<const double> margin, std::span<const Spin> labels);
void weighted_cross(const FeatureMatrix& z, std::span<const double> w, std::span<const int> rows,
                    std::span<const int> cols, std::span<double> out);
/// Chunked sum whose rounding is independent of the thread count.
double ordered_sum(std::span<const double> v);

} // namespace parallel

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace tising::kernels
