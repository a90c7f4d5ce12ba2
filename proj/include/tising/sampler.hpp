#pragma once

#include <cstdint>

#include "tising/rng.hpp"
#include "tising/samples.hpp"
#include "tising/tensor.hpp"

namespace tising {

enum class ScanOrder { systematic, random };

/// Gibbs schedule. With `restart` set, every retained row comes from its own
/// chain (burn_in sweeps from a fresh uniform start) instead of a spaced
/// single chain.
struct GibbsConfig {
    int burn_in_sweeps = 1000;
    int spacing_sweeps = 5;
    ScanOrder scan = ScanOrder::systematic;
    std::uint64_t seed = 0;
    bool restart = false;
};

/// One sweep of single-site heat-bath updates, in place.
void gibbs_sweep(const InteractionTensor& t, SpinConfiguration& x, Rng& rng,
                 ScanOrder scan = ScanOrder::systematic);

SampleMatrix draw_samples(const InteractionTensor& t, int n, const GibbsConfig& cfg);

/// i.i.d. draws by inverse CDF on the enumerated distribution.
SampleMatrix exact_sample(const InteractionTensor& t, int n, std::uint64_t seed,
                          int cap = kDefaultEnumerationCap);
SampleMatrix exact_sample(const ExactDistribution& dist, int n, std::uint64_t seed);

} // namespace tising
