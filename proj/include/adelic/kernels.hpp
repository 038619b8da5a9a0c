#pragma once

// Batched Monte Carlo and kernel-evaluation loops, each in a serial reference
// form and an OpenMP form.  Sample i always draws from its own stream seeded
// by derive_seed(seed, i), so both forms return identical results.

#include "adelic/markov.hpp"

#include <cstdint>
#include <vector>

namespace adelic {

enum class Execution { Serial, Parallel };

struct RadiusBatch {
    /// Index into the sampler's distribution, one per sample.
    std::vector<std::uint32_t> index;
    std::size_t tail_resamples = 0;
    /// Samples whose materialized point did not have the drawn norm.
    std::size_t norm_mismatches = 0;
};

/// n independent increments; optionally recomputes each point's norm.
RadiusBatch sample_increment_radii(const IncrementSampler& sampler, std::size_t n, std::uint64_t seed, Execution exec,
                                   bool check_norms = false);

struct SumBatch {
    /// ||X + Y|| per sample (nullopt if the sum is 0).
    std::vector<Radius> radius;
    std::size_t tail_resamples = 0;
    std::size_t cancellation_resamples = 0;
};

/// ||X + Y|| for independent increments X ~ first, Y ~ second.
SumBatch sample_sum_radii(const IncrementSampler& first, const IncrementSampler& second, std::size_t n,
                          std::uint64_t seed, Execution exec);

/// z_finite at every radius.
std::vector<KernelValue> z_finite_batch(const std::vector<Radius>& radii, const KernelParams& params, double tol,
                                        Execution exec);

/// Threads used by Execution::Parallel.
int parallel_threads();

}  // namespace adelic
