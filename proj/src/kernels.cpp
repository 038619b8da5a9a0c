#include "adelic/kernels.hpp"

#include "adelic/errors.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

namespace adelic {

namespace {

// Runs body(i) for i in [0, n); exceptions inside the parallel region are
// captured and the first one is rethrown afterwards.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body body) {
    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

int parallel_threads() { return omp_get_max_threads(); }

RadiusBatch sample_increment_radii(const IncrementSampler& sampler, std::size_t n, std::uint64_t seed, Execution exec,
                                   bool check_norms) {
    RadiusBatch out;
    out.index.resize(n);
    std::vector<std::uint32_t> resamples(n, 0);
    std::vector<std::uint8_t> mismatch(n, 0);
    const auto& dist = sampler.distribution();
    for_each_index(n, exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        std::optional<std::size_t> idx;
        while (!(idx = dist.draw_index(rng))) ++resamples[i];
        out.index[i] = static_cast<std::uint32_t>(*idx);
        if (check_norms) {
            const AdelePoint x = sampler.sphere_point(*idx, rng);
            const Radius r = norm(x);
            mismatch[i] = !(r && *r == dist.radii[*idx]);
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        out.tail_resamples += resamples[i];
        out.norm_mismatches += mismatch[i];
    }
    return out;
}

SumBatch sample_sum_radii(const IncrementSampler& first, const IncrementSampler& second, std::size_t n,
                          std::uint64_t seed, Execution exec) {
    SumBatch out;
    out.radius.resize(n);
    std::vector<std::uint32_t> tails(n, 0), cancels(n, 0);
    for_each_index(n, exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        while (true) {
            auto a = first.draw(rng);
            auto b = second.draw(rng);
            tails[i] += static_cast<std::uint32_t>(a.tail_resamples + b.tail_resamples);
            try {
                out.radius[i] = norm(add(a.point, b.point));
                return;
            } catch (const IndeterminateCancellation&) {
                if (++cancels[i] > 1000) throw;
            }
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        out.tail_resamples += tails[i];
        out.cancellation_resamples += cancels[i];
    }
    return out;
}

std::vector<KernelValue> z_finite_batch(const std::vector<Radius>& radii, const KernelParams& params, double tol,
                                        Execution exec) {
    std::vector<KernelValue> out(radii.size());
    for_each_index(radii.size(), exec, [&](std::size_t i) { out[i] = z_finite(radii[i], params, tol); });
    return out;
}

}  // namespace adelic
