#include "adelic/kernels.hpp"

#include <doctest.h>

#include <omp.h>

using namespace adelic;

namespace {

struct Fixture {
    KernelParams params{0.5, 2, std::nullopt};
    Truncation trunc = default_truncation(params);
    IncrementSampler sampler{radius_distribution(params, trunc.r_min, trunc.r_max), trunc};
};

// Runs f with the given OpenMP thread count, restoring the previous one.
template <class F>
auto with_threads(int n, F f) {
    const int before = omp_get_max_threads();
    omp_set_num_threads(n);
    auto out = f();
    omp_set_num_threads(before);
    return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("increment radii: serial and parallel forms agree") {
    Fixture fx;
    const RadiusBatch serial = sample_increment_radii(fx.sampler, 5000, 42, Execution::Serial, true);
    for (int threads : {1, 3, 4}) {
        const RadiusBatch par = with_threads(threads, [&] {
            return sample_increment_radii(fx.sampler, 5000, 42, Execution::Parallel, true);
        });
        CHECK(par.index == serial.index);
        CHECK(par.tail_resamples == serial.tail_resamples);
        CHECK(par.norm_mismatches == serial.norm_mismatches);
    }
    CHECK(serial.norm_mismatches == 0);
    const RadiusBatch other = sample_increment_radii(fx.sampler, 5000, 43, Execution::Serial);
    CHECK(other.index != serial.index);
}

TEST_CASE("sum radii: serial and parallel forms agree") {
    Fixture fx;
    const SumBatch serial = sample_sum_radii(fx.sampler, fx.sampler, 3000, 7, Execution::Serial);
    const SumBatch par =
        with_threads(4, [&] { return sample_sum_radii(fx.sampler, fx.sampler, 3000, 7, Execution::Parallel); });
    CHECK(par.radius == serial.radius);
    CHECK(par.cancellation_resamples == serial.cancellation_resamples);
    CHECK(serial.radius.size() == 3000);
}

TEST_CASE("kernel batch: serial and parallel forms agree") {
    std::vector<Radius> radii{std::nullopt};
    for (const auto& q : pp_range(Rational(1, 50), Rational(50))) radii.emplace_back(q);
    const KernelParams p{0.8, 1.7, std::nullopt};
    const auto serial = z_finite_batch(radii, p, 1e-12, Execution::Serial);
    const auto par = with_threads(4, [&] { return z_finite_batch(radii, p, 1e-12, Execution::Parallel); });
    REQUIRE(serial.size() == radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(serial[i].value == par[i].value);
        CHECK(serial[i].value == z_finite(radii[i], p, 1e-12).value);
    }
}

TEST_CASE("exceptions inside the parallel loop reach the caller") {
    const std::vector<Radius> radii{PrimePower(2, 1)};
    CHECK_THROWS_AS(z_finite_batch(radii, {-1, 2, std::nullopt}, 1e-12, Execution::Parallel), std::invalid_argument);
}

}  // TEST_SUITE
