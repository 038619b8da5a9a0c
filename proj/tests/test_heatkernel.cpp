#include "adelic/heatkernel.hpp"
#include "adelic/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace adelic;

namespace {

struct Reference {
    Radius r;
    double t, alpha;
    double value;
};

// Frozen from tests/oracle/reference_values.py (50-digit mpmath, sphere-sum form).
const Reference kReference[] = {
    {std::nullopt, 1, 2, 0.86517387499090857556},
    {PrimePower(3, -1), 1, 2, 0.864432740288718877},
    {PrimePower(2, -1), 1, 2, 0.82804828211942387551},
    {PrimePower(2, 1), 1, 2, 0.067563137936753187559},
    {PrimePower(3, 1), 1, 2, 0.0095438710652707343905},
    {PrimePower(2, 2), 1, 2, 0.0021149133987530658007},
    {std::nullopt, 0.5, 1.5, 1.7519442423073149596},
    {PrimePower(3, -1), 0.5, 1.5, 0.97429580329352822265},
    {PrimePower(2, -1), 0.5, 1.5, 0.63689553924690659682},
    {PrimePower(2, 1), 0.5, 1.5, 0.042045388102365018898},
    {PrimePower(3, 1), 0.5, 1.5, 0.0068990339368176188879},
    {PrimePower(2, 2), 0.5, 1.5, 0.0017067891195467526585},
    {PrimePower(2, -3), 0.5, 1.5, 1.7390657253245688994},
};

}  // namespace

TEST_SUITE("heatkernel") {

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((KernelParams{0, 2, std::nullopt}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((KernelParams{1, 1, std::nullopt}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((KernelParams{1, 2, 2.5}.validate()), std::invalid_argument);
    CHECK_NOTHROW((KernelParams{1, 1.01, 0.3}.validate()));
}

TEST_CASE("Z agrees with the reference values within its bound") {
    for (const auto& ref : kReference) {
        const KernelValue z = z_finite(ref.r, {ref.t, ref.alpha, std::nullopt}, 1e-13);
        CHECK(z.error_bound <= 1e-13);
        CHECK(std::abs(static_cast<double>(z.value) - ref.value) <= z.error_bound + 1e-15);
    }
}

TEST_CASE("the 50-digit C++ oracle agrees with the reference values") {
    for (const auto& ref : kReference) {
        CHECK(std::abs(z_finite_oracle(ref.r, {ref.t, ref.alpha, std::nullopt}) - ref.value) <= 1e-15);
    }
}

TEST_CASE("moments") {
    const Certified m2 = moment_integral({1, 2, std::nullopt}, 2, 1e-13);
    CHECK(std::abs(m2.value.real() - 0.21598011409202069276) <= m2.error_bound + 1e-15);
    const Certified m0 = moment_integral({1, 2, std::nullopt}, 0, 1e-13);
    CHECK(std::abs(m0.value.real() - 0.86517387499090857556) <= m0.error_bound + 1e-15);
    const Certified m1 = moment_integral({0.5, 3, std::nullopt}, 1, 1e-13);
    CHECK(std::abs(m1.value.real() - 0.41683488409162669519) <= m1.error_bound + 1e-15);
    CHECK_THROWS_AS(moment_integral({1, 2, std::nullopt}, -1, 1e-10), std::invalid_argument);
}

TEST_CASE("Z is positive and non-increasing in the radius") {
    for (double t : {0.05, 1.0, 4.0}) {
        for (double alpha : {1.2, 2.0, 3.5}) {
            const KernelParams p{t, alpha, std::nullopt};
            double prev = static_cast<double>(z_finite(std::nullopt, p, 1e-12).value);
            for (const auto& r : pp_range(Rational(1, 16), Rational(16))) {
                const KernelValue z = z_finite(r, p, 1e-12);
                CHECK(z.value > 0);
                CHECK(static_cast<double>(z.value) <= prev + 2e-12);
                prev = static_cast<double>(z.value);
            }
        }
    }
}

TEST_CASE("total mass is one") {
    for (double t : {0.01, 0.3, 2.0, 10.0}) {
        for (double alpha : {1.5, 2.0, 4.0}) {
            const NormalizationResult n = normalization({t, alpha, std::nullopt}, 1e-9);
            CHECK(n.error_bound <= 1e-9);
            CHECK(std::abs(static_cast<double>(n.value) - 1) <= n.error_bound + 1e-12);
        }
    }
}

TEST_CASE("sphere masses and their certified outside bound") {
    const KernelParams p{0.5, 2, std::nullopt};
    const PrimePower lo = inner_radius_for(p, 1e-8), hi = outer_radius_for(p, 1e-8);
    const SphereMasses sm = sphere_masses(p, lo, hi);
    long double sum = 0;
    for (const auto& e : sm.entries) {
        CHECK(e.mass >= 0);
        sum += e.mass;
    }
    CHECK(sm.outside_bound <= 2e-8);
    CHECK(1 - sum <= sm.outside_bound + 1e-12);
    CHECK(1 - sum >= -1e-12);
    CHECK(1 - std::exp(-p.t * std::pow(hi.to_double(), -p.alpha)) <= 1e-8);
}

TEST_CASE("escape mass from both sides of the transform") {
    for (double t : {0.001, 0.1, 1.0}) {
        for (double alpha : {1.5, 2.0, 3.0}) {
            for (const PrimePower& eps : {PrimePower(2, -2), PrimePower(3, -1), PrimePower(2, 1), PrimePower(5, 1)}) {
                const KernelParams p{t, alpha, std::nullopt};
                const NormalizationResult a = escape_mass(eps, p, 1e-10);
                const NormalizationResult b = tail_mass(eps, p, 1e-8);
                CHECK(std::abs(static_cast<double>(a.value - b.value)) <= a.error_bound + b.error_bound + 1e-14);
                CHECK(static_cast<double>(a.value) <= tail_mass_bound(eps, p).bound);
            }
        }
    }
}

TEST_CASE("tail bound is linear in t and dominates the tail") {
    const PrimePower eps(2, -1);
    const TailBound one = tail_mass_bound(eps, {1, 2, std::nullopt});
    const TailBound half = tail_mass_bound(eps, {0.5, 2, std::nullopt});
    CHECK(one.bound == doctest::Approx(2 * half.bound).epsilon(1e-14));
    CHECK(one.partial <= one.bound);
}

TEST_CASE("real kernel closed forms") {
    constexpr double pi = std::numbers::pi;
    CHECK(z_real(0, 1, 2) == doctest::Approx(std::sqrt(pi)));
    CHECK(z_real(0.3, 2, 1) == doctest::Approx(4 / (4 + 4 * pi * pi * 0.09)));
    for (double beta : {1.0, 2.0}) {
        for (double t : {0.2, 1.0, 3.0}) {
            for (double x : {0.0, 0.1, 0.7, 2.0}) {
                CHECK(std::abs(z_real(x, t, beta) - z_real_quadrature(x, t, beta, 1e-13)) < 1e-11);
            }
        }
    }
    // Far out the quadrature switches rule; Cauchy density is the reference.
    for (double x : {50.0, 1e3, 1e5}) {
        CHECK(std::abs(z_real_quadrature(x, 0.5, 1, 1e-12) - z_real(x, 0.5, 1)) < 1e-12);
    }
}

TEST_CASE("real kernel for general beta: scaling and shape") {
    for (double beta : {0.8, 1.5}) {
        for (double t : {0.3, 2.0}) {
            for (double x : {0.0, 0.4, 1.5}) {
                const double s = std::pow(t, -1 / beta);
                CHECK(z_real(x, t, beta, 1e-12) == doctest::Approx(s * z_real(x * s, 1, beta, 1e-12)).epsilon(1e-9));
            }
        }
        CHECK(z_real(0, 1, beta) > z_real(0.5, 1, beta));
        CHECK(z_real(0.5, 1, beta) > z_real(5, 1, beta));
        CHECK(z_real(5, 1, beta) > 0);
        CHECK(z_real(-0.7, 1, beta) == z_real(0.7, 1, beta));
    }
}

TEST_CASE("adelic kernel factorizes") {
    const KernelParams p{0.4, 2, 1.0};
    const KernelValue z = z_adelic(0.25, PrimePower(3, -1), p, 1e-12);
    const double expected = z_real(0.25, 0.4, 1) * static_cast<double>(z_finite(PrimePower(3, -1), p, 1e-12).value);
    CHECK(static_cast<double>(z.value) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS(z_adelic(0, std::nullopt, {1, 2, std::nullopt}, 1e-10), std::invalid_argument);
}

}  // TEST_SUITE
