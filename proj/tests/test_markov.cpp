#include "adelic/markov.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace adelic;

TEST_SUITE("markov") {

TEST_CASE("radius distribution is a sub-probability with a certified tail") {
    const KernelParams p{0.3, 2.5, std::nullopt};
    const Truncation tr = default_truncation(p, 1e-8);
    const RadiusDistribution d = radius_distribution(p, tr.r_min, tr.r_max);
    REQUIRE(d.radii.size() == d.cdf.size());
    for (std::size_t i = 1; i < d.cdf.size(); ++i) CHECK(d.cdf[i] >= d.cdf[i - 1]);
    CHECK(d.tail_mass <= d.tail_bound + 1e-12);
    CHECK(d.tail_bound <= 1e-8);
    CHECK(d.index_of(d.radii[3]) == 3);
    CHECK_THROWS_AS(d.index_of(next_pp(d.radii.back())), std::out_of_range);
    CHECK_THROWS_AS(radius_distribution(p, tr.r_max, tr.r_min), std::invalid_argument);
}

TEST_CASE("paths are reproducible and their increments have the recorded norms") {
    const KernelParams p{0.1, 2, std::nullopt};
    const Truncation tr = default_truncation(p);
    const AdelePoint start = AdelePoint::parse("2:-1:1;3:0:2");
    const PathSample a = sample_path(p, 200, 0.1, tr, 99, start);
    const PathSample b = sample_path(p, 200, 0.1, tr, 99, start);
    CHECK(path_csv(a) == path_csv(b));
    CHECK(a.points.size() == 201);
    CHECK(a.times.back() == doctest::Approx(20.0));
    CHECK(a.points.front() == start);
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        try {
            CHECK(distance(a.points[i + 1], a.points[i]) == a.radii[i]);
        } catch (const IndeterminateCancellation&) {
        }
    }
    const PathSample c = sample_path(p, 200, 0.1, tr, 100, start);
    CHECK(path_csv(c) != path_csv(a));
}

TEST_CASE("real coordinate and CSV layout") {
    const KernelParams p{0.05, 1.5, 1.0};
    const Truncation tr = default_truncation(p);
    const PathSample path = sample_path(p, 10, 0.05, tr, 3, {}, 0.5);
    CHECK(path.real_coords.size() == 11);
    CHECK(path.real_coords.front() == 0.5);
    std::istringstream csv(path_csv(path));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "step,time,radius,real_coord,point");
    CHECK_THROWS_AS(sample_path({0.1, 2, 1.5}, 1, 0.1, tr, 1), std::invalid_argument);
}

TEST_CASE("a truncation that loses mass is refused") {
    const KernelParams p{1, 2, std::nullopt};
    Truncation tr;
    tr.r_min = PrimePower(2, -1);
    tr.r_max = PrimePower(2, 1);
    CHECK_THROWS_AS(sample_path(p, 5, 1, tr, 1), ToleranceError);
}

TEST_CASE("real increments have the stable law") {
    Rng rng(8);
    const int n = 40000;
    double sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_real_increment(0.5, 2, rng);
        sum_sq += x * x;
    }
    // exp(-t xi^2) is the transform of a normal with variance t / (2 pi^2).
    const double var = 0.5 / (2 * std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(sum_sq / n - var) < 5 * var * std::sqrt(2.0 / n));
    int inside = 0;
    for (int i = 0; i < n; ++i) inside += std::abs(sample_real_increment(0.5, 1, rng)) <= 0.5 / (2 * std::numbers::pi);
    // Cauchy with scale t / (2 pi): P(|X| <= scale) = 1/2.
    CHECK(std::abs(inside / static_cast<double>(n) - 0.5) < 5 * std::sqrt(0.25 / n));
}

TEST_CASE("transition probabilities") {
    const KernelParams p{0.2, 2, std::nullopt};
    const AdelePoint x = AdelePoint::parse("2:-1:1");
    const AdelePoint center;
    // t = 0 is the indicator.
    CHECK(transition_prob_ball({0, 2, std::nullopt}, x, center, PrimePower(2, 1)).value == 1);
    CHECK(transition_prob_ball({0, 2, std::nullopt}, x, center, PrimePower(2, -1)).value == 0);
    // Far ball: Z(d) vol(B_eps).
    const TransitionResult far = transition_prob_ball(p, x, center, PrimePower(2, -1));
    CHECK(far.value == doctest::Approx(static_cast<double>(z_finite(PrimePower(2, 1), p, 1e-12).value) *
                                       phi(PrimePower(2, -1)).get_d()));
    // Near ball plus escape is one.
    const TransitionResult near = transition_prob_ball(p, x, x, PrimePower(3, -1));
    const TransitionResult esc = escape_probability(p, PrimePower(3, -1));
    CHECK(near.value + esc.value == doctest::Approx(1).epsilon(1e-15));
    CHECK(esc.value > 0);
    CHECK(esc.value < 1);
}

TEST_CASE("escape probability is increasing in t and decreasing in eps") {
    double prev = 0;
    for (double t : {0.001, 0.01, 0.1, 1.0}) {
        const double e = escape_probability({t, 2, std::nullopt}, PrimePower(2, -1)).value;
        CHECK(e > prev);
        prev = e;
    }
    const KernelParams p{0.5, 2, std::nullopt};
    CHECK(escape_probability(p, PrimePower(2, -1)).value > escape_probability(p, PrimePower(2, 1)).value);
}

}  // TEST_SUITE
