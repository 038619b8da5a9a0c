#include "adelic/adele.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace adelic;

namespace {

Rational value_or_zero(const std::optional<PrimePower>& r) { return r ? r->value() : Rational(0); }

}  // namespace

TEST_SUITE("adele") {

TEST_CASE("text format round trip") {
    for (const char* s : {"0", "2:-1:1", "2:0:101;13:-2:1,12,0", "3:4:1201;5:0:4;7:-3:66"}) {
        CHECK(AdelePoint::parse(s).to_string() == s);
    }
    const AdelePoint x = AdelePoint::parse("2:0:101;13:-2:1,12,0");
    CHECK(x.component(13)->digits == std::vector<std::uint32_t>{1, 12, 0});
    CHECK(x.component(2)->precision == kDefaultDepth);
    CHECK(AdelePoint::parse("5:-2:13", 3).component(5)->precision == 1);
}

TEST_CASE("malformed points are rejected") {
    CHECK_THROWS_AS(AdelePoint::parse("4:0:1"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("3:0:3"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("3:0:01"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("3:0:1;3:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("3:x:1"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("13:0:1,13"), std::invalid_argument);
    CHECK_THROWS_AS(AdelePoint::parse("3:0"), std::invalid_argument);
}

TEST_CASE("norm on the two branches") {
    CHECK(norm(AdelePoint::parse("2:-1:1")) == PrimePower(2, 1));
    CHECK(norm(AdelePoint::parse("3:0:1")) == PrimePower(3, -1));
    CHECK(norm(AdelePoint::parse("2:0:1;3:0:1")) == PrimePower(2, -1));
    CHECK(norm(AdelePoint::parse("2:0:101;13:-2:1,12,0")) == PrimePower(13, 2));
    CHECK(norm(AdelePoint::parse("2:3:1;5:1:2")) == PrimePower(2, -4));
    CHECK(norm(AdelePoint::parse("2:-1:1;3:0:1")) == PrimePower(2, 1));
    CHECK_FALSE(norm(AdelePoint{}));
    CHECK(*norm1(AdelePoint::parse("3:0:1")) == 1);
    CHECK(*norm0(AdelePoint::parse("3:0:1")) == Rational(1, 3));
}

TEST_CASE("addition carries and cancellation is reported") {
    const AdelePoint a = AdelePoint::parse("3:0:1"), b = AdelePoint::parse("3:0:2");
    CHECK(norm(add(a, b)) == PrimePower(3, -2));
    CHECK(distance(a, b) == PrimePower(3, -1));
    CHECK_FALSE(distance(a, a));
    CHECK_THROWS_AS(add(a, negate(a)), IndeterminateCancellation);
    CHECK(negate(negate(a)) == a);
    CHECK(add(AdelePoint::parse("2:0:1"), AdelePoint::parse("3:1:1")).to_string() == "2:0:1;3:1:1");
}

TEST_CASE("volumes") {
    CHECK(ball_volume(PrimePower(2, 2)) == 12);
    CHECK(sphere_volume(PrimePower(2, 2)) == 6);
    CHECK(ball_volume(PrimePower(3, -1)) == Rational(1, 2));
    CHECK(sphere_volume(PrimePower(2, -1)) == Rational(1, 2));
    CHECK(haar_volume({RegionKind::Sphere, {}, PrimePower(5, 1)}) == 60 - 12);
    CHECK(ball_exponent(2, PrimePower(2, 3)) == 3);
    CHECK(ball_exponent(3, PrimePower(2, -2)) == -1);
    CHECK(ball_exponent(5, PrimePower(2, 2)) == 0);
}

TEST_CASE("sphere = ball with a nonzero leading digit, by exact measure") {
    // The leading digit at p = r.prime() is uniform on p values; the nonzero
    // ones must carry exactly vol(B_r \ B_{r-}).
    int below = 0, above = 0;
    for (const auto& r : pp_range(Rational(1, 12), Rational(12))) {
        const Integer p = r.prime();
        CHECK(sphere_volume(r) == ball_volume(r) * Rational(p - 1, p));
        CHECK(ball_volume(r) - ball_volume(prev_pp(r)) == sphere_volume(r));
        ++(r.value() < 1 ? below : above);
    }
    CHECK(below >= 5);
    CHECK(above >= 5);
}

TEST_CASE("sphere samples carry the sphere norm") {
    Rng rng(11);
    for (const char* r : {"1/4", "1/3", "1/2", "2", "9", "11", "2^-5"}) {
        const PrimePower radius = PrimePower::parse(r);
        for (int i = 0; i < 200; ++i) {
            const AdelePoint s = sample_uniform({RegionKind::Sphere, {}, radius}, rng, {kDefaultDepth, 40});
            CHECK(norm(s) == radius);
            const AdelePoint b = sample_uniform({RegionKind::Ball, {}, radius}, rng, {kDefaultDepth, 40});
            CHECK(value_or_zero(norm(b)) <= radius.value());
        }
    }
}

TEST_CASE("ball samples split between inner ball and sphere by volume") {
    Rng rng(12);
    const PrimePower r(2, 2);
    const double expected = Rational(phi(prev_pp(r)) / phi(r)).get_d();
    const int n = 20000;
    int inner = 0;
    for (int i = 0; i < n; ++i) {
        const AdelePoint x = sample_uniform({RegionKind::Ball, {}, r}, rng);
        if (value_or_zero(norm(x)) <= prev_pp(r).value()) ++inner;
    }
    const double sigma = std::sqrt(expected * (1 - expected) / n);
    CHECK(std::abs(inner / static_cast<double>(n) - expected) < 5 * sigma);
}

TEST_CASE("ultrametric inequality on random triples") {
    Rng rng(13);
    const std::vector<PrimePower> radii{{2, -2}, {3, -1}, {2, 1}, {3, 1}, {5, 1}};
    int tested = 0;
    for (int i = 0; i < 300; ++i) {
        AdelePoint pts[3];
        for (auto& p : pts) p = sample_uniform({RegionKind::Sphere, {}, radii[uniform_below(rng, radii.size())]}, rng);
        try {
            const Rational dxy = value_or_zero(distance(pts[0], pts[1]));
            const Rational dyz = value_or_zero(distance(pts[1], pts[2]));
            const Rational dxz = value_or_zero(distance(pts[0], pts[2]));
            CHECK(dxz <= std::max(dxy, dyz));
            CHECK(dxy == value_or_zero(distance(pts[1], pts[0])));
            ++tested;
        } catch (const IndeterminateCancellation&) {
        }
    }
    CHECK(tested > 250);
}

TEST_CASE("translated balls") {
    Rng rng(14);
    const AdelePoint c = AdelePoint::parse("2:-3:1;7:0:3");
    const PrimePower r(3, -1);
    for (int i = 0; i < 100; ++i) {
        const AdelePoint x = sample_uniform({RegionKind::Ball, c, r}, rng);
        CHECK(value_or_zero(distance(x, c)) <= r.value());
    }
}

}  // TEST_SUITE
