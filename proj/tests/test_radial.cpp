#include "adelic/heatkernel.hpp"
#include "adelic/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace adelic;

namespace {

using cd = std::complex<double>;

RadialStep sample_step() {
    RadialStep f;
    f.inner_radius = PrimePower(3, -1);
    f.support_radius = PrimePower(5, 1);
    f.inner_value = ComplexRational(Rational(1, 2), Rational(-1));
    f.values[PrimePower(2, -1)] = ComplexRational(3);
    f.values[PrimePower(3, 1)] = ComplexRational(Rational(0), Rational(2, 7));
    f.values[PrimePower(5, 1)] = ComplexRational(-1);
    f.normalize();
    return f;
}

std::vector<Radius> probe_radii() {
    std::vector<Radius> rs{std::nullopt};
    for (const auto& q : pp_range(Rational(1, 30), Rational(30))) rs.emplace_back(q);
    return rs;
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("step evaluation and envelopes") {
    const RadialStep f = sample_step();
    CHECK(f.at(std::nullopt) == f.inner_value);
    CHECK(f.at(PrimePower(5, -1)) == f.inner_value);
    CHECK(f.at(PrimePower(3, -1)) == f.inner_value);
    CHECK(f.at(PrimePower(2, -1)) == ComplexRational(3));
    CHECK(f.at(PrimePower(2, 1)).is_zero());
    CHECK(f.at(PrimePower(7, 1)).is_zero());
    RadialStep bad = f;
    bad.values[PrimePower(7, 1)] = ComplexRational(1);
    CHECK_THROWS_AS(bad.normalize(), std::invalid_argument);
}

TEST_CASE("integrals of indicators") {
    for (const auto& r : pp_range(Rational(1, 20), Rational(20))) {
        CHECK(integrate_radial(ball_indicator(r)) == ComplexRational(phi(r)));
        CHECK(integrate_radial(sphere_indicator(r)) == ComplexRational(phi(r) - phi(prev_pp(r))));
    }
}

TEST_CASE("transform of a ball is a scaled ball") {
    for (const auto& r : pp_range(Rational(1, 20), Rational(20))) {
        const RadialStep expected = scale(ball_indicator(prev_pp(r.reciprocal())), ComplexRational(phi(r)));
        CHECK(ft_radial_step(ball_indicator(r)).same_function(expected));
    }
}

TEST_CASE("double transform, linearity and Parseval") {
    const RadialStep f = sample_step();
    const RadialStep g = combine(ball_indicator(PrimePower(2, 2)), sphere_indicator(PrimePower(3, -1)),
                                 CombineOp::Add, ComplexRational(Rational(-5, 3)));
    CHECK(ft_radial_step(ft_radial_step(f)).same_function(f));
    CHECK(ft_radial_step(ft_radial_step(g)).same_function(g));
    const ComplexRational c(Rational(2), Rational(1, 3));
    const RadialStep lhs = ft_radial_step(combine(f, g, CombineOp::Add, c));
    const RadialStep rhs = combine(ft_radial_step(f), ft_radial_step(g), CombineOp::Add, c);
    CHECK(lhs.same_function(rhs));
    CHECK(integrate_radial(abs_squared(f)) == integrate_radial(abs_squared(ft_radial_step(f))));
    // f^(0) = int f.
    CHECK(ft_radial_step(f).at(std::nullopt) == integrate_radial(f));
}

TEST_CASE("products and scaling") {
    const RadialStep f = sample_step();
    const RadialStep sq = combine(f, f, CombineOp::Multiply);
    for (const auto& r : probe_radii()) CHECK(sq.at(r) == f.at(r) * f.at(r));
    const RadialStep z = scale(f, ComplexRational(0));
    for (const auto& r : probe_radii()) CHECK(z.at(r).is_zero());
}

TEST_CASE("incremental Phi over a range") {
    for (const auto& [q, v] : phi_range(PrimePower(7, -1), PrimePower(3, 3))) CHECK(v == phi(q));
}

TEST_CASE("json round trip") {
    const RadialStep f = sample_step();
    CHECK(radial_step_from_json(to_json(f)) == f);
    const RadialStepD d = to_double(f);
    CHECK(radial_step_d_from_json(to_json(d)) == d);
    const auto j = nlohmann::json::parse(R"({"inner_radius": "1/2", "support_radius": "4",
        "inner_value": "1/3", "values": {"2": {"re": 1, "im": "-1/2"}}})");
    const RadialStep h = radial_step_from_json(j);
    CHECK(h.inner_value == ComplexRational(Rational(1, 3)));
    CHECK(h.at(PrimePower(2, 1)) == ComplexRational(Rational(1), Rational(-1, 2)));
    CHECK(h.at(PrimePower(3, 1)).is_zero());
}

TEST_CASE("certified transform of a step agrees with the exact one") {
    const RadialStep f = sample_step();
    const RadialStepD exact = to_double(ft_radial_step(f));
    const RadialAnalytic a = as_analytic(to_double(f));
    for (const auto& r : probe_radii()) {
        const Certified c = ft_radial_eval(a, r, 1e-12);
        CHECK(std::abs(c.value - exact.at(r)) <= c.error_bound + 1e-13);
    }
    const Certified total = integrate_radial(a, 1e-12);
    CHECK(std::abs(total.value - integrate_radial(f).to_complex()) <= total.error_bound + 1e-13);
}

TEST_CASE("transform of the heat symbol is the heat kernel") {
    RadialAnalytic heat;
    heat.terms.push_back({1.0, std::nullopt, Symbol::heat(0.7, 2.5)});
    for (const Radius& r : {Radius{}, Radius{PrimePower(2, -1)}, Radius{PrimePower(3, 1)}, Radius{PrimePower(2, 3)}}) {
        const Certified c = ft_radial_eval(heat, r, 1e-12);
        const KernelValue z = z_finite(r, {0.7, 2.5, std::nullopt}, 1e-12);
        CHECK(std::abs(c.value.real() - static_cast<double>(z.value)) <= c.error_bound + z.error_bound + 1e-14);
        CHECK(std::abs(c.value.imag()) < 1e-15);
    }
}

TEST_CASE("symbols") {
    CHECK(Symbol::one()(std::nullopt) == 1);
    CHECK(Symbol::power(2)(std::nullopt) == 0);
    CHECK(Symbol::power(2)(PrimePower(3, 1)) == doctest::Approx(9));
    CHECK(Symbol::heat(1, 2)(PrimePower(2, -1)) == doctest::Approx(std::exp(-0.25)));
    CHECK(Symbol::power_heat(1, 2, 1)(PrimePower(5, 1)) == doctest::Approx(5 * std::exp(-10.0)));
}

}  // TEST_SUITE
