#include "adelic/primepow.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace adelic;

TEST_SUITE("primepow") {

TEST_CASE("primality on small, composite and 64-bit inputs") {
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 97u, 7919u}) CHECK(is_prime(p));
    for (std::uint64_t n : {0u, 1u, 4u, 561u, 1105u, 7917u}) CHECK_FALSE(is_prime(n));
    CHECK(is_prime((std::uint64_t{1} << 61) - 1));
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("prime power decomposition") {
    CHECK(prime_power_decomposition(1024) == std::pair<std::uint64_t, int>{2, 10});
    CHECK(prime_power_decomposition(2187) == std::pair<std::uint64_t, int>{3, 7});
    CHECK(prime_power_decomposition(13) == std::pair<std::uint64_t, int>{13, 1});
    CHECK_FALSE(prime_power_decomposition(12));
    CHECK_FALSE(prime_power_decomposition(1));
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(PrimePower(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(PrimePower(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(PrimePower::parse("6"), std::invalid_argument);
    CHECK_THROWS_AS(PrimePower::parse("1"), std::invalid_argument);
}

TEST_CASE("parse and print") {
    CHECK(PrimePower::parse("1/4") == PrimePower(2, -2));
    CHECK(PrimePower::parse("9") == PrimePower(3, 2));
    CHECK(PrimePower::parse("5^-1") == PrimePower(5, -1));
    CHECK(PrimePower(2, -2).to_string() == "2^-2");
    CHECK(PrimePower(2, -2).value_string() == "1/4");
    CHECK(PrimePower(7, 1).value_string() == "7");
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("010") == 10);
    CHECK(parse_rational("07/010") == Rational(7, 10));
    CHECK(parse_rational("0.0625") == Rational(1, 16));
    CHECK(parse_rational("2^-3") == Rational(1, 8));
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
}

TEST_CASE("order follows the rational value") {
    CHECK(PrimePower(3, -1) < PrimePower(2, -1));
    CHECK(PrimePower(7, 1) < PrimePower(2, 3));
    CHECK(PrimePower(2, 3) < PrimePower(3, 2));
    CHECK(PrimePower(2, -3) < PrimePower(7, -1));
}

TEST_CASE("double bracket") {
    CHECK(double_bracket(2.5) == 2);
    CHECK(double_bracket(0.0) == 0);
    CHECK(double_bracket(-2.5) == -2);
    CHECK(double_bracket(-2.0) == -1);
    CHECK(double_bracket(Rational(-7, 2)) == -3);
    CHECK(double_bracket(Rational(-3)) == -2);
}

// Frozen from tests/oracle/reference_values.py.
TEST_CASE("Phi reference values") {
    CHECK(phi(Rational(10)) == 2520);
    CHECK(phi(Rational(12)) == 27720);
    CHECK(phi(Rational(1, 3)) == Rational(1, 2));
    CHECK(phi(Rational(1, 10)) == Rational(1, 2520));
    CHECK(phi(Rational(7, 2)) == 6);
    CHECK(phi(Rational(49)) == Rational("3099044504245996706400"));
    CHECK(phi(Rational(1)) == 1);
    CHECK(phi(Rational(1, 2)) == 1);
}

TEST_CASE("neighbours and ranges") {
    CHECK(next_pp(Rational(5)) == PrimePower(7, 1));
    CHECK(prev_pp(Rational(1, 3)) == PrimePower(2, -2));
    CHECK(next_pp(Rational(1)) == PrimePower(2, 1));
    CHECK(prev_pp(Rational(1)) == PrimePower(2, -1));
    CHECK(next_pp(Rational(1, 2)) == PrimePower(2, 1));
    const auto r = pp_range(Rational(1, 8), Rational(20));
    CHECK(r.size() == 17);
    CHECK(r.front() == PrimePower(7, -1));
    CHECK(r.back() == PrimePower(19, 1));
    CHECK(std::is_sorted(r.begin(), r.end()));
}

TEST_CASE("Phi is a step function jumping by p at p^k") {
    for (const auto& q : pp_range(Rational(1, 200), Rational(200))) {
        CHECK(phi(q) == phi(prev_pp(q)) * static_cast<long>(q.prime()));
        CHECK(phi(q) * phi(prev_pp(q.reciprocal())) == 1);
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        Rational x(static_cast<long>(rng() % 5000 + 1), static_cast<long>(rng() % 97 + 1));
        x.canonicalize();
        CHECK(phi(x) == phi(next_pp(x)) / static_cast<long>(next_pp(x).prime()));
    }
}

TEST_CASE("chebyshev psi is ln Phi on integers") {
    CHECK(std::abs(chebyshev_psi(10) - std::log(2520.0L)) < 1e-15L);
    CHECK(std::abs(log_phi(PrimePower(2, -1))) < 1e-18L);
    CHECK(std::abs(log_phi(PrimePower(3, -1)) + std::log(2.0L)) < 1e-15L);
    CHECK(chebyshev_psi(1) == 0);
}

TEST_CASE("table snapshots cover the request") {
    auto& table = PrimePowerTable::instance();
    const auto snap = table.covering(1000);
    CHECK(snap->back().value >= 997);
    const auto primes = table.primes_up_to(30);
    CHECK(primes == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
}

}  // TEST_SUITE
