#pragma once

// Exact arithmetic over the totally ordered set of non-zero prime powers p^k
// (k != 0), the bracket [[t]] and the volume function Phi.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace adelic {

using Integer = mpz_class;
using Rational = mpq_class;

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// If n = p^k with p prime and k >= 1, returns (p, k).
std::optional<std::pair<std::uint64_t, int>> prime_power_decomposition(std::uint64_t n);

/// A non-zero power p^k of a prime, k != 0.  Ordered by rational value.
class PrimePower {
public:
    PrimePower(std::uint64_t p, int k);

    std::uint64_t prime() const { return p_; }
    int exponent() const { return k_; }
    /// p^|k|; the value is this number when k > 0 and its reciprocal otherwise.
    std::uint64_t magnitude() const { return magnitude_; }
    bool is_integral() const { return k_ > 0; }

    Rational value() const;
    long double to_long_double() const;
    double to_double() const { return static_cast<double>(to_long_double()); }
    long double log() const;

    PrimePower reciprocal() const { return PrimePower(p_, -k_, magnitude_); }

    /// "p^k", the serialization used by every file format in the library.
    std::string to_string() const;
    /// Plain rational rendering, e.g. "7" or "1/4".
    std::string value_string() const;
    /// Accepts "p^k", an integer prime power ("9") or a reciprocal ("1/4").
    static PrimePower parse(std::string_view text);
    /// Throws std::invalid_argument unless x is a prime power.
    static PrimePower from_rational(const Rational& x);

    friend std::strong_ordering operator<=>(const PrimePower& a, const PrimePower& b);
    friend bool operator==(const PrimePower& a, const PrimePower& b) = default;

private:
    PrimePower(std::uint64_t p, int k, std::uint64_t magnitude) : p_(p), k_(k), magnitude_(magnitude) {}

    std::uint64_t p_;
    int k_;
    std::uint64_t magnitude_;
};

std::strong_ordering compare(const PrimePower& a, const Rational& x);

/// [[t]]: floor(t) for t >= 0 and floor(t) + 1 for t < 0.
long long double_bracket(double t);
Integer double_bracket(const Rational& t);

/// Exponent of prime p in Phi(x), i.e. [[log_p x]] computed without logarithms.
long long bracket_log(std::uint64_t p, const Rational& x);

/// Phi(x) = prod_p p^[[log_p x]], exact.  x must be positive.
Rational phi(const Rational& x);
Rational phi(const PrimePower& x);

/// Smallest prime power strictly greater than x.
PrimePower next_pp(const Rational& x);
/// Largest prime power strictly smaller than x.
PrimePower prev_pp(const Rational& x);
inline PrimePower next_pp(const PrimePower& x) { return next_pp(x.value()); }
inline PrimePower prev_pp(const PrimePower& x) { return prev_pp(x.value()); }

/// All prime powers q with a < q <= b, ascending.
std::vector<PrimePower> pp_range(const Rational& a, const Rational& b);

/// Parses "a/b", an integer, a decimal ("0.25") or "p^k" into an exact rational.
Rational parse_rational(std::string_view text);

/// One integer prime power m = p^k (k >= 1) together with psi(m) = ln Phi(m).
struct PrimePowerEntry {
    std::uint64_t value;
    std::uint32_t prime;
    std::int32_t exponent;
    long double psi;
};

/// Sorted table of integer prime powers, extended on demand.  Snapshots are
/// immutable and may be read concurrently; extension is serialized.
class PrimePowerTable {
public:
    using Snapshot = std::shared_ptr<const std::vector<PrimePowerEntry>>;

    static PrimePowerTable& instance();

    /// A snapshot containing every prime power <= limit (and usually more).
    Snapshot covering(std::uint64_t limit);
    /// Current sieve limit.
    std::uint64_t limit() const;

    /// Table ceiling; queries above it fall back to primality scanning.
    static constexpr std::uint64_t kMaxLimit = std::uint64_t{1} << 26;

    /// Primes <= limit, ascending.
    std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);

private:
    PrimePowerTable();
    void extend_locked(std::uint64_t limit);

    mutable std::shared_mutex mutex_;
    std::uint64_t limit_ = 0;
    Snapshot entries_;
};

/// Index of the first entry with value > n.
std::size_t upper_index(const std::vector<PrimePowerEntry>& table, std::uint64_t n);

/// psi(n) = ln Phi(n) for integer n >= 1.
long double chebyshev_psi(std::uint64_t n);
/// ln Phi(q) for a prime power q, in long double.
long double log_phi(const PrimePower& q);

}  // namespace adelic
