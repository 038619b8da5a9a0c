#pragma once

// Truncated finite adeles, the adelic norm and metric, Haar volumes of balls
// and spheres, and uniform sampling from them.

#include "adelic/errors.hpp"
#include "adelic/primepow.hpp"
#include "adelic/random.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adelic {

inline constexpr int kDefaultDepth = 16;

/// x_p = sum_i digits[i] p^(valuation + i), known modulo p^precision.
/// Digit positions in [valuation + digits.size(), precision) are zero.
struct PAdicComponent {
    std::uint64_t p = 2;
    long long valuation = 0;
    std::vector<std::uint32_t> digits;
    long long precision = 0;

    friend bool operator==(const PAdicComponent&, const PAdicComponent&) = default;
};

/// A finite adele with finitely many explicit components.  Primes without an
/// explicit component carry no information and contribute nothing to norms or
/// sums; any prime that matters must be materialized explicitly.
class AdelePoint {
public:
    AdelePoint() = default;

    /// Throws std::invalid_argument on digit, valuation or duplicate violations.
    void set_component(PAdicComponent c);
    const std::map<std::uint64_t, PAdicComponent>& components() const { return components_; }
    const PAdicComponent* component(std::uint64_t p) const;
    bool is_zero() const { return components_.empty(); }

    /// Text format: "p:v:digits;..." with digits concatenated for p <= 10 and
    /// comma-separated otherwise; "0" for the zero point.  Components are
    /// written in ascending prime order.
    std::string to_string() const;
    /// Stored precision of each component is v + max(depth, number of digits).
    static AdelePoint parse(std::string_view text, int depth = kDefaultDepth);

    friend bool operator==(const AdelePoint&, const AdelePoint&) = default;

private:
    std::map<std::uint64_t, PAdicComponent> components_;
};

/// max_p |x_p|_p if some component is non-integral, else max_p |x_p|_p / p;
/// nullopt for the zero point.
std::optional<PrimePower> norm(const AdelePoint& x);
/// The two auxiliary norms; nullopt means 0.
std::optional<Rational> norm0(const AdelePoint& x);
std::optional<Rational> norm1(const AdelePoint& x);
/// 0 or the prime power value.
Rational norm_value(const AdelePoint& x);

AdelePoint add(const AdelePoint& x, const AdelePoint& y);
AdelePoint negate(const AdelePoint& x);
AdelePoint subtract(const AdelePoint& x, const AdelePoint& y);
std::optional<PrimePower> distance(const AdelePoint& x, const AdelePoint& y);

enum class RegionKind { Ball, Sphere };

struct Region {
    RegionKind kind = RegionKind::Ball;
    AdelePoint center;
    PrimePower radius{2, 1};
};

/// vol(B_r) = Phi(r), vol(S_r) = Phi(r) - Phi(r_-).
Rational haar_volume(const Region& r);
Rational ball_volume(const PrimePower& r);
Rational sphere_volume(const PrimePower& r);

/// alpha_p(r) = [[log_p r]]; B_r = prod_p p^(-alpha_p(r)) Z_p.
long long ball_exponent(std::uint64_t p, const PrimePower& r);

struct SamplingOptions {
    int depth = kDefaultDepth;
    /// Z_q components are materialized for every prime q <= prime_cutoff, so
    /// sample norms >= 1/prime_cutoff are exact.
    std::uint64_t prime_cutoff = 16;
};

/// Primes to materialize for a region of the given radius, each with the
/// exponent alpha_q; the sphere prime is flagged.  Reusable across samples.
struct SamplingPlan {
    struct Entry {
        std::uint64_t q;
        long long alpha;
        bool forced;  // sphere prime: valuation pinned to -alpha
    };
    std::vector<Entry> entries;
    int depth = kDefaultDepth;
};

SamplingPlan make_sampling_plan(RegionKind kind, const PrimePower& radius, const SamplingOptions& opts = {});

/// Uniform element of q^(-alpha) Z_q (valuation pinned to -alpha when forced)
/// with `depth` digits.
PAdicComponent sample_component(std::uint64_t q, long long alpha, bool forced, int depth, Rng& rng);

/// Uniform sample from a ball or sphere centred at 0.
AdelePoint sample_with_plan(const SamplingPlan& plan, Rng& rng);

/// Uniform sample from a ball or sphere (Haar measure restricted and
/// normalized).  The sphere S_{p^k} is the ball B_{p^k} with the p-component
/// forced to valuation exactly -alpha_p(p^k).
AdelePoint sample_uniform(const Region& r, Rng& rng, const SamplingOptions& opts = {});

}  // namespace adelic
