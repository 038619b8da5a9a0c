#include "adelic/adele.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace adelic {

namespace {

// p^e as an exact rational, any sign of e.
Rational rational_power(std::uint64_t p, long long e) {
    Integer m;
    mpz_ui_pow_ui(m.get_mpz_t(), p, static_cast<unsigned long>(e >= 0 ? e : -e));
    return e >= 0 ? Rational(m) : Rational(Integer(1), m);
}

long long parse_ll(std::string_view s, const char* what) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) {
        throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void trim_trailing_zeros(std::vector<std::uint32_t>& digits) {
    while (digits.size() > 1 && digits.back() == 0) digits.pop_back();
}

PAdicComponent add_component(const PAdicComponent& a, const PAdicComponent& b) {
    const std::uint64_t p = a.p;
    const long long top = std::min(a.precision, b.precision);
    const long long lo = std::min(a.valuation, b.valuation);
    const auto len = static_cast<std::size_t>(top - lo);
    std::vector<std::uint64_t> sum(len, 0);
    for (const auto* c : {&a, &b}) {
        for (std::size_t i = 0; i < c->digits.size(); ++i) {
            const long long pos = c->valuation + static_cast<long long>(i) - lo;
            if (pos < static_cast<long long>(len)) sum[static_cast<std::size_t>(pos)] += c->digits[i];
        }
    }
    std::uint64_t carry = 0;
    std::ptrdiff_t first = -1;
    for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t s = sum[i] + carry;
        sum[i] = s % p;
        carry = s / p;
        if (first < 0 && sum[i] != 0) first = static_cast<std::ptrdiff_t>(i);
    }
    if (first < 0) {
        throw IndeterminateCancellation("component at p=" + std::to_string(p) + " cancels through precision p^" +
                                        std::to_string(top));
    }
    PAdicComponent r;
    r.p = p;
    r.valuation = lo + first;
    r.precision = top;
    r.digits.assign(sum.begin() + first, sum.end());
    trim_trailing_zeros(r.digits);
    return r;
}

PAdicComponent negate_component(const PAdicComponent& c) {
    PAdicComponent r = c;
    r.digits.resize(static_cast<std::size_t>(c.precision - c.valuation), 0);
    const auto p = static_cast<std::uint32_t>(c.p);
    r.digits[0] = p - r.digits[0];
    for (std::size_t i = 1; i < r.digits.size(); ++i) r.digits[i] = p - 1 - r.digits[i];
    trim_trailing_zeros(r.digits);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// AdelePoint

void AdelePoint::set_component(PAdicComponent c) {
    if (!is_prime(c.p)) throw std::invalid_argument(std::to_string(c.p) + " is not prime");
    if (c.digits.empty()) throw std::invalid_argument("component needs at least one digit");
    if (c.digits[0] == 0) throw std::invalid_argument("leading digit must be non-zero");
    for (auto d : c.digits) {
        if (d >= c.p) throw std::invalid_argument("digit out of range for p=" + std::to_string(c.p));
    }
    if (c.precision < c.valuation + static_cast<long long>(c.digits.size())) {
        throw std::invalid_argument("precision below stored digits");
    }
    components_[c.p] = std::move(c);
}

const PAdicComponent* AdelePoint::component(std::uint64_t p) const {
    auto it = components_.find(p);
    return it == components_.end() ? nullptr : &it->second;
}

std::string AdelePoint::to_string() const {
    if (components_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [p, c] : components_) {
        if (!first) out << ';';
        first = false;
        out << p << ':' << c.valuation << ':';
        for (std::size_t i = 0; i < c.digits.size(); ++i) {
            if (p > 10 && i > 0) out << ',';
            out << c.digits[i];
        }
    }
    return out.str();
}

AdelePoint AdelePoint::parse(std::string_view text, int depth) {
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    AdelePoint x;
    if (text == "0") return x;
    for (auto part : split(text, ';')) {
        const auto fields = split(part, ':');
        if (fields.size() != 3) throw std::invalid_argument("component '" + std::string(part) + "' is not p:v:digits");
        PAdicComponent c;
        const long long p = parse_ll(fields[0], "prime");
        if (p < 2) throw std::invalid_argument("bad prime '" + std::string(fields[0]) + "'");
        c.p = static_cast<std::uint64_t>(p);
        c.valuation = parse_ll(fields[1], "valuation");
        if (c.p <= 10) {
            for (char ch : fields[2]) {
                if (ch < '0' || ch > '9') throw std::invalid_argument("bad digit in '" + std::string(part) + "'");
                c.digits.push_back(static_cast<std::uint32_t>(ch - '0'));
            }
        } else {
            for (auto d : split(fields[2], ',')) {
                const long long v = parse_ll(d, "digit");
                if (v < 0) throw std::invalid_argument("negative digit");
                c.digits.push_back(static_cast<std::uint32_t>(v));
            }
        }
        c.precision = c.valuation + std::max<long long>(depth, static_cast<long long>(c.digits.size()));
        if (x.components_.count(c.p)) throw std::invalid_argument("duplicate component for p=" + std::to_string(c.p));
        x.set_component(std::move(c));
    }
    return x;
}

// ---------------------------------------------------------------------------
// Norms

std::optional<Rational> norm1(const AdelePoint& x) {
    std::optional<Rational> best;
    for (const auto& [p, c] : x.components()) {
        Rational a = rational_power(p, -c.valuation);
        if (!best || a > *best) best = a;
    }
    return best;
}

std::optional<Rational> norm0(const AdelePoint& x) {
    std::optional<Rational> best;
    for (const auto& [p, c] : x.components()) {
        Rational a = rational_power(p, -c.valuation - 1);
        if (!best || a > *best) best = a;
    }
    return best;
}

std::optional<PrimePower> norm(const AdelePoint& x) {
    if (x.is_zero()) return std::nullopt;
    bool integral = true;
    for (const auto& [p, c] : x.components()) integral = integral && c.valuation >= 0;
    std::optional<PrimePower> best;
    for (const auto& [p, c] : x.components()) {
        // |x_p|_p = p^-v; on the integral branch it is divided by p.
        const long long e = integral ? -c.valuation - 1 : -c.valuation;
        if (e == 0) continue;  // |x_p|_p = 1 with another component dominating
        PrimePower a(p, static_cast<int>(e));
        if (!best || a > *best) best = a;
    }
    return best;
}

Rational norm_value(const AdelePoint& x) {
    auto n = norm(x);
    return n ? n->value() : Rational(0);
}

// ---------------------------------------------------------------------------
// Arithmetic

AdelePoint add(const AdelePoint& x, const AdelePoint& y) {
    AdelePoint r = x;
    for (const auto& [p, c] : y.components()) {
        const auto* mine = x.component(p);
        r.set_component(mine ? add_component(*mine, c) : c);
    }
    return r;
}

AdelePoint negate(const AdelePoint& x) {
    AdelePoint r;
    for (const auto& [p, c] : x.components()) r.set_component(negate_component(c));
    return r;
}

AdelePoint subtract(const AdelePoint& x, const AdelePoint& y) { return add(x, negate(y)); }

std::optional<PrimePower> distance(const AdelePoint& x, const AdelePoint& y) {
    if (x == y) return std::nullopt;
    return norm(subtract(x, y));
}

// ---------------------------------------------------------------------------
// Volumes

Rational ball_volume(const PrimePower& r) { return phi(r); }

Rational sphere_volume(const PrimePower& r) { return phi(r) - phi(prev_pp(r)); }

Rational haar_volume(const Region& r) {
    return r.kind == RegionKind::Ball ? ball_volume(r.radius) : sphere_volume(r.radius);
}

long long ball_exponent(std::uint64_t p, const PrimePower& r) { return bracket_log(p, r.value()); }

// ---------------------------------------------------------------------------
// Sampling

PAdicComponent sample_component(std::uint64_t q, long long alpha, bool forced, int depth, Rng& rng) {
    // Uniform on q^(-alpha) Z_q: the valuation exceeds -alpha by a geometric
    // number of leading zero digits, each present with probability 1/q.
    long long v = -alpha;
    if (!forced) {
        while (uniform_below(rng, q) == 0) ++v;
    }
    PAdicComponent c;
    c.p = q;
    c.valuation = v;
    c.precision = v + depth;
    c.digits.resize(static_cast<std::size_t>(depth));
    c.digits[0] = static_cast<std::uint32_t>(1 + uniform_below(rng, q - 1));
    for (int i = 1; i < depth; ++i) c.digits[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(uniform_below(rng, q));
    return c;
}

SamplingPlan make_sampling_plan(RegionKind kind, const PrimePower& radius, const SamplingOptions& opts) {
    if (opts.depth < 1) throw std::invalid_argument("depth must be positive");
    // alpha_q(r) != 0 exactly for q <= r (r > 1) or q r < 1 (r < 1).
    std::uint64_t bound = radius.magnitude();
    if (!radius.is_integral()) bound = bound - 1;
    bound = std::max({bound, opts.prime_cutoff, radius.prime()});
    SamplingPlan plan;
    plan.depth = opts.depth;
    const Rational rv = radius.value();
    for (std::uint32_t q : PrimePowerTable::instance().primes_up_to(bound)) {
        const long long a = bracket_log(q, rv);
        const bool forced = kind == RegionKind::Sphere && q == radius.prime();
        if (a != 0 || q <= opts.prime_cutoff || forced) plan.entries.push_back({q, a, forced});
    }
    return plan;
}

AdelePoint sample_with_plan(const SamplingPlan& plan, Rng& rng) {
    AdelePoint x;
    for (const auto& e : plan.entries) x.set_component(sample_component(e.q, e.alpha, e.forced, plan.depth, rng));
    return x;
}

AdelePoint sample_uniform(const Region& r, Rng& rng, const SamplingOptions& opts) {
    AdelePoint x = sample_with_plan(make_sampling_plan(r.kind, r.radius, opts), rng);
    return r.center.is_zero() ? x : add(r.center, x);
}

}  // namespace adelic
