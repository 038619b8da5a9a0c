#include "adelic/primepow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adelic {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t result = 1;
    base %= m;
    while (e > 0) {
        if (e & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    return result;
}

// Returns p^k or nullopt on overflow past 2^63.
std::optional<std::uint64_t> checked_pow(std::uint64_t p, unsigned k) {
    constexpr std::uint64_t cap = std::uint64_t{1} << 63;
    std::uint64_t r = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (r > cap / p) return std::nullopt;
        r *= p;
    }
    return r;
}

std::uint64_t integer_root(std::uint64_t n, unsigned k) {
    if (k == 1) return n;
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<long double>(n), 1.0L / k));
    while (r > 0) {
        auto pr = checked_pow(r, k);
        if (pr && *pr <= n) break;
        --r;
    }
    while (true) {
        auto pr = checked_pow(r + 1, k);
        if (!pr || *pr > n) break;
        ++r;
    }
    return r;
}

std::uint64_t to_u64(const Integer& z) {
    if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) {
        throw std::out_of_range("integer does not fit in 64 bits: " + z.get_str());
    }
    std::uint64_t r = 0;
    mpz_export(&r, nullptr, -1, sizeof(r), 0, 0, z.get_mpz_t());
    return r;
}

Integer from_u64(std::uint64_t v) {
    Integer z;
    mpz_import(z.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return z;
}

Integer floor_of(const Rational& x) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

Integer ceil_of(const Rational& x) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

PrimePower entry_power(const PrimePowerEntry& e, bool reciprocal) {
    return PrimePower(e.prime, reciprocal ? -e.exponent : e.exponent);
}

// Smallest integer prime power strictly greater than n (n >= 0).  A prime lies
// in (n, 2n] for n >= 1 (Bertrand), so a table covering 2 * max(n, 2) always
// contains the answer; past the table ceiling we scan with Miller-Rabin.
PrimePower next_integer_pp(const Integer& n) {
    auto& table = PrimePowerTable::instance();
    const std::uint64_t nn = to_u64(n);
    if (nn <= PrimePowerTable::kMaxLimit / 2) {
        auto snap = table.covering(2 * std::max<std::uint64_t>(nn, 2));
        return entry_power((*snap)[upper_index(*snap, nn)], false);
    }
    for (std::uint64_t m = nn + 1;; ++m) {
        if (auto d = prime_power_decomposition(m)) return PrimePower(d->first, d->second);
    }
}

// Largest integer prime power <= n (n >= 2).
PrimePower prev_integer_pp_le(const Integer& n) {
    auto& table = PrimePowerTable::instance();
    const std::uint64_t nn = to_u64(n);
    if (nn < 2) throw std::domain_error("no prime power <= " + n.get_str());
    if (nn <= PrimePowerTable::kMaxLimit) {
        auto snap = table.covering(nn);
        return entry_power((*snap)[upper_index(*snap, nn) - 1], false);
    }
    for (std::uint64_t m = nn;; --m) {
        if (auto d = prime_power_decomposition(m)) return PrimePower(d->first, d->second);
    }
}

// Integer prime powers m with lo <= m <= hi, ascending.
std::vector<PrimePowerEntry> integer_pp_between(const Integer& lo, const Integer& hi) {
    if (hi < lo || hi < 2) return {};
    const std::uint64_t h = to_u64(hi);
    if (h > PrimePowerTable::kMaxLimit) {
        throw std::out_of_range("prime power range exceeds table ceiling");
    }
    auto snap = PrimePowerTable::instance().covering(h);
    const std::uint64_t l = lo < 1 ? 0 : to_u64(lo - 1);
    const auto first = upper_index(*snap, l);
    const auto last = upper_index(*snap, h);
    return {snap->begin() + static_cast<std::ptrdiff_t>(first), snap->begin() + static_cast<std::ptrdiff_t>(last)};
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are sufficient for every n < 3.3e24.
    for (std::uint64_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::optional<std::pair<std::uint64_t, int>> prime_power_decomposition(std::uint64_t n) {
    if (n < 2) return std::nullopt;
    for (unsigned k = 1; k < 64; ++k) {
        const std::uint64_t r = integer_root(n, k);
        if (r < 2) break;
        auto pr = checked_pow(r, k);
        if (pr && *pr == n && is_prime(r)) return std::make_pair(r, static_cast<int>(k));
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PrimePower

PrimePower::PrimePower(std::uint64_t p, int k) : p_(p), k_(k), magnitude_(0) {
    if (k == 0) throw std::invalid_argument("prime power exponent must be non-zero");
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
    auto m = checked_pow(p, static_cast<unsigned>(k > 0 ? k : -k));
    if (!m) throw std::overflow_error("prime power magnitude exceeds 2^63");
    magnitude_ = *m;
}

Rational PrimePower::value() const {
    Rational r(from_u64(magnitude_));
    if (k_ < 0) r = 1 / r;
    return r;
}

long double PrimePower::to_long_double() const {
    const auto m = static_cast<long double>(magnitude_);
    return k_ > 0 ? m : 1.0L / m;
}

long double PrimePower::log() const {
    return static_cast<long double>(k_) * std::log(static_cast<long double>(p_));
}

std::string PrimePower::to_string() const {
    return std::to_string(p_) + "^" + std::to_string(k_);
}

std::string PrimePower::value_string() const {
    return k_ > 0 ? std::to_string(magnitude_) : "1/" + std::to_string(magnitude_);
}

PrimePower PrimePower::parse(std::string_view text) {
    const auto caret = text.find('^');
    if (caret != std::string_view::npos) {
        try {
            const std::string base(text.substr(0, caret));
            const std::string exp(text.substr(caret + 1));
            std::size_t used_b = 0, used_e = 0;
            const auto p = std::stoull(base, &used_b);
            const auto k = std::stoi(exp, &used_e);
            if (used_b != base.size() || used_e != exp.size()) throw std::invalid_argument("trailing characters");
            return PrimePower(p, k);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("malformed prime power '" + std::string(text) + "'");
        }
    }
    return from_rational(parse_rational(text));
}

PrimePower PrimePower::from_rational(const Rational& x) {
    if (sgn(x) <= 0) throw std::invalid_argument("prime powers are positive");
    const Integer& num = x.get_num();
    const Integer& den = x.get_den();
    std::optional<std::pair<std::uint64_t, int>> d;
    int sign = 1;
    if (den == 1 && mpz_sizeinbase(num.get_mpz_t(), 2) <= 64) {
        d = prime_power_decomposition(to_u64(num));
    } else if (num == 1 && mpz_sizeinbase(den.get_mpz_t(), 2) <= 64) {
        d = prime_power_decomposition(to_u64(den));
        sign = -1;
    }
    if (!d) throw std::invalid_argument(x.get_str() + " is not a non-zero power of a prime");
    return PrimePower(d->first, sign * d->second);
}

std::strong_ordering operator<=>(const PrimePower& a, const PrimePower& b) {
    if ((a.k_ > 0) != (b.k_ > 0)) return a.k_ > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.k_ > 0) return a.magnitude_ <=> b.magnitude_;
    return b.magnitude_ <=> a.magnitude_;
}

std::strong_ordering compare(const PrimePower& a, const Rational& x) {
    const int c = cmp(a.value(), x);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Bracket and Phi

long long double_bracket(double t) {
    const double f = std::floor(t);
    return static_cast<long long>(t >= 0 ? f : f + 1);
}

Integer double_bracket(const Rational& t) {
    Integer f = floor_of(t);
    if (sgn(t) < 0) f += 1;
    return f;
}

long long bracket_log(std::uint64_t p, const Rational& x) {
    if (sgn(x) <= 0) throw std::domain_error("bracket_log requires x > 0");
    const Integer& num = x.get_num();
    const Integer& den = x.get_den();
    if (num >= den) {
        // largest a with p^a <= x
        const Integer n = floor_of(x);
        Integer pw = 1;
        long long a = 0;
        while (pw * p <= n) {
            pw *= p;
            ++a;
        }
        return a;
    }
    // smallest m with p^m * num >= den; the bracket is 1 - m
    Integer pw = num;
    long long m = 0;
    while (pw < den) {
        pw *= p;
        ++m;
    }
    return 1 - m;
}

Rational phi(const Rational& x) {
    if (sgn(x) <= 0) throw std::domain_error("phi requires x > 0");
    auto& table = PrimePowerTable::instance();
    const Integer& num = x.get_num();
    const Integer& den = x.get_den();
    if (num >= den) {
        const Integer n = floor_of(x);
        const std::uint64_t nn = to_u64(n);
        if (nn > PrimePowerTable::kMaxLimit) throw std::out_of_range("phi argument beyond table ceiling");
        Integer result = 1;
        for (std::uint32_t p : table.primes_up_to(nn)) {
            std::uint64_t pw = p;
            while (pw <= nn / p) pw *= p;  // largest power of p not exceeding floor(x)
            mpz_mul_ui(result.get_mpz_t(), result.get_mpz_t(), pw);
        }
        return Rational(result);
    }
    // x < 1: primes p < 1/x contribute p^(1-m), m smallest with p^m x >= 1.
    const Integer bound = (den - 1) / num;  // p <= bound  <=>  p * x < 1
    const std::uint64_t b = to_u64(bound);
    if (b > PrimePowerTable::kMaxLimit) throw std::out_of_range("phi argument beyond table ceiling");
    Integer denom = 1;
    for (std::uint32_t p : table.primes_up_to(b)) {
        Integer pw = num * p;
        Integer factor = 1;
        while (pw < den) {
            pw *= p;
            factor *= p;
        }
        denom *= factor;
    }
    return Rational(Integer(1), denom);
}

Rational phi(const PrimePower& x) { return phi(x.value()); }

PrimePower next_pp(const Rational& x) {
    if (sgn(x) <= 0) throw std::domain_error("next_pp requires x > 0");
    const Integer& num = x.get_num();
    const Integer& den = x.get_den();
    if (num >= den) return next_integer_pp(floor_of(x));
    if (2 * num >= den) return PrimePower(2, 1);
    // largest integer prime power m < 1/x
    const Integer bound = (den - 1) / num;
    return prev_integer_pp_le(bound).reciprocal();
}

PrimePower prev_pp(const Rational& x) {
    if (sgn(x) <= 0) throw std::domain_error("prev_pp requires x > 0");
    if (x > 2) return prev_integer_pp_le(ceil_of(x) - 1);
    // smallest integer prime power m > 1/x, i.e. m > floor(1/x)
    Integer inv;
    mpz_fdiv_q(inv.get_mpz_t(), x.get_den_mpz_t(), x.get_num_mpz_t());
    return next_integer_pp(inv).reciprocal();
}

std::vector<PrimePower> pp_range(const Rational& a, const Rational& b) {
    if (sgn(a) <= 0) throw std::domain_error("pp_range requires a > 0");
    if (a > b) throw std::invalid_argument("pp_range requires a <= b");
    std::vector<PrimePower> out;
    // reciprocals 1/m with a < 1/m <= b  <=>  ceil(1/b) <= m <= floor((den_a - 1) / num_a)
    if (a < Rational(1, 2)) {
        Integer lo;
        mpz_cdiv_q(lo.get_mpz_t(), b.get_den_mpz_t(), b.get_num_mpz_t());
        const Integer hi = (a.get_den() - 1) / a.get_num();
        auto entries = integer_pp_between(lo, hi);
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) out.push_back(entry_power(*it, true));
    }
    if (b >= 2) {
        const Integer lo = floor_of(a) + 1;
        for (const auto& e : integer_pp_between(lo, floor_of(b))) out.push_back(entry_power(e, false));
    }
    return out;
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    if (s.find('^') != std::string::npos) return PrimePower::parse(s).value();
    const auto dot = s.find('.');
    try {
        if (dot != std::string::npos) {
            bool neg = s[0] == '-';
            std::string whole = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
            std::string frac = s.substr(dot + 1);
            if (whole.empty()) whole = "0";
            if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
                whole.find_first_not_of("0123456789") != std::string::npos) {
                throw std::invalid_argument("bad decimal");
            }
            Integer scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
            Rational r(Integer(whole + frac, 10), scale);
            r.canonicalize();
            return neg ? Rational(-r) : r;
        }
        if (s.find_first_not_of("-+0123456789/") != std::string::npos) throw std::invalid_argument("bad rational");
        if (s[0] == '+') s.erase(0, 1);
        Rational r(s, 10);
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("cannot parse '" + std::string(text) + "' as a rational");
    }
}

// ---------------------------------------------------------------------------
// Table

PrimePowerTable& PrimePowerTable::instance() {
    static PrimePowerTable table;
    return table;
}

PrimePowerTable::PrimePowerTable() {
    std::unique_lock lock(mutex_);
    extend_locked(1 << 16);
}

std::uint64_t PrimePowerTable::limit() const {
    std::shared_lock lock(mutex_);
    return limit_;
}

PrimePowerTable::Snapshot PrimePowerTable::covering(std::uint64_t limit) {
    if (limit > kMaxLimit) throw std::out_of_range("prime power table ceiling exceeded");
    {
        std::shared_lock lock(mutex_);
        if (limit <= limit_) return entries_;
    }
    std::unique_lock lock(mutex_);
    if (limit > limit_) extend_locked(std::min(kMaxLimit, std::max(limit, 2 * limit_)));
    return entries_;
}

void PrimePowerTable::extend_locked(std::uint64_t limit) {
    std::vector<std::uint8_t> composite(limit + 1, 0);
    auto entries = std::make_shared<std::vector<PrimePowerEntry>>();
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
        std::uint64_t pw = i;
        int k = 1;
        while (true) {
            entries->push_back({pw, static_cast<std::uint32_t>(i), k, 0.0L});
            if (pw > limit / i) break;
            pw *= i;
            ++k;
        }
    }
    std::sort(entries->begin(), entries->end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    long double psi = 0;
    for (auto& e : *entries) {
        psi += std::log(static_cast<long double>(e.prime));
        e.psi = psi;
    }
    limit_ = limit;
    entries_ = std::move(entries);
}

std::vector<std::uint32_t> PrimePowerTable::primes_up_to(std::uint64_t limit) {
    auto snap = covering(std::max<std::uint64_t>(limit, 2));
    std::vector<std::uint32_t> primes;
    for (const auto& e : *snap) {
        if (e.value > limit) break;
        if (e.exponent == 1) primes.push_back(e.prime);
    }
    return primes;
}

std::size_t upper_index(const std::vector<PrimePowerEntry>& table, std::uint64_t n) {
    return static_cast<std::size_t>(
        std::upper_bound(table.begin(), table.end(), n, [](std::uint64_t v, const auto& e) { return v < e.value; }) -
        table.begin());
}

long double chebyshev_psi(std::uint64_t n) {
    if (n < 2) return 0;
    auto snap = PrimePowerTable::instance().covering(n);
    const auto idx = upper_index(*snap, n);
    return idx == 0 ? 0.0L : (*snap)[idx - 1].psi;
}

long double log_phi(const PrimePower& q) {
    const long double psi = chebyshev_psi(q.magnitude());
    return q.is_integral() ? psi : std::log(static_cast<long double>(q.prime())) - psi;
}

}  // namespace adelic
