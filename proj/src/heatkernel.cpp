#include "adelic/heatkernel.hpp"

#include "adelic/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace adelic {

namespace {

constexpr std::size_t kMaxTerms = 20'000'000;

long double pow_ld(const PrimePower& q, double alpha) {
    return std::exp(static_cast<long double>(alpha) * q.log());
}

// ln of Phi(q) (exp(-t q^alpha) - exp(-t q_+^alpha)).
long double log_term(const PrimePower& q, const PrimePower& next, const KernelParams& kp) {
    const long double a = kp.t * pow_ld(q, kp.alpha);
    const long double b = kp.t * pow_ld(next, kp.alpha);
    return log_phi(q) - a + std::log(-std::expm1(a - b));
}

// ln of the small-radius remainder bound Phi(rho) (1 - exp(-t rho_+^alpha)).
long double log_small_tail(const PrimePower& rho, const KernelParams& kp) {
    return log_phi(rho) + std::log(-std::expm1(-kp.t * pow_ld(next_pp(rho), kp.alpha)));
}

long double log_add(long double a, long double b) {
    if (a == -std::numeric_limits<long double>::infinity()) return b;
    if (b == -std::numeric_limits<long double>::infinity()) return a;
    const long double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

PrimePower integer_pp_at_most(long double x) {
    return prev_pp(Rational(static_cast<long>(std::floor(x)) + 1));
}

}  // namespace

void KernelParams::validate() const {
    if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("t must be positive");
    if (!(alpha > 1) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must exceed 1");
    if (beta && !(*beta > 0 && *beta <= 2)) throw std::invalid_argument("beta must lie in (0, 2]");
}

KernelValue z_finite(const Radius& r, const KernelParams& params, double tol) {
    params.validate();
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    const long double log_budget = std::log(static_cast<long double>(tol) / 2);

    PrimePower rho = PrimePower(2, -1);
    if (r && r->reciprocal() <= rho) rho = prev_pp(r->reciprocal());
    std::size_t steps = 0;
    while (log_small_tail(rho, params) > log_budget) {
        rho = prev_pp(rho);
        if (++steps > kMaxTerms) throw ToleranceError("small-radius truncation did not converge");
    }
    const double small = static_cast<double>(std::exp(log_small_tail(rho, params)));

    double large = 0;
    std::vector<PrimePower> qs;
    if (r) {
        const PrimePower top = r->reciprocal();
        if (rho < top) {
            qs = pp_range(rho.value(), top.value());
            if (!qs.empty() && qs.back() == top) qs.pop_back();
        }
    } else {
        // sum over integers k > X of exp(1.04 k - t k^alpha) bounds the rest.
        double x = 2;
        while (true) {
            const long double b = growth_tail_bound(x + 1, kChebyshevConstant, 0, params.t, params.alpha);
            if (b <= tol / 2) {
                large = static_cast<double>(b);
                break;
            }
            x *= 2;
            if (x > static_cast<double>(PrimePowerTable::kMaxLimit)) {
                throw ToleranceError("large-radius truncation exceeds the prime power table");
            }
        }
        qs = pp_range(rho.value(), Rational(static_cast<long>(x)));
    }
    if (qs.size() > kMaxTerms) throw ToleranceError("iteration cap exceeded in heat kernel");

    long double sum = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const PrimePower next = i + 1 < qs.size() ? qs[i + 1] : next_pp(qs[i]);
        sum += std::exp(log_term(qs[i], next, params));
    }
    // Every term is non-negative; guard against a corrupted sum anyway.
    if (sum < 0) {
        if (sum < -10 * std::numeric_limits<long double>::epsilon()) throw ToleranceError("negative heat kernel value");
        sum = 0;
    }
    return {sum, small + large, qs.size()};
}

SphereMasses sphere_masses(const KernelParams& params, const PrimePower& r_min, const PrimePower& r_max) {
    params.validate();
    if (r_max < r_min) throw std::invalid_argument("r_min exceeds r_max");
    const PrimePower q_high = prev_pp(r_min.reciprocal());
    // Contributions of q <= q_low to radii <= r_max total at most
    // Phi(r_max) Phi(q_low) (1 - exp(-t q_low_+^alpha)).
    const long double log_phi_max = log_phi(r_max);
    const long double log_eps = std::log(1e-18L);
    PrimePower q_low = prev_pp(r_max.reciprocal());
    std::size_t steps = 0;
    while (log_phi_max + log_small_tail(q_low, params) > log_eps) {
        q_low = prev_pp(q_low);
        if (++steps > kMaxTerms) throw ToleranceError("sphere mass truncation did not converge");
    }
    const long double inner_loss = std::exp(log_phi_max + log_small_tail(q_low, params));

    std::vector<PrimePower> qs;
    if (q_low < q_high) qs = pp_range(q_low.value(), q_high.value());
    if (qs.size() > kMaxTerms) throw ToleranceError("iteration cap exceeded in sphere masses");
    std::vector<long double> log_prefix(qs.size());
    long double acc = -std::numeric_limits<long double>::infinity();
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const PrimePower next = i + 1 < qs.size() ? qs[i + 1] : next_pp(qs[i]);
        acc = log_add(acc, log_term(qs[i], next, params));
        log_prefix[i] = acc;
    }

    SphereMasses out;
    std::vector<PrimePower> radii{r_min};
    if (r_min < r_max) {
        auto rest = pp_range(r_min.value(), r_max.value());
        radii.insert(radii.end(), rest.begin(), rest.end());
    }
    out.entries.reserve(radii.size());
    for (const auto& r : radii) {
        const PrimePower bound = r.reciprocal();
        const auto idx = static_cast<std::size_t>(std::lower_bound(qs.begin(), qs.end(), bound) - qs.begin());
        long double mass = 0;
        if (idx > 0) {
            const long double log_vol = log_phi(r) + std::log1p(-1.0L / static_cast<long double>(r.prime()));
            mass = std::exp(log_prefix[idx - 1] + log_vol);
        }
        out.entries.push_back({r, mass});
    }

    // Mass at radii > r_max is at most sum_{q < 1/r_max} (exp(-t q^alpha) -
    // exp(-t q_+^alpha)) = 1 - exp(-t r_max^-alpha), since
    // Phi(q) vol(B_{(1/q)_-}) = 1.  Below r_min it is at most Z(0) Phi(r_min_-).
    const long double upper = -std::expm1(-params.t * pow_ld(r_max.reciprocal(), params.alpha));
    const KernelValue z0 = z_finite(std::nullopt, params, 1.0);
    const long double lower = std::exp(std::log(z0.value + z0.error_bound) + log_phi(prev_pp(r_min)));
    out.outside_bound = static_cast<double>(upper + lower + inner_loss);
    return out;
}

PrimePower outer_radius_for(const KernelParams& params, double eps) {
    params.validate();
    const long double r_real = std::pow(params.t / -std::log1p(-static_cast<long double>(eps)), 1.0L / params.alpha);
    return next_pp(Rational(static_cast<long>(std::ceil(r_real))));
}

PrimePower inner_radius_for(const KernelParams& params, double eps) {
    const KernelValue z0 = z_finite(std::nullopt, params, 1.0);
    const long double log_z0 = std::log(z0.value + z0.error_bound);
    long double m = 2;
    PrimePower below = integer_pp_at_most(m).reciprocal();
    while (log_z0 + log_phi(below) > std::log(static_cast<long double>(eps))) {
        m *= 2;
        if (m > PrimePowerTable::kMaxLimit) throw ToleranceError("lower radius cutoff not reached");
        below = integer_pp_at_most(m).reciprocal();
    }
    return next_pp(below);
}

NormalizationResult normalization(const KernelParams& params, double tol) {
    params.validate();
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    const PrimePower r_max = outer_radius_for(params, tol / 4);
    const PrimePower r_min = inner_radius_for(params, tol / 4);
    const SphereMasses masses = sphere_masses(params, r_min, r_max);
    long double total = 0;
    for (const auto& e : masses.entries) total += e.mass;
    const double rounding = static_cast<double>(masses.entries.size()) * 4 * std::numeric_limits<long double>::epsilon();
    return {total, masses.outside_bound + rounding, masses.entries.size()};
}

NormalizationResult tail_mass(const PrimePower& eps, const KernelParams& params, double tol) {
    params.validate();
    PrimePower r_max = outer_radius_for(params, tol / 2);
    const PrimePower r_min = next_pp(eps);
    if (r_max < r_min) r_max = r_min;
    const SphereMasses masses = sphere_masses(params, r_min, r_max);
    long double total = 0;
    for (const auto& e : masses.entries) total += e.mass;
    const long double upper = -std::expm1(-params.t * pow_ld(r_max.reciprocal(), params.alpha));
    return {total, static_cast<double>(upper), masses.entries.size()};
}

NormalizationResult escape_mass(const PrimePower& eps, const KernelParams& params, double tol) {
    params.validate();
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    // int_{B_eps} Z = Phi(eps) int_{B_{(1/eps)_-}} exp(-t ||xi||^alpha) d xi and
    // Phi(eps) vol(B_{(1/eps)_-}) = 1, so the escape mass is
    // Phi(eps) sum_{s <= (1/eps)_-} vol(S_s) (1 - exp(-t s^alpha)); the part with
    // s <= rho is at most Phi(eps) Phi(rho) (1 - exp(-t rho^alpha)).
    const long double log_phi_eps = log_phi(eps);
    const long double log_budget = std::log(static_cast<long double>(tol) / 2);
    long double total = 0;
    std::size_t terms = 0;
    PrimePower s = prev_pp(eps.reciprocal());
    while (true) {
        const long double ts = params.t * pow_ld(s, params.alpha);
        const long double log_loss = std::log(-std::expm1(-ts));
        if (log_phi_eps + log_phi(s) + log_loss < log_budget) break;
        const long double log_vol = log_phi(s) + std::log1p(-1.0L / static_cast<long double>(s.prime()));
        total += std::exp(log_phi_eps + log_vol + log_loss);
        s = prev_pp(s);
        if (++terms > kMaxTerms) throw ToleranceError("escape mass did not converge");
    }
    const double rounding = static_cast<double>(terms + 1) * 4 * std::numeric_limits<long double>::epsilon();
    return {total, tol / 2 + rounding * static_cast<double>(total), terms};
}

Certified moment_integral(const KernelParams& params, double weight, double tol) {
    params.validate();
    if (weight < 0) throw std::invalid_argument("moment weight must be non-negative");
    RadialAnalytic f;
    f.terms.push_back({1.0, std::nullopt, Symbol::power_heat(weight, params.t, params.alpha)});
    return integrate_radial(f, tol);
}

TailBound tail_mass_bound(const PrimePower& eps, const KernelParams& params) {
    params.validate();
    const double alpha = params.alpha;
    const std::uint64_t n = std::max<std::uint64_t>(1 << 20, eps.is_integral() ? eps.magnitude() : 2);
    long double partial = 0;
    for (const auto& q : pp_range(eps.value(), Rational(static_cast<long>(n)))) {
        partial += std::exp(-alpha * q.log());
    }
    // Primes above n: partial summation against theta(x) <= 1.04 x gives
    //   sum_{p > n} p^-alpha <= 1.04 (alpha + 1/ln n) n^(1-alpha) / ((alpha-1) ln n).
    const long double ln_n = std::log(static_cast<long double>(n));
    long double rest = kChebyshevConstant * (alpha + 1 / ln_n) * std::pow(static_cast<long double>(n), 1 - alpha) /
                       ((alpha - 1) * ln_n);
    // Higher powers m^k > n, k >= 2, over all integers m >= 2:
    //   sum_{m >= m_k} m^(-k alpha) <= m_k^(-k alpha) (1 + m_k / (k alpha - 1)).
    for (int k = 2; k < 400; ++k) {
        const long double mk = std::max(2.0L, std::floor(std::pow(static_cast<long double>(n), 1.0L / k)) + 1);
        const long double term = std::pow(mk, -k * alpha) * (1 + mk / (k * alpha - 1));
        rest += term;
        if (mk == 2 && term < 1e-30L) {
            rest += term * 2;  // geometric remainder in k, ratio <= 2^-alpha < 1/2
            break;
        }
    }
    return {static_cast<double>(2 * params.t * (partial + rest)), static_cast<double>(2 * params.t * partial)};
}

double z_real_quadrature(double x, double t, double beta, double tol) {
    if (!(t > 0) || !(beta > 0 && beta <= 2)) throw std::invalid_argument("invalid real kernel parameters");
    using boost::math::quadrature::gauss_kronrod;
    // Cut the xi-integral where int_Xi^inf exp(-t xi^beta) <= tol / 4, via the
    // upper incomplete gamma function.
    const double a = 1 / beta;
    const double scale = std::tgamma(a) / (beta * std::pow(t, a));
    double xi = std::pow(1 / t, a);
    while (2 * scale * boost::math::gamma_q(a, t * std::pow(xi, beta)) > tol / 4) xi *= 2;
    const double ax = std::abs(x);
    double panel = xi;
    if (ax > 0) panel = std::min(panel, 1 / (2 * ax));  // half periods of the cosine
    const double panels = std::ceil(xi / panel);
    if (panels > 4096) {
        // Far out the cosine oscillates too fast for panels; Ooura's double-exponential rule for Fourier integrals.
        thread_local boost::math::quadrature::ooura_fourier_cos<double> fourier(1e-13, 12);
        auto g = [&](double s) { return std::exp(-t * std::pow(s, beta)); };
        return 2 * fourier.integrate(g, 2 * std::numbers::pi * ax).first;
    }
    auto f = [&](double s) { return std::cos(2 * std::numbers::pi * x * s) * std::exp(-t * std::pow(s, beta)); };
    double total = 0;
    const double local_abs = tol / (4 * panels);
    for (double k = 0; k < panels; ++k) {
        const double lo = k * panel;
        const double hi = std::min(xi, lo + panel);
        // |f| <= exp(-t lo^beta) on the panel; turn the absolute budget into a relative one.
        const double l1 = (hi - lo) * std::exp(-t * std::pow(lo, beta));
        const double rel = std::clamp(local_abs / std::max(l1, 1e-300), 1e-14, 1e-2);
        total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, rel);
    }
    return 2 * total;
}

double z_real(double x, double t, double beta, double tol) {
    if (!(t > 0) || !(beta > 0 && beta <= 2)) throw std::invalid_argument("invalid real kernel parameters");
    constexpr double pi = std::numbers::pi;
    if (beta == 2) return std::sqrt(pi / t) * std::exp(-pi * pi * x * x / t);
    if (beta == 1) return 2 * t / (t * t + 4 * pi * pi * x * x);
    return z_real_quadrature(x, t, beta, std::max(tol, 1e-10));
}

double real_kernel_constant(double beta) {
    // C t^(1/beta) / (t^(2/beta) + x^2) at x = 0, t = 1 is C.
    return z_real(0, 1, beta);
}

KernelValue z_adelic(double x_real, const Radius& r, const KernelParams& params, double tol) {
    params.validate();
    if (!params.beta) throw std::invalid_argument("adelic kernel needs beta");
    const double zr = z_real(x_real, params.t, *params.beta, tol);
    KernelValue zf = z_finite(r, params, tol);
    zf.value *= zr;
    zf.error_bound *= zr;
    return zf;
}

}  // namespace adelic
