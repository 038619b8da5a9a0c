#include "adelic/radial.hpp"

#include "adelic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adelic {

namespace {

bool is_zero(const ComplexRational& z) { return z.is_zero(); }
bool is_zero(const std::complex<double>& z) { return z == 0.0; }

template <class Scalar>
Scalar from_rational(const Rational& r);
template <>
ComplexRational from_rational<ComplexRational>(const Rational& r) {
    return ComplexRational(r);
}
template <>
std::complex<double> from_rational<std::complex<double>>(const Rational& r) {
    return {r.get_d(), 0.0};
}

ComplexRational abs2(const ComplexRational& z) { return ComplexRational(z.norm2()); }
std::complex<double> abs2(const std::complex<double>& z) { return {std::norm(z), 0.0}; }

// Every prime power in [a, b], ascending.
std::vector<PrimePower> closed_range(const PrimePower& a, const PrimePower& b) {
    std::vector<PrimePower> out{a};
    if (a < b) {
        auto rest = pp_range(a.value(), b.value());
        out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BasicRadialStep

template <class Scalar>
Scalar BasicRadialStep<Scalar>::at(const Radius& r) const {
    if (!r || *r <= inner_radius) return inner_value;
    if (*r > support_radius) return Scalar{};
    auto it = values.find(*r);
    return it == values.end() ? Scalar{} : it->second;
}

template <class Scalar>
void BasicRadialStep<Scalar>::normalize() {
    if (inner_radius > support_radius) throw std::invalid_argument("inner radius exceeds support radius");
    for (auto it = values.begin(); it != values.end();) {
        if (it->first <= inner_radius || it->first > support_radius) {
            throw std::invalid_argument("radius " + it->first.to_string() + " outside (" + inner_radius.to_string() +
                                        ", " + support_radius.to_string() + "]");
        }
        it = is_zero(it->second) ? values.erase(it) : std::next(it);
    }
}

template <class Scalar>
bool BasicRadialStep<Scalar>::same_function(const BasicRadialStep& other) const {
    if (!(at(std::nullopt) == other.at(std::nullopt))) return false;
    const auto lo = std::min(inner_radius, other.inner_radius);
    const auto hi = std::max(support_radius, other.support_radius);
    for (const auto& q : closed_range(lo, hi)) {
        if (!(at(q) == other.at(q))) return false;
    }
    return true;
}

RadialStep ball_indicator(const PrimePower& r) {
    RadialStep f;
    f.inner_radius = r;
    f.support_radius = r;
    f.inner_value = ComplexRational(1);
    return f;
}

RadialStep sphere_indicator(const PrimePower& r) {
    RadialStep f;
    f.inner_radius = prev_pp(r);
    f.support_radius = r;
    f.inner_value = ComplexRational(0);
    f.values[r] = ComplexRational(1);
    return f;
}

RadialStep zero_step() {
    RadialStep f;
    f.inner_value = ComplexRational(0);
    return f;
}

RadialStepD to_double(const RadialStep& f) {
    RadialStepD g;
    g.inner_radius = f.inner_radius;
    g.support_radius = f.support_radius;
    g.inner_value = f.inner_value.to_complex();
    for (const auto& [r, v] : f.values) g.values[r] = v.to_complex();
    g.normalize();
    return g;
}

std::vector<std::pair<PrimePower, Rational>> phi_range(const PrimePower& a, const PrimePower& b) {
    std::vector<std::pair<PrimePower, Rational>> out;
    if (!(a < b)) return out;
    Rational current = phi(a);
    for (const auto& q : pp_range(a.value(), b.value())) {
        current *= q.prime();  // Phi(q) = p Phi(q_-)
        out.emplace_back(q, current);
    }
    return out;
}

template <class Scalar>
BasicRadialStep<Scalar> ft_radial_step(const BasicRadialStep<Scalar>& f) {
    // Differences f(q) - f(q_+) vanish outside [r0, R].
    std::vector<PrimePower> qs{f.inner_radius};
    std::vector<Scalar> prefix;
    Scalar acc{};
    auto range = phi_range(f.inner_radius, f.support_radius);
    Scalar prev_value = f.inner_value;
    Rational prev_phi = phi(f.inner_radius);
    for (const auto& [q, ph] : range) {
        const Scalar v = f.at(q);
        acc = acc + from_rational<Scalar>(prev_phi) * (prev_value - v);
        prefix.push_back(acc);
        qs.push_back(q);
        prev_value = v;
        prev_phi = ph;
    }
    acc = acc + from_rational<Scalar>(prev_phi) * prev_value;  // f(R_+) = 0
    prefix.push_back(acc);

    BasicRadialStep<Scalar> g;
    g.inner_radius = prev_pp(f.support_radius.reciprocal());
    g.support_radius = prev_pp(f.inner_radius.reciprocal());
    g.inner_value = prefix.back();
    for (const auto& rho : pp_range(g.inner_radius.value(), g.support_radius.value())) {
        // sum over q < 1/rho
        const auto bound = rho.reciprocal();
        const auto idx = static_cast<std::size_t>(std::lower_bound(qs.begin(), qs.end(), bound) - qs.begin());
        if (idx > 0) g.values[rho] = prefix[idx - 1];
    }
    g.normalize();
    return g;
}

template <class Scalar>
Scalar integrate_radial(const BasicRadialStep<Scalar>& f) {
    Scalar acc = f.inner_value * from_rational<Scalar>(phi(f.inner_radius));
    Rational prev = phi(f.inner_radius);
    if (f.values.empty()) return acc;
    for (const auto& [q, ph] : phi_range(f.inner_radius, f.values.rbegin()->first)) {
        auto it = f.values.find(q);
        if (it != f.values.end()) acc = acc + it->second * from_rational<Scalar>(ph - prev);
        prev = ph;
    }
    return acc;
}

template <class Scalar>
BasicRadialStep<Scalar> combine(const BasicRadialStep<Scalar>& f, const BasicRadialStep<Scalar>& g, CombineOp op,
                                const Scalar& scalar) {
    BasicRadialStep<Scalar> h;
    if (op == CombineOp::Add) {
        h.inner_radius = std::min(f.inner_radius, g.inner_radius);
        h.support_radius = std::max(f.support_radius, g.support_radius);
        h.inner_value = f.inner_value + scalar * g.inner_value;
    } else {
        h.support_radius = std::min(f.support_radius, g.support_radius);
        h.inner_radius = std::min(std::min(f.inner_radius, g.inner_radius), h.support_radius);
        h.inner_value = scalar * f.inner_value * g.inner_value;
    }
    if (h.inner_radius < h.support_radius) {
        for (const auto& q : pp_range(h.inner_radius.value(), h.support_radius.value())) {
            const Scalar v = op == CombineOp::Add ? f.at(q) + scalar * g.at(q) : scalar * f.at(q) * g.at(q);
            if (!is_zero(v)) h.values[q] = v;
        }
    }
    h.normalize();
    return h;
}

template <class Scalar>
BasicRadialStep<Scalar> scale(const BasicRadialStep<Scalar>& f, const Scalar& s) {
    BasicRadialStep<Scalar> h = f;
    h.inner_value = s * f.inner_value;
    for (auto& [q, v] : h.values) v = s * v;
    h.normalize();
    return h;
}

template <class Scalar>
BasicRadialStep<Scalar> abs_squared(const BasicRadialStep<Scalar>& f) {
    BasicRadialStep<Scalar> h = f;
    h.inner_value = abs2(f.inner_value);
    for (auto& [q, v] : h.values) v = abs2(v);
    return h;
}

#define ADELIC_INSTANTIATE(S)                                                                                   \
    template struct BasicRadialStep<S>;                                                                          \
    template BasicRadialStep<S> ft_radial_step(const BasicRadialStep<S>&);                                       \
    template S integrate_radial(const BasicRadialStep<S>&);                                                      \
    template BasicRadialStep<S> combine(const BasicRadialStep<S>&, const BasicRadialStep<S>&, CombineOp, const S&); \
    template BasicRadialStep<S> scale(const BasicRadialStep<S>&, const S&);                                      \
    template BasicRadialStep<S> abs_squared(const BasicRadialStep<S>&);

ADELIC_INSTANTIATE(ComplexRational)
ADELIC_INSTANTIATE(std::complex<double>)
#undef ADELIC_INSTANTIATE

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json rational_json(const Rational& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
    return r.get_str();
}

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return Rational(Integer(std::to_string(j.get<std::uint64_t>())));
        return Rational(Integer(std::to_string(j.get<std::int64_t>())));
    }
    if (j.is_number_float()) {
        Rational r;
        mpq_set_d(r.get_mpq_t(), j.get<double>());
        return r;
    }
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("expected a number, got " + j.dump());
}

nlohmann::json scalar_json(const ComplexRational& z) {
    if (sgn(z.im) == 0) return rational_json(z.re);
    return {{"re", rational_json(z.re)}, {"im", rational_json(z.im)}};
}

nlohmann::json scalar_json(const std::complex<double>& z) {
    if (z.imag() == 0.0) return z.real();
    return {{"re", z.real()}, {"im", z.imag()}};
}

ComplexRational exact_scalar_from_json(const nlohmann::json& j) {
    if (j.is_object()) {
        return {rational_from_json(j.at("re")), j.contains("im") ? rational_from_json(j.at("im")) : Rational(0)};
    }
    return ComplexRational(rational_from_json(j));
}

std::complex<double> double_scalar_from_json(const nlohmann::json& j) {
    auto real = [](const nlohmann::json& v) { return v.is_number() ? v.get<double>() : rational_from_json(v).get_d(); };
    if (j.is_object()) return {real(j.at("re")), j.contains("im") ? real(j.at("im")) : 0.0};
    return {real(j), 0.0};
}

template <class Scalar>
nlohmann::json step_json(const BasicRadialStep<Scalar>& f) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [q, v] : f.values) values[q.to_string()] = scalar_json(v);
    return {{"inner_radius", f.inner_radius.to_string()},
            {"support_radius", f.support_radius.to_string()},
            {"inner_value", scalar_json(f.inner_value)},
            {"values", values}};
}

template <class Scalar, class Conv>
BasicRadialStep<Scalar> step_from_json(const nlohmann::json& j, Conv conv) {
    BasicRadialStep<Scalar> f;
    f.inner_radius = PrimePower::parse(j.at("inner_radius").get<std::string>());
    f.support_radius = PrimePower::parse(j.at("support_radius").get<std::string>());
    f.inner_value = conv(j.at("inner_value"));
    if (j.contains("values")) {
        for (const auto& [key, v] : j.at("values").items()) f.values[PrimePower::parse(key)] = conv(v);
    }
    f.normalize();
    return f;
}

}  // namespace

nlohmann::json to_json(const RadialStep& f) { return step_json(f); }
nlohmann::json to_json(const RadialStepD& f) { return step_json(f); }

RadialStep radial_step_from_json(const nlohmann::json& j) {
    return step_from_json<ComplexRational>(j, exact_scalar_from_json);
}

RadialStepD radial_step_d_from_json(const nlohmann::json& j) {
    return step_from_json<std::complex<double>>(j, double_scalar_from_json);
}

// ---------------------------------------------------------------------------
// Analytic profiles

double Symbol::operator()(const Radius& r) const {
    if (!r) return gamma == 0 ? 1.0 : 0.0;
    const long double x = r->to_long_double();
    long double v = gamma == 0 ? 1.0L : std::pow(x, static_cast<long double>(gamma));
    if (t > 0) v *= std::exp(-static_cast<long double>(t) * std::pow(x, static_cast<long double>(alpha)));
    return static_cast<double>(v);
}

double Symbol::variation_below(long double x) const {
    if (gamma == 0) {
        if (t == 0) return 0.0;
        return static_cast<double>(-std::expm1(-static_cast<long double>(t) * std::pow(x, static_cast<long double>(alpha))));
    }
    const auto xg = static_cast<double>(std::pow(x, static_cast<long double>(gamma)));
    // Rises then falls when t > 0, so twice the supremum bounds the variation.
    return t == 0 ? xg : 2 * xg;
}

double Symbol::sup_below(long double x) const {
    if (gamma == 0) return 1.0;
    return static_cast<double>(std::pow(x, static_cast<long double>(gamma)));
}

std::complex<double> RadialAnalytic::operator()(const Radius& r) const {
    std::complex<double> acc = 0;
    for (const auto& term : terms) {
        const double s = term.symbol(r);
        if (s == 0) continue;
        acc += term.weight * (term.mask ? term.mask->at(r) : std::complex<double>(1)) * s;
    }
    return acc;
}

double RadialAnalytic::variation_below(long double x) const {
    double v = 0;
    for (const auto& term : terms) {
        const double c = term.mask ? std::abs(term.mask->inner_value) : 1.0;
        v += std::abs(term.weight) * c * term.symbol.variation_below(x);
    }
    return v;
}

double RadialAnalytic::sup_below(long double x) const {
    double v = 0;
    for (const auto& term : terms) {
        const double c = term.mask ? std::abs(term.mask->inner_value) : 1.0;
        v += std::abs(term.weight) * c * term.symbol.sup_below(x);
    }
    return v;
}

namespace {

double large_tail_impl(const RadialAnalytic& f, double x, bool for_integral) {
    long double total = 0;
    for (const auto& term : f.terms) {
        if (term.mask) {
            if (term.mask->support_radius.to_long_double() > x) return std::numeric_limits<double>::infinity();
            continue;
        }
        const auto& s = term.symbol;
        if (s.t == 0) {
            // The constant has no variation; anything else grows unboundedly.
            if (s.gamma == 0 && !for_integral) continue;
            return std::numeric_limits<double>::infinity();
        }
        total += std::abs(term.weight) * growth_tail_bound(std::floor(x) + 1, kChebyshevConstant, s.gamma, s.t, s.alpha);
    }
    return static_cast<double>(total);
}

struct Cutoffs {
    PrimePower low{2, -1};
    double small_bound = 0;
};

// Largest-ish prime power rho_lo (below every mask's inner radius) whose
// small-radius remainder fits in the budget.  bound(rho) must be monotone.
template <class Bound>
Cutoffs choose_low_cutoff(const RadialAnalytic& f, double budget, Bound bound) {
    PrimePower cand = prev_pp(Rational(1));
    if (auto m = f.min_inner_radius(); m && *m <= cand) cand = prev_pp(*m);
    for (int iter = 0; iter < 400; ++iter) {
        const double b = bound(cand);
        if (b <= budget) return {cand, b};
        cand = prev_pp(cand.value() / 2);
    }
    throw ToleranceError("small-radius remainder does not reach the requested tolerance");
}

double upper_cutoff(const RadialAnalytic& f, double budget, bool for_integral, double& bound_out) {
    double x = 2;
    if (auto m = f.max_support_radius()) x = std::max(x, m->to_double());
    while (true) {
        const double b = large_tail_impl(f, x, for_integral);
        if (b <= budget) {
            bound_out = b;
            return x;
        }
        x *= 2;
        if (x > static_cast<double>(PrimePowerTable::kMaxLimit)) {
            throw ToleranceError("large-radius remainder does not reach the requested tolerance");
        }
    }
}

}  // namespace

double RadialAnalytic::large_tail(double x) const { return large_tail_impl(*this, x, false); }

std::optional<PrimePower> RadialAnalytic::min_inner_radius() const {
    std::optional<PrimePower> best;
    for (const auto& term : terms) {
        if (term.mask && (!best || term.mask->inner_radius < *best)) best = term.mask->inner_radius;
    }
    return best;
}

std::optional<PrimePower> RadialAnalytic::max_support_radius() const {
    std::optional<PrimePower> best;
    for (const auto& term : terms) {
        if (term.mask && (!best || term.mask->support_radius > *best)) best = term.mask->support_radius;
    }
    return best;
}

bool RadialAnalytic::has_unmasked_growth() const {
    for (const auto& term : terms) {
        if (!term.mask && term.symbol.t == 0 && term.symbol.gamma > 0) return true;
    }
    return false;
}

long double growth_tail_bound(double n, double c, double gamma, double t, double alpha) {
    if (alpha < 1 || n < 1) return std::numeric_limits<long double>::infinity();
    const long double k = n;
    const long double h = c * k + gamma * std::log(k) - t * std::pow(k, static_cast<long double>(alpha));
    const long double dh = c + gamma / k - t * alpha * std::pow(k, static_cast<long double>(alpha) - 1);
    if (dh >= 0) return std::numeric_limits<long double>::infinity();
    // h is concave, so h(n + j) <= h(n) + j h'(n): a geometric majorant.
    return std::exp(h) / -std::expm1(dh);
}

RadialAnalytic as_analytic(const RadialStepD& f) {
    RadialAnalytic a;
    a.terms.push_back({1.0, f, Symbol::one()});
    return a;
}

Certified ft_radial_eval(const RadialAnalytic& f, const Radius& r, double tol, const TruncationLimits& lim) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    const double budget = r ? tol : tol / 2;
    // sum_{q <= rho} |.| <= Phi(rho) * variation over [0, rho_+] (telescoping).
    const Cutoffs low = choose_low_cutoff(f, budget, [&](const PrimePower& rho) {
        return static_cast<double>(std::exp(log_phi(rho))) * f.variation_below(next_pp(rho).to_long_double());
    });
    double large_bound = 0;
    std::vector<PrimePower> qs;
    if (r) {
        const PrimePower top = r->reciprocal();
        if (low.low < top) {
            qs = pp_range(low.low.value(), top.value());
            if (!qs.empty() && qs.back() == top) qs.pop_back();  // strict q < 1/||x||
        }
    } else {
        if (f.has_unmasked_growth()) throw std::invalid_argument("profile is not integrable");
        const double x = upper_cutoff(f, tol / 2, false, large_bound);
        qs = pp_range(low.low.value(), Rational(static_cast<long>(std::floor(x))));
    }
    if (qs.size() > lim.max_terms) throw ToleranceError("iteration cap exceeded in radial transform");
    std::complex<long double> acc = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto fq = f(qs[i]);
        const auto fn = i + 1 < qs.size() ? f(qs[i + 1]) : f(next_pp(qs[i]));
        const long double ph = std::exp(log_phi(qs[i]));
        acc += ph * std::complex<long double>(fq - fn);
    }
    const std::complex<double> value(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw ToleranceError("radial transform overflowed double range");
    }
    return {value, low.small_bound + large_bound, qs.size()};
}

Certified integrate_radial(const RadialAnalytic& f, double tol, const TruncationLimits& lim) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    // sum_{s <= rho} |f(s)| vol(S_s) <= sup |f| * Phi(rho).
    const Cutoffs low = choose_low_cutoff(f, tol / 2, [&](const PrimePower& rho) {
        return static_cast<double>(std::exp(log_phi(rho))) * f.sup_below(rho.to_long_double());
    });
    double large_bound = 0;
    const double x = upper_cutoff(f, tol / 2, true, large_bound);
    const auto qs = pp_range(low.low.value(), Rational(static_cast<long>(std::floor(x))));
    if (qs.size() > lim.max_terms) throw ToleranceError("iteration cap exceeded in radial integral");
    std::complex<long double> acc = 0;
    for (const auto& s : qs) {
        const long double vol = std::exp(log_phi(s)) * (1.0L - 1.0L / static_cast<long double>(s.prime()));
        acc += vol * std::complex<long double>(f(s));
    }
    const std::complex<double> value(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw ToleranceError("radial integral overflowed double range");
    }
    return {value, low.small_bound + large_bound, qs.size()};
}

}  // namespace adelic
