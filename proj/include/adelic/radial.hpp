#pragma once

// Radial functions on A_f: exact step functions, analytic profiles with
// certified tail bounds, integration over sphere decompositions and the
// radial Fourier transform
//     f^(x) = sum_{q < 1/||x||} Phi(q) (f(q) - f(q_+)).

#include "adelic/primepow.hpp"

#include <json.hpp>

#include <complex>
#include <map>
#include <optional>
#include <vector>

namespace adelic {

/// A norm value: nullopt stands for 0, otherwise a prime power.
using Radius = std::optional<PrimePower>;

/// Exact complex rational.
struct ComplexRational {
    Rational re{0};
    Rational im{0};

    ComplexRational() = default;
    ComplexRational(Rational r) : re(std::move(r)) {}
    ComplexRational(long v) : re(v) {}
    ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    ComplexRational conj() const { return {re, -im}; }
    Rational norm2() const { return re * re + im * im; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    ComplexRational& operator+=(const ComplexRational& b) { return *this = *this + b; }
    friend bool operator==(const ComplexRational& a, const ComplexRational& b) { return a.re == b.re && a.im == b.im; }
};

/// Step function value(||x||): inner_value on B_{inner_radius}, values[s] on
/// each sphere S_s with inner_radius < s <= support_radius (absent keys are 0),
/// and 0 outside B_{support_radius}.  Zero entries are never stored, so two
/// steps with the same envelope are equal iff they are the same function.
template <class Scalar>
struct BasicRadialStep {
    PrimePower inner_radius{2, -1};
    PrimePower support_radius{2, -1};
    Scalar inner_value{};
    std::map<PrimePower, Scalar> values;

    /// Value at norm r; r = nullopt is the origin.
    Scalar at(const Radius& r) const;
    /// Drops zero entries; throws std::invalid_argument on keys outside the envelope.
    void normalize();

    /// Same function, envelopes ignored.
    bool same_function(const BasicRadialStep& other) const;
    friend bool operator==(const BasicRadialStep&, const BasicRadialStep&) = default;
};

using RadialStep = BasicRadialStep<ComplexRational>;
using RadialStepD = BasicRadialStep<std::complex<double>>;

RadialStep ball_indicator(const PrimePower& r);
RadialStep sphere_indicator(const PrimePower& r);
RadialStep zero_step();

RadialStepD to_double(const RadialStep& f);

template <class Scalar>
BasicRadialStep<Scalar> ft_radial_step(const BasicRadialStep<Scalar>& f);

/// Exact for RadialStep: c0 Phi(r0) + sum_s f(s) (Phi(s) - Phi(s_-)).
template <class Scalar>
Scalar integrate_radial(const BasicRadialStep<Scalar>& f);

enum class CombineOp { Add, Multiply };

/// Add: f + scalar * g.  Multiply: scalar * f * g.
template <class Scalar>
BasicRadialStep<Scalar> combine(const BasicRadialStep<Scalar>& f, const BasicRadialStep<Scalar>& g, CombineOp op,
                                const Scalar& scalar = Scalar(1));
template <class Scalar>
BasicRadialStep<Scalar> scale(const BasicRadialStep<Scalar>& f, const Scalar& s);
/// |f|^2 as a step.
template <class Scalar>
BasicRadialStep<Scalar> abs_squared(const BasicRadialStep<Scalar>& f);

/// Prime powers q in (a, b] together with Phi(q), computed incrementally via
/// Phi(q) = p Phi(q_-).
std::vector<std::pair<PrimePower, Rational>> phi_range(const PrimePower& a, const PrimePower& b);

/// JSON: {"inner_radius": "p^k", "support_radius": "p^k", "inner_value": v,
/// "values": {"p^k": v, ...}}.  Exact scalars are integers, "a/b" strings or
/// {"re": ., "im": .} objects; doubles are plain numbers or {"re", "im"}.
nlohmann::json to_json(const RadialStep& f);
nlohmann::json to_json(const RadialStepD& f);
RadialStep radial_step_from_json(const nlohmann::json& j);
RadialStepD radial_step_d_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Analytic profiles

/// r |-> r^gamma exp(-t r^alpha); t = 0 gives a pure power, gamma = t = 0 the
/// constant 1.  Evaluated at r = 0 as the limit (1 if gamma = 0, else 0).
struct Symbol {
    double gamma = 0;
    double t = 0;
    double alpha = 1;

    static Symbol one() { return {}; }
    static Symbol heat(double t, double alpha) { return {0, t, alpha}; }
    static Symbol power(double gamma) { return {gamma, 0, 1}; }
    static Symbol power_heat(double gamma, double t, double alpha) { return {gamma, t, alpha}; }

    double operator()(const Radius& r) const;
    /// Upper bound on the total variation of the symbol over [0, x].
    double variation_below(long double x) const;
    /// Upper bound on sup of the symbol over [0, x].
    double sup_below(long double x) const;
    bool decays() const { return t > 0; }
};

/// weight * mask(r) * symbol(r); the mask, when present, confines the term
/// to a compact set and fixes it below the mask's inner radius.
struct AnalyticTerm {
    std::complex<double> weight{1, 0};
    std::optional<RadialStepD> mask;
    Symbol symbol;
};

/// Finite sum of analytic terms.
struct RadialAnalytic {
    std::vector<AnalyticTerm> terms;

    std::complex<double> operator()(const Radius& r) const;

    /// Bound on sum_{q <= x} |f(q) - f(q_+)| for x below every mask's inner radius.
    double variation_below(long double x) const;
    /// Bound on sup |f| over radii <= x, same restriction on x.
    double sup_below(long double x) const;
    /// Bound on sum over integers k > x of |f|-weighted Phi growth, i.e. on
    /// both sum_{q > x} Phi(q) |f(q) - f(q_+)| and sum_{s > x} |f(s)| vol(S_s).
    /// Returns +inf when no bound is available yet at this x.
    double large_tail(double x) const;
    /// Smallest inner radius over masks (nullopt when no masks).
    std::optional<PrimePower> min_inner_radius() const;
    /// Largest support radius over masks.
    std::optional<PrimePower> max_support_radius() const;
    bool has_unmasked_growth() const;
};

struct Certified {
    std::complex<double> value;
    double error_bound = 0;
    std::size_t terms = 0;
};

struct TruncationLimits {
    std::size_t max_terms = 20'000'000;
};

/// Radial FT of an analytic profile at norm r, within tol.
Certified ft_radial_eval(const RadialAnalytic& f, const Radius& r, double tol, const TruncationLimits& lim = {});
/// Sphere sum of an analytic profile within tol.
Certified integrate_radial(const RadialAnalytic& f, double tol, const TruncationLimits& lim = {});

/// Profile of a step function as an analytic term.
RadialAnalytic as_analytic(const RadialStepD& f);

/// Sum_{k >= n} exp(c k + gamma ln k - t k^alpha) over integers, bounded by
/// concavity of the exponent once it is decreasing; +inf if not yet decreasing.
long double growth_tail_bound(double n, double c, double gamma, double t, double alpha);

/// Explicit Chebyshev constant: psi(x) < 1.04 x for x > 0.
inline constexpr double kChebyshevConstant = 1.04;

}  // namespace adelic
