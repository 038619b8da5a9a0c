#include "adelic/cauchy.hpp"

#include "adelic/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace adelic {

namespace {

using cd = std::complex<double>;

long double radius_power(const PrimePower& s, double gamma) {
    return std::pow(s.to_long_double(), static_cast<long double>(gamma));
}

// Multiplies every sphere coefficient of a Lizorkin spectrum by m(s).
template <class M>
RadialStepD multiply_spectrum(const RadialStepD& spec, M m) {
    RadialStepD out = spec;
    for (auto& [s, v] : out.values) v *= static_cast<double>(m(s));
    out.normalize();
    return out;
}

RadialSolution exact_from_spectrum(RadialStepD spec) {
    RadialSolution out;
    out.value = ft_radial_step(spec);
    out.spectrum = std::move(spec);
    return out;
}

RadialStepD conj_step(const RadialStepD& f) {
    RadialStepD out = f;
    out.inner_value = std::conj(out.inner_value);
    for (auto& [s, v] : out.values) v = std::conj(v);
    return out;
}

// |sum_i w_i m_i s_i|^2 as a sum of terms; all symbols must share alpha
// (or have t = 0).
RadialAnalytic abs_squared(const RadialAnalytic& f) {
    RadialAnalytic out;
    double alpha = 1;
    for (const auto& term : f.terms) {
        if (term.symbol.t > 0) alpha = term.symbol.alpha;
    }
    for (const auto& a : f.terms) {
        for (const auto& b : f.terms) {
            if ((a.symbol.t > 0 && a.symbol.alpha != alpha) || (b.symbol.t > 0 && b.symbol.alpha != alpha)) {
                throw std::invalid_argument("mixed heat exponents in one profile");
            }
            AnalyticTerm t;
            t.weight = a.weight * std::conj(b.weight);
            if (a.mask && b.mask) {
                t.mask = combine(*a.mask, conj_step(*b.mask), CombineOp::Multiply);
            } else if (a.mask) {
                t.mask = a.mask;
            } else if (b.mask) {
                t.mask = conj_step(*b.mask);
            }
            t.symbol = {a.symbol.gamma + b.symbol.gamma, a.symbol.t + b.symbol.t, alpha};
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

void shift_time(RadialAnalytic& f, double s, double alpha) {
    for (auto& term : f.terms) {
        if (term.symbol.t > 0 && term.symbol.alpha != alpha) {
            throw std::invalid_argument("solution was evolved with a different alpha");
        }
        term.symbol.t += s;
        term.symbol.alpha = alpha;
    }
}

void shift_gamma(RadialAnalytic& f, double gamma) {
    for (auto& term : f.terms) term.symbol.gamma += gamma;
}

RadialSolution evaluable_from_spectrum(const RadialStepD& spec, Symbol symbol, double tol) {
    RadialSolution out;
    EvaluableRadial e;
    e.spectrum.terms.push_back({1.0, spec, symbol});
    e.tol = tol;
    out.evaluable = std::move(e);
    return out;
}

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(scale)); }

}  // namespace

void SymbolSpec::validate() const {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
    if (beta && !(*beta > 0 && *beta <= 2)) throw std::invalid_argument("beta must lie in (0, 2]");
}

void SymbolSpec::validate_for_solver() const {
    validate();
    if (!(alpha > 1)) throw std::invalid_argument("solvers require alpha > 1");
}

// ---------------------------------------------------------------------------

Certified EvaluableRadial::operator()(const Radius& r) const {
    Certified fine = ft_radial_eval(spectrum, r, tol);
    if (coarse) {
        const Certified c = ft_radial_eval(*coarse, r, tol);
        fine.error_bound += std::abs(fine.value - c.value) / richardson + c.error_bound / richardson;
    }
    return fine;
}

std::complex<double> EvaluableRadial::integral() const { return spectrum(std::nullopt); }

std::optional<RadialStepD> EvaluableRadial::spectral_step() const {
    std::optional<PrimePower> inner, support;
    for (const auto& term : spectrum.terms) {
        if (!term.mask || term.mask->inner_value != cd(0)) return std::nullopt;
        if (!inner || term.mask->inner_radius < *inner) inner = term.mask->inner_radius;
        if (!support || term.mask->support_radius > *support) support = term.mask->support_radius;
    }
    if (!inner) return RadialStepD{};
    RadialStepD out;
    out.inner_radius = *inner;
    out.support_radius = std::max(*support, *inner);
    for (const auto& term : spectrum.terms) {
        for (const auto& [s, v] : term.mask->values) out.values[s] += term.weight * v * term.symbol(s);
    }
    out.normalize();
    return out;
}

Certified RadialSolution::at(const Radius& r) const {
    if (value) return {value->at(r), 0.0, 1};
    if (evaluable) return (*evaluable)(r);
    throw std::logic_error("empty solution");
}

Certified RadialSolution::l2_norm_squared(double tol) const {
    if (value) return {integrate_radial(adelic::abs_squared(*value)), 0.0, value->values.size() + 1};
    if (evaluable) return integrate_radial(abs_squared(evaluable->spectrum), tol);
    throw std::logic_error("empty solution");
}

RadialStepD spectrum_of(const RadialStep& f) { return to_double(ft_radial_step(f)); }

bool is_lizorkin(const RadialStep& f) { return integrate_radial(f).is_zero(); }

RadialSolution apply_operator(const RadialStep& f, double gamma, double tol, bool strict) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    const bool lizorkin = is_lizorkin(f);
    if (strict && !lizorkin) throw std::invalid_argument("input has nonzero integral; no exact result");
    RadialSolution u;
    u.spectrum = spectrum_of(f);
    u.value = to_double(f);
    return apply_operator(u, gamma, tol);
}

RadialSolution apply_operator(const RadialSolution& f, double gamma, double tol) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    if (f.exact()) {
        if (f.spectrum->inner_value == cd(0)) {
            return exact_from_spectrum(multiply_spectrum(*f.spectrum, [&](const PrimePower& s) {
                return radius_power(s, gamma);
            }));
        }
        return evaluable_from_spectrum(*f.spectrum, Symbol::power(gamma), tol);
    }
    RadialSolution out = f;
    shift_gamma(out.evaluable->spectrum, gamma);
    if (out.evaluable->coarse) shift_gamma(*out.evaluable->coarse, gamma);
    out.evaluable->tol = tol;
    return out;
}

RadialSolution solve_homogeneous(const RadialStep& u0, double t, const SymbolSpec& symbol, double tol, bool strict) {
    symbol.validate_for_solver();
    if (!(t >= 0) || !std::isfinite(t)) throw std::invalid_argument("t must be nonnegative");
    if (strict && t > 0 && !is_lizorkin(u0)) throw std::invalid_argument("input has nonzero integral; no exact result");
    RadialSolution u;
    u.spectrum = spectrum_of(u0);
    u.value = to_double(u0);
    if (t == 0) return u;
    return solve_homogeneous(u, t, symbol, tol);
}

RadialSolution solve_homogeneous(const RadialSolution& u, double s, const SymbolSpec& symbol, double tol) {
    symbol.validate_for_solver();
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("t must be nonnegative");
    if (s == 0) return u;
    const double alpha = symbol.alpha;
    if (u.exact()) {
        if (u.spectrum->inner_value == cd(0)) {
            return exact_from_spectrum(multiply_spectrum(*u.spectrum, [&](const PrimePower& q) {
                return std::exp(-static_cast<long double>(s) * radius_power(q, alpha));
            }));
        }
        return evaluable_from_spectrum(*u.spectrum, Symbol::heat(s, alpha), tol);
    }
    RadialSolution out = u;
    shift_time(out.evaluable->spectrum, s, alpha);
    if (out.evaluable->coarse) shift_time(*out.evaluable->coarse, s, alpha);
    out.evaluable->tol = tol;
    return out;
}

// ---------------------------------------------------------------------------
// Duhamel

void ForcingGrid::validate() const {
    if (times.empty() || times.size() != values.size()) throw std::invalid_argument("forcing grid needs one step per node");
    if (times.front() != 0) throw std::invalid_argument("forcing grid must start at tau = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("forcing nodes must strictly increase");
    }
    for (const auto& v : values) {
        if (v.inner_radius != values.front().inner_radius || v.support_radius != values.front().support_radius) {
            throw std::invalid_argument("forcing steps must share one (r0, R) envelope");
        }
    }
}

ForcingGrid ForcingGrid::zero(double horizon) {
    ForcingGrid g;
    g.times = {0.0, horizon};
    g.values = {zero_step(), zero_step()};
    return g;
}

namespace {

struct SpectralForcing {
    const ForcingGrid& grid;
    std::vector<RadialStepD> spectra;

    RadialStepD at(double tau) const {
        const auto& ts = grid.times;
        auto it = std::upper_bound(ts.begin(), ts.end(), tau);
        std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
        if (near(tau, ts[k], ts.back())) return spectra[k];
        if (k + 1 < ts.size() && near(tau, ts[k + 1], ts.back())) return spectra[k + 1];
        if (k + 1 >= ts.size()) throw std::invalid_argument("forcing nodes do not cover [0, t]");
        const double theta = (tau - ts[k]) / (ts[k + 1] - ts[k]);
        return combine(scale(spectra[k], cd(1 - theta)), spectra[k + 1], CombineOp::Add, cd(theta));
    }
};

RadialAnalytic duhamel_profile(const RadialStepD& u0_hat, const SpectralForcing& f, double t, double alpha,
                               Quadrature rule, std::size_t m) {
    RadialAnalytic out;
    if (u0_hat.inner_value != cd(0) || !u0_hat.values.empty()) {
        out.terms.push_back({1.0, u0_hat, Symbol::heat(t, alpha)});
    }
    const double h = t / static_cast<double>(m);
    for (std::size_t j = 0; j <= m; ++j) {
        const double tau = t * static_cast<double>(j) / static_cast<double>(m);
        double w = (j == 0 || j == m) ? 1 : (rule == Quadrature::Simpson ? (j % 2 ? 4 : 2) : 2);
        w *= rule == Quadrature::Simpson ? h / 3 : h / 2;
        RadialStepD fj = f.at(tau);
        if (fj.inner_value == cd(0) && fj.values.empty()) continue;
        const double lag = j == m ? 0.0 : t - tau;
        out.terms.push_back({w, std::move(fj), lag > 0 ? Symbol::heat(lag, alpha) : Symbol::one()});
    }
    return out;
}

}  // namespace

RadialSolution solve_nonhomogeneous(const RadialStep& u0, const ForcingGrid& f, double t, const SymbolSpec& symbol,
                                    const DuhamelOptions& opts) {
    symbol.validate_for_solver();
    f.validate();
    if (!(t >= 0) || t > f.horizon() * (1 + 1e-12)) throw std::invalid_argument("forcing nodes do not cover [0, t]");
    const std::size_t m = opts.intervals;
    if (m < 2 || (opts.rule == Quadrature::Simpson && m % 2)) {
        throw std::invalid_argument("insufficient quadrature nodes (Simpson needs an even count >= 2)");
    }
    if (t == 0) return solve_homogeneous(u0, 0, symbol, opts.tol);

    SpectralForcing forcing{f, std::vector<RadialStepD>(f.values.size())};
    const auto count = static_cast<long long>(f.values.size());
#pragma omp parallel for schedule(dynamic)
    for (long long k = 0; k < count; ++k) forcing.spectra[k] = spectrum_of(f.values[k]);

    const RadialStepD u0_hat = spectrum_of(u0);
    EvaluableRadial e;
    e.tol = opts.tol;
    e.spectrum = duhamel_profile(u0_hat, forcing, t, symbol.alpha, opts.rule, m);
    const std::size_t half = m / 2;
    Quadrature coarse_rule = opts.rule;
    if (coarse_rule == Quadrature::Simpson && half % 2) coarse_rule = Quadrature::Trapezoid;
    e.coarse = duhamel_profile(u0_hat, forcing, t, symbol.alpha, coarse_rule, half);
    // Error of the fine rule ~ |fine - coarse| / (2^order - 1).
    e.richardson = coarse_rule != opts.rule ? 1.0 : (opts.rule == Quadrature::Simpson ? 15.0 : 3.0);
    RadialSolution out;
    out.evaluable = std::move(e);
    return out;
}

// ---------------------------------------------------------------------------
// Real factor

namespace {

double sup_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// v_i = step sum_j K(|i - j|) u_j over j in [lo, hi) with j = lo mod stride,
// for i in [lo, hi) with the same residue.
std::vector<double> convolve(const std::vector<double>& kernel, const std::vector<double>& u, double h,
                             std::size_t lo, std::size_t hi, std::size_t stride) {
    std::vector<double> out(u.size(), 0.0);
    const auto first = static_cast<long long>(lo), last = static_cast<long long>(hi);
    const auto st = static_cast<long long>(stride);
#pragma omp parallel for schedule(static)
    for (long long i = first; i < last; i += st) {
        long double acc = 0;
        for (long long j = first; j < last; j += st) acc += kernel[static_cast<std::size_t>(std::llabs(i - j))] * u[j];
        out[static_cast<std::size_t>(i)] = static_cast<double>(acc) * h * static_cast<double>(stride);
    }
    return out;
}

}  // namespace

RealSolution convolve_real(const RealGrid& u, double t, double beta, double tol) {
    if (!(u.h > 0) || u.values.size() < 3) throw std::invalid_argument("real grid needs h > 0 and at least 3 samples");
    if (!(beta > 0 && beta <= 2)) throw std::invalid_argument("beta must lie in (0, 2]");
    if (!(t >= 0) || !std::isfinite(t)) throw std::invalid_argument("t must be nonnegative");
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    RealSolution out;
    out.grid = u;
    if (t == 0) return out;
    const std::size_t n = u.values.size();
    const double scale = std::max(1.0, sup_abs(u.values));
    if (u.decay == Decay::Rapid && std::max(std::abs(u.values.front()), std::abs(u.values.back())) > tol * scale) {
        throw ToleranceError("window too small: u is not negligible at the grid edges");
    }

    std::vector<double> kernel(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long k = 0; k < count; ++k) kernel[k] = z_real(u.h * static_cast<double>(k), t, beta, tol / 8);

    const std::vector<double> fine = convolve(kernel, u.values, u.h, 0, n, 1);
    const double vscale = std::max(1.0, sup_abs(fine));
    const std::vector<double> coarse = convolve(kernel, u.values, u.h, 0, n, 2);
    for (std::size_t i = 0; i < n; i += 2) {
        out.refinement_change = std::max(out.refinement_change, std::abs(fine[i] - coarse[i]) / vscale);
    }
    if (out.refinement_change >= tol / 2) {
        throw ToleranceError("real grid too coarse: refinement changes the result by " +
                             std::to_string(out.refinement_change));
    }
    if (u.decay == Decay::Rapid) {
        // The full window is adequate when it agrees with its central half.
        const std::size_t lo = n / 4, hi = n - n / 4;
        const std::vector<double> half = convolve(kernel, u.values, u.h, lo, hi, 1);
        for (std::size_t i = lo; i < hi; ++i) {
            out.window_change = std::max(out.window_change, std::abs(fine[i] - half[i]) / vscale);
        }
        if (out.window_change >= tol / 2) {
            throw ToleranceError("real window too small: halving it changes the result by " +
                                 std::to_string(out.window_change));
        }
    }
    out.grid.values = fine;
    return out;
}

AdelicSolution solve_adelic(const RealGrid& u_real, const RadialStep& u_fin, double t, const SymbolSpec& symbol,
                            double tol) {
    symbol.validate_for_solver();
    if (!symbol.beta) throw std::invalid_argument("solve_adelic needs beta");
    AdelicSolution out;
    out.real = convolve_real(u_real, t, *symbol.beta, tol);
    out.finite = solve_homogeneous(u_fin, t, symbol, tol);
    return out;
}

double apply_real_operator(const std::function<double(double)>& h_hat, double beta, double x, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    const double two_pi_x = 2 * std::numbers::pi * x;
    auto f = [&](double xi) { return std::cos(two_pi_x * xi) * std::pow(xi, beta) * h_hat(xi); };
    return 2 * gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, tol);
}

std::complex<double> apply_adelic_operator(const std::function<double(double)>& h_hat, const RadialStep& h_fin,
                                           const SymbolSpec& symbol, double x_real, const Radius& x_fin, double tol) {
    symbol.validate();
    if (!symbol.beta) throw std::invalid_argument("the adelic operator needs beta");
    if (!is_lizorkin(h_fin)) throw std::invalid_argument("finite factor must have zero integral");
    using boost::math::quadrature::gauss_kronrod;
    const double two_pi_x = 2 * std::numbers::pi * x_real;
    const double beta = *symbol.beta;
    const RadialStep spec = ft_radial_step(h_fin);
    std::complex<double> acc = 0;
    for (const auto& [s, c] : spec.values) {
        const double lambda = static_cast<double>(radius_power(s, symbol.alpha));
        auto f = [&](double xi) { return std::cos(two_pi_x * xi) * (std::pow(xi, beta) + lambda) * h_hat(xi); };
        const double real_part =
            2 * gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, tol);
        const ComplexRational wave = ft_radial_step(sphere_indicator(s)).at(x_fin);
        acc += c.to_complex() * wave.to_complex() * real_part;
    }
    return acc;
}

std::string real_grid_csv(const RealGrid& g) {
    std::ostringstream out;
    out << "x,value\n";
    char buf[80];
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.x(i), g.values[i]);
        out << buf;
    }
    return out.str();
}

RealGrid real_grid_from_csv(const std::string& text, Decay decay) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("real grid CSV rows need x,value");
        try {
            std::size_t used = 0;
            const double x = std::stod(line.substr(0, comma), &used);
            const double v = std::stod(line.substr(comma + 1));
            xs.push_back(x);
            vs.push_back(v);
        } catch (const std::invalid_argument&) {
            if (xs.empty()) continue;  // header
            throw std::invalid_argument("bad real grid row: " + line);
        }
    }
    if (xs.size() < 3) throw std::invalid_argument("real grid needs at least 3 samples");
    RealGrid g;
    g.x0 = xs.front();
    g.h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    g.decay = decay;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - g.x(i)) > 1e-9 * std::max(1.0, std::abs(xs[i]))) {
            throw std::invalid_argument("real grid must be uniform");
        }
    }
    if (!(g.h > 0)) throw std::invalid_argument("real grid x must increase");
    g.values = std::move(vs);
    return g;
}

}  // namespace adelic
