#include "adelic/verify.hpp"

#include "adelic/adele.hpp"
#include "adelic/cauchy.hpp"
#include "adelic/cli.hpp"
#include "adelic/kernels.hpp"
#include "adelic/markov.hpp"
#include "adelic/random.hpp"
#include "adelic/stats.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace adelic {

namespace {

using cd = std::complex<double>;

/// Collects pass/fail of individual checks plus a short summary.
struct Checker {
    bool ok = true;
    std::size_t checks = 0;
    std::string first_failure;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        ++checks;
        if (!cond && ok) first_failure = what;
        ok = ok && cond;
    }
    void note(const std::string& s) { notes.push_back(s); }

    std::string detail() const {
        std::string d = std::to_string(checks) + " checks";
        for (const auto& n : notes) d += "; " + n;
        if (!ok) d += "; FIRST FAILURE: " + first_failure;
        return d;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Phi and the prime-power order

void criterion_phi(Checker& c, const VerifyOptions&) {
    const PrimePower last = prev_pp(Rational(10001));
    const auto table = phi_range(PrimePower(2, -1), last);
    for (const auto& [n, phi_n] : table) {
        const auto p = static_cast<long>(n.prime());
        const std::string tag = n.to_string();
        const Rational direct = phi(n);
        c.expect(direct == phi_n, "incremental Phi agrees with direct Phi at " + tag);
        const PrimePower inv = n.reciprocal();
        const Rational phi_inv = phi(inv);
        c.expect(phi_inv * phi_n == p, "Phi(p^-j) Phi(p^j) = p at " + tag);
        c.expect(phi(prev_pp(n)) == phi_n / p, "Phi(n_-) = Phi(n)/p at " + tag);
        c.expect(phi(prev_pp(inv)) == phi_inv / p, "Phi(n_-) = Phi(n)/p at " + inv.to_string());
        for (const PrimePower& q : {n, inv}) {
            c.expect(next_pp(prev_pp(q)) == q, "(q_-)_+ = q at " + q.to_string());
            c.expect(prev_pp(next_pp(q)) == q, "(q_+)_- = q at " + q.to_string());
            c.expect(next_pp(q.reciprocal()) == prev_pp(q).reciprocal(), "(1/q)_+ = 1/(q_-) at " + q.to_string());
        }
        c.expect(phi_n * phi(prev_pp(inv)) == 1, "Phi(q) Phi((1/q)_-) = 1 at " + tag);
    }
    c.note(std::to_string(table.size()) + " prime powers n <= 10^4 and their reciprocals, exact");
}

// ---------------------------------------------------------------------------
// 2. Volume telescoping

void criterion_volume(Checker& c, const VerifyOptions&) {
    std::vector<PrimePower> radii;
    for (auto q : pp_range(Rational(1), Rational(49))) radii.push_back(q);  // 15 integral radii
    radii.erase(radii.begin() + 15, radii.end());
    const std::size_t integral = radii.size();
    for (std::size_t i = 0; i < integral; ++i) radii.push_back(radii[i].reciprocal());
    const PrimePower floor = next_pp(Rational(1, 1000));
    for (const auto& r : radii) {
        Rational sum = ball_volume(floor);
        Rational sum_formula = phi(floor);
        for (const auto& s : pp_range(floor.value(), r.value())) {
            sum += sphere_volume(s);
            sum_formula += phi(s) * Rational(static_cast<long>(s.prime()) - 1, static_cast<long>(s.prime()));
        }
        c.expect(sum == phi(r), "sum of sphere volumes = Phi(r) at " + r.to_string());
        c.expect(sum_formula == phi(r), "sum of Phi(s)(1 - 1/p) = Phi(r) at " + r.to_string());
        c.expect(ball_volume(r) == phi(r), "vol(B_r) = Phi(r) at " + r.to_string());
    }
    c.note("30 radii (15 integral, 15 reciprocal), spheres summed from " + floor.to_string() + ", exact");
}

// ---------------------------------------------------------------------------
// 3. Radial Fourier transform

RadialStep random_step(Rng& rng) {
    static const std::vector<PrimePower> grid = pp_range(Rational(1, 17), Rational(16));
    const std::size_t a = uniform_below(rng, grid.size() - 1);
    const std::size_t b = a + uniform_below(rng, std::min<std::size_t>(8, grid.size() - a));
    auto rnd = [&] {
        const long num = static_cast<long>(uniform_below(rng, 19)) - 9;
        const long den = static_cast<long>(uniform_below(rng, 6)) + 1;
        return Rational(num, den);
    };
    RadialStep f;
    f.inner_radius = grid[a];
    f.support_radius = grid[b];
    f.inner_value = ComplexRational(rnd(), rnd());
    for (std::size_t i = a + 1; i <= b; ++i) f.values[grid[i]] = ComplexRational(rnd(), rnd());
    for (auto& [k, v] : f.values) v.re.canonicalize(), v.im.canonicalize();
    f.inner_value.re.canonicalize();
    f.inner_value.im.canonicalize();
    f.normalize();
    return f;
}

void criterion_ft(Checker& c, const VerifyOptions& opts) {
    std::vector<PrimePower> radii;
    for (auto q : pp_range(Rational(1), Rational(16))) radii.push_back(q);
    radii.erase(radii.begin() + 10, radii.end());
    for (std::size_t i = 0; i < 10; ++i) radii.push_back(radii[i].reciprocal());
    for (const auto& r : radii) {
        const PrimePower dual = prev_pp(r.reciprocal());  // (1/R)_-
        const RadialStep ball_closed = scale(ball_indicator(dual), ComplexRational(phi(r)));
        c.expect(ft_radial_step(ball_indicator(r)).same_function(ball_closed), "FT of 1_B at " + r.to_string());
        const RadialStep sphere_closed = combine(ball_closed, ball_indicator(r.reciprocal()), CombineOp::Add,
                                                 ComplexRational(-phi(prev_pp(r))));
        c.expect(ft_radial_step(sphere_indicator(r)).same_function(sphere_closed), "FT of 1_S at " + r.to_string());
    }
    Rng rng(derive_seed(opts.seed, 3));
    for (int i = 0; i < 50; ++i) {
        const RadialStep f = random_step(rng);
        const RadialStep g = ft_radial_step(f);
        c.expect(ft_radial_step(g).same_function(f), "double FT identity on random step " + std::to_string(i));
        c.expect(integrate_radial(abs_squared(f)) == integrate_radial(abs_squared(g)),
                 "Parseval on random step " + std::to_string(i));
    }
    c.note("20 ball/sphere closed forms; double FT and Parseval on 50 random complex steps, exact");
}

// ---------------------------------------------------------------------------
// 4. Heat kernel

void criterion_kernel(Checker& c, const VerifyOptions&) {
    double worst_norm = 0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (double alpha : {1.5, 2.0, 3.0}) {
            const KernelParams p{t, alpha, std::nullopt};
            const NormalizationResult n = normalization(p, 1e-6);
            const double dev = std::abs(static_cast<double>(n.value) - 1);
            worst_norm = std::max(worst_norm, dev);
            c.expect(dev <= 1e-6 && n.error_bound <= 1e-6,
                     "normalization within 1e-6 at t=" + fmt("%g", t) + " alpha=" + fmt("%g", alpha));
        }
    }
    c.note("normalization: worst |sum - 1| = " + fmt("%.2e", worst_norm));

    std::vector<Radius> radii{std::nullopt};
    for (const auto& q : pp_range(Rational(1, 9), Rational(8))) radii.emplace_back(q);
    std::size_t evaluated = 0;
    double tightest = 0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (double alpha : {1.5, 2.0, 3.0}) {
            const KernelParams p{t, alpha, std::nullopt};
            const auto zs = z_finite_batch(radii, p, 1e-12, Execution::Parallel);
            for (std::size_t i = 0; i < radii.size(); ++i) {
                ++evaluated;
                c.expect(zs[i].value >= 0, "Z >= 0");
                if (!radii[i]) continue;
                const PrimePower& r = *radii[i];
                const long double bound = 2 * t * std::pow(r.to_long_double(), -static_cast<long double>(alpha)) *
                                          std::exp(log_phi(prev_pp(r.reciprocal())));
                c.expect(zs[i].value <= bound + zs[i].error_bound, "Z <= 2t r^-a Phi((1/r)_-) at " + r.to_string());
                tightest = std::max(tightest, static_cast<double>(zs[i].value / bound));
            }
        }
    }
    c.note(std::to_string(evaluated) + " values nonnegative; estimate holds on 1/8..8 (max Z/bound " +
           fmt("%.3f", tightest) + ")");

    struct Spot {
        Radius r;
        double t, alpha;
    };
    const std::vector<Spot> spots{{std::nullopt, 1, 2},          {PrimePower(2, 1), 1, 2},
                                  {PrimePower(2, -1), 1, 2},      {PrimePower(3, -1), 0.1, 1.5},
                                  {PrimePower(2, 2), 0.5, 3},     {std::nullopt, 5, 3},
                                  {PrimePower(2, 3), 2, 1.5},     {PrimePower(2, -3), 0.01, 2},
                                  {PrimePower(3, 1), 0.1, 2},     {std::nullopt, 0.5, 1.5}};
    double worst = 0;
    for (const auto& s : spots) {
        const KernelParams p{s.t, s.alpha, std::nullopt};
        const double oracle = z_finite_oracle(s.r, p);
        const KernelValue z = z_finite(s.r, p, 1e-12);
        const double diff = std::abs(static_cast<double>(z.value) - oracle);
        worst = std::max(worst, diff);
        c.expect(diff <= 1e-8, "z_finite within 1e-8 of the 50-digit oracle");
    }
    c.note("10 oracle spot points, worst deviation " + fmt("%.2e", worst));
}

// ---------------------------------------------------------------------------
// 5, 6. Monte Carlo

struct Setup {
    KernelParams params;
    Truncation trunc;
    RadiusDistribution dist;
};

Setup make_setup(double t, double alpha, std::uint64_t cutoff) {
    Setup s;
    s.params = {t, alpha, std::nullopt};
    s.trunc = default_truncation(s.params);
    s.trunc.prime_cutoff = std::max(s.trunc.prime_cutoff, cutoff);
    s.dist = radius_distribution(s.params, s.trunc.r_min, s.trunc.r_max);
    return s;
}

void criterion_semigroup(Checker& c, const VerifyOptions& opts) {
    const double alpha = 2;
    int k = 0;
    for (const auto& [t, s] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.2, 0.8}}) {
        const Setup target0 = make_setup(t + s, alpha, 0);
        std::uint64_t cutoff = target0.trunc.prime_cutoff;
        Setup a = make_setup(t, alpha, cutoff), b = make_setup(s, alpha, cutoff);
        cutoff = std::max({cutoff, a.trunc.prime_cutoff, b.trunc.prime_cutoff});
        a = make_setup(t, alpha, cutoff);
        b = make_setup(s, alpha, cutoff);
        const Setup target = make_setup(t + s, alpha, cutoff);
        const IncrementSampler sa(a.dist, a.trunc), sb(b.dist, b.trunc);
        const SumBatch batch = sample_sum_radii(sa, sb, opts.samples, derive_seed(opts.seed, 50 + k++),
                                                Execution::Parallel);
        // Cells: every target radius, plus one cell for everything outside.
        std::vector<double> probs = target.dist.masses;
        probs.push_back(target.dist.tail_mass);
        std::vector<std::uint64_t> counts(probs.size(), 0);
        for (const auto& r : batch.radius) {
            if (r && !(*r < target.trunc.r_min) && !(target.trunc.r_max < *r)) {
                ++counts[target.dist.index_of(*r)];
            } else {
                ++counts.back();
            }
        }
        const ChiSquareResult chi = chi_square_gof(probs, counts);
        c.expect(chi.p_value > 1e-3, "semigroup chi-square at (" + fmt("%g", t) + "," + fmt("%g", s) + ")");
        c.note("(t,s)=(" + fmt("%g", t) + "," + fmt("%g", s) + "): chi2=" + fmt("%.1f", chi.statistic) +
               " dof=" + std::to_string(chi.dof) + " p=" + fmt("%.3f", chi.p_value) +
               " cancellations=" + std::to_string(batch.cancellation_resamples));
    }
}

void criterion_sampler(Checker& c, const VerifyOptions& opts) {
    int k = 0;
    for (const auto& [t, alpha] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.5, 1.5}}) {
        const Setup s = make_setup(t, alpha, 0);
        const IncrementSampler sampler(s.dist, s.trunc);
        const RadiusBatch batch =
            sample_increment_radii(sampler, opts.samples, derive_seed(opts.seed, 60 + k++), Execution::Parallel, true);
        std::vector<double> probs = s.dist.masses;
        probs.push_back(s.dist.tail_mass);
        std::vector<std::uint64_t> counts(probs.size(), 0);
        for (auto i : batch.index) ++counts[i];
        const ChiSquareResult chi = chi_square_gof(probs, counts);
        c.expect(chi.p_value > 1e-3, "increment radius chi-square at t=" + fmt("%g", t));
        c.expect(batch.norm_mismatches == 0, "sphere samples carry the drawn norm");
        c.note("t=" + fmt("%g", t) + " alpha=" + fmt("%g", alpha) + ": p=" + fmt("%.3f", chi.p_value) +
               ", norm mismatches " + std::to_string(batch.norm_mismatches) + "/" + std::to_string(opts.samples));
    }
}

// ---------------------------------------------------------------------------
// 7. Markov conditions

void criterion_markov(Checker& c, const VerifyOptions&) {
    const std::vector<double> ts{0.1, 0.01, 0.001};
    double min_margin = 1e300;
    for (double alpha : {1.5, 2.0, 3.0}) {
        for (const PrimePower& eps : {PrimePower(2, -1), PrimePower(2, 1)}) {
            const double C = tail_mass_bound(eps, {1, alpha, std::nullopt}).bound;
            for (double t : ts) {
                const TransitionResult e = escape_probability({t, alpha, std::nullopt}, eps);
                c.expect((e.value - e.error_bound) / t <= C, "M(B): escape/t <= C(eps)");
            }
        }
        const double lower = (std::pow(3.0, alpha) - std::pow(2.0, alpha)) / 3 - 1e-3;
        for (double t : ts) {
            const TransitionResult e = escape_probability({t, alpha, std::nullopt}, PrimePower(2, -2));
            const double ratio = (e.value + e.error_bound) / t;
            min_margin = std::min(min_margin, ratio - lower);
            c.expect(ratio >= lower, "N(B) fails: escape/t at eps=1/4 stays above (3^a - 2^a)/3 - 1e-3");
        }
        // L(B): P(t, x, B_{1/2}(0)) sup over t <= 1 as ||x|| runs over 2, 4, ..., 32.
        double prev = 2;
        const AdelePoint center;
        for (int k = 1; k <= 5; ++k) {
            const AdelePoint x = AdelePoint::parse("2:" + std::to_string(-k) + ":1");
            double sup = 0;
            for (double t : {1.0, 0.5, 0.1, 0.01, 0.001}) {
                const TransitionResult pr = transition_prob_ball({t, alpha, std::nullopt}, x, center, PrimePower(2, -1));
                sup = std::max(sup, pr.value + pr.error_bound);
            }
            c.expect(sup < prev, "L(B): sup_t P decreasing in ||x||");
            prev = sup;
        }
        c.expect(prev < 1e-4, "L(B): sup_t P < 1e-4 at ||x|| = 32");
        c.note("alpha=" + fmt("%g", alpha) + ": L(B) value at 32 = " + fmt("%.2e", prev));
    }
    c.note("N(B) smallest margin above the bound " + fmt("%.3f", min_margin));
}

// ---------------------------------------------------------------------------
// 8. Solvers

double sup_diff(const RadialStepD& a, const RadialStepD& b, double& scale) {
    std::vector<Radius> rs{std::nullopt, a.inner_radius, b.inner_radius};
    for (const auto& [s, v] : a.values) rs.emplace_back(s);
    for (const auto& [s, v] : b.values) rs.emplace_back(s);
    rs.emplace_back(next_pp(std::max(a.support_radius, b.support_radius)));
    double d = 0;
    scale = 0;
    for (const auto& r : rs) {
        d = std::max(d, std::abs(a.at(r) - b.at(r)));
        scale = std::max(scale, std::abs(a.at(r)));
    }
    return d;
}

double manufactured_error(std::size_t m, const PrimePower& r, double alpha, double horizon) {
    const double lambda = std::pow(static_cast<double>(r.to_long_double()), alpha);
    ForcingGrid g;
    for (std::size_t k = 0; k <= m; ++k) {
        const double tau = horizon * static_cast<double>(k) / static_cast<double>(m);
        g.times.push_back(tau);
        const Rational coeff(std::cos(tau) + lambda * std::sin(tau));
        g.values.push_back(ft_radial_step(scale(sphere_indicator(r), ComplexRational(coeff))));
    }
    const RadialSolution u =
        solve_nonhomogeneous(zero_step(), g, horizon, {alpha, std::nullopt}, {Quadrature::Simpson, m, 1e-12});
    const RadialStepD value = ft_radial_step(*u.evaluable->spectral_step());
    const RadialStepD expected = scale(to_double(ft_radial_step(sphere_indicator(r))), cd(std::sin(horizon)));
    double s = 0;
    return sup_diff(value, expected, s);
}

void criterion_solvers(Checker& c, const VerifyOptions&) {
    const SymbolSpec sym{2, std::nullopt};
    const double t = 0.5;
    std::vector<PrimePower> spheres{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {3, 2}, {2, -1}, {3, -1}, {2, -2}, {5, -1}};
    double worst_rel = 0;
    for (const auto& r : spheres) {
        const RadialStep u0 = ft_radial_step(sphere_indicator(r));
        const RadialSolution u = solve_homogeneous(u0, t, sym, 1e-12, true);
        const double decay = std::exp(-t * std::pow(static_cast<double>(r.to_long_double()), sym.alpha));
        const RadialStepD expected = scale(to_double(u0), cd(decay));
        double s = 0;
        const double d = sup_diff(*u.value, expected, s);
        worst_rel = std::max(worst_rel, d / s);
        c.expect(u.exact() && d <= 1e-12 * s, "eigen-decay exp(-t r^a) on F^-1 1_S at " + r.to_string());
    }
    c.note("eigen-decay on 10 spheres, worst relative deviation " + fmt("%.1e", worst_rel));

    const RadialStep liz1 = combine(sphere_indicator(PrimePower(2, 1)), ball_indicator(PrimePower(2, -1)),
                                    CombineOp::Add, ComplexRational(-1));
    const RadialStep liz2 = combine(ft_radial_step(sphere_indicator(PrimePower(3, 1))),
                                    ft_radial_step(sphere_indicator(PrimePower(2, -1))), CombineOp::Add,
                                    ComplexRational(Rational(2), Rational(1, 3)));
    for (const RadialStep* f : {&liz1, &liz2}) {
        c.expect(is_lizorkin(*f), "Lizorkin input has zero integral");
        for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {1.0, 0.25}}) {
            const RadialSolution two = solve_homogeneous(solve_homogeneous(*f, a, sym, 1e-12, true), b, sym);
            const RadialSolution one = solve_homogeneous(*f, a + b, sym, 1e-12, true);
            double s = 0;
            const double d = sup_diff(*two.value, *one.value, s);
            c.expect(two.exact() && d <= 1e-12 * std::max(s, 1e-300), "solver semigroup composition");
        }
    }
    c.note("semigroup composition exact (rel 1e-12) on 2 Lizorkin inputs");

    const RadialStep ball = ball_indicator(PrimePower(2, 1));
    for (const RadialStep* f : {&liz1, &ball}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 20; ++k) {
            const RadialSolution u = solve_homogeneous(*f, 0.1 * k, sym, 1e-12);
            const Certified n = u.l2_norm_squared(1e-12);
            c.expect(n.value.real() - n.error_bound <= prev, "L2 norm non-increasing in t");
            prev = n.value.real() + n.error_bound;
        }
    }
    c.note("L2 contraction on t = 0, 0.1, ..., 2 for a Lizorkin and a non-Lizorkin input");

    const PrimePower r(2, 1);
    const double e32 = manufactured_error(32, r, 2, 1), e64 = manufactured_error(64, r, 2, 1);
    const double order = std::log2(e32 / e64);
    c.expect(e64 < 1e-4, "manufactured Duhamel error < 1e-4 at M=64");
    c.expect(order >= 3.5, "observed Simpson order >= 3.5");
    c.note("Duhamel error " + fmt("%.2e", e64) + " at M=64, observed order " + fmt("%.2f", order));
}

// ---------------------------------------------------------------------------
// 9. Real and adelic factors

void criterion_adelic(Checker& c, const VerifyOptions&) {
    double worst = 0;
    for (double beta : {1.0, 2.0}) {
        for (double t : {0.1, 0.5, 1.0, 3.0}) {
            for (double x : {0.0, 0.05, 0.2, 0.5, 1.0, 2.5}) {
                const double d = std::abs(z_real(x, t, beta) - z_real_quadrature(x, t, beta, 1e-13));
                worst = std::max(worst, d);
                c.expect(d <= 1e-8, "z_real closed form vs quadrature");
            }
        }
    }
    c.note("z_real closed forms vs quadrature: worst " + fmt("%.1e", worst));

    boost::math::quadrature::exp_sinh<double> half_line;
    double worst_norm = 0;
    for (const auto& [t, alpha, beta] :
         std::vector<std::tuple<double, double, double>>{{1, 2, 2}, {0.5, 1.5, 1}, {2, 3, 1.5}}) {
        const double real = 2 * half_line.integrate([&](double x) { return z_real(x, t, beta, 1e-12); }, 1e-10);
        const NormalizationResult fin = normalization({t, alpha, std::nullopt}, 1e-8);
        const double total = real * static_cast<double>(fin.value);
        worst_norm = std::max(worst_norm, std::abs(total - 1));
        c.expect(std::abs(total - 1) <= 1e-5, "adelic normalization within 1e-5");
    }
    c.note("adelic normalization worst |total - 1| = " + fmt("%.1e", worst_norm));

    const RadialStep hf = combine(sphere_indicator(PrimePower(2, 1)), ball_indicator(PrimePower(2, -1)),
                                  CombineOp::Add, ComplexRational(-1));
    auto h_hat = [](double xi) { return std::exp(-std::numbers::pi * xi * xi); };
    auto h_inf = h_hat;  // self-dual Gaussian
    double worst_eq = 0;
    for (double beta : {2.0, 1.0}) {
        const SymbolSpec sym{2, beta};
        const RadialSolution dh = apply_operator(hf, sym.alpha, 1e-12, true);
        for (double x : {0.0, 0.3, 0.7, 1.2}) {
            const double d_inf = beta == 2
                                     ? (1 / (2 * std::numbers::pi) - x * x) * std::exp(-std::numbers::pi * x * x)
                                     : apply_real_operator(h_hat, beta, x);
            for (const Radius& xf : std::vector<Radius>{std::nullopt, PrimePower(2, -1), PrimePower(2, 1),
                                                        PrimePower(3, 1), PrimePower(2, 2)}) {
                const cd lhs = apply_adelic_operator(h_hat, hf, sym, x, xf);
                const cd rhs = hf.at(xf).to_complex() * d_inf + h_inf(x) * dh.value->at(xf);
                worst_eq = std::max(worst_eq, std::abs(lhs - rhs));
                c.expect(std::abs(lhs - rhs) <= 1e-8, "operator factorization identity");
            }
        }
    }
    c.note("factorization identity at 40 points, worst " + fmt("%.1e", worst_eq));
}

// ---------------------------------------------------------------------------
// 10. Determinism of the command line

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spill(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

void criterion_determinism(Checker& c, const VerifyOptions&) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("adelic-verify-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string d = dir.string() + "/";

    const RadialStep liz = combine(sphere_indicator(PrimePower(2, 1)), ball_indicator(PrimePower(2, -1)),
                                   CombineOp::Add, ComplexRational(-1));
    spill(dir / "u0.json", to_json(liz).dump());
    spill(dir / "ball.json", to_json(ball_indicator(PrimePower(2, 1))).dump());
    nlohmann::json forcing;
    for (int k = 0; k <= 4; ++k) {
        forcing["times"].push_back(0.25 * k);
        forcing["values"].push_back(to_json(scale(ft_radial_step(sphere_indicator(PrimePower(2, 1))),
                                                  ComplexRational(Rational(k + 1, 2)))));
    }
    spill(dir / "forcing.json", forcing.dump());
    RealGrid g;
    g.x0 = -8;
    g.h = 0.05;
    for (int i = 0; i <= 320; ++i) g.values.push_back(std::exp(-std::numbers::pi * g.x(i) * g.x(i)));
    spill(dir / "real.csv", real_grid_csv(g));
    spill(dir / "config.json", R"({"t": 0.5, "alpha": 3, "tol": 1e-7})");

    const std::vector<std::vector<std::string>> commands{
        {"phi", "10"},
        {"phi", "1/3"},
        {"ppow", "next", "5"},
        {"ppow", "prev", "1/3"},
        {"ppow", "range", "1/8", "20"},
        {"norm", "2:0:101;13:-2:1,12,0"},
        {"norm", "3:0:1", "3:0:2"},
        {"volume", "sphere", "2^3"},
        {"volume", "ball", "1/5"},
        {"ft", "--in", d + "u0.json"},
        {"kernel", "eval", "--t", "1", "--alpha", "2", "--radius", "2"},
        {"kernel", "eval", "--t", "1", "--alpha", "2", "--radius", "1/3", "--beta", "2", "--x-real", "0.3"},
        {"kernel", "normalize", "--t", "1", "--alpha", "2", "--tol", "1e-6", "--format", "json"},
        {"kernel", "tail", "--eps", "2", "--t", "0.01", "--alpha", "2"},
        {"--config", d + "config.json", "kernel", "normalize"},
        {"simulate", "--t-step", "0.1", "--steps", "1000", "--alpha", "2", "--seed", "7"},
        {"--out", d + "path.csv", "simulate", "--t-step", "0.05", "--steps", "300", "--alpha", "1.5", "--beta", "1",
         "--seed", "11"},
        {"transition", "--t", "0.1", "--alpha", "2", "--x", "2:-1:1", "--eps", "1/2"},
        {"solve", "homogeneous", "--in", d + "u0.json", "--t", "0.5", "--alpha", "2"},
        {"--out", d + "hom.json", "solve", "homogeneous", "--in", d + "ball.json", "--t", "0.5", "--alpha", "2",
         "--tol", "1e-8"},
        {"solve", "duhamel", "--in", d + "u0.json", "--forcing", d + "forcing.json", "--t", "1", "--alpha", "2",
         "--intervals", "16"},
        {"--out", d + "adelic.json", "solve", "adelic", "--in", d + "u0.json", "--real", d + "real.csv", "--real-out",
         d + "real_out.csv", "--t", "0.5", "--alpha", "2", "--beta", "2"},
    };
    auto strip_meta = [](const std::string& text) {
        auto j = nlohmann::json::parse(text);
        j.erase("wall_time_s");
        return j.dump();
    };
    std::size_t bytes = 0;
    for (const auto& args : commands) {
        std::string runs[2];
        for (auto& captured : runs) {
            std::ostringstream out, err;
            const int code = run(args, out, err);
            captured = std::to_string(code) + "\n" + out.str() + err.str();
            for (const char* f : {"path.csv", "hom.json", "adelic.json", "real_out.csv"}) {
                if (fs::exists(dir / f)) captured += slurp(dir / f);
                const fs::path meta = dir / (std::string(f) + ".meta.json");
                if (fs::exists(meta)) captured += strip_meta(slurp(meta));
            }
            for (const char* f : {"path.csv", "hom.json", "adelic.json", "real_out.csv"}) {
                fs::remove(dir / f);
                fs::remove(dir / (std::string(f) + ".meta.json"));
            }
            c.expect(code == 0, "exit code 0 for " + args.front() + ": " + err.str());
        }
        bytes += runs[0].size();
        c.expect(runs[0] == runs[1], "byte-identical output of " + args.front() + " " + args.at(1));
    }
    fs::remove_all(dir);
    c.note(std::to_string(commands.size()) + " commands run twice, " + std::to_string(bytes) +
           " bytes compared (sidecar wall time excluded)");
}

struct CriterionDef {
    int id;
    const char* name;
    double limit;
    void (*body)(Checker&, const VerifyOptions&);
};

const std::vector<CriterionDef>& definitions() {
    static const std::vector<CriterionDef> defs{
        {1, "phi", 5, criterion_phi},
        {2, "volume", 1, criterion_volume},
        {3, "ft", 10, criterion_ft},
        {4, "kernel", 60, criterion_kernel},
        {5, "semigroup", 120, criterion_semigroup},
        {6, "sampler", 60, criterion_sampler},
        {7, "markov", 30, criterion_markov},
        {8, "solvers", 60, criterion_solvers},
        {9, "adelic", 60, criterion_adelic},
        {10, "determinism", 0, criterion_determinism},
    };
    return defs;
}

// ---------------------------------------------------------------------------
// Oracle

namespace mp = boost::multiprecision;
using Big = mp::cpp_bin_float_50;

Big to_big(const Rational& q) { return Big(q.get_num().get_str()) / Big(q.get_den().get_str()); }

}  // namespace

double z_finite_oracle(const Radius& r, const KernelParams& params, std::uint64_t lower_denominator) {
    params.validate();
    const Big t(params.t), alpha(params.alpha);
    auto heat = [&](const PrimePower& q) { return mp::exp(-t * mp::exp(alpha * mp::log(to_big(q.value())))); };
    // q runs upward from q0 = 1/m0, m0 the largest prime power <= lower_denominator.
    std::vector<PrimePower> qs = pp_range(Rational(1, static_cast<long>(lower_denominator) + 1), Rational(1, 2));
    Big psi = 0;
    for (const auto& q : qs) psi += mp::log(Big(q.prime()));
    // Phi(1/m0) = p / Phi(m0) = p exp(-psi(m0)).
    Big phi_q = Big(qs.front().prime()) * mp::exp(-psi);
    const std::optional<PrimePower> top = r ? std::optional<PrimePower>(r->reciprocal()) : std::nullopt;
    Big acc = 0;
    PrimePower q = qs.front();
    Big hq = heat(q);
    std::size_t i = 0;
    const Big negligible("1e-45");
    while (true) {
        if (top && !(q < *top)) break;
        const PrimePower next = i + 1 < qs.size() ? qs[i + 1] : next_pp(q);
        const Big hn = heat(next);
        const Big term = phi_q * (hq - hn);
        acc += term;
        // Past the peak of Phi(q) exp(-t q^alpha) the remaining terms are
        // dominated by a geometric series; stop once they are negligible.
        if (!top && q.is_integral() && phi_q * hq < negligible &&
            params.t * params.alpha * std::pow(static_cast<double>(q.to_long_double()), params.alpha - 1) > 2.1) {
            break;
        }
        phi_q *= Big(next.prime());
        q = next;
        hq = hn;
        ++i;
    }
    return static_cast<double>(acc);
}

std::vector<std::string> suite_names() {
    std::vector<std::string> names{"all"};
    for (const auto& d : definitions()) {
        names.emplace_back(d.name);
        names.push_back(std::to_string(d.id));
    }
    return names;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
    for (const auto& d : definitions()) {
        if (d.id != id) continue;
        CriterionResult r;
        r.id = id;
        r.name = d.name;
        r.limit_seconds = d.limit;
        Checker c;
        const auto start = std::chrono::steady_clock::now();
        try {
            d.body(c, opts);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = d.limit <= 0 || r.seconds < d.limit;
        r.passed = c.ok && in_time;
        r.detail = c.detail();
        if (!in_time) r.detail += "; TOO SLOW";
        return r;
    }
    throw std::invalid_argument("no criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_suite(const std::string& suite, const VerifyOptions& opts) {
    std::vector<CriterionResult> out;
    for (const auto& d : definitions()) {
        if (suite == "all" || suite == d.name || suite == std::to_string(d.id)) out.push_back(run_criterion(d.id, opts));
    }
    if (out.empty()) throw std::invalid_argument("unknown suite " + suite);
    return out;
}

std::string format_result(const CriterionResult& r) {
    char head[128];
    if (r.limit_seconds > 0) {
        std::snprintf(head, sizeof head, "%s %2d %-12s %8.2f s (limit %g s)", r.passed ? "PASS" : "FAIL", r.id,
                      r.name.c_str(), r.seconds, r.limit_seconds);
    } else {
        std::snprintf(head, sizeof head, "%s %2d %-12s %8.2f s (no limit)", r.passed ? "PASS" : "FAIL", r.id,
                      r.name.c_str(), r.seconds);
    }
    return std::string(head) + "  " + r.detail;
}

}  // namespace adelic
