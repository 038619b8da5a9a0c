#include "adelic/markov.hpp"

#include "adelic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace adelic {

std::optional<std::size_t> RadiusDistribution::draw_index(Rng& rng) const {
    const double u = uniform01(rng);
    if (cdf.empty() || u >= cdf.back()) return std::nullopt;
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

std::size_t RadiusDistribution::index_of(const PrimePower& r) const {
    auto it = std::lower_bound(radii.begin(), radii.end(), r);
    if (it == radii.end() || *it != r) throw std::out_of_range("radius " + r.to_string() + " outside the distribution");
    return static_cast<std::size_t>(it - radii.begin());
}

RadiusDistribution radius_distribution(const KernelParams& params, const PrimePower& r_min, const PrimePower& r_max) {
    if (r_max < r_min) throw std::invalid_argument("r_min exceeds r_max");
    const SphereMasses sm = sphere_masses(params, r_min, r_max);
    RadiusDistribution d;
    d.params = params;
    long double acc = 0;
    for (const auto& e : sm.entries) {
        d.radii.push_back(e.radius);
        d.masses.push_back(static_cast<double>(e.mass));
        acc += e.mass;
        d.cdf.push_back(static_cast<double>(acc));
    }
    d.tail_mass = std::max(0.0, static_cast<double>(1 - acc));
    d.tail_bound = sm.outside_bound;
    if (d.tail_mass > d.tail_bound + 1e-12) {
        throw ToleranceError("computed tail mass exceeds its certified bound");
    }
    return d;
}

Truncation default_truncation(const KernelParams& params, double outside) {
    Truncation tr;
    tr.r_max = outer_radius_for(params, outside / 2);
    tr.r_min = inner_radius_for(params, outside / 2);
    tr.prime_cutoff = std::max<std::uint64_t>(16, tr.r_min.magnitude());
    return tr;
}

// ---------------------------------------------------------------------------

IncrementSampler::IncrementSampler(RadiusDistribution dist, const Truncation& trunc)
    : dist_(std::move(dist)),
      trunc_(trunc),
      opts_{trunc.depth, std::max<std::uint64_t>(trunc.prime_cutoff, trunc.r_min.magnitude())},
      once_(new std::once_flag[dist_.radii.size()]),
      plans_(new SamplingPlan[dist_.radii.size()]) {}

AdelePoint IncrementSampler::sphere_point(std::size_t index, Rng& rng) const {
    if (index >= dist_.radii.size()) throw std::out_of_range("radius index");
    std::call_once(once_[index],
                   [&] { plans_[index] = make_sampling_plan(RegionKind::Sphere, dist_.radii[index], opts_); });
    return sample_with_plan(plans_[index], rng);
}

IncrementSampler::Draw IncrementSampler::draw(Rng& rng) const {
    std::size_t resamples = 0;
    while (true) {
        if (auto idx = dist_.draw_index(rng)) {
            return {dist_.radii[*idx], sphere_point(*idx, rng), resamples};
        }
        if (++resamples > kMaxConsecutiveResamples) throw ToleranceError("truncation captures too little mass");
    }
}

double sample_real_increment(double t, double beta, Rng& rng) {
    constexpr double pi = std::numbers::pi;
    if (beta == 2) return std::sqrt(t / (2 * pi * pi)) * standard_normal(rng);
    if (beta == 1) return t / (2 * pi) * std::tan(pi * (uniform_open01(rng) - 0.5));
    throw std::invalid_argument("real increments are sampled only for beta in {1, 2}");
}

PathSample sample_path(const KernelParams& params, std::size_t n_steps, double dt, const Truncation& trunc,
                       std::uint64_t seed, const AdelePoint& start, double real_start) {
    KernelParams step = params;
    step.t = dt;
    step.validate();
    if (step.beta && *step.beta != 1 && *step.beta != 2) {
        throw std::invalid_argument("path sampling supports beta in {1, 2} only");
    }
    const RadiusDistribution dist = radius_distribution(step, trunc.r_min, trunc.r_max);
    if (dist.tail_bound > 1e-6) {
        throw ToleranceError("truncation [" + trunc.r_min.to_string() + ", " + trunc.r_max.to_string() +
                             "] may miss more than 1e-6 of the increment mass");
    }
    const IncrementSampler sampler(dist, trunc);

    PathSample path;
    path.seed = seed;
    Rng rng(seed);
    path.times.push_back(0);
    path.points.push_back(start);
    if (step.beta) path.real_coords.push_back(real_start);
    constexpr std::size_t kMaxCancellations = 1000;
    for (std::size_t i = 0; i < n_steps; ++i) {
        std::size_t cancels = 0;
        while (true) {
            auto d = sampler.draw(rng);
            path.tail_resamples += d.tail_resamples;
            AdelePoint inc = std::move(d.point);
            for (const auto& [p, c] : path.points.back().components()) {
                if (!inc.component(p)) inc.set_component(sample_component(p, 0, false, trunc.depth, rng));
            }
            try {
                path.points.push_back(add(path.points.back(), inc));
                path.radii.push_back(d.radius);
                break;
            } catch (const IndeterminateCancellation&) {
                ++path.cancellation_resamples;
                if (++cancels > kMaxCancellations) throw;
            }
        }
        path.times.push_back(static_cast<double>(i + 1) * dt);
        if (step.beta) path.real_coords.push_back(path.real_coords.back() + sample_real_increment(dt, *step.beta, rng));
    }
    return path;
}

std::string path_csv(const PathSample& path) {
    std::ostringstream out;
    const bool real = !path.real_coords.empty();
    out << "step,time,radius," << (real ? "real_coord," : "") << "point\n";
    char buf[64];
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", path.times[i]);
        out << i << ',' << buf << ',' << (i == 0 ? "" : path.radii[i - 1].to_string()) << ',';
        if (real) {
            std::snprintf(buf, sizeof buf, "%.17g", path.real_coords[i]);
            out << buf << ',';
        }
        out << path.points[i].to_string() << '\n';
    }
    return out.str();
}

TransitionResult escape_probability(const KernelParams& params, const PrimePower& eps, double tol) {
    const NormalizationResult tail = escape_mass(eps, params, tol);
    return {static_cast<double>(tail.value), tail.error_bound};
}

TransitionResult transition_prob_ball(const KernelParams& params, const AdelePoint& x, const AdelePoint& center,
                                      const PrimePower& eps, double tol) {
    const Radius d = distance(x, center);
    if (params.t == 0) {
        KernelParams check = params;
        check.t = 1;
        check.validate();
        return {(!d || *d <= eps) ? 1.0 : 0.0, 0.0};
    }
    params.validate();
    if (d && *d > eps) {
        // Z is constant on the shifted ball by the ultrametric inequality.
        const KernelValue z = z_finite(d, params, tol);
        const double vol = phi(eps).get_d();
        return {static_cast<double>(z.value) * vol, z.error_bound * vol};
    }
    const TransitionResult out = escape_probability(params, eps, tol);
    return {1 - out.value, out.error_bound};
}

}  // namespace adelic
