#pragma once

// Transition functions of the heat semigroup on A_f and Monte Carlo
// simulation of the associated jump process (optionally with a real
// coordinate driven by the stable kernel).

#include "adelic/adele.hpp"
#include "adelic/heatkernel.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace adelic {

/// Law of the increment norm ||X_t||: mass Z(r) vol(S_r) on each radius in
/// [r_min, r_max]; tail_mass = 1 - sum of masses.
struct RadiusDistribution {
    KernelParams params;
    std::vector<PrimePower> radii;
    std::vector<double> masses;
    /// Cumulative masses, cdf.back() = 1 - tail_mass.
    std::vector<double> cdf;
    double tail_mass = 0;
    /// Certified bound on the true mass outside [r_min, r_max].
    double tail_bound = 0;

    /// Index of the drawn radius, or nullopt when the draw fell in the tail.
    std::optional<std::size_t> draw_index(Rng& rng) const;
    std::size_t index_of(const PrimePower& r) const;
};

RadiusDistribution radius_distribution(const KernelParams& params, const PrimePower& r_min, const PrimePower& r_max);

struct Truncation {
    PrimePower r_min{2, -4};
    PrimePower r_max{2, 7};
    std::uint64_t prime_cutoff = 16;
    int depth = kDefaultDepth;
};

/// Radii capturing all but `outside` of the increment mass (certified), with a
/// prime cutoff resolving every norm >= r_min.
Truncation default_truncation(const KernelParams& params, double outside = 1e-7);

/// Draws increments in radius-then-sphere form.  The sampling plan of each
/// radius is built once on first use (std::call_once), so concurrent draws
/// are safe.
class IncrementSampler {
public:
    IncrementSampler(RadiusDistribution dist, const Truncation& trunc);

    struct Draw {
        PrimePower radius;
        AdelePoint point;
        std::size_t tail_resamples = 0;
    };
    /// Redraws (counted) while the radius falls outside the truncation.
    Draw draw(Rng& rng) const;
    /// Uniform point on the sphere of the given radius index.
    AdelePoint sphere_point(std::size_t index, Rng& rng) const;
    const RadiusDistribution& distribution() const { return dist_; }
    const Truncation& truncation() const { return trunc_; }

    static constexpr std::size_t kMaxConsecutiveResamples = 1'000'000;

private:
    RadiusDistribution dist_;
    Truncation trunc_;
    SamplingOptions opts_;
    std::unique_ptr<std::once_flag[]> once_;
    std::unique_ptr<SamplingPlan[]> plans_;
};

/// Real-coordinate increment with density Z(., t; beta); beta in {1, 2}.
double sample_real_increment(double t, double beta, Rng& rng);

struct PathSample {
    std::vector<double> times;
    std::vector<AdelePoint> points;
    /// radii[i] = ||points[i+1] - points[i]||.
    std::vector<PrimePower> radii;
    std::vector<double> real_coords;  // empty unless beta is set
    std::uint64_t seed = 0;
    std::size_t tail_resamples = 0;
    std::size_t cancellation_resamples = 0;
};

/// n_steps i.i.d. increments over time step dt (params.t is ignored).  The
/// increment's Z_q components are drawn lazily for every prime already
/// present in the current point, so sums never silently drop a coordinate.
PathSample sample_path(const KernelParams& params, std::size_t n_steps, double dt, const Truncation& trunc,
                       std::uint64_t seed, const AdelePoint& start = {}, double real_start = 0);

/// CSV with header step,time,radius[,real_coord],point; row 0 is the start.
std::string path_csv(const PathSample& path);

struct TransitionResult {
    double value = 0;
    double error_bound = 0;
};

/// P(t, x, B_eps(center)); t = 0 gives the indicator.
TransitionResult transition_prob_ball(const KernelParams& params, const AdelePoint& x, const AdelePoint& center,
                                      const PrimePower& eps, double tol = 1e-12);

/// P(t, x, complement of B_eps(x)) = sum_{r > eps} Z(r) vol(S_r).
TransitionResult escape_probability(const KernelParams& params, const PrimePower& eps, double tol = 1e-12);

}  // namespace adelic
