#pragma once

// Heat kernels: Z(x,t;alpha) on A_f with certified truncation, the real
// stable kernel Z(x_inf,t;beta) and their product on A.

#include "adelic/radial.hpp"

#include <optional>
#include <vector>

namespace adelic {

struct KernelParams {
    double t = 1;
    double alpha = 2;
    std::optional<double> beta;

    /// Throws std::invalid_argument unless t > 0, alpha > 1, beta in (0, 2].
    void validate() const;
};

struct KernelValue {
    long double value = 0;
    /// Certified truncation error (floating rounding excluded).
    double error_bound = 0;
    std::size_t terms = 0;
};

/// Z(x,t) at ||x|| = r (nullopt = 0):
///     sum_{q < 1/r} Phi(q) (exp(-t q^alpha) - exp(-t q_+^alpha)).
/// Small-radius remainder: sum_{q <= rho} <= Phi(rho) (1 - exp(-t rho_+^alpha)).
/// Large-radius remainder (r = 0 only): Phi(k) <= exp(1.04 k).
KernelValue z_finite(const Radius& r, const KernelParams& params, double tol);

struct NormalizationResult {
    long double value = 0;
    double error_bound = 0;
    std::size_t radii = 0;
};

/// sum_r Z(r) vol(S_r) over radii in [r_lo, R].  The neglected mass is at
/// most Z(0) Phi(r_lo_-) below and 1 - exp(-t R^-alpha) above; the latter
/// telescopes from Phi(q) Phi((1/q)_-) = 1.
NormalizationResult normalization(const KernelParams& params, double tol);

/// Smallest integer prime power R with 1 - exp(-t R^-alpha) <= eps, which
/// bounds the mass outside B_R.
PrimePower outer_radius_for(const KernelParams& params, double eps);
/// A prime power r with Z(0) Phi(r_-) <= eps, which bounds the mass inside B_{r_-}.
PrimePower inner_radius_for(const KernelParams& params, double eps);

/// One entry per radius: the mass Z(r) vol(S_r) carried by the sphere S_r.
struct SphereMass {
    PrimePower radius;
    long double mass;
};

/// Sphere masses for every radius in [r_min, r_max], plus a certified bound on
/// the total mass outside (radii < r_min or > r_max).
struct SphereMasses {
    std::vector<SphereMass> entries;
    double outside_bound = 0;
};
SphereMasses sphere_masses(const KernelParams& params, const PrimePower& r_min, const PrimePower& r_max);

/// I(t) = int ||y||^w exp(-t ||y||^alpha) dy.
Certified moment_integral(const KernelParams& params, double weight, double tol);

struct TailBound {
    /// 2 t sum_{q > eps} q^-alpha (upper bound, certified remainder included).
    double bound = 0;
    /// The explicit part of the sum (a lower bound on the series).
    double partial = 0;
};
TailBound tail_mass_bound(const PrimePower& eps, const KernelParams& params);

/// True tail mass sum_{r > eps} Z(r) vol(S_r) with its certified error.
NormalizationResult tail_mass(const PrimePower& eps, const KernelParams& params, double tol);

/// The same mass from the transform side (Plancherel against 1_{B_eps}):
///     Phi(eps) sum_{s <= (1/eps)_-} vol(S_s) (1 - exp(-t s^alpha)).
/// A short sum of positive terms, accurate also as t -> 0.
NormalizationResult escape_mass(const PrimePower& eps, const KernelParams& params, double tol);

/// Z(x,t;beta) = int exp(2 pi i x xi) exp(-t |xi|^beta) d xi.  Closed forms
/// for beta in {1, 2}; otherwise Gauss-Kronrod panels on the cosine form
/// (documented accuracy 1e-6).
double z_real(double x, double t, double beta, double tol = 1e-10);
/// The same integral by quadrature regardless of beta.
double z_real_quadrature(double x, double t, double beta, double tol = 1e-12);

/// Constant C with z_real <= C t^(1/beta) / (t^(2/beta) + x^2), fitted at
/// (x, t) = (0, 1).
double real_kernel_constant(double beta);

/// Z(x_inf, t; beta) Z(x_f, t; alpha).
KernelValue z_adelic(double x_real, const Radius& r, const KernelParams& params, double tol);

}  // namespace adelic
