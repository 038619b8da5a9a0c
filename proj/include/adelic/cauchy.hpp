#pragma once

// Spectral solvers for du/dt + D^alpha u = f on A_f, and for factorizable
// data on A = R x A_f.  D^gamma is the Fourier multiplier ||xi||^gamma.
//
// Exact path: when the transform of the data vanishes on a ball around 0
// (zero total integral), every spectral multiplier acts sphere by sphere and
// the result is again a step function.  The multipliers are irrational, so
// exact-path results are stored in double precision.  Otherwise the result
// is evaluable: a spectral profile transformed on demand within tol.

#include "adelic/heatkernel.hpp"
#include "adelic/radial.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adelic {

struct SymbolSpec {
    double alpha = 2;
    std::optional<double> beta;

    /// Throws std::invalid_argument unless alpha > 0 and beta in (0, 2].
    void validate() const;
    /// Stricter check used by the solvers (alpha > 1).
    void validate_for_solver() const;
};

/// u(x) = int chi(x xi) u^(xi) d xi with u^ an analytic spectral profile.
struct EvaluableRadial {
    RadialAnalytic spectrum;
    /// Same profile from the half-resolution Duhamel rule, when there is one.
    std::optional<RadialAnalytic> coarse;
    /// |fine - coarse| / richardson estimates the quadrature error.
    double richardson = 1;
    double tol = 1e-10;

    /// Value at norm r; the bound adds the transform tolerance and, with a
    /// coarse companion, the Richardson estimate.
    Certified operator()(const Radius& r) const;
    /// int u = u^(0).
    std::complex<double> integral() const;
    /// The spectrum as a step when every term is masked by a step whose
    /// inner value is 0 (so the symbols only act on finitely many spheres).
    std::optional<RadialStepD> spectral_step() const;
};

/// Either an exact step (with its spectrum) or an evaluable profile.
struct RadialSolution {
    std::optional<RadialStepD> value;
    std::optional<RadialStepD> spectrum;
    std::optional<EvaluableRadial> evaluable;

    bool exact() const { return value.has_value(); }
    Certified at(const Radius& r) const;
    /// L2 norm squared.  Exact path: Parseval on the step; evaluable path:
    /// certified sphere sum of |u^|^2.
    Certified l2_norm_squared(double tol) const;
};

/// Exact transform of a step, rounded to double.
RadialStepD spectrum_of(const RadialStep& f);

/// True when f^ vanishes near 0, i.e. int f = 0.
bool is_lizorkin(const RadialStep& f);

/// D^gamma f.  With strict = true a non-Lizorkin input throws std::invalid_argument.
RadialSolution apply_operator(const RadialStep& f, double gamma, double tol = 1e-10, bool strict = false);
RadialSolution apply_operator(const RadialSolution& f, double gamma, double tol = 1e-10);

/// u(t) = Z_t * u0, i.e. u^(xi, t) = exp(-t ||xi||^alpha) u0^(xi).  t = 0 returns u0.
RadialSolution solve_homogeneous(const RadialStep& u0, double t, const SymbolSpec& symbol, double tol = 1e-10,
                                 bool strict = false);
/// Evolves an existing solution by a further time s.
RadialSolution solve_homogeneous(const RadialSolution& u, double s, const SymbolSpec& symbol, double tol = 1e-10);

enum class Quadrature { Trapezoid, Simpson };

/// Forcing f(x, tau) sampled at time nodes, linearly interpolated in the
/// spectral coefficients between nodes.
struct ForcingGrid {
    std::vector<double> times;
    std::vector<RadialStep> values;

    /// Nodes start at 0 and strictly increase; values share one envelope.
    void validate() const;
    double horizon() const { return times.empty() ? 0 : times.back(); }
    static ForcingGrid zero(double horizon);
};

struct DuhamelOptions {
    Quadrature rule = Quadrature::Simpson;
    std::size_t intervals = 64;
    double tol = 1e-10;
};

/// u(t) = Z_t * u0 + int_0^t Z_{t - tau} * f(tau) d tau with the time
/// integral done by a composite rule on `intervals` uniform panels of [0, t].
/// The coarse companion uses half as many panels.
RadialSolution solve_nonhomogeneous(const RadialStep& u0, const ForcingGrid& f, double t, const SymbolSpec& symbol,
                                    const DuhamelOptions& opts = {});

// ---------------------------------------------------------------------------
// Real factor

enum class Decay { Compact, Rapid };

/// Samples u(x0 + i h), i = 0..n-1.  Compact: u = 0 outside the window.
/// Rapid: u is negligible outside the window (checked at the edges).
struct RealGrid {
    double x0 = 0;
    double h = 1;
    std::vector<double> values;
    Decay decay = Decay::Rapid;

    double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
};

struct RealSolution {
    RealGrid grid;
    /// Change under grid coarsening (2h vs h).
    double refinement_change = 0;
    /// Relative change between the half window and the full window.
    double window_change = 0;
};

/// (Z_t(.; beta) * u)(x_i) on the input grid.  Throws ToleranceError when the
/// grid is too coarse or the window too small for tol.
RealSolution convolve_real(const RealGrid& u, double t, double beta, double tol);

struct AdelicSolution {
    RealSolution real;
    RadialSolution finite;
};

/// Factorized solution: (Z_t^beta * u_real, Z_t^alpha * u_fin).
AdelicSolution solve_adelic(const RealGrid& u_real, const RadialStep& u_fin, double t, const SymbolSpec& symbol,
                            double tol = 1e-8);

/// (D^beta h)(x) on R for even real h given by its transform h^ (by quadrature).
double apply_real_operator(const std::function<double(double)>& h_hat, double beta, double x, double tol = 1e-12);

/// (D^{alpha,beta} h)(x) for h = h_inf (x) h_f, computed directly from the
/// combined symbol |xi_inf|^beta + ||xi_f||^alpha: a quadrature over xi_inf
/// per sphere of the (finite) spectrum of h_f.  Requires a Lizorkin h_f.
std::complex<double> apply_adelic_operator(const std::function<double(double)>& h_hat, const RadialStep& h_fin,
                                           const SymbolSpec& symbol, double x_real, const Radius& x_fin,
                                           double tol = 1e-12);

/// Real grid CSV "x,value".
std::string real_grid_csv(const RealGrid& g);
RealGrid real_grid_from_csv(const std::string& text, Decay decay);

}  // namespace adelic
