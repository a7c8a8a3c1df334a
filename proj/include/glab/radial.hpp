#pragma once

// The logarithmic drift counterexample on B_{1/e}: the drift profile, its
// divergence, the explicit radial solutions u_{delta,eps} of
//   -u'' - (n-1)/r u' - delta/(r ln r) u' = chi_{(0,eps)}
// and the growth of u_{delta,eps}/eps^n as eps -> 0.

#include "glab/lorentz.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glab::radial {

/// Radius of the ball carrying the counterexample, e^{-1}.
inline constexpr double kOuterRadius = 0.36787944117144233;

/// Thrown when adaptive quadrature misses its tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    [[nodiscard]] double achieved_error() const { return achieved_; }

private:
    double achieved_;
};

struct RadialProfile {
    std::function<double(double)> eval;
    double outer_radius = kOuterRadius;
    std::string singular_order;  // descriptive, e.g. "r^-1 log^-1"

    [[nodiscard]] double operator()(double r) const { return eval(r); }
    [[nodiscard]] RadialFunction as_function() const { return {eval, outer_radius}; }
};

/// |delta c(x)| = delta / (r (-ln r)) for 0 < r < 1/e; the vector field is
/// -delta x / (r^2 ln r). Evaluation outside (0, 1/e) throws.
[[nodiscard]] RadialProfile counterexample_drift(int n, double delta);

/// div c = (1 - (n-2) ln r) / (r^2 ln^2 r) on (0, 1/e).
[[nodiscard]] RadialProfile counterexample_divergence(int n);

/// G_{delta,eps}(rho) = int_0^{min(rho,eps)} sigma^{n-1} (-ln sigma)^delta d sigma.
[[nodiscard]] double enclosed_source(int n, double delta, double eps, double rho,
                                     double rel_tol = 1e-10);

/// u_{delta,eps}(r) = int_r^{1/e} G_{delta,eps}(rho) rho^{1-n} (-ln rho)^{-delta} d rho.
[[nodiscard]] double radial_solution(int n, double delta, double eps, double r,
                                     double rel_tol = 1e-8);

/// Tabulated u_{delta,eps} on a uniform radial grid.
struct RadialSolution {
    int n = 3;
    double delta = 0.0;
    double eps = 0.1;
    std::vector<double> r;
    std::vector<double> u;
    double tolerance = 0.0;  // largest relative change of a per-interval integral, 20 vs 40 nodes

    /// Tabulate on r_lo, r_lo + h, ..., r_hi (r_hi < 1/e) by summing
    /// per-interval Gauss-Legendre integrals from the outer end inward.
    static RadialSolution tabulate(int n, double delta, double eps, double r_lo, double r_hi,
                                   double h);
};

/// Max |L u - chi_{(0,eps)}| over interior grid points of the table, with L in
/// flux form -(w u')'/w, w = r^{n-1}(-ln r)^delta, differenced at half points.
/// Only points in [r_min, r_max] count; points within 2h of 0, eps and 1/e are
/// skipped. A fixed window keeps the max comparable across refinements.
[[nodiscard]] double radial_residual(const RadialSolution& sol, double r_min = 0.0,
                                     double r_max = kOuterRadius);

struct BlowupFit {
    std::vector<double> eps;
    std::vector<double> ratio;  // min over the annulus of u/eps^n
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool accepted = false;  // r_squared >= 0.98
};

/// Least-squares slope of ln m(eps) against ln(-ln eps), where m(eps) is the
/// minimum of u_{delta,eps}/eps^n over 16 radii spanning [inner, outer].
[[nodiscard]] BlowupFit blowup_rate(int n, double delta, double inner, double outer,
                                    const std::vector<double>& eps_sequence);

/// e^{-k} for k = 3..8.
[[nodiscard]] std::vector<double> default_eps_sequence();

}  // namespace glab::radial
