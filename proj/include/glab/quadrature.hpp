#pragma once

#include <functional>

namespace glab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (31 point) on [a, b] with a relative tolerance.
[[nodiscard]] QuadResult integrate_adaptive(const ScalarFn& f, double a, double b,
                                            double rel_tol = 1e-10);

/// Integral over [a, b] with 0 <= a < b for integrands with a mild (e.g.
/// logarithmic) singularity at 0: [a, b] is split geometrically toward a.
[[nodiscard]] QuadResult integrate_toward_zero(const ScalarFn& f, double a, double b,
                                               double rel_tol = 1e-10);

/// Composite fixed-order Gauss-Legendre rule with `panels` equal panels.
/// Used as an independent check on the adaptive routines.
[[nodiscard]] double gauss_legendre_composite(const ScalarFn& f, double a, double b, int panels);

}  // namespace glab
