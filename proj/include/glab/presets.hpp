#pragma once

// Coefficient presets used by the CLI, the tests and the acceptance battery.

#include "glab/elliptic.hpp"

#include <cstdint>

namespace glab::presets {

[[nodiscard]] OperatorData laplacian(const DomainPtr& dom);

/// b = beta (sin pi y, sin pi z, sin pi x), c = gamma (cos pi z, cos pi x, cos pi y),
/// d = d0. Both drifts are divergence free, so d0 >= 0 gives d >= div b and d >= div c.
[[nodiscard]] OperatorData smooth_drift(const DomainPtr& dom, double beta = 1.0,
                                        double gamma = 1.0, double d0 = 0.0);

/// L(prod sin(pi x_i)) for the smooth-drift operator, as a closure.
[[nodiscard]] ScalarClosure smooth_drift_manufactured_rhs(double beta, double gamma, double d0);
[[nodiscard]] ScalarClosure product_sine();

/// delta x / (r^2 (-ln r)) around `center` for r < 1/e, zero beyond (the
/// logarithmic drift; its magnitude is delta / (r (-ln r))).
[[nodiscard]] VectorClosure log_drift(double delta, const Point& center);
/// Its divergence delta (1 - (n-2) ln r)/(r^2 ln^2 r) for r < 1/e, zero beyond.
[[nodiscard]] ScalarClosure log_drift_divergence(double delta, const Point& center);

/// b = log_drift(delta) sampled with the pole avoided and mollified at radius 1/j,
/// c = 0, d = 0. Its adjoint is -Laplacian + b . grad, the radial
/// counterexample operator.
[[nodiscard]] OperatorData counterexample(const DomainPtr& dom, double delta, double j,
                                          const Point& center);

/// Random smooth operator: A = a(x) I with a in [0.5, 1.5], trigonometric b and c
/// of amplitude <= drift, d = div b + d0 with d0 in [0.1, 0.5].
[[nodiscard]] OperatorData random_operator(const DomainPtr& dom, std::uint64_t seed,
                                           double drift = 1.0);

}  // namespace glab::presets
