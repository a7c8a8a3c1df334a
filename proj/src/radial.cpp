#include "glab/radial.hpp"

#include "glab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace glab::radial {

namespace {

void check_dimension(int n)
{
    if (n < 3) {
        throw std::invalid_argument("radial: dimension must be at least 3");
    }
}

void check_open_radius(double r, const char* who)
{
    if (!(r > 0.0) || !(r < kOuterRadius)) {
        std::ostringstream os;
        os << who << ": radius " << r << " outside (0, 1/e)";
        throw std::domain_error(os.str());
    }
}

void check_quadrature(const QuadResult& q, double rel_tol, const char* who)
{
    if (!q.converged || !(q.error <= 100.0 * std::max(rel_tol, 1e-14) * std::abs(q.value) + 1e-300)) {
        std::ostringstream os;
        os << who << ": quadrature missed tolerance " << rel_tol << " (achieved " << q.error << ")";
        throw QuadratureError(os.str(), q.error);
    }
}

// 1 / (rho^{n-1} (-ln rho)^delta)
double inverse_weight(int n, double delta, double rho)
{
    return std::pow(rho, 1 - n) * std::pow(-std::log(rho), -delta);
}

}  // namespace

RadialProfile counterexample_drift(int n, double delta)
{
    check_dimension(n);
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("counterexample_drift: delta must be non-negative");
    }
    RadialProfile p;
    p.eval = [delta](double r) {
        check_open_radius(r, "counterexample_drift");
        return delta / (r * (-std::log(r)));
    };
    p.singular_order = delta > 0.0 ? "r^-1 log^-1" : "none";
    return p;
}

RadialProfile counterexample_divergence(int n)
{
    check_dimension(n);
    RadialProfile p;
    p.eval = [n](double r) {
        check_open_radius(r, "counterexample_divergence");
        const double l = std::log(r);
        return (1.0 - (n - 2) * l) / (r * r * l * l);
    };
    p.singular_order = "r^-2 log^-1";
    return p;
}

double enclosed_source(int n, double delta, double eps, double rho, double rel_tol)
{
    check_dimension(n);
    if (!(eps > 0.0) || !(eps < kOuterRadius)) {
        throw std::invalid_argument("enclosed_source: eps must lie in (0, 1/e)");
    }
    if (!(rho >= 0.0) || rho > kOuterRadius) {
        throw std::invalid_argument("enclosed_source: rho must lie in [0, 1/e]");
    }
    const double top = std::min(rho, eps);
    if (top == 0.0) {
        return 0.0;
    }
    if (delta == 0.0) {
        return std::pow(top, n) / n;
    }
    const ScalarFn integrand = [n, delta](double s) {
        return s > 0.0 ? std::pow(s, n - 1) * std::pow(-std::log(s), delta) : 0.0;
    };
    const QuadResult q = integrate_toward_zero(integrand, 0.0, top, rel_tol);
    check_quadrature(q, rel_tol, "enclosed_source");
    return q.value;
}

double radial_solution(int n, double delta, double eps, double r, double rel_tol)
{
    check_dimension(n);
    if (!(r > 0.0) || r > kOuterRadius) {
        throw std::domain_error("radial_solution: r must lie in (0, 1/e]");
    }
    if (r == kOuterRadius) {
        return 0.0;
    }
    const double g_eps = enclosed_source(n, delta, eps, eps, rel_tol * 1e-2);
    // G is constant beyond eps, so the outer part is a single integral
    const double split = std::max(r, eps);
    double outer = 0.0;
    if (split < kOuterRadius) {
        const QuadResult q = integrate_adaptive(
            [n, delta](double rho) { return inverse_weight(n, delta, rho); }, split, kOuterRadius,
            rel_tol * 1e-2);
        check_quadrature(q, rel_tol, "radial_solution");
        outer = g_eps * q.value;
    }
    double inner = 0.0;
    if (r < eps) {
        const ScalarFn nested = [&](double rho) {
            return enclosed_source(n, delta, eps, rho, rel_tol * 1e-2) *
                   inverse_weight(n, delta, rho);
        };
        const QuadResult q = integrate_adaptive(nested, r, eps, rel_tol * 1e-2);
        check_quadrature(q, rel_tol, "radial_solution");
        inner = q.value;
    }
    return inner + outer;
}

RadialSolution RadialSolution::tabulate(int n, double delta, double eps, double r_lo,
                                        double r_hi, double h)
{
    check_dimension(n);
    if (!(h > 0.0) || !(r_lo > 0.0) || !(r_hi > r_lo) || !(r_hi < kOuterRadius)) {
        throw std::invalid_argument("RadialSolution::tabulate: need 0 < r_lo < r_hi < 1/e, h > 0");
    }
    RadialSolution sol;
    sol.n = n;
    sol.delta = delta;
    sol.eps = eps;
    const auto count = static_cast<std::size_t>(std::llround((r_hi - r_lo) / h));
    if (std::abs(r_lo + count * h - r_hi) > 1e-9 * h) {
        throw std::invalid_argument("RadialSolution::tabulate: (r_hi - r_lo)/h must be integral");
    }
    sol.r.resize(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        sol.r[i] = r_lo + static_cast<double>(i) * h;
    }
    sol.u.assign(count + 1, 0.0);

    // G on each panel from the value at its left end plus a Gauss-Legendre
    // integral to every node; panels split at eps, where G stops growing
    const auto source = [n, delta](double s) {
        return std::pow(s, n - 1) * std::pow(-std::log(s), delta);
    };
    const double g_eps = enclosed_source(n, delta, eps, eps, 1e-13);
    double g_left = sol.r.front() < eps ? enclosed_source(n, delta, eps, sol.r.front(), 1e-13)
                                        : g_eps;
    double worst = 0.0;
    const auto segment = [&](double a, double b) {
        const bool flat = a >= eps;
        const double g0 = flat ? g_eps : g_left;
        const auto integrand = [&](double rho) {
            const double g =
                flat ? g_eps : g0 + gauss_legendre_composite(source, a, rho, 1);
            return g * inverse_weight(n, delta, rho);
        };
        const double fine = gauss_legendre_composite(integrand, a, b, 2);
        const double coarse = gauss_legendre_composite(integrand, a, b, 1);
        worst = std::max(worst, std::abs(fine - coarse) / std::abs(fine));
        if (!flat) {
            g_left = g0 + gauss_legendre_composite(source, a, b, 1);
        }
        return fine;
    };
    const auto piece = [&](double a, double b) {
        return a < eps && eps < b ? segment(a, eps) + segment(eps, b) : segment(a, b);
    };
    std::vector<double> increments(count + 1, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        increments[i] = piece(sol.r[i], sol.r[i + 1]);
    }
    increments[count] = 0.0;
    if (sol.r[count] < kOuterRadius) {
        const QuadResult tail = integrate_adaptive(
            [&](double rho) { return g_eps * inverse_weight(n, delta, rho); },
            std::max(sol.r[count], eps), kOuterRadius, 1e-13);
        check_quadrature(tail, 1e-13, "RadialSolution::tabulate");
        double inner_tail = 0.0;
        if (sol.r[count] < eps) {
            inner_tail = piece(sol.r[count], eps);
        }
        increments[count] = tail.value + inner_tail;
    }
    sol.u[count] = increments[count];
    for (std::size_t i = count; i-- > 0;) {
        sol.u[i] = sol.u[i + 1] + increments[i];
    }
    sol.tolerance = std::max(worst, 1e-15);
    return sol;
}

double radial_residual(const RadialSolution& sol, double r_min, double r_max)
{
    const std::size_t count = sol.r.size();
    if (count < 3 || sol.u.size() != count) {
        throw std::invalid_argument("radial_residual: table needs at least three points");
    }
    const double h = sol.r[1] - sol.r[0];
    for (std::size_t i = 1; i < count; ++i) {
        if (std::abs((sol.r[i] - sol.r[i - 1]) - h) > 1e-9 * h) {
            throw std::invalid_argument("radial_residual: grid must be uniform");
        }
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        const double r = sol.r[i];
        if (r < r_min || r > r_max || r < 2.0 * h || std::abs(r - sol.eps) < 2.0 * h ||
            r > kOuterRadius - 2.0 * h) {
            continue;
        }
        // -(w u')'/w with w = r^{n-1} (-ln r)^delta, fluxes at the half points
        const auto w = [&](double x) { return 1.0 / inverse_weight(sol.n, sol.delta, x); };
        const double flux_hi = w(r + 0.5 * h) * (sol.u[i + 1] - sol.u[i]);
        const double flux_lo = w(r - 0.5 * h) * (sol.u[i] - sol.u[i - 1]);
        const double lu = -(flux_hi - flux_lo) / (w(r) * h * h);
        const double source = r < sol.eps ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(lu - source));
    }
    return worst;
}

BlowupFit blowup_rate(int n, double delta, double inner, double outer,
                      const std::vector<double>& eps_sequence)
{
    check_dimension(n);
    if (eps_sequence.size() < 3) {
        throw std::invalid_argument("blowup_rate: need at least three eps values for a fit");
    }
    if (!(inner < outer) || !(outer < kOuterRadius)) {
        throw std::invalid_argument("blowup_rate: need inner < outer < 1/e");
    }
    for (double e : eps_sequence) {
        if (!(e > 0.0) || !(e < inner)) {
            throw std::invalid_argument("blowup_rate: every eps must lie in (0, inner)");
        }
    }
    BlowupFit fit;
    fit.eps = eps_sequence;
    fit.ratio.assign(eps_sequence.size(), 0.0);
    const auto samples = static_cast<int>(eps_sequence.size());
    std::vector<std::exception_ptr> failures(eps_sequence.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < samples; ++k) {
        const auto slot = static_cast<std::size_t>(k);
        try {
            const double e = eps_sequence[slot];
            double lowest = std::numeric_limits<double>::infinity();
            constexpr int kRadii = 16;
            for (int i = 0; i < kRadii; ++i) {
                const double r = inner + (outer - inner) * i / (kRadii - 1);
                lowest = std::min(lowest, radial_solution(n, delta, e, r));
            }
            fit.ratio[slot] = lowest / std::pow(e, n);
        } catch (...) {
            failures[slot] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    // ordinary least squares of y = ln m against x = ln(-ln eps)
    const double count = static_cast<double>(eps_sequence.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < eps_sequence.size(); ++k) {
        xs.push_back(std::log(-std::log(eps_sequence[k])));
        ys.push_back(std::log(fit.ratio[k]));
        sx += xs.back();
        sy += ys.back();
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("blowup_rate: eps values must be distinct");
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
        ss_res += e * e;
    }
    // a flat response (delta = 0) is an exact fit, not an undefined one
    fit.r_squared = syy <= 1e-20 * count ? 1.0 : 1.0 - ss_res / syy;
    fit.accepted = fit.r_squared >= 0.98;
    return fit;
}

std::vector<double> default_eps_sequence()
{
    std::vector<double> e;
    for (int k = 3; k <= 8; ++k) {
        e.push_back(std::exp(-static_cast<double>(k)));
    }
    return e;
}

}  // namespace glab::radial
