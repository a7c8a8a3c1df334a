#include "glab/lorentz.hpp"
#include "glab/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace glab;
using radial::kOuterRadius;

namespace {

// Composite Simpson in the variable x = ln sigma on [ln lo, ln hi].
double simpson_log(const std::function<double(double)>& f, double lo, double hi, int panels)
{
    const double a = std::log(lo);
    const double b = std::log(hi);
    const double step = (b - a) / (2 * panels);
    double s = 0.0;
    for (int i = 0; i <= 2 * panels; ++i) {
        const double x = a + i * step;
        const double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * f(std::exp(x)) * std::exp(x);
    }
    return s * step / 3.0;
}

}  // namespace

TEST_CASE("counterexample drift and divergence profiles")
{
    const auto c = radial::counterexample_drift(3, 1.0);
    CHECK(c(std::exp(-2.0)) == doctest::Approx(std::exp(2.0) / 2.0).epsilon(1e-14));
    CHECK(radial::counterexample_drift(3, 0.0)(0.1) == 0.0);
    CHECK_THROWS((void)c(kOuterRadius));
    CHECK_THROWS((void)c(0.0));
    CHECK_THROWS((void)c(-0.1));
    for (double r : {1e-8, 1e-4, 0.01, 0.2, 0.3678}) {
        CHECK(std::isfinite(c(r)));
    }

    const auto div = radial::counterexample_divergence(3);
    CHECK(div(std::exp(-2.0)) == doctest::Approx(3.0 * std::exp(4.0) / 4.0).epsilon(1e-13));
    // the profile is open at 1/e; its limit there is 2 e^2
    CHECK(div(kOuterRadius * (1.0 - 1e-12)) == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-9));

    const auto dv = div.as_function();
    CHECK(lorentz_norm_radial(dv, LorentzIndex::finite(1.5, 2), 3).finite());
    CHECK(lorentz_norm_radial(dv, LorentzIndex::finite(1.5, 1), 3).divergent);
}

TEST_CASE("enclosed source")
{
    for (double rho : {0.01, 0.05, 0.1}) {
        CHECK(radial::enclosed_source(3, 0.0, 0.1, rho) == doctest::Approx(rho * rho * rho / 3.0).epsilon(1e-12));
    }
    CHECK(radial::enclosed_source(3, 0.0, 0.1, 0.2) == doctest::Approx(1e-3 / 3.0).epsilon(1e-12));

    const double eps = 0.05;
    const auto integrand = [](double s) { return s * s * (-std::log(s)); };
    const double oracle = simpson_log(integrand, 1e-12, eps, 4000);
    const double g = radial::enclosed_source(3, 1.0, eps, eps);
    CHECK(g == doctest::Approx(oracle).epsilon(1e-10));
    // window around eps^3 (-ln eps) / 3
    const double scale = eps * eps * eps * (-std::log(eps)) / 3.0;
    CHECK(g > scale);
    CHECK(g < 1.2 * scale);
}

TEST_CASE("property: flatness beyond eps and the upper bound for G")
{
    for (double delta : {0.0, 0.5, 1.0, 2.0}) {
        for (double eps : {0.01, 0.05, 0.2}) {
            const double at_eps = radial::enclosed_source(3, delta, eps, eps);
            for (double rho : {eps * 1.01, 0.3, kOuterRadius}) {
                if (rho <= kOuterRadius) {
                    CHECK(radial::enclosed_source(3, delta, eps, rho) == at_eps);
                }
            }
            for (double rho : {eps / 8, eps / 2, eps}) {
                const double g = radial::enclosed_source(3, delta, eps, rho);
                const double lr = -std::log(rho);
                const double denom = 3.0 * (1.0 - delta / (3.0 * lr));
                if (denom > 0.0) {
                    CHECK(g <= rho * rho * rho * std::pow(lr, delta) / denom * (1 + 1e-12));
                }
                // sigma^2 (-ln sigma)^delta peaks at sigma = exp(-delta/2)
                const double peak = std::min(rho, std::exp(-delta / 2.0));
                CHECK(g <= rho * peak * peak * std::pow(-std::log(peak), delta) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("radial solution: closed form, endpoint and monotonicity")
{
    const double closed = (1e-3 / 3.0) * (5.0 - std::numbers::e);
    const double u = radial::radial_solution(3, 0.0, 0.1, 0.2);
    CHECK(std::abs(u - closed) < 1e-7 * closed);
    CHECK(closed == doctest::Approx(7.6057e-4).epsilon(1e-4));

    CHECK(radial::radial_solution(3, 1.0, 0.1, kOuterRadius) == 0.0);
    CHECK(radial::radial_solution(3, 1.0, 0.1, kOuterRadius - 1e-9) < 1e-10);

    for (double delta : {0.0, 1.0, 2.0}) {
        double previous = 1e300;
        for (double r = 0.01; r < kOuterRadius; r += 0.025) {
            const double v = radial::radial_solution(3, delta, 0.1, r);
            CHECK(v <= previous);
            CHECK(v >= 0.0);
            previous = v;
        }
    }
}

TEST_CASE("tabulation agrees with pointwise evaluation")
{
    const auto sol = radial::RadialSolution::tabulate(3, 1.0, 0.05, 0.02, 0.34, 0.01);
    for (std::size_t i = 0; i < sol.r.size(); i += 4) {
        CHECK(sol.u[i] == doctest::Approx(radial::radial_solution(3, 1.0, 0.05, sol.r[i])).epsilon(1e-8));
    }
}

TEST_CASE("radial residual decays like h^2")
{
    for (double delta : {0.0, 1.0}) {
        double previous = 0.0;
        for (double h : {0.01, 0.005, 0.0025}) {
            const auto sol = radial::RadialSolution::tabulate(3, delta, 0.02, 0.02, 0.36, h);
            const double res = radial::radial_residual(sol, 0.04, 0.34);
            if (previous > 0.0) {
                CHECK(std::log2(previous / res) == doctest::Approx(2.0).epsilon(0.15));
            }
            previous = res;
        }
    }
}

TEST_CASE("radial residual of a constant table is the indicator")
{
    radial::RadialSolution sol;
    sol.n = 3;
    sol.delta = 1.0;
    sol.eps = 0.1;
    for (int i = 0; i <= 30; ++i) {
        sol.r.push_back(0.01 + 0.01 * i);
        sol.u.push_back(2.5);
    }
    CHECK(radial::radial_residual(sol, 0.0, 0.08) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(radial::radial_residual(sol, 0.13, 0.3) == doctest::Approx(0.0));
}

TEST_CASE("blow-up rates")
{
    const double e = std::numbers::e;
    const std::vector<double> short_seq = {std::pow(e, -3), std::pow(e, -4), std::pow(e, -5), std::pow(e, -6)};

    const auto zero = radial::blowup_rate(3, 0.0, 0.1, 0.3, radial::default_eps_sequence());
    CHECK(std::abs(zero.slope) < 0.05);
    // closed form: u_0 / eps^3 at r = 0.3 is (1/0.3 - e)/3, independent of eps
    for (double m : zero.ratio) {
        CHECK(m == doctest::Approx((1.0 / 0.3 - e) / 3.0).epsilon(1e-6));
    }

    const auto one = radial::blowup_rate(3, 1.0, 0.1, 0.3, short_seq);
    CHECK(one.accepted);
    CHECK(one.slope == doctest::Approx(1.0).epsilon(0.1));

    const auto two = radial::blowup_rate(3, 2.0, 0.1, 0.3, radial::default_eps_sequence());
    CHECK(two.accepted);
    CHECK(two.slope == doctest::Approx(2.0).epsilon(0.1));

    CHECK_THROWS((void)radial::blowup_rate(3, 1.0, 0.1, 0.3, {0.01, 0.02}));
    CHECK_THROWS((void)radial::blowup_rate(3, 1.0, 0.1, 0.3, {0.01, 0.02, 0.2}));
}

TEST_CASE("default eps sequence")
{
    const auto seq = radial::default_eps_sequence();
    REQUIRE(seq.size() == 6);
    CHECK(seq.front() == doctest::Approx(std::exp(-3.0)));
    CHECK(seq.back() == doctest::Approx(std::exp(-8.0)));
}
