#include "generators.hpp"

#include "glab/elliptic.hpp"
#include "glab/lorentz.hpp"
#include "glab/radial.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

using namespace glab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

WeightedSamples three_entries() { return WeightedSamples({{3, 0.5}, {1, 1.0}, {2, 0.25}}); }

// f*(s) straight from the definition: smallest sampled level t with mu(t) <= s.
double inf_scan(const WeightedSamples& f, double s)
{
    double best = std::numeric_limits<double>::infinity();
    if (distribution_function(f, 0.0) <= s) {
        return 0.0;
    }
    for (const auto& e : f.entries()) {
        if (distribution_function(f, e.value) <= s) {
            best = std::min(best, e.value);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("distribution function on small samples")
{
    const auto f = three_entries();
    CHECK(distribution_function(f, 1.5) == 0.75);
    CHECK(distribution_function(f, 5.0) == 0.0);
    CHECK(distribution_function(f, 0.5) == f.total_measure());
    CHECK_THROWS((void)distribution_function(f, -1.0));
}

TEST_CASE("distribution function matches a brute-force sum on 10^4 entries")
{
    gen::Rng rng(21);
    std::vector<WeightedSamples::Entry> e(10000);
    for (auto& x : e) {
        x = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    }
    const WeightedSamples f(e);
    for (int k = 0; k < 50; ++k) {
        const double t = rng.uniform(0.0, 1.0);
        double brute = 0.0;
        for (const auto& x : e) {
            brute += x.value > t ? x.weight : 0.0;
        }
        CHECK(distribution_function(f, t) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("decreasing rearrangement of small samples")
{
    const StepFunction s = decreasing_rearrangement(three_entries());
    CHECK(s(0.25) == 3.0);
    CHECK(s(0.6) == 2.0);
    CHECK(s(1.0) == 1.0);
    CHECK(s(1.75) == 0.0);
    CHECK(s(5.0) == 0.0);
    CHECK(s.non_increasing());

    const StepFunction one = decreasing_rearrangement(WeightedSamples({{2.5, 0.3}}));
    CHECK(one(0.1) == 2.5);
    CHECK(one(0.31) == 0.0);
}

TEST_CASE("rearrangement equals the inf definition at probe points")
{
    gen::Rng rng(5);
    const WeightedSamples f = gen::samples(rng, 1000);
    const StepFunction s = decreasing_rearrangement(f);
    for (int k = 0; k < 100; ++k) {
        const double probe = rng.uniform(0.0, 1.05 * f.total_measure());
        CHECK(s(probe) == inf_scan(f, probe));
    }
}

TEST_CASE("property: equimeasurability, mu(f*(s)) <= s, and equality off flat values")
{
    gen::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const WeightedSamples f = gen::samples(rng, static_cast<std::size_t>(rng.integer(1, 120)));
        const StepFunction s = decreasing_rearrangement(f);
        for (const auto& e : f.entries()) {
            REQUIRE(s.measure_above(e.value) == distribution_function(f, e.value));
        }
        const auto bp = s.breakpoints();
        for (int k = 0; k < 20; ++k) {
            const double probe = rng.uniform(0.0, f.total_measure());
            const double v = s(probe);
            REQUIRE(distribution_function(f, v) <= probe);
        }
        // At a breakpoint the level just reached is not flat there: mu(f*(s)) = s.
        for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
            REQUIRE(distribution_function(f, s(bp[i])) == bp[i]);
        }
    }
}

TEST_CASE("Lorentz norm of indicators")
{
    const WeightedSamples e({{1.0, 1.0}});
    CHECK(lorentz_norm(e, LorentzIndex::finite(3, 1)).value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lorentz_norm(e, LorentzIndex::finite(1.5, 1)).value == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(lorentz_norm(e, LorentzIndex::weak(3)).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS((void)LorentzIndex::weak(3).q());
}

TEST_CASE("property: both norm formulas agree and the power law holds")
{
    gen::Rng rng(9);
    const double ps[] = {1.2, 1.5, 2.0, 3.0, 4.5};
    const double qs[] = {0.5, 1.0, 1.5, 2.0, 4.0};
    for (int trial = 0; trial < 200; ++trial) {
        const WeightedSamples f = gen::positive_samples(rng, static_cast<std::size_t>(rng.integer(1, 80)));
        const double p = ps[trial % 5];
        const double q = qs[(trial / 5) % 5];
        const auto a = lorentz_norm(f, LorentzIndex::finite(p, q));
        const auto b = lorentz_norm_distribution(f, LorentzIndex::finite(p, q));
        REQUIRE(rel(a.value, b.value) < 1e-10);
        const auto aw = lorentz_norm(f, LorentzIndex::weak(p));
        const auto bw = lorentz_norm_distribution(f, LorentzIndex::weak(p));
        REQUIRE(rel(aw.value, bw.value) < 1e-10);
        for (double r : {0.5, 2.0, 3.0}) {
            const double lhs = lorentz_norm(f.power(r), LorentzIndex::finite(p, q)).value;
            const double rhs = std::pow(lorentz_norm(f, LorentzIndex::finite(p * r, q * r)).value, r);
            REQUIRE(rel(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("property: superadditivity of the (p,1) norm on disjoint index sets")
{
    gen::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(2, 60));
        const WeightedSamples f = gen::positive_samples(rng, n);
        auto in_x = std::make_unique<bool[]>(n);
        auto in_y = std::make_unique<bool[]>(n);
        auto in_xy = std::make_unique<bool[]>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int side = rng.integer(0, 2);
            in_x[i] = side == 0;
            in_y[i] = side == 1;
            in_xy[i] = side != 2;
        }
        const double p = rng.uniform(1.1, 5.0);
        const auto norm_p = [&](const bool* mask) {
            return std::pow(lorentz_norm(f.restrict_to({mask, n}), LorentzIndex::finite(p, 1)).value, p);
        };
        REQUIRE(norm_p(in_xy.get()) >= (norm_p(in_x.get()) + norm_p(in_y.get())) * (1 - 1e-12));
    }
}

TEST_CASE("|x|^-1 capped at 4 on the unit ball approaches the weak (3, inf) value")
{
    const double exact = std::cbrt(4.0 * std::numbers::pi / 3.0);
    double previous = 1e300;
    for (int cells : {16, 32}) {
        const auto dom = std::make_shared<const Domain>(Domain::ball({0, 0, 0}, 1.0, 1.0 / cells));
        const auto f = sample(
            [](const Point& p) {
                const double r = norm(p);
                return r == 0.0 ? 4.0 : std::min(4.0, 1.0 / r);
            },
            dom);
        const double v = lorentz_norm(nodal_samples(f), LorentzIndex::weak(3)).value;
        const double err = rel(v, exact);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 0.015);
}

TEST_CASE("radial norms of the counterexample drift")
{
    const auto g = radial::counterexample_drift(3, 1.0).as_function();
    const double ball = std::cbrt(4.0 * std::numbers::pi / 3.0);

    const auto two = lorentz_norm_radial(g, LorentzIndex::finite(3, 2), 3);
    REQUIRE(two.finite());
    CHECK(rel(two.value, std::sqrt(3.0) * ball) < 1e-4);

    // closed form (3 / (q - 1))^{1/q} (4 pi / 3)^{1/3}
    for (double q : {1.25, 4.0}) {
        const auto v = lorentz_norm_radial(g, LorentzIndex::finite(3, q), 3);
        REQUIRE(v.finite());
        CHECK(rel(v.value, std::pow(3.0 / (q - 1.0), 1.0 / q) * ball) < 1e-4);
    }
    CHECK(lorentz_norm_radial(g, LorentzIndex::finite(3, 1), 3).divergent);

    const auto g2 = radial::counterexample_drift(3, 2.5).as_function();
    CHECK(rel(lorentz_norm_radial(g2, LorentzIndex::finite(3, 2), 3).value, 2.5 * two.value) < 1e-6);
}

TEST_CASE("radial norm of a constant on a ball of measure one")
{
    const double r = std::cbrt(3.0 / (4.0 * std::numbers::pi));
    const RadialFunction one{[](double) { return 1.0; }, r};
    const auto v = lorentz_norm_radial(one, LorentzIndex::finite(3, 1), 3);
    REQUIRE(v.finite());
    CHECK(v.value == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("second-index monotonicity: finite for q implies finite for larger q")
{
    const auto g = radial::counterexample_drift(3, 1.0).as_function();
    const double qs[] = {1.0, 1.25, 2.0, 4.0};
    bool seen_finite = false;
    for (double q : qs) {
        const bool finite = lorentz_norm_radial(g, LorentzIndex::finite(3, q), 3).finite();
        if (seen_finite) {
            CHECK(finite);
        }
        seen_finite = seen_finite || finite;
    }
    CHECK(seen_finite);
}

TEST_CASE("Hardy pairing")
{
    const WeightedSamples chi({{1, 0.5}, {1, 1.5}});
    const auto eq = hardy_pairing(chi, chi);
    CHECK(eq.lhs == doctest::Approx(2.0));
    CHECK(eq.rhs == doctest::Approx(2.0));

    gen::Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 64;
        std::vector<WeightedSamples::Entry> u(n);
        std::vector<WeightedSamples::Entry> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = rng.uniform(0.1, 1.0);
            u[i] = {rng.uniform(0.0, 3.0), w};
            v[i] = {rng.uniform(0.0, 3.0), w};
        }
        const auto hp = hardy_pairing(WeightedSamples(u), WeightedSamples(v));
        REQUIRE(hp.lhs <= hp.rhs + 1e-12 * std::max(1.0, hp.rhs));
    }

    std::vector<WeightedSamples::Entry> inc(16);
    std::vector<WeightedSamples::Entry> dec(16);
    for (std::size_t i = 0; i < 16; ++i) {
        inc[i] = {static_cast<double>(i + 1), 1.0};
        dec[i] = {static_cast<double>(16 - i), 1.0};
    }
    const auto opposed = hardy_pairing(WeightedSamples(inc), WeightedSamples(dec));
    CHECK(opposed.lhs < opposed.rhs);

    CHECK_THROWS((void)hardy_pairing(WeightedSamples({{1, 1}}), WeightedSamples({{1, 2}})));
}

TEST_CASE("pseudo-rearrangement")
{
    gen::Rng rng(17);
    const std::size_t n = 32;
    std::vector<WeightedSamples::Entry> u(n);
    std::vector<WeightedSamples::Entry> f(n);
    std::vector<WeightedSamples::Entry> ones(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = rng.uniform(0.1, 1.0);
        u[i] = {rng.uniform(0.0, 2.0), w};
        f[i] = {rng.uniform(0.0, 5.0), w};
        ones[i] = {1.0, w};
    }
    const WeightedSamples us(u);
    const WeightedSamples fs(f);
    std::vector<double> grid;
    for (int k = 1; k < 12; ++k) {
        grid.push_back(us.total_measure() * k / 12.0);
    }

    // brute force: cumulative integral of f along the cells sorted by decreasing u
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a].value > u[b].value; });
    const auto cumulative = [&](const std::vector<WeightedSamples::Entry>& g, double s) {
        double acc = 0.0;
        double m = 0.0;
        for (std::size_t i : order) {
            const double take = std::min(g[i].weight, std::max(0.0, s - m));
            acc += take * g[i].value;
            m += g[i].weight;
        }
        return acc;
    };
    const StepFunction psi = pseudo_rearrangement(us, fs, grid);
    REQUIRE(psi.intervals() == grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double expect = (cumulative(f, grid[k + 1]) - cumulative(f, grid[k])) / (grid[k + 1] - grid[k]);
        CHECK(psi.values()[k] == doctest::Approx(expect).epsilon(1e-12));
    }

    const StepFunction flat = pseudo_rearrangement(us, WeightedSamples(ones), grid);
    for (double v : flat.values()) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }

    const StepFunction self = pseudo_rearrangement(us, us, grid);
    const StepFunction star = decreasing_rearrangement(us);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double avg = 0.0;
        const int sub = 20000;
        for (int j = 0; j < sub; ++j) {
            avg += star(grid[k] + (grid[k + 1] - grid[k]) * (j + 0.5) / sub);
        }
        avg /= sub;
        CHECK(self.values()[k] == doctest::Approx(avg).epsilon(1e-3));
    }
}

TEST_CASE("unit ball volume")
{
    CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}
