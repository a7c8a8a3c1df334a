#include "generators.hpp"

#include "glab/elliptic.hpp"
#include "glab/presets.hpp"
#include "glab/principles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>

using namespace glab;

namespace {

constexpr double kPi = std::numbers::pi;

DomainPtr unit_box(int cells) { return std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / cells)); }

// Random operator with a non-symmetric A added on top.
OperatorData skewed_operator(const DomainPtr& dom, std::uint64_t seed)
{
    OperatorData op = presets::random_operator(dom, seed);
    gen::Rng rng(seed + 100);
    for (auto& a : op.A) {
        const double s = rng.uniform(-0.2, 0.2);
        a[1] += s;
        a[3] -= s;
        a[5] += 0.5 * s;
        a[7] -= 0.5 * s;
    }
    return op;
}

double nodal_l2_error(const GridField& u, const ScalarClosure& exact)
{
    const auto w = u.domain().node_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = u[i] - exact(u.domain().node(i));
        s += w[i] * e * e;
    }
    return std::sqrt(s);
}

GridField bump(const DomainPtr& dom, const Point& c, double r)
{
    return sample(
        [c, r](const Point& x) {
            const double t = distance(x, c) / r;
            return t < 1.0 ? (1 - t * t) * (1 - t * t) : 0.0;
        },
        dom);
}

}  // namespace

TEST_CASE("Laplacian assembles the trilinear 27-point stencil")
{
    const auto dom = unit_box(8);
    const double h = dom->h();
    const LinearSystem sys = assemble(OperatorData::laplacian(dom), RightSide{});
    const auto dof = dom->dof_of_node();
    const auto row = static_cast<std::size_t>(dof[dom->node_index(4, 4, 4)]);
    const auto entry = [&](int i, int j, int k) {
        return sys.matrix.at(row, static_cast<std::size_t>(dof[dom->node_index(4 + i, 4 + j, 4 + k)]));
    };
    CHECK(entry(0, 0, 0) == doctest::Approx(8.0 * h / 3.0).epsilon(1e-14));
    CHECK(std::abs(entry(1, 0, 0)) < 1e-15);
    CHECK(entry(1, 1, 0) == doctest::Approx(-h / 6.0).epsilon(1e-14));
    CHECK(entry(1, -1, 1) == doctest::Approx(-h / 12.0).epsilon(1e-14));
    double sum = 0.0;
    for (std::size_t k = sys.matrix.row_ptr[row]; k < sys.matrix.row_ptr[row + 1]; ++k) {
        sum += sys.matrix.values[k];
    }
    CHECK(std::abs(sum) < 1e-14);
}

TEST_CASE("adjoint: transpose identity, involution and the symmetric case")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto dom = unit_box(8);  // 9^3 nodes
        const OperatorData op = skewed_operator(dom, seed);
        const CsrMatrix m = assemble(op, RightSide{}).matrix;
        const CsrMatrix ma = assemble(adjoint(op), RightSide{}).matrix;
        const CsrMatrix mt = m.transpose();
        REQUIRE(ma.values.size() == mt.values.size());
        CHECK(ma.col_idx == mt.col_idx);
        CHECK(std::memcmp(ma.values.data(), mt.values.data(), ma.values.size() * sizeof(double)) == 0);

        const OperatorData twice = adjoint(adjoint(op));
        CHECK(twice.A == op.A);
        for (std::size_t i = 0; i < op.b.size(); ++i) {
            REQUIRE(twice.b[i] == op.b[i]);
            REQUIRE(twice.c[i] == op.c[i]);
        }
    }
    const auto dom = unit_box(8);
    OperatorData sym = presets::random_operator(dom, 3);
    sym.c = sym.b;
    const CsrMatrix m = assemble(sym, RightSide{}).matrix;
    CHECK(max_abs_difference(m, m.transpose()) == 0.0);
}

TEST_CASE("operator validation and ellipticity sampling")
{
    const auto dom = unit_box(8);
    const OperatorData op = presets::random_operator(dom, 9);
    CHECK_NOTHROW(op.validate());
    CHECK(op.sampled_ellipticity() >= op.lambda);
    OperatorData bad = op;
    bad.lambda = 5.0;
    CHECK_THROWS(bad.validate());
    bad = op;
    bad.A.pop_back();
    CHECK_THROWS(bad.validate());
}

TEST_CASE("manufactured solutions converge at second order")
{
    const ScalarClosure exact = presets::product_sine();
    for (int variant = 0; variant < 2; ++variant) {
        double prev = 0.0;
        for (int cells : {8, 16, 32}) {
            const auto dom = unit_box(cells);
            const OperatorData op = variant == 0 ? presets::laplacian(dom) : presets::smooth_drift(dom, 1.0, 1.0, 0.0);
            RightSide rhs;
            rhs.g = variant == 0
                        ? sample([&](const Point& p) { return 3 * kPi * kPi * exact(p); }, dom)
                        : sample(presets::smooth_drift_manufactured_rhs(1.0, 1.0, 0.0), dom);
            const SolveReport rep = solve_dirichlet(op, rhs, 1e-12);
            REQUIRE_FALSE(rep.stagnated);
            const double err = nodal_l2_error(rep.solution, exact);
            if (prev > 0.0) {
                CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
            }
            prev = err;
        }
    }
}

TEST_CASE("zero data gives the zero solution")
{
    const auto dom = unit_box(8);
    const SolveReport rep = solve_dirichlet(presets::random_operator(dom, 4), RightSide{});
    CHECK(rep.solution.max_abs() == 0.0);
}

TEST_CASE("solver is deterministic and meets its residual")
{
    const auto dom = unit_box(12);
    const OperatorData op = presets::random_operator(dom, 11);
    RightSide rhs;
    rhs.g = sample([](const Point& p) { return std::cos(3 * p[0]) + p[1]; }, dom);
    rhs.f = sample([](const Point& p) { return Vec3{p[2], 0.0, -p[0]}; }, dom);
    const SolveReport a = solve_dirichlet(op, rhs, 1e-10);
    const SolveReport b = solve_dirichlet(op, rhs, 1e-10);
    CHECK(a.iterations == b.iterations);
    CHECK(a.relative_residual == b.relative_residual);
    CHECK(std::memcmp(a.solution.values().data(), b.solution.values().data(), a.solution.size() * sizeof(double)) == 0);
    CHECK(a.relative_residual <= 1e-10);

    // Galerkin residual against every interior hat, both signs
    const double scale = rhs.g->max_abs() + rhs.f->max_abs();
    CHECK(std::abs(subsolution_residual(op, a.solution, rhs)) <= 1e-6 * scale);
    RightSide neg = rhs;
    for (double& v : neg.g->values()) {
        v = -v;
    }
    for (Vec3& v : neg.f->values()) {
        v = {-v[0], -v[1], -v[2]};
    }
    GridField minus = a.solution;
    for (double& v : minus.values()) {
        v = -v;
    }
    CHECK(std::abs(subsolution_residual(op, minus, neg)) <= 1e-6 * scale);
}

TEST_CASE("constructed subsolutions pass the subsolution check")
{
    const auto dom = unit_box(10);
    const OperatorData op = presets::random_operator(dom, 6);
    RightSide rhs;
    rhs.g = sample([](const Point& p) { return 1.0 + p[2]; }, dom);
    RightSide lowered = rhs;
    for (double& v : lowered.g->values()) {
        v -= 0.5;  // nonpositive extra source
    }
    const SolveReport sub = solve_dirichlet(op, lowered, 1e-12);
    CHECK(subsolution_residual(op, sub.solution, rhs) <= 1e-8 * rhs.g->max_abs());
}

TEST_CASE("drift operator with the mollified counterexample converges")
{
    const auto dom = std::make_shared<const Domain>(Domain::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 1.0 / 16));
    const OperatorData op = presets::counterexample(dom, 0.2, 4.0, {0, 0, 0});
    RightSide rhs;
    rhs.g = sample([](const Point&) { return 1.0; }, dom);
    const SolveReport rep = solve_dirichlet(op, rhs, 1e-8);
    CHECK_FALSE(rep.stagnated);
    CHECK(rep.relative_residual <= 1e-8);
    CHECK(std::abs(subsolution_residual(op, rep.solution, rhs)) <= 1e-5);
}

TEST_CASE("divergence condition margins")
{
    const auto dom = unit_box(8);
    const GridVectorField zero(dom);
    const GridField positive = sample([](const Point& p) { return 0.1 + p[0]; }, dom);
    CHECK(check_divergence_condition(zero, positive) >= 0.0);

    double prev = 0.0;
    for (int cells : {8, 16, 32}) {
        const auto d = unit_box(cells);
        const auto b = sample([](const Point& p) { return Vec3{std::sin(kPi * p[0]), p[0] * p[1], std::cos(p[2])}; }, d);
        const auto divb = sample([](const Point& p) { return kPi * std::cos(kPi * p[0]) + p[0] - std::sin(p[2]); }, d);
        const double m = check_divergence_condition(b, divb);
        const double h = d->h();
        CHECK(std::abs(m) <= h * h * (b.max_abs() + divb.max_abs()));
        if (prev != 0.0) {
            CHECK(std::abs(prev / m) > 3.0);
        }
        prev = m;
    }

    // the reversed logarithmic drift with its own divergence, away from the pole;
    // the coefficients vary on the scale of the inner radius
    const double inner = 0.05;
    prev = 0.0;
    for (int cells : {32, 64}) {
        const auto ann = std::make_shared<const Domain>(Domain::annulus({0, 0, 0}, inner, 0.3, 1.0 / cells));
        const auto fwd = presets::log_drift(1.0, {0, 0, 0});
        const auto div = presets::log_drift_divergence(1.0, {0, 0, 0});
        const auto ct = sample([&](const Point& p) { const Vec3 v = fwd(p); return Vec3{-v[0], -v[1], -v[2]}; }, ann);
        const auto dt = sample([&](const Point& p) { return -div(p); }, ann);
        const double h = ann->h();
        const double m = check_divergence_condition(ct, dt);
        CHECK(m >= -(h / inner) * (h / inner) * (ct.max_abs() + dt.max_abs()));
        if (prev != 0.0) {
            CHECK(std::abs(prev / m) > 4.0);
        }
        prev = m;
    }
}

TEST_CASE("discrete maximum principle on random operators")
{
    const auto dom = unit_box(12);
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const OperatorData op = presets::random_operator(dom, seed);
        REQUIRE(check_divergence_condition(op.b, op.d) >= 0.0);
        gen::Rng rng(seed);
        const double a = rng.uniform(-1, 1);
        const double b = rng.uniform(-1, 1);
        RightSide rhs;
        rhs.boundary = sample([&](const Point& p) { return a * std::sin(3 * p[0] + b) + p[1] * p[2] - 0.3; }, dom);
        const SolveReport rep = solve_dirichlet(op, rhs, 1e-12);
        double bmax = 0.0;
        double imax = -1e300;
        for (std::size_t i = 0; i < dom->node_count(); ++i) {
            if (dom->is_interior(i)) {
                imax = std::max(imax, rep.solution[i]);
            } else {
                bmax = std::max(bmax, (*rhs.boundary)[i]);
            }
        }
        CHECK(imax <= bmax + 1e-9 * rhs.boundary->max_abs());
    }
}

TEST_CASE("Caccioppoli ratio")
{
    std::vector<double> harmonic;
    for (int cells : {8, 16, 24}) {
        const auto dom = unit_box(cells);
        const auto u = sample([](const Point& p) { return 1.0 + p[0]; }, dom);
        const auto rep = caccioppoli_ratio(u, bump(dom, {0.5, 0.5, 0.5}, 0.4), nullptr, nullptr);
        CHECK_FALSE(rep.degenerate);
        CHECK(std::isfinite(rep.ratio));
        harmonic.push_back(rep.ratio);
    }
    CHECK(harmonic.back() == doctest::Approx(harmonic[1]).epsilon(0.1));

    const auto dom = unit_box(8);
    const auto zero = caccioppoli_ratio(GridField(dom), bump(dom, {0.5, 0.5, 0.5}, 0.4), nullptr, nullptr);
    CHECK(zero.degenerate);
    CHECK(std::isnan(zero.ratio));

    std::vector<double> manufactured;
    for (int cells : {8, 16, 24}) {
        const auto d = unit_box(cells);
        RightSide rhs;
        rhs.g = sample([](const Point& p) { return 3 * kPi * kPi * presets::product_sine()(p); }, d);
        rhs.f = sample([](const Point& p) { return Vec3{0.3 * p[1], 0.0, 0.1}; }, d);
        const SolveReport sol = solve_dirichlet(presets::laplacian(d), rhs, 1e-12);
        const auto rep = caccioppoli_ratio(sol.solution, bump(d, {0.5, 0.5, 0.5}, 0.45), &*rhs.f, &*rhs.g);
        manufactured.push_back(rep.ratio);
    }
    CHECK(manufactured[2] == doctest::Approx(manufactured[1]).epsilon(0.2));
    CHECK(manufactured[1] == doctest::Approx(manufactured[0]).epsilon(0.2));
}

TEST_CASE("Sobolev-Lorentz ratio")
{
    const auto dom = unit_box(8);
    const auto tent = sample(
        [](const Point& p) { return (1 - std::abs(2 * p[0] - 1)) * (1 - std::abs(2 * p[1] - 1)) * (1 - std::abs(2 * p[2] - 1)); },
        dom);
    const auto t = sobolev_lorentz_ratio(tent);
    CHECK(std::isfinite(t.ratio));
    GridField twice = tent;
    for (double& v : twice.values()) {
        v *= 2.0;
    }
    CHECK(sobolev_lorentz_ratio(twice).ratio == doctest::Approx(t.ratio).epsilon(1e-12));
    CHECK(sobolev_lorentz_ratio(GridField(dom)).degenerate);

    // 100 random smooth zero-boundary fields
    std::array<double, 2> worst{0.0, 0.0};
    const int grids[] = {12, 24};
    for (int g = 0; g < 2; ++g) {
        gen::Rng rng(1234);
        const auto d = unit_box(grids[g]);
        for (int trial = 0; trial < 100; ++trial) {
            std::array<double, 8> coef{};
            std::array<std::array<int, 3>, 8> modes{};
            for (int m = 0; m < 8; ++m) {
                coef[m] = rng.uniform(-1.0, 1.0);
                modes[m] = {rng.integer(1, 3), rng.integer(1, 3), rng.integer(1, 3)};
            }
            const auto u = sample(
                [&](const Point& p) {
                    double s = 0.0;
                    for (int m = 0; m < 8; ++m) {
                        s += coef[m] * std::sin(modes[m][0] * kPi * p[0]) * std::sin(modes[m][1] * kPi * p[1]) *
                             std::sin(modes[m][2] * kPi * p[2]);
                    }
                    return s;
                },
                d);
            worst[g] = std::max(worst[g], sobolev_lorentz_ratio(u).ratio);
        }
    }
    CHECK(worst[1] == doctest::Approx(worst[0]).epsilon(0.1));
}

TEST_CASE("rescaled operators")
{
    const auto dom = unit_box(8);
    const OperatorData op = presets::smooth_drift(dom, 1.0, 2.0, 0.5);
    const OperatorData big = rescale(op, 2.0);
    CHECK(big.domain->h() == doctest::Approx(0.25));
    CHECK(big.b[10][0] == doctest::Approx(op.b[10][0] / 2.0));
    CHECK(big.d[10] == doctest::Approx(op.d[10] / 4.0));
    CHECK(big.peclet() == doctest::Approx(op.peclet()));
}
