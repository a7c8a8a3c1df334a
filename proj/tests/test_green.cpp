#include "glab/green.hpp"
#include "glab/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>

using namespace glab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFundamental = 1.0 / (4.0 * kPi);

DomainPtr centered_box(double half, int cells_per_unit)
{
    return std::make_shared<const Domain>(Domain::box({-half, -half, -half}, {half, half, half}, 1.0 / cells_per_unit));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// One Laplacian column on [-1.5, 1.5]^3, h = 1/24, m = 8, shared by several cases.
const GreenColumn& laplacian_column()
{
    static const GreenColumn col = approximate_green(presets::laplacian(centered_box(1.5, 24)), {0, 0, 0}, 8);
    return col;
}

double min_value(const GridField& f)
{
    double m = 1e300;
    for (double v : f.values()) {
        m = std::min(m, v);
    }
    return m;
}

}  // namespace

TEST_CASE("Laplacian column against the fundamental solution")
{
    const GreenColumn& col = laplacian_column();
    const Domain& dom = col.field.domain();
    CHECK_FALSE(col.report.stagnated);
    const double h = dom.h();
    // G = 1/(4 pi r) - H with H harmonic; cubic symmetry makes H(x) - H(0) = O(r^4)
    std::vector<std::size_t> band;
    double shift = 0.0;
    for (std::size_t i = 0; i < dom.node_count(); ++i) {
        const double r = norm(dom.node(i));
        if (r >= 4 * h && r <= 1.5 / 4) {
            band.push_back(i);
            shift += kFundamental / r - col.field[i];
        }
    }
    REQUIRE_FALSE(band.empty());
    shift /= static_cast<double>(band.size());
    // boundary values of 1/(4 pi r) bound H(0) by the maximum principle
    CHECK(shift >= 0.9 * kFundamental / (1.5 * std::sqrt(3.0)));
    CHECK(shift <= 1.1 * kFundamental / 1.5);
    double worst = 0.0;
    for (std::size_t i : band) {
        const double exact = kFundamental / norm(dom.node(i));
        worst = std::max(worst, std::abs(col.field[i] + shift - exact) / exact);
    }
    CHECK(worst < 0.05);
    CHECK(min_value(col.field) >= -10 * 1e-10 * col.field.max_abs());

    // the ball load integrates to one
    const BallQuadrature ball(dom, Ball{{0, 0, 0}, 1.0 / 8});
    double mass = 0.0;
    for (double v : ball.normalized_load()) {
        mass += v;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("column preconditions")
{
    const auto dom = centered_box(0.5, 16);
    const OperatorData op = presets::laplacian(dom);
    CHECK_THROWS((void)approximate_green(op, {0.4, 0, 0}, 8));  // B_{2/m} leaves the box
    CHECK_THROWS((void)approximate_green(op, {0, 0, 0}, 16));   // 1/m < 2h
}

TEST_CASE("doubling m only changes the field near the pole")
{
    const auto dom = centered_box(1.0, 16);
    const OperatorData op = presets::laplacian(dom);
    const GreenColumn a = approximate_green(op, {0, 0, 0}, 4);
    const GreenColumn b = approximate_green(op, {0, 0, 0}, 8);
    double worst = 0.0;
    for (std::size_t i = 0; i < dom->node_count(); ++i) {
        if (norm(dom->node(i)) > 4.0 / 4 && a.field[i] > 0.0) {
            worst = std::max(worst, rel(b.field[i], a.field[i]));
        }
    }
    CHECK(worst < 0.02);
}

TEST_CASE("weak norms of the Laplacian column")
{
    const double weak_exact = kFundamental * std::cbrt(4 * kPi / 3);
    const double grad_exact = kFundamental * std::pow(4 * kPi / 3, 2.0 / 3.0);
    const auto dom = centered_box(1.5, 16);
    const WeakNorms w = weak_norm_report(approximate_green(presets::laplacian(dom), {0, 0, 0}, 8));
    CHECK(rel(w.weak, weak_exact) < 0.25);
    CHECK(rel(w.grad_weak, grad_exact) < 0.25);

    std::vector<WeakNorms> ladder;
    for (int cells : {16, 24, 32}) {
        const auto d = centered_box(0.75, cells);
        ladder.push_back(weak_norm_report(approximate_green(presets::laplacian(d), {0, 0, 0}, 8)));
    }
    for (const auto& x : ladder) {
        CHECK(rel(x.weak, ladder.front().weak) < 0.2);
        CHECK(rel(x.grad_weak, ladder.front().grad_weak) < 0.2);
    }
    const auto d = centered_box(0.75, 32);
    const WeakNorms m4 = weak_norm_report(approximate_green(presets::laplacian(d), {0, 0, 0}, 4));
    CHECK(rel(m4.weak, ladder.back().weak) < 0.2);
    CHECK(rel(m4.grad_weak, ladder.back().grad_weak) < 0.2);
}

TEST_CASE("forward weak norm grows with the counterexample drift")
{
    const auto dom = centered_box(0.5, 24);
    double previous = 0.0;
    for (double delta : {0.0, 0.5, 1.0}) {
        const WeakNorms w = weak_norm_report(approximate_green(presets::counterexample(dom, delta, 8.0, {0, 0, 0}), {0, 0, 0}, 8));
        CHECK(w.weak > previous);
        previous = w.weak;
    }
}

TEST_CASE("pointwise constants")
{
    const GreenColumn& col = laplacian_column();
    CHECK(rel(pointwise_constant(col, Annulus{4 * col.field.domain().h(), 0.25}), kFundamental) < 0.15);
    CHECK_THROWS((void)pointwise_constant(col, Annulus{0.01, 0.02}));

    std::vector<double> smooth;
    for (int cells : {16, 24, 32}) {
        const auto d = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / cells));
        smooth.push_back(pointwise_constant(approximate_green(presets::smooth_drift(d, 1.0, 1.0, 0.0), {0.5, 0.5, 0.5}, 8)));
    }
    for (double c : smooth) {
        CHECK(std::isfinite(c));
        CHECK(rel(c, smooth.back()) < 0.15);
    }
}

TEST_CASE("symmetry defect")
{
    const auto dom = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / 16));
    for (std::uint64_t seed : {3u, 8u}) {
        const OperatorData op = presets::random_operator(dom, seed);
        const SymmetryReport s = symmetry_defect(op, {0.3, 0.5, 0.5}, {0.7, 0.5, 0.5}, 8, 8, 1e-8);
        CHECK(s.defect <= 1e-6 * s.scale);
        const SymmetryReport t = symmetry_defect(adjoint(op), {0.7, 0.5, 0.5}, {0.3, 0.5, 0.5}, 8, 8, 1e-8);
        CHECK(t.defect <= 1e-6 * t.scale);
        CHECK(t.forward_average == doctest::Approx(s.adjoint_average).epsilon(1e-6));
    }
    CHECK_THROWS((void)symmetry_defect(presets::laplacian(dom), {0.45, 0.5, 0.5}, {0.55, 0.5, 0.5}, 8, 8));

    OperatorData self = presets::random_operator(dom, 2);
    self.c = self.b;
    const GreenColumn fwd = approximate_green(self, {0.5, 0.5, 0.5}, 8, Side::forward);
    const GreenColumn adj = approximate_green(self, {0.5, 0.5, 0.5}, 8, Side::adjoint);
    CHECK(std::memcmp(fwd.field.values().data(), adj.field.values().data(), fwd.field.size() * sizeof(double)) == 0);
}

TEST_CASE("annulus energy")
{
    const auto dom = centered_box(1.5, 16);
    const GreenColumn col = approximate_green(presets::laplacian(dom), {0, 0, 0}, 8);
    const double diam = dom->diameter();
    std::vector<double> values;
    for (double f : {0.1, 0.2, 0.3}) {
        const double r = std::max(f * diam / 2, 4.0 / 8);
        values.push_back(annulus_energy(col, r));
    }
    for (double v : values) {
        CHECK(v > 0.25 * kFundamental);
        CHECK(v < 2.0 * kFundamental);
        CHECK(rel(v, values.front()) < 0.25);
    }
    CHECK(annulus_energy(col, 10.0) == 0.0);

    const GreenColumn col16 = approximate_green(presets::laplacian(dom), {0, 0, 0}, 4);
    CHECK(rel(annulus_energy(col16, 1.0), annulus_energy(col, 1.0)) < 0.05);
}

TEST_CASE("representation through forward columns")
{
    const auto dom = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / 24));
    const OperatorData op = presets::laplacian(dom);
    const GreenSolver solver(op, Side::forward);
    std::vector<Point> poles;
    for (double x : {0.375, 0.5, 0.625}) {
        for (double y : {0.375, 0.5, 0.625}) {
            poles.push_back({x, y, 0.5});
        }
    }
    const auto columns = solver.columns(poles, 8);
    const auto f = sample([](const Point& p) { return std::sin(kPi * p[0]) * (1.0 + p[1]); }, dom);
    const Representation rep = represent_solution(solver, columns, f);
    CHECK(rep.relative_l2_mismatch <= 0.05);

    const Representation zero = represent_solution(solver, columns, GridField(dom));
    for (double v : zero.represented) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("Talenti slack")
{
    const auto ball = std::make_shared<const Domain>(Domain::ball({0, 0, 0}, 1.0, 1.0 / 24));
    const auto radial = sample([](const Point& p) { const double r = norm(p); return r < 1 ? (1 - r * r) * (1 - r * r) : 0.0; }, ball);
    const TalentiReport tr = talenti_check(radial);
    CHECK_FALSE(tr.plateau);
    CHECK(tr.min_slack >= 0.7);
    CHECK(tr.min_slack <= 1.3);

    const auto box = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / 24));
    const auto tensor = sample(
        [](const Point& p) { return std::sin(kPi * p[0]) * std::sin(kPi * p[1]) * std::sin(kPi * p[2]); }, box);
    CHECK(talenti_check(tensor).min_slack >= 0.7);

    // flat top over a large set
    const auto flat = sample(
        [](const Point& p) {
            const double r = norm({p[0] - 0.5, p[1] - 0.5, p[2] - 0.5});
            return std::min(1.0, 4.0 * std::max(0.0, 0.5 - r));
        },
        box);
    CHECK(talenti_check(flat).plateau);
}
