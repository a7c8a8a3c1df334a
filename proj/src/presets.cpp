#include "glab/presets.hpp"

#include "glab/radial.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace glab::presets {

namespace {

constexpr double kPi = std::numbers::pi;

struct Wave {
    Vec3 k{};
    double phase = 0.0;
    double amplitude = 0.0;
};

}  // namespace

OperatorData laplacian(const DomainPtr& dom)
{
    return OperatorData::laplacian(dom);
}

OperatorData smooth_drift(const DomainPtr& dom, double beta, double gamma, double d0)
{
    OperatorData op = OperatorData::laplacian(dom);
    op.b = sample(
        [beta](const Point& x) {
            return Vec3{beta * std::sin(kPi * x[1]), beta * std::sin(kPi * x[2]),
                        beta * std::sin(kPi * x[0])};
        },
        dom);
    op.c = sample(
        [gamma](const Point& x) {
            return Vec3{gamma * std::cos(kPi * x[2]), gamma * std::cos(kPi * x[0]),
                        gamma * std::cos(kPi * x[1])};
        },
        dom);
    op.d = GridField(dom, d0);
    return op;
}

ScalarClosure product_sine()
{
    return [](const Point& x) {
        return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
    };
}

ScalarClosure smooth_drift_manufactured_rhs(double beta, double gamma, double d0)
{
    // L u = -lap u + (c - b) . grad u + d u, since div b = 0
    return [=](const Point& x) {
        const double s0 = std::sin(kPi * x[0]), s1 = std::sin(kPi * x[1]), s2 = std::sin(kPi * x[2]);
        const double c0 = std::cos(kPi * x[0]), c1 = std::cos(kPi * x[1]), c2 = std::cos(kPi * x[2]);
        const double u = s0 * s1 * s2;
        const Vec3 grad{kPi * c0 * s1 * s2, kPi * s0 * c1 * s2, kPi * s0 * s1 * c2};
        const Vec3 b{beta * s1, beta * s2, beta * s0};
        const Vec3 c{gamma * c2, gamma * c0, gamma * c1};
        double drift = 0.0;
        for (int i = 0; i < 3; ++i) {
            drift += (c[i] - b[i]) * grad[i];
        }
        return 3.0 * kPi * kPi * u + drift + d0 * u;
    };
}

VectorClosure log_drift(double delta, const Point& center)
{
    return [delta, center](const Point& x) {
        const Vec3 dx{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
        const double r = norm(dx);
        if (!(r > 0.0) || r >= radial::kOuterRadius) {
            return Vec3{0.0, 0.0, 0.0};
        }
        const double s = delta / (r * r * (-std::log(r)));
        return Vec3{s * dx[0], s * dx[1], s * dx[2]};
    };
}

ScalarClosure log_drift_divergence(double delta, const Point& center)
{
    return [delta, center](const Point& x) {
        const double r = distance(x, center);
        if (!(r > 0.0) || r >= radial::kOuterRadius) {
            return 0.0;
        }
        const double l = std::log(r);
        return delta * (1.0 - (kDim - 2) * l) / (r * r * l * l);
    };
}

OperatorData counterexample(const DomainPtr& dom, double delta, double j, const Point& center)
{
    OperatorData op = OperatorData::laplacian(dom);
    SampleOptions opts;
    opts.singularities.push_back(center);
    const GridVectorField raw = sample(log_drift(delta, center), dom, opts);
    op.b = mollify(raw, j);
    return op;
}

OperatorData random_operator(const DomainPtr& dom, std::uint64_t seed, double drift)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wave(-3.0, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> offset(0.1, 0.5);
    const auto make = [&](double scale) {
        Wave w;
        w.k = {wave(rng), wave(rng), wave(rng)};
        w.phase = phase(rng);
        w.amplitude = scale * amp(rng);
        return w;
    };
    const Wave a = make(0.5);
    std::array<Wave, 3> bw{make(drift), make(drift), make(drift)};
    std::array<Wave, 3> cw{make(drift), make(drift), make(drift)};
    const double d0 = offset(rng);
    const auto arg = [](const Wave& w, const Point& x) {
        return w.k[0] * x[0] + w.k[1] * x[1] + w.k[2] * x[2] + w.phase;
    };

    OperatorData op = OperatorData::laplacian(dom);
    for (std::size_t i = 0; i < op.A.size(); ++i) {
        const double s = 1.0 + a.amplitude * std::sin(arg(a, dom->node(i)));
        op.A[i] = {s, 0, 0, 0, s, 0, 0, 0, s};
    }
    op.lambda = 0.5;
    op.b = sample(
        [&](const Point& x) {
            return Vec3{bw[0].amplitude * std::sin(arg(bw[0], x)),
                        bw[1].amplitude * std::sin(arg(bw[1], x)),
                        bw[2].amplitude * std::sin(arg(bw[2], x))};
        },
        dom);
    op.c = sample(
        [&](const Point& x) {
            return Vec3{cw[0].amplitude * std::sin(arg(cw[0], x)),
                        cw[1].amplitude * std::sin(arg(cw[1], x)),
                        cw[2].amplitude * std::sin(arg(cw[2], x))};
        },
        dom);
    op.d = sample(
        [&](const Point& x) {
            double div = 0.0;
            for (int i = 0; i < 3; ++i) {
                div += bw[i].amplitude * bw[i].k[i] * std::cos(arg(bw[i], x));
            }
            return div + d0;
        },
        dom);
    return op;
}

}  // namespace glab::presets
