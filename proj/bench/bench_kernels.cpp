// Serial vs OpenMP timings of the hot kernels, with a bitwise comparison of
// their outputs. Usage: bench_kernels [cells_per_axis] [repeats]

#include "glab/elliptic.hpp"
#include "glab/kernels.hpp"
#include "glab/presets.hpp"
#include "glab/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace glab;
using kernels::Backend;

namespace {

template <class F>
double best_of(int repeats, F&& f)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void row(const char* name, double ts, double tp, bool equal)
{
    std::printf("%-10s %12.6f %12.6f %8.2fx  %s\n", name, ts, tp, ts / tp,
                equal ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv)
{
    const int n = argc > 1 ? std::atoi(argv[1]) : 48;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    if (n < 4 || repeats < 1) {
        std::fprintf(stderr, "usage: bench_kernels [cells_per_axis >= 4] [repeats >= 1]\n");
        return 1;
    }
    apply_thread_setting(0);

    const auto dom = std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, 1.0 / n));
    const OperatorData op = presets::random_operator(dom, 3);
    RightSide rhs;
    rhs.g = sample([](const Point& p) { return 1.0 + p[0] * p[1]; }, dom);

    std::printf("lattice %d^3, %zu unknowns, OpenMP %s, %d threads, best of %d\n", n,
                dom->interior_count(), kernels::openmp_available() ? "on" : "off",
                kernels::thread_count(), repeats);
    std::printf("%-10s %12s %12s %9s\n", "kernel", "serial [s]", "openmp [s]", "speedup");

    bool all_equal = true;

    LinearSystem ss;
    LinearSystem sp;
    const double ta = best_of(repeats, [&] { ss = assemble(op, rhs, Backend::serial); });
    const double tb = best_of(repeats, [&] { sp = assemble(op, rhs, Backend::openmp); });
    bool eq = same_bits(ss.matrix.values, sp.matrix.values) && same_bits(ss.rhs, sp.rhs);
    all_equal = all_equal && eq;
    row("assemble", ta, tb, eq);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> x(ss.matrix.cols);
    std::vector<double> y(x.size());
    for (double& v : x) {
        v = uni(rng);
    }
    for (double& v : y) {
        v = uni(rng);
    }

    std::vector<double> ys(x.size());
    std::vector<double> yp(x.size());
    const double tm = best_of(repeats * 4, [&] { kernels::matvec(Backend::serial, ss.matrix, x, ys); });
    const double tn = best_of(repeats * 4, [&] { kernels::matvec(Backend::openmp, ss.matrix, x, yp); });
    eq = same_bits(ys, yp);
    all_equal = all_equal && eq;
    row("matvec", tm, tn, eq);

    double ds = 0.0;
    double dp = 0.0;
    const double td = best_of(repeats * 4, [&] { ds = kernels::dot(Backend::serial, x, y); });
    const double te = best_of(repeats * 4, [&] { dp = kernels::dot(Backend::openmp, x, y); });
    eq = std::memcmp(&ds, &dp, sizeof(double)) == 0;
    all_equal = all_equal && eq;
    row("dot", td, te, eq);

    kernels::Stencil st;
    for (int k = -1; k <= 1; ++k) {
        for (int j = -1; j <= 1; ++j) {
            for (int i = -1; i <= 1; ++i) {
                st.offsets.push_back({i, j, k});
                st.weights.push_back(1.0 / (1.0 + std::abs(i) + std::abs(j) + std::abs(k)));
            }
        }
    }
    std::vector<std::uint8_t> inside(dom->node_count(), 1);
    std::vector<std::uint8_t> keep(dom->node_count());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        keep[i] = dom->is_interior(i) ? 1 : 0;
    }
    std::vector<double> field(dom->node_count());
    for (double& v : field) {
        v = uni(rng);
    }
    std::vector<double> cs(field.size());
    std::vector<double> cp(field.size());
    const double tc = best_of(repeats, [&] {
        kernels::convolve(Backend::serial, *dom, st, inside, keep, field, cs);
    });
    const double tq = best_of(repeats, [&] {
        kernels::convolve(Backend::openmp, *dom, st, inside, keep, field, cp);
    });
    eq = same_bits(cs, cp);
    all_equal = all_equal && eq;
    row("convolve", tc, tq, eq);

    return all_equal ? 0 : 2;
}
