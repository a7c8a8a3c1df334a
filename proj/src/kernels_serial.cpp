#include "element.hpp"
#include "kernels_impl.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef GLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace glab::kernels {

namespace {

#ifdef GLAB_HAVE_OPENMP
Backend g_backend = Backend::openmp;
#else
Backend g_backend = Backend::serial;
#endif

}  // namespace

Backend default_backend()
{
    return g_backend;
}

void set_default_backend(Backend b)
{
    if (b == Backend::openmp && !openmp_available()) {
        throw std::invalid_argument("OpenMP backend not compiled in");
    }
    g_backend = b;
}

bool openmp_available()
{
#ifdef GLAB_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

void set_thread_count(int threads)
{
    if (threads < 1) {
        throw std::invalid_argument("thread count must be positive");
    }
#ifdef GLAB_HAVE_OPENMP
    omp_set_num_threads(threads);
#endif
}

int thread_count()
{
#ifdef GLAB_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void convolve(Backend be, const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out)
{
    if (in.size() != dom.node_count() || out.size() != dom.node_count()) {
        throw std::invalid_argument("convolve: field size mismatch");
    }
    if (be == Backend::openmp && openmp_available()) {
        omp::convolve(dom, st, inside, keep, in, out);
    } else {
        serial::convolve(dom, st, inside, keep, in, out);
    }
}

void matvec(Backend be, const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    if (be == Backend::openmp && openmp_available()) {
        omp::matvec(a, x, y);
    } else {
        serial::matvec(a, x, y);
    }
}

double dot(Backend be, std::span<const double> x, std::span<const double> y)
{
    if (be == Backend::openmp && openmp_available()) {
        return omp::dot(x, y);
    }
    return serial::dot(x, y);
}

void axpby(Backend be, double alpha, std::span<const double> x, double beta, std::span<double> y)
{
    if (be == Backend::openmp && openmp_available()) {
        omp::axpby(alpha, x, beta, y);
    } else {
        serial::axpby(alpha, x, beta, y);
    }
}

void assemble(Backend be, const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs)
{
    detail::check_input(in, matrix);
    if (be == Backend::openmp && openmp_available()) {
        omp::assemble(in, matrix, rhs);
    } else {
        serial::assemble(in, matrix, rhs);
    }
}

namespace serial {

void convolve(const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out)
{
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = keep[i] ? convolve_node(dom, st, inside, in, i) : 0.0;
    }
}

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t r = 0; r < a.rows; ++r) {
        y[r] = matvec_row(a, x, r);
    }
}

double dot(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t lo = 0; lo < n; lo += kReductionBlock) {
        s += block_dot(x.data() + lo, y.data() + lo, std::min(kReductionBlock, n - lo));
    }
    return s;
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = alpha * x[i] + beta * y[i];
    }
}

void assemble(const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs)
{
    const Domain& dom = *in.domain;
    const auto dof = dom.dof_of_node();
    const detail::GaussTable gt(dom.h());
    std::fill(matrix.values.begin(), matrix.values.end(), 0.0);
    rhs.assign(dom.interior_count(), 0.0);
    detail::ElementData el;
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        detail::compute_element(in, gt, cell, el);
        if (!el.active) {
            continue;
        }
        for (int v = 0; v < 8; ++v) {
            const std::int64_t row = dof[dom.cell_node(cell, v)];
            if (row < 0) {
                continue;
            }
            const auto r = static_cast<std::size_t>(row);
            for (int u = 0; u < 8; ++u) {
                const std::int64_t col = dof[dom.cell_node(cell, u)];
                if (col >= 0) {
                    matrix.values[matrix.find(r, static_cast<std::size_t>(col))] += el.K[v][u];
                }
            }
            rhs[r] += el.r[v];
        }
    }
    if (!in.extra_load.empty()) {
        for (std::size_t r = 0; r < rhs.size(); ++r) {
            rhs[r] += in.extra_load[dom.node_of_dof()[r]];
        }
    }
}

}  // namespace serial

}  // namespace glab::kernels
