#include "element.hpp"
#include "kernels_impl.hpp"

#include <algorithm>
#include <vector>

namespace glab::kernels::omp {

void convolve(const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out)
{
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = keep[u] ? convolve_node(dom, st, inside, in, u) : 0.0;
    }
}

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        y[static_cast<std::size_t>(r)] = matvec_row(a, x, static_cast<std::size_t>(r));
    }
}

double dot(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(blocks, 0.0);
    const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        partial[static_cast<std::size_t>(b)] =
            block_dot(x.data() + lo, y.data() + lo, std::min(kReductionBlock, n - lo));
    }
    double s = 0.0;
    for (double p : partial) {
        s += p;
    }
    return s;
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y)
{
    const auto n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        y[u] = alpha * x[u] + beta * y[u];
    }
}

void assemble(const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs)
{
    const Domain& dom = *in.domain;
    const detail::GaussTable gt(dom.h());
    const auto cells = static_cast<std::int64_t>(dom.cell_count());
    std::vector<detail::ElementData> elements(dom.cell_count());
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < cells; ++c) {
        detail::compute_element(in, gt, static_cast<std::size_t>(c),
                                elements[static_cast<std::size_t>(c)]);
    }

    const auto dof = dom.dof_of_node();
    const auto node_of_dof = dom.node_of_dof();
    rhs.assign(dom.interior_count(), 0.0);
    const auto rows = static_cast<std::int64_t>(dom.interior_count());
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const auto r = static_cast<std::size_t>(row);
        for (std::size_t k = matrix.row_ptr[r]; k < matrix.row_ptr[r + 1]; ++k) {
            matrix.values[k] = 0.0;
        }
        const auto ijk = dom.node_ijk(node_of_dof[r]);
        double acc = 0.0;
        // the node's cells in increasing cell index, as the serial scatter visits them
        for (int dk = 1; dk >= 0; --dk) {
            for (int dj = 1; dj >= 0; --dj) {
                for (int di = 1; di >= 0; --di) {
                    const std::size_t cell = dom.cell_index(ijk[0] - di, ijk[1] - dj, ijk[2] - dk);
                    const auto& el = elements[cell];
                    const int v = di | (dj << 1) | (dk << 2);
                    for (int u = 0; u < 8; ++u) {
                        const std::int64_t col = dof[dom.cell_node(cell, u)];
                        if (col >= 0) {
                            matrix.values[matrix.find(r, static_cast<std::size_t>(col))] +=
                                el.K[v][u];
                        }
                    }
                    acc += el.r[v];
                }
            }
        }
        rhs[r] = acc;
    }
    if (!in.extra_load.empty()) {
        for (std::size_t r = 0; r < rhs.size(); ++r) {
            rhs[r] += in.extra_load[node_of_dof[r]];
        }
    }
}

}  // namespace glab::kernels::omp
