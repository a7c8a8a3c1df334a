#pragma once

#include "glab/kernels.hpp"

namespace glab::kernels {

namespace serial {
void convolve(const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out);
void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
void assemble(const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs);
}  // namespace serial

namespace omp {
void convolve(const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out);
void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
void assemble(const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs);
}  // namespace omp

// Sum of one reduction block, shared so both builds add in the same order.
inline double block_dot(const double* x, const double* y, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += x[i] * y[i];
    }
    return s;
}

inline double convolve_node(const Domain& dom, const Stencil& st,
                            std::span<const std::uint8_t> inside, std::span<const double> in,
                            std::size_t node)
{
    const auto c = dom.node_ijk(node);
    const auto& cells = dom.cells();
    double s = 0.0;
    for (std::size_t k = 0; k < st.weights.size(); ++k) {
        const auto& o = st.offsets[k];
        const int i = c[0] + o[0], j = c[1] + o[1], l = c[2] + o[2];
        if (i < 0 || j < 0 || l < 0 || i > cells[0] || j > cells[1] || l > cells[2]) {
            continue;
        }
        const std::size_t nb = dom.node_index(i, j, l);
        if (inside[nb]) {
            s += st.weights[k] * in[nb];
        }
    }
    return s;
}

inline double matvec_row(const CsrMatrix& a, std::span<const double> x, std::size_t r)
{
    double s = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        s += a.values[k] * x[a.col_idx[k]];
    }
    return s;
}

}  // namespace glab::kernels
