#pragma once

// Hot loops in two builds: a serial reference and an OpenMP version. Both
// produce bitwise-identical results; the tests and the benchmark compare them.

#include "glab/mesh.hpp"
#include "glab/sparse.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace glab::kernels {

enum class Backend { serial, openmp };

/// openmp when compiled with OpenMP, serial otherwise.
[[nodiscard]] Backend default_backend();
void set_default_backend(Backend b);
[[nodiscard]] bool openmp_available();
void set_thread_count(int threads);
[[nodiscard]] int thread_count();

/// Block length of every reduction; independent of the thread count.
inline constexpr std::size_t kReductionBlock = 2048;

struct Stencil {
    std::vector<std::array<int, 3>> offsets;
    std::vector<double> weights;
};

/// out[i] = sum_s w_s in[i + o_s] (terms with inside == 0 skipped) where keep[i],
/// else 0.
void convolve(Backend be, const Domain& dom, const Stencil& st, std::span<const std::uint8_t> inside,
              std::span<const std::uint8_t> keep, std::span<const double> in, std::span<double> out);

void matvec(Backend be, const CsrMatrix& a, std::span<const double> x, std::span<double> y);
[[nodiscard]] double dot(Backend be, std::span<const double> x, std::span<const double> y);
/// y = alpha x + beta y
void axpby(Backend be, double alpha, std::span<const double> x, double beta, std::span<double> y);

using Matrix3 = std::array<double, 9>;  // row-major

/// Nodal coefficients and data of B[u, phi] = int A grad u . grad phi
/// + (b . grad phi) u + (c . grad u) phi + d u phi and of int f . grad phi + g phi.
/// Empty spans mean "zero".
struct AssemblyInput {
    const Domain* domain = nullptr;
    std::span<const Matrix3> A;
    std::span<const Vec3> b;
    std::span<const Vec3> c;
    std::span<const double> d;
    std::span<const Vec3> f;
    std::span<const double> g;
    /// Added to the right side at each node (e.g. a ball load).
    std::span<const double> extra_load;
    /// Values on non-interior nodes, moved to the right side.
    std::span<const double> boundary;
};

/// Fills the values of `matrix` (pattern from lattice_pattern) and the right side
/// (one entry per interior node). The serial version scatters cell by cell; the
/// OpenMP version computes cells in parallel and gathers row by row in cell order.
void assemble(Backend be, const AssemblyInput& in, CsrMatrix& matrix, std::vector<double>& rhs);

}  // namespace glab::kernels
