#pragma once

// Compressed sparse rows, zero-fill incomplete LU and preconditioned BiCGStab.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace glab {

class Domain;

struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    [[nodiscard]] std::size_t nnz() const { return values.size(); }
    /// Position of (r, c) in values, or npos when outside the pattern.
    [[nodiscard]] std::size_t find(std::size_t r, std::size_t c) const;
    [[nodiscard]] double at(std::size_t r, std::size_t c) const;
    [[nodiscard]] CsrMatrix transpose() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Pattern of the 27-point coupling between interior nodes, values zeroed.
/// Columns within a row are sorted.
[[nodiscard]] CsrMatrix lattice_pattern(const Domain& domain);

/// Largest |a_ij - b_ij| over the union of both patterns.
[[nodiscard]] double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b);

enum class Preconditioner { ilu0, jacobi, none };

struct SolverOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 5000;
    Preconditioner preconditioner = Preconditioner::ilu0;
};

struct SolverStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    bool stagnated = false;
    std::string preconditioner;
    std::string note;
};

/// Zero-fill incomplete LU on the pattern of a; falls back to Jacobi when a
/// pivot vanishes.
class Ilu0 {
public:
    explicit Ilu0(const CsrMatrix& a);
    [[nodiscard]] bool ok() const { return ok_; }
    void apply(std::span<const double> r, std::span<double> z) const;

private:
    const CsrMatrix* a_;
    std::vector<double> lu_;
    std::vector<std::size_t> diag_;
    bool ok_ = true;
};

/// Right-preconditioned BiCGStab. x holds the initial guess on entry.
/// Reductions use a fixed blocking, so results do not depend on the thread count.
/// A prebuilt factorization of `a` may be passed to skip the setup.
SolverStats bicgstab(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                     const SolverOptions& opts, const Ilu0* prebuilt = nullptr);

}  // namespace glab
