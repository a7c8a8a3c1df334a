#pragma once

// Multilinear finite elements for
//   L u = -div(A grad u + b u) + c . grad u + d u
// with zero or prescribed Dirichlet data, the adjoint operator, and the
// discrete checks built on the bilinear form.

#include "glab/kernels.hpp"
#include "glab/lorentz.hpp"
#include "glab/mesh.hpp"
#include "glab/sparse.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glab {

using kernels::Matrix3;

struct OperatorData {
    DomainPtr domain;
    std::vector<Matrix3> A;  // one per node
    GridVectorField b;
    GridVectorField c;
    GridField d;
    double lambda = 1.0;  // declared ellipticity

    /// A = I, b = c = 0, d = 0.
    static OperatorData laplacian(const DomainPtr& domain);

    /// Throws std::invalid_argument listing every inconsistency.
    void validate() const;
    /// h * max |b - c|; the drift terms are not upwinded, so this must not exceed lambda.
    [[nodiscard]] double peclet() const;
    /// Smallest <A xi, xi>/|xi|^2 over `samples` random (node, xi) pairs.
    [[nodiscard]] double sampled_ellipticity(std::size_t samples = 1000,
                                             std::uint64_t seed = 1) const;
    [[nodiscard]] double max_A() const;
    [[nodiscard]] bool has_drift() const;
};

/// (A^T, b and c swapped, d).
[[nodiscard]] OperatorData adjoint(const OperatorData& op);

/// Coefficients of x -> op(x/s) for the domain scaled by s: b, c scale by
/// 1/s and d by 1/s^2.
[[nodiscard]] OperatorData rescale(const OperatorData& op, double s);

/// Right side int f . grad phi + g phi + <extra_load, phi>, Dirichlet data on
/// the non-interior nodes. Missing pieces are zero.
struct RightSide {
    std::optional<GridVectorField> f;
    std::optional<GridField> g;
    std::vector<double> extra_load;
    std::optional<GridField> boundary;
};

struct LinearSystem {
    DomainPtr domain;
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<std::uint8_t> boundary_mask;  // per node, 1 when not an unknown
};

[[nodiscard]] LinearSystem assemble(const OperatorData& op, const RightSide& rhs,
                                    kernels::Backend be = kernels::default_backend());

struct SolveReport {
    GridField solution;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool stagnated = false;
    std::string preconditioner;
    std::string note;
};

/// Krylov solve of the assembled system to relative residual tol in (1e-14, 1e-4).
[[nodiscard]] SolveReport solve_dirichlet(const OperatorData& op, const RightSide& rhs,
                                          double tol = 1e-10);

/// An assembled matrix with its preconditioner, reused across right sides.
class DirichletSolver {
public:
    DirichletSolver(const OperatorData& op, double tol);
    DirichletSolver(const DirichletSolver&) = delete;
    DirichletSolver& operator=(const DirichletSolver&) = delete;
    [[nodiscard]] SolveReport solve(const RightSide& rhs) const;
    /// Zero Dirichlet data, right side given per node.
    [[nodiscard]] SolveReport solve_load(std::span<const double> nodal_load) const;
    [[nodiscard]] const CsrMatrix& matrix() const { return system_.matrix; }
    [[nodiscard]] const OperatorData& op() const { return op_; }

private:
    SolveReport finish(const std::vector<double>& rhs, const std::vector<double>* boundary) const;
    OperatorData op_;
    LinearSystem system_;
    Ilu0 ilu_;
    SolverOptions opts_;
};

/// min over interior hats phi_i of (int b . grad phi_i + d phi_i) / int phi_i.
[[nodiscard]] double check_divergence_condition(const GridVectorField& b, const GridField& d);

/// max over interior hats of (B[u, phi_i] - F(phi_i)) / int phi_i, i.e. how far
/// u is from being a subsolution (<= 0 means subsolution).
[[nodiscard]] double subsolution_residual(const OperatorData& op, const GridField& u,
                                          const RightSide& rhs);

/// Nodal samples |f| with the domain's node weights (zero-weight nodes dropped).
[[nodiscard]] WeightedSamples nodal_samples(const GridField& f);
/// As above with per-node weights supplied.
[[nodiscard]] WeightedSamples nodal_samples(const GridField& f, std::span<const double> weights);

/// |grad u| at cell centers, one sample of measure h^3 per lattice cell.
[[nodiscard]] WeightedSamples gradient_samples(const GridField& u);

/// int w |grad u|^2 with 2x2x2 Gauss points; `weight` (optional) is interpolated.
[[nodiscard]] double dirichlet_energy(const GridField& u, const GridField* weight = nullptr);

struct CaccioppoliReport {
    double lhs = 0.0;               // int |phi grad u|^2
    double g_term = 0.0;            // ||g phi||_{2_*}^2
    double f_term = 0.0;            // ||f phi||_2^2
    double u_term = 0.0;            // ||u phi||_{2^*,2}^2
    double cutoff_term = 0.0;       // ||u grad phi||_2^2
    double ratio = 0.0;
    bool degenerate = false;        // all right-hand terms vanish
};

[[nodiscard]] CaccioppoliReport caccioppoli_ratio(const GridField& u, const GridField& phi,
                                                  const GridVectorField* f, const GridField* g);

struct SobolevReport {
    double lorentz = 0.0;   // ||u||_{2^*,2}
    double gradient = 0.0;  // ||grad u||_2
    double ratio = 0.0;
    bool degenerate = false;
};

[[nodiscard]] SobolevReport sobolev_lorentz_ratio(const GridField& u);

}  // namespace glab
