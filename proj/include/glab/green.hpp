#pragma once

// Approximate Green's functions: solutions of L G = h_m (forward) or
// L^t g = h_m (adjoint) with h_m the normalized indicator of B_{1/m}(pole),
// and the bounds measured on them.

#include "glab/elliptic.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace glab {

enum class Side { forward, adjoint };

[[nodiscard]] const char* to_string(Side s);

struct GreenColumn {
    Point pole{};
    int m = 0;
    double radius = 0.0;  // 1/m
    Side side = Side::forward;
    GridField field;
    SolveReport report;
};

/// Factorizes the forward or adjoint system once and solves for many poles.
class GreenSolver {
public:
    GreenSolver(const OperatorData& op, Side side, double tol = 1e-10);

    /// Rejects poles with B_{2/m}(pole) leaving the domain and 1/m < 2h.
    [[nodiscard]] GreenColumn column(const Point& pole, int m) const;
    /// Columns for several poles, computed in parallel; order follows `poles`.
    [[nodiscard]] std::vector<GreenColumn> columns(const std::vector<Point>& poles, int m) const;
    [[nodiscard]] Side side() const { return side_; }
    [[nodiscard]] const OperatorData& op() const { return solver_->op(); }
    [[nodiscard]] double tol() const { return tol_; }

private:
    Side side_;
    double tol_;
    std::unique_ptr<DirichletSolver> solver_;
};

[[nodiscard]] GreenColumn approximate_green(const OperatorData& op, const Point& pole, int m,
                                            Side side = Side::forward, double tol = 1e-10);

struct WeakNorms {
    double weak = 0.0;       // ||G||_{n/(n-2), inf}
    double grad_weak = 0.0;  // ||grad G||_{n/(n-1), inf}
};

[[nodiscard]] WeakNorms weak_norm_report(const GreenColumn& col);

struct Annulus {
    double inner = 0.0;
    double outer = 0.0;
};

/// max of |G(x)| |x - pole|^{n-2} over nodes with |x - pole| in (inner, outer];
/// default (2/m, diam/2). Throws when no node lies in the annulus.
[[nodiscard]] double pointwise_constant(const GreenColumn& col,
                                        std::optional<Annulus> annulus = std::nullopt);

struct SymmetryReport {
    double forward_average = 0.0;  // average of G_y^m over B_{1/k}(x)
    double adjoint_average = 0.0;  // average of g_x^k over B_{1/m}(y)
    double defect = 0.0;
    double scale = 0.0;            // largest |value| of either field
};

/// |avg_{B_{1/m}(y)} g_x^k - avg_{B_{1/k}(x)} G_y^m|. The balls must be disjoint.
[[nodiscard]] SymmetryReport symmetry_defect(const OperatorData& op, const Point& x,
                                             const Point& y, int m, int k, double tol = 1e-10);

/// r^{n-2} int_{Omega \ B_r(pole)} |grad G|^2; zero when the annulus is empty.
[[nodiscard]] double annulus_energy(const GreenColumn& col, double r);

struct Representation {
    std::vector<Point> poles;
    std::vector<double> represented;  // int G(x, y_j) f(x) dx
    std::vector<double> direct;       // ball average of the adjoint solution near y_j
    std::vector<double> direct_nodal; // adjoint solution at the node nearest y_j
    double relative_l2_mismatch = 0.0;  // represented vs direct_nodal
    GridField field;                  // represented values at the pole nodes, zero elsewhere
};

/// Evaluates y -> int G(x, y) f(x) dx from forward columns and compares with a
/// direct solve of L^t u = f. All columns must share one operator and m.
[[nodiscard]] Representation represent_solution(const GreenSolver& forward,
                                                const std::vector<GreenColumn>& columns,
                                                const GridField& f);

struct TalentiReport {
    double min_slack = 0.0;
    std::vector<double> t;
    std::vector<double> slack;
    bool plateau = false;  // untestable: a flat level carries too much measure
    double plateau_fraction = 0.0;
};

/// C_n mu(t)^{2/n-2} (-mu'(t)) (-d/dt int_{|u|>t} |grad u|^2) on a 64-point
/// logarithmic t-grid inside (0, max|u|), with C_n = 1/(n^2 omega_n^{2/n}).
[[nodiscard]] TalentiReport talenti_check(const GridField& u, std::size_t points = 64);

struct BoundReport {
    double weak_state = 0.0;
    double grad_weak = 0.0;
    double pointwise_const = 0.0;
    std::vector<double> annulus_radii;
    std::vector<double> annulus_consts;
    double symmetry_defect = 0.0;
};

}  // namespace glab
