#include "glab/green.hpp"

#include "element.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace glab {

const char* to_string(Side s)
{
    return s == Side::forward ? "forward" : "adjoint";
}

GreenSolver::GreenSolver(const OperatorData& op, Side side, double tol)
    : side_(side),
      tol_(tol),
      solver_(std::make_unique<DirichletSolver>(side == Side::forward ? op : adjoint(op), tol))
{
}

GreenColumn GreenSolver::column(const Point& pole, int m) const
{
    const Domain& dom = *solver_->op().domain;
    if (m < 1) {
        throw std::invalid_argument("approximate_green: m must be positive");
    }
    const double radius = 1.0 / m;
    if (radius < 2.0 * dom.h() * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "approximate_green: 1/m = " << radius << " under-resolves h = " << dom.h();
        throw std::invalid_argument(os.str());
    }
    if (dom.signed_distance(pole) < 2.0 * radius * (1.0 - 1e-12)) {
        throw std::invalid_argument("approximate_green: B_{2/m}(pole) leaves the domain");
    }
    const BallQuadrature ball(dom, Ball{pole, radius});
    const std::vector<double> load = ball.normalized_load();
    double mass = 0.0;
    for (double v : load) {
        mass += v;
    }
    if (std::abs(mass - 1.0) > 1e-10) {
        throw std::logic_error("approximate_green: source mass differs from 1");
    }
    GreenColumn col;
    col.pole = pole;
    col.m = m;
    col.radius = radius;
    col.side = side_;
    col.report = solver_->solve_load(load);
    col.field = col.report.solution;
    return col;
}

std::vector<GreenColumn> GreenSolver::columns(const std::vector<Point>& poles, int m) const
{
    std::vector<GreenColumn> out(poles.size());
    std::vector<std::exception_ptr> failures(poles.size());
    const auto count = static_cast<std::int64_t>(poles.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = column(poles[k], m);
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return out;
}

GreenColumn approximate_green(const OperatorData& op, const Point& pole, int m, Side side,
                              double tol)
{
    return GreenSolver(op, side, tol).column(pole, m);
}

WeakNorms weak_norm_report(const GreenColumn& col)
{
    constexpr double n = kDim;
    WeakNorms w;
    w.weak = lorentz_norm_distribution(nodal_samples(col.field), LorentzIndex::weak(n / (n - 2)))
                 .value;
    w.grad_weak =
        lorentz_norm_distribution(gradient_samples(col.field), LorentzIndex::weak(n / (n - 1)))
            .value;
    return w;
}

double pointwise_constant(const GreenColumn& col, std::optional<Annulus> annulus)
{
    const Domain& dom = col.field.domain();
    const Annulus a = annulus.value_or(Annulus{2.0 * col.radius, 0.5 * dom.diameter()});
    double best = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < col.field.size(); ++i) {
        const double r = distance(dom.node(i), col.pole);
        if (r > a.inner && r <= a.outer) {
            any = true;
            best = std::max(best, std::abs(col.field[i]) * std::pow(r, kDim - 2));
        }
    }
    if (!any) {
        throw std::invalid_argument("pointwise_constant: no node in the annulus");
    }
    return best;
}

SymmetryReport symmetry_defect(const OperatorData& op, const Point& x, const Point& y, int m,
                               int k, double tol)
{
    if (distance(x, y) <= 1.0 / m + 1.0 / k) {
        throw std::invalid_argument("symmetry_defect: the pole balls overlap");
    }
    const GreenColumn forward = GreenSolver(op, Side::forward, tol).column(y, m);
    const GreenColumn backward = GreenSolver(op, Side::adjoint, tol).column(x, k);
    const Domain& dom = *op.domain;
    SymmetryReport rep;
    rep.forward_average = BallQuadrature(dom, Ball{x, 1.0 / k}).average(forward.field);
    rep.adjoint_average = BallQuadrature(dom, Ball{y, 1.0 / m}).average(backward.field);
    rep.defect = std::abs(rep.forward_average - rep.adjoint_average);
    rep.scale = std::max(forward.field.max_abs(), backward.field.max_abs());
    return rep;
}

double annulus_energy(const GreenColumn& col, double r)
{
    const GridField& u = col.field;
    const Domain& dom = u.domain();
    const kernels::detail::GaussTable gt(dom.h());
    const double g = 0.5 / std::sqrt(3.0);
    double s = 0.0;
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        const auto c = dom.cell_ijk(cell);
        for (int p = 0; p < 8; ++p) {
            Point x;
            for (int d = 0; d < kDim; ++d) {
                const double local = 0.5 + (((p >> d) & 1) ? g : -g);
                x[d] = dom.lo()[d] + (c[d] + local) * dom.h();
            }
            if (distance(x, col.pole) < r) {
                continue;
            }
            Vec3 grad{0.0, 0.0, 0.0};
            for (int a = 0; a < 8; ++a) {
                const double v = u[dom.cell_node(cell, a)];
                for (int e = 0; e < 3; ++e) {
                    grad[e] += v * gt.grad[p][a][e];
                }
            }
            s += gt.weight * kernels::detail::dot3(grad, grad);
        }
    }
    return std::pow(r, kDim - 2) * s;
}

Representation represent_solution(const GreenSolver& forward, const std::vector<GreenColumn>& columns,
                                  const GridField& f)
{
    if (forward.side() != Side::forward) {
        throw std::invalid_argument("represent_solution: needs forward columns");
    }
    const OperatorData& op = forward.op();
    const Domain& dom = *op.domain;
    // load int f phi_i, the pairing used by the solver
    RightSide rs;
    rs.g = f;
    const LinearSystem sys = assemble(OperatorData::laplacian(op.domain), rs);

    Representation rep;
    const DirichletSolver adj(adjoint(op), forward.tol());
    const SolveReport direct = adj.solve(rs);
    std::vector<double> field(dom.node_count(), 0.0);
    double num = 0.0, den = 0.0;
    for (const GreenColumn& col : columns) {
        if (col.side != Side::forward) {
            throw std::invalid_argument("represent_solution: needs forward columns");
        }
        double v = 0.0;
        for (std::size_t r = 0; r < sys.rhs.size(); ++r) {
            v += sys.rhs[r] * col.field[dom.node_of_dof()[r]];
        }
        Vec3 local;
        const std::size_t cell = dom.locate(col.pole, local);
        std::size_t nearest = dom.cell_node(cell, 0);
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 8; ++a) {
            const std::size_t nd = dom.cell_node(cell, a);
            const double dist = distance(dom.node(nd), col.pole);
            if (dist < best) {
                best = dist;
                nearest = nd;
            }
        }
        rep.poles.push_back(col.pole);
        rep.represented.push_back(v);
        rep.direct.push_back(BallQuadrature(dom, Ball{col.pole, col.radius}).average(direct.solution));
        rep.direct_nodal.push_back(direct.solution[nearest]);
        field[nearest] = v;
        num += (v - rep.direct_nodal.back()) * (v - rep.direct_nodal.back());
        den += rep.direct_nodal.back() * rep.direct_nodal.back();
    }
    rep.relative_l2_mismatch = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    rep.field = GridField(op.domain, std::move(field));
    return rep;
}

TalentiReport talenti_check(const GridField& u, std::size_t points)
{
    const Domain& dom = u.domain();
    if (points < 8) {
        throw std::invalid_argument("talenti_check: need at least 8 levels");
    }
    const double top = u.max_abs();
    if (!(top > 0.0)) {
        throw std::invalid_argument("talenti_check: u vanishes identically");
    }
    TalentiReport rep;

    // flat levels: the largest group of equal nonzero nodal values, by measure
    {
        std::vector<std::pair<double, double>> vw;
        double total = 0.0;
        const auto w = dom.node_weights();
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (w[i] > 0.0 && u[i] != 0.0) {
                vw.emplace_back(std::abs(u[i]), w[i]);
                total += w[i];
            }
        }
        std::sort(vw.begin(), vw.end());
        double best = 0.0;
        for (std::size_t i = 0; i < vw.size();) {
            std::size_t j = i;
            double mass = 0.0;
            while (j < vw.size() && vw[j].first - vw[i].first <= 1e-12 * top) {
                mass += vw[j].second;
                ++j;
            }
            best = std::max(best, mass);
            i = j;
        }
        rep.plateau_fraction = total > 0.0 ? best / total : 0.0;
        rep.plateau = rep.plateau_fraction >= 0.05;
    }

    // level quantities on a 4^3 sub-sampling of every cell
    constexpr int kSub = 4;
    const double h = dom.h();
    const double w = std::pow(h / kSub, 3);
    std::vector<std::pair<double, double>> level;  // (|u|, |grad u|^2) per sub-sample
    level.reserve(dom.cell_count() * kSub * kSub * kSub);
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        for (int s = 0; s < kSub * kSub * kSub; ++s) {
            const Vec3 local{(s % kSub + 0.5) / kSub, ((s / kSub) % kSub + 0.5) / kSub,
                             (s / (kSub * kSub) + 0.5) / kSub};
            double v = 0.0;
            Vec3 g{0.0, 0.0, 0.0};
            for (int a = 0; a < 8; ++a) {
                const double ua = u[dom.cell_node(cell, a)];
                v += ua * basis_value(a, local);
                const Vec3 ga = basis_gradient(a, local, h);
                for (int e = 0; e < 3; ++e) {
                    g[e] += ua * ga[e];
                }
            }
            if (v != 0.0) {
                level.emplace_back(std::abs(v), kernels::detail::dot3(g, g));
            }
        }
    }
    std::sort(level.begin(), level.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    const auto above = [&](double t, double& mu, double& energy) {
        mu = 0.0;
        energy = 0.0;
        for (const auto& [v, g2] : level) {
            if (v <= t) {
                break;
            }
            mu += w;
            energy += w * g2;
        }
    };

    const double lo = 0.05 * top, hi = 0.8 * top;
    std::vector<double> t(points), mu(points), energy(points);
    for (std::size_t k = 0; k < points; ++k) {
        t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
        above(t[k], mu[k], energy[k]);
    }
    constexpr double n = kDim;
    const double cn = 1.0 / (n * n * std::pow(unit_ball_volume(kDim), 2.0 / n));
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < points; ++k) {
        const double dt = t[k + 1] - t[k - 1];
        const double dmu = mu[k - 1] - mu[k + 1];
        const double de = energy[k - 1] - energy[k + 1];
        if (dmu <= 0.0 || de <= 0.0 || mu[k] <= 0.0) {
            continue;  // flat or empty level band
        }
        const double slack = cn * std::pow(mu[k], 2.0 / n - 2.0) * (dmu / dt) * (de / dt);
        rep.t.push_back(t[k]);
        rep.slack.push_back(slack);
        rep.min_slack = std::min(rep.min_slack, slack);
    }
    if (rep.slack.empty()) {
        rep.plateau = true;
        rep.min_slack = 0.0;
    }
    return rep;
}

}  // namespace glab
