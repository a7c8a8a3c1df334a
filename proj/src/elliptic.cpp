#include "glab/elliptic.hpp"

#include "element.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace glab {

namespace {

constexpr Matrix3 kIdentity{1, 0, 0, 0, 1, 0, 0, 0, 1};

bool same_lattice(const Domain& a, const Domain& b)
{
    return &a == &b || (a.node_count() == b.node_count() && a.h() == b.h() && a.lo() == b.lo());
}

Vec3 gradient_at(const GridField& u, std::size_t cell, const kernels::detail::GaussTable& gt,
                 int p)
{
    Vec3 g{0.0, 0.0, 0.0};
    for (int a = 0; a < 8; ++a) {
        const double v = u[u.domain().cell_node(cell, a)];
        for (int e = 0; e < 3; ++e) {
            g[e] += v * gt.grad[p][a][e];
        }
    }
    return g;
}

double value_at(const GridField& u, std::size_t cell, const kernels::detail::GaussTable& gt, int p)
{
    double s = 0.0;
    for (int a = 0; a < 8; ++a) {
        s += u[u.domain().cell_node(cell, a)] * gt.phi[p][a];
    }
    return s;
}

}  // namespace

OperatorData OperatorData::laplacian(const DomainPtr& domain)
{
    OperatorData op;
    op.domain = domain;
    op.A.assign(domain->node_count(), kIdentity);
    op.b = GridVectorField(domain);
    op.c = GridVectorField(domain);
    op.d = GridField(domain, 0.0);
    op.lambda = 1.0;
    return op;
}

void OperatorData::validate() const
{
    std::ostringstream errors;
    if (!domain) {
        throw std::invalid_argument("OperatorData: missing domain");
    }
    const std::size_t n = domain->node_count();
    if (A.size() != n) {
        errors << "A has " << A.size() << " entries, expected " << n << "; ";
    }
    for (const Matrix3& m : A) {
        if (!std::all_of(m.begin(), m.end(), [](double v) { return std::isfinite(v); })) {
            errors << "A has non-finite entries; ";
            break;
        }
    }
    if (b.size() != n || !same_lattice(b.domain(), *domain)) {
        errors << "b is not on the operator's lattice; ";
    }
    if (c.size() != n || !same_lattice(c.domain(), *domain)) {
        errors << "c is not on the operator's lattice; ";
    }
    if (d.size() != n || !same_lattice(d.domain(), *domain)) {
        errors << "d is not on the operator's lattice; ";
    }
    if (!(lambda > 0.0)) {
        errors << "lambda must be positive; ";
    } else if (A.size() == n && n > 0) {
        const double seen = sampled_ellipticity();
        if (seen < lambda * (1.0 - 1e-12)) {
            errors << "sampled ellipticity " << seen << " is below the declared lambda " << lambda << "; ";
        }
    }
    const std::string msg = errors.str();
    if (!msg.empty()) {
        throw std::invalid_argument("OperatorData: " + msg.substr(0, msg.size() - 2));
    }
}

double OperatorData::peclet() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        m = std::max(m, norm({b[i][0] - c[i][0], b[i][1] - c[i][1], b[i][2] - c[i][2]}));
    }
    return domain->h() * m;
}

double OperatorData::sampled_ellipticity(std::size_t samples, std::uint64_t seed) const
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, A.size() - 1);
    std::normal_distribution<double> normal;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        const Matrix3& m = A[pick(rng)];
        const Vec3 xi{normal(rng), normal(rng), normal(rng)};
        double q = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                q += m[3 * i + j] * xi[i] * xi[j];
            }
        }
        const double len2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if (len2 > 0.0) {
            worst = std::min(worst, q / len2);
        }
    }
    return worst;
}

double OperatorData::max_A() const
{
    double m = 0.0;
    for (const Matrix3& a : A) {
        for (double v : a) {
            m = std::max(m, std::abs(v));
        }
    }
    return m;
}

bool OperatorData::has_drift() const
{
    return b.max_abs() > 0.0 || c.max_abs() > 0.0;
}

OperatorData adjoint(const OperatorData& op)
{
    OperatorData t = op;
    for (Matrix3& m : t.A) {
        std::swap(m[1], m[3]);
        std::swap(m[2], m[6]);
        std::swap(m[5], m[7]);
    }
    std::swap(t.b, t.c);
    return t;
}

OperatorData rescale(const OperatorData& op, double s)
{
    op.validate();
    auto dom = std::make_shared<const Domain>(op.domain->scaled(s));
    OperatorData out;
    out.domain = dom;
    out.A = op.A;
    out.lambda = op.lambda;
    std::vector<Vec3> b(op.b.values().begin(), op.b.values().end());
    std::vector<Vec3> c(op.c.values().begin(), op.c.values().end());
    std::vector<double> d(op.d.values().begin(), op.d.values().end());
    for (auto& v : b) {
        for (double& x : v) x /= s;
    }
    for (auto& v : c) {
        for (double& x : v) x /= s;
    }
    for (double& x : d) {
        x /= s * s;
    }
    out.b = GridVectorField(dom, std::move(b));
    out.c = GridVectorField(dom, std::move(c));
    out.d = GridField(dom, std::move(d));
    return out;
}

LinearSystem assemble(const OperatorData& op, const RightSide& rhs, kernels::Backend be)
{
    op.validate();
    const Domain& dom = *op.domain;
    LinearSystem sys;
    sys.domain = op.domain;
    sys.matrix = lattice_pattern(dom);
    sys.boundary_mask.resize(dom.node_count());
    for (std::size_t i = 0; i < dom.node_count(); ++i) {
        sys.boundary_mask[i] = dom.is_interior(i) ? 0 : 1;
    }
    kernels::AssemblyInput in;
    in.domain = &dom;
    in.A = op.A;
    in.b = op.b.values();
    in.c = op.c.values();
    in.d = op.d.values();
    if (rhs.f) {
        in.f = rhs.f->values();
    }
    if (rhs.g) {
        in.g = rhs.g->values();
    }
    in.extra_load = rhs.extra_load;
    if (rhs.boundary) {
        in.boundary = rhs.boundary->values();
    }
    kernels::assemble(be, in, sys.matrix, sys.rhs);
    return sys;
}

DirichletSolver::DirichletSolver(const OperatorData& op, double tol)
    : op_(op), system_(assemble(op, RightSide{})), ilu_(system_.matrix)
{
    if (!(tol > 1e-14) || !(tol < 1e-4)) {
        throw std::invalid_argument("solve_dirichlet: tol must lie in (1e-14, 1e-4)");
    }
    opts_.tol = tol;
    opts_.max_iterations = 20000;
}

SolveReport DirichletSolver::finish(const std::vector<double>& rhs,
                                    const std::vector<double>* boundary) const
{
    const Domain& dom = *op_.domain;
    std::vector<double> x(dom.interior_count(), 0.0);
    const SolverStats st = bicgstab(system_.matrix, rhs, x, opts_, &ilu_);
    std::vector<double> full(dom.node_count(), 0.0);
    if (boundary != nullptr) {
        full = *boundary;
        for (std::size_t i = 0; i < full.size(); ++i) {
            if (dom.is_interior(i)) {
                full[i] = 0.0;
            }
        }
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
        full[dom.node_of_dof()[r]] = x[r];
    }
    SolveReport rep;
    rep.solution = GridField(op_.domain, std::move(full));
    rep.iterations = st.iterations;
    rep.relative_residual = st.relative_residual;
    rep.stagnated = st.stagnated;
    rep.preconditioner = st.preconditioner;
    rep.note = st.note;
    return rep;
}

SolveReport DirichletSolver::solve(const RightSide& rhs) const
{
    const LinearSystem sys = assemble(op_, rhs);
    if (rhs.boundary) {
        const std::vector<double> bd(rhs.boundary->values().begin(), rhs.boundary->values().end());
        return finish(sys.rhs, &bd);
    }
    return finish(sys.rhs, nullptr);
}

SolveReport DirichletSolver::solve_load(std::span<const double> nodal_load) const
{
    const Domain& dom = *op_.domain;
    if (nodal_load.size() != dom.node_count()) {
        throw std::invalid_argument("solve_load: load must cover all nodes");
    }
    std::vector<double> rhs(dom.interior_count());
    for (std::size_t r = 0; r < rhs.size(); ++r) {
        rhs[r] = nodal_load[dom.node_of_dof()[r]];
    }
    return finish(rhs, nullptr);
}

SolveReport solve_dirichlet(const OperatorData& op, const RightSide& rhs, double tol)
{
    const DirichletSolver solver(op, tol);
    return solver.solve(rhs);
}

double check_divergence_condition(const GridVectorField& b, const GridField& d)
{
    const Domain& dom = b.domain();
    if (!same_lattice(dom, d.domain())) {
        throw std::invalid_argument("check_divergence_condition: fields on different lattices");
    }
    const kernels::detail::GaussTable gt(dom.h());
    std::vector<double> acc(dom.node_count(), 0.0);
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        std::array<std::size_t, 8> nodes{};
        bool active = false;
        for (int a = 0; a < 8; ++a) {
            nodes[a] = dom.cell_node(cell, a);
            active = active || dom.is_interior(nodes[a]);
        }
        if (!active) {
            continue;
        }
        for (int p = 0; p < 8; ++p) {
            Vec3 bp{0.0, 0.0, 0.0};
            double dp = 0.0;
            for (int a = 0; a < 8; ++a) {
                for (int e = 0; e < 3; ++e) {
                    bp[e] += gt.phi[p][a] * b[nodes[a]][e];
                }
                dp += gt.phi[p][a] * d[nodes[a]];
            }
            for (int a = 0; a < 8; ++a) {
                if (dom.is_interior(nodes[a])) {
                    acc[nodes[a]] +=
                        gt.weight * (kernels::detail::dot3(bp, gt.grad[p][a]) + dp * gt.phi[p][a]);
                }
            }
        }
    }
    const double hat = dom.h() * dom.h() * dom.h();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t node : dom.node_of_dof()) {
        margin = std::min(margin, acc[node] / hat);
    }
    return margin;
}

double subsolution_residual(const OperatorData& op, const GridField& u, const RightSide& rhs)
{
    RightSide with_trace = rhs;
    with_trace.boundary = u;
    const LinearSystem sys = assemble(op, with_trace);
    const Domain& dom = *op.domain;
    std::vector<double> x(dom.interior_count()), mx(dom.interior_count());
    for (std::size_t r = 0; r < x.size(); ++r) {
        x[r] = u[dom.node_of_dof()[r]];
    }
    kernels::matvec(kernels::default_backend(), sys.matrix, x, mx);
    const double hat = dom.h() * dom.h() * dom.h();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < x.size(); ++r) {
        worst = std::max(worst, (mx[r] - sys.rhs[r]) / hat);
    }
    return worst;
}

WeightedSamples nodal_samples(const GridField& f)
{
    return nodal_samples(f, f.domain().node_weights());
}

WeightedSamples nodal_samples(const GridField& f, std::span<const double> weights)
{
    if (weights.size() != f.size()) {
        throw std::invalid_argument("nodal_samples: weight count mismatch");
    }
    std::vector<WeightedSamples::Entry> e;
    e.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (weights[i] > 0.0) {
            e.push_back({std::abs(f[i]), weights[i]});
        }
    }
    return WeightedSamples(std::move(e));
}

WeightedSamples gradient_samples(const GridField& u)
{
    const Domain& dom = u.domain();
    const double vol = dom.h() * dom.h() * dom.h();
    const Vec3 center{0.5, 0.5, 0.5};
    std::array<Vec3, 8> grads{};
    for (int a = 0; a < 8; ++a) {
        grads[a] = basis_gradient(a, center, dom.h());
    }
    std::vector<WeightedSamples::Entry> e;
    e.reserve(dom.cell_count());
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        Vec3 g{0.0, 0.0, 0.0};
        for (int a = 0; a < 8; ++a) {
            const double v = u[dom.cell_node(cell, a)];
            for (int k = 0; k < 3; ++k) {
                g[k] += v * grads[a][k];
            }
        }
        e.push_back({norm(g), vol});
    }
    return WeightedSamples(std::move(e));
}

double dirichlet_energy(const GridField& u, const GridField* weight)
{
    const Domain& dom = u.domain();
    const kernels::detail::GaussTable gt(dom.h());
    double s = 0.0;
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        for (int p = 0; p < 8; ++p) {
            const Vec3 g = gradient_at(u, cell, gt, p);
            const double w = weight != nullptr ? value_at(*weight, cell, gt, p) : 1.0;
            s += gt.weight * w * kernels::detail::dot3(g, g);
        }
    }
    return s;
}

CaccioppoliReport caccioppoli_ratio(const GridField& u, const GridField& phi,
                                    const GridVectorField* f, const GridField* g)
{
    const Domain& dom = u.domain();
    if (!same_lattice(dom, phi.domain())) {
        throw std::invalid_argument("caccioppoli_ratio: u and phi on different lattices");
    }
    const kernels::detail::GaussTable gt(dom.h());
    CaccioppoliReport rep;
    for (std::size_t cell = 0; cell < dom.cell_count(); ++cell) {
        for (int p = 0; p < 8; ++p) {
            const Vec3 gu = gradient_at(u, cell, gt, p);
            const Vec3 gphi = gradient_at(phi, cell, gt, p);
            const double ph = value_at(phi, cell, gt, p);
            const double uv = value_at(u, cell, gt, p);
            rep.lhs += gt.weight * ph * ph * kernels::detail::dot3(gu, gu);
            rep.cutoff_term += gt.weight * uv * uv * kernels::detail::dot3(gphi, gphi);
            if (f != nullptr) {
                Vec3 fv{0.0, 0.0, 0.0};
                for (int a = 0; a < 8; ++a) {
                    for (int e = 0; e < 3; ++e) {
                        fv[e] += gt.phi[p][a] * (*f)[dom.cell_node(cell, a)][e];
                    }
                }
                rep.f_term += gt.weight * ph * ph * kernels::detail::dot3(fv, fv);
            }
        }
    }
    const auto product = [&](const GridField& a) {
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = a[i] * phi[i];
        }
        return GridField(u.domain_ptr(), std::move(v));
    };
    constexpr double kSobolevConjugate = 6.0 / 5.0;  // 2n/(n+2)
    constexpr double kSobolev = 6.0;                 // 2n/(n-2)
    if (g != nullptr) {
        const NormValue gn = lorentz_norm(nodal_samples(product(*g)),
                                          LorentzIndex::finite(kSobolevConjugate, kSobolevConjugate));
        rep.g_term = gn.value * gn.value;
    }
    const NormValue un = lorentz_norm(nodal_samples(product(u)), LorentzIndex::finite(kSobolev, 2.0));
    rep.u_term = un.value * un.value;
    const double rhs = rep.g_term + rep.f_term + rep.u_term + rep.cutoff_term;
    if (rhs == 0.0) {
        rep.degenerate = true;
        rep.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.ratio = rep.lhs / rhs;
    }
    return rep;
}

SobolevReport sobolev_lorentz_ratio(const GridField& u)
{
    SobolevReport rep;
    rep.lorentz = lorentz_norm(nodal_samples(u), LorentzIndex::finite(6.0, 2.0)).value;
    rep.gradient = std::sqrt(dirichlet_energy(u));
    if (rep.gradient == 0.0) {
        rep.degenerate = true;
        rep.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.ratio = rep.lorentz / rep.gradient;
    }
    return rep;
}

}  // namespace glab
