#pragma once

// Per-cell element matrix and load shared by both assembly kernels.

#include "glab/kernels.hpp"

#include <array>
#include <cmath>

namespace glab::kernels::detail {

struct ElementData {
    bool active = false;  // some corner is an interior node
    std::array<std::array<double, 8>, 8> K{};  // K[test][trial]
    std::array<double, 8> r{};                  // load minus boundary lifting
};

struct GaussTable {
    std::array<std::array<double, 8>, 8> phi{};   // [gp][a]
    std::array<std::array<Vec3, 8>, 8> grad{};    // [gp][a]
    double weight = 0.0;

    explicit GaussTable(double h)
    {
        const double g = 0.5 / std::sqrt(3.0);
        for (int p = 0; p < 8; ++p) {
            const Vec3 local{0.5 + ((p & 1) ? g : -g), 0.5 + ((p & 2) ? g : -g),
                             0.5 + ((p & 4) ? g : -g)};
            for (int a = 0; a < 8; ++a) {
                phi[p][a] = basis_value(a, local);
                grad[p][a] = basis_gradient(a, local, h);
            }
        }
        weight = h * h * h / 8.0;
    }
};

inline double dot3(const Vec3& x, const Vec3& y)
{
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

// Diffusion term A grad u . grad v summed as diagonal terms then transposed
// pairs, so the value for (A, u, v) equals the one for (A^T, v, u) bitwise.
inline double diffusion(const Matrix3& A, const Vec3& gu, const Vec3& gv)
{
    const auto t = [&](int d, int e) { return A[3 * d + e] * (gu[e] * gv[d]); };
    double s = t(0, 0);
    s += t(1, 1);
    s += t(2, 2);
    s += t(0, 1) + t(1, 0);
    s += t(0, 2) + t(2, 0);
    s += t(1, 2) + t(2, 1);
    return s;
}

inline void compute_element(const AssemblyInput& in, const GaussTable& gt, std::size_t cell,
                            ElementData& out)
{
    const Domain& dom = *in.domain;
    std::array<std::size_t, 8> nodes{};
    out.active = false;
    for (int a = 0; a < 8; ++a) {
        nodes[a] = dom.cell_node(cell, a);
        out.active = out.active || dom.is_interior(nodes[a]);
    }
    if (!out.active) {
        return;
    }
    for (auto& row : out.K) {
        row.fill(0.0);
    }
    std::array<double, 8> load{};
    for (int p = 0; p < 8; ++p) {
        const auto& phi = gt.phi[p];
        const auto& grad = gt.grad[p];
        Matrix3 A{};
        Vec3 b{}, c{}, f{};
        double d = 0.0, g = 0.0;
        for (int a = 0; a < 8; ++a) {
            const std::size_t n = nodes[a];
            const double w = phi[a];
            if (!in.A.empty()) {
                for (int e = 0; e < 9; ++e) {
                    A[e] += w * in.A[n][e];
                }
            }
            for (int e = 0; e < 3; ++e) {
                if (!in.b.empty()) b[e] += w * in.b[n][e];
                if (!in.c.empty()) c[e] += w * in.c[n][e];
                if (!in.f.empty()) f[e] += w * in.f[n][e];
            }
            if (!in.d.empty()) d += w * in.d[n];
            if (!in.g.empty()) g += w * in.g[n];
        }
        for (int v = 0; v < 8; ++v) {
            const double bv = dot3(b, grad[v]);
            for (int u = 0; u < 8; ++u) {
                const double cu = dot3(c, grad[u]);
                const double value = diffusion(A, grad[u], grad[v]) +
                                     (bv * phi[u] + cu * phi[v]) + d * (phi[u] * phi[v]);
                out.K[v][u] += gt.weight * value;
            }
            load[v] += gt.weight * (dot3(f, grad[v]) + g * phi[v]);
        }
    }
    for (int v = 0; v < 8; ++v) {
        double lift = 0.0;
        if (!in.boundary.empty()) {
            for (int u = 0; u < 8; ++u) {
                if (!dom.is_interior(nodes[u])) {
                    lift += out.K[v][u] * in.boundary[nodes[u]];
                }
            }
        }
        out.r[v] = load[v] - lift;
    }
}

inline void check_input(const AssemblyInput& in, const CsrMatrix& m)
{
    if (in.domain == nullptr) {
        throw std::invalid_argument("assemble: missing domain");
    }
    const std::size_t n = in.domain->node_count();
    const auto bad = [n](std::size_t s) { return s != 0 && s != n; };
    if (bad(in.A.size()) || bad(in.b.size()) || bad(in.c.size()) || bad(in.d.size()) ||
        bad(in.f.size()) || bad(in.g.size()) || bad(in.extra_load.size()) ||
        bad(in.boundary.size())) {
        throw std::invalid_argument("assemble: every nodal array must cover all nodes");
    }
    if (m.rows != in.domain->interior_count() || m.row_ptr.size() != m.rows + 1) {
        throw std::invalid_argument("assemble: matrix pattern does not match the domain");
    }
}

}  // namespace glab::kernels::detail
