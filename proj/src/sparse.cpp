#include "glab/sparse.hpp"

#include "glab/kernels.hpp"
#include "glab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace glab {

std::size_t CsrMatrix::find(std::size_t r, std::size_t c) const
{
    const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
    const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
    const auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) {
        return npos;
    }
    return static_cast<std::size_t>(it - col_idx.begin());
}

double CsrMatrix::at(std::size_t r, std::size_t c) const
{
    const std::size_t k = find(r, c);
    return k == npos ? 0.0 : values[k];
}

CsrMatrix CsrMatrix::transpose() const
{
    CsrMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.row_ptr.assign(cols + 1, 0);
    for (std::size_t c : col_idx) {
        ++t.row_ptr[c + 1];
    }
    for (std::size_t i = 0; i < cols; ++i) {
        t.row_ptr[i + 1] += t.row_ptr[i];
    }
    t.col_idx.resize(nnz());
    t.values.resize(nnz());
    std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const std::size_t pos = next[col_idx[k]]++;
            t.col_idx[pos] = r;
            t.values[pos] = values[k];
        }
    }
    return t;
}

CsrMatrix lattice_pattern(const Domain& domain)
{
    CsrMatrix m;
    m.rows = m.cols = domain.interior_count();
    m.row_ptr.reserve(m.rows + 1);
    m.row_ptr.push_back(0);
    const auto dof = domain.dof_of_node();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto c = domain.node_ijk(domain.node_of_dof()[r]);
        for (int dk = -1; dk <= 1; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const std::int64_t col = dof[domain.node_index(c[0] + di, c[1] + dj, c[2] + dk)];
                    if (col >= 0) {
                        m.col_idx.push_back(static_cast<std::size_t>(col));
                    }
                }
            }
        }
        m.row_ptr.push_back(m.col_idx.size());
    }
    m.values.assign(m.col_idx.size(), 0.0);
    return m;
}

double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.rows != b.rows || a.cols != b.cols) {
        throw std::invalid_argument("max_abs_difference: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            worst = std::max(worst, std::abs(a.values[k] - b.at(r, a.col_idx[k])));
        }
        for (std::size_t k = b.row_ptr[r]; k < b.row_ptr[r + 1]; ++k) {
            worst = std::max(worst, std::abs(b.values[k] - a.at(r, b.col_idx[k])));
        }
    }
    return worst;
}

Ilu0::Ilu0(const CsrMatrix& a) : a_(&a), lu_(a.values), diag_(a.rows, CsrMatrix::npos)
{
    for (std::size_t r = 0; r < a.rows; ++r) {
        diag_[r] = a.find(r, r);
        if (diag_[r] == CsrMatrix::npos) {
            ok_ = false;
            return;
        }
    }
    // IKJ variant restricted to the pattern
    for (std::size_t i = 1; i < a.rows && ok_; ++i) {
        for (std::size_t kk = a.row_ptr[i]; kk < a.row_ptr[i + 1]; ++kk) {
            const std::size_t k = a.col_idx[kk];
            if (k >= i) {
                break;
            }
            const double pivot = lu_[diag_[k]];
            if (pivot == 0.0 || !std::isfinite(pivot)) {
                ok_ = false;
                break;
            }
            lu_[kk] /= pivot;
            const double lik = lu_[kk];
            std::size_t jj = kk + 1;
            std::size_t kj = diag_[k] + 1;
            while (jj < a.row_ptr[i + 1] && kj < a.row_ptr[k + 1]) {
                if (a.col_idx[jj] == a.col_idx[kj]) {
                    lu_[jj] -= lik * lu_[kj];
                    ++jj;
                    ++kj;
                } else if (a.col_idx[jj] < a.col_idx[kj]) {
                    ++jj;
                } else {
                    ++kj;
                }
            }
        }
    }
    for (std::size_t r = 0; r < a.rows && ok_; ++r) {
        const double p = lu_[diag_[r]];
        ok_ = p != 0.0 && std::isfinite(p);
    }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const
{
    const CsrMatrix& a = *a_;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = r[i];
        for (std::size_t k = a.row_ptr[i]; k < diag_[i]; ++k) {
            s -= lu_[k] * z[a.col_idx[k]];
        }
        z[i] = s;
    }
    for (std::size_t i = a.rows; i-- > 0;) {
        double s = z[i];
        for (std::size_t k = diag_[i] + 1; k < a.row_ptr[i + 1]; ++k) {
            s -= lu_[k] * z[a.col_idx[k]];
        }
        z[i] = s / lu_[diag_[i]];
    }
}

SolverStats bicgstab(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                     const SolverOptions& opts, const Ilu0* prebuilt)
{
    if (b.size() != a.rows || x.size() != a.rows || a.rows != a.cols) {
        throw std::invalid_argument("bicgstab: dimension mismatch");
    }
    const auto be = kernels::default_backend();
    const std::size_t n = a.rows;
    SolverStats st;

    std::unique_ptr<Ilu0> owned;
    const Ilu0* ilu = nullptr;
    std::vector<double> inv_diag;
    Preconditioner pc = opts.preconditioner;
    if (pc == Preconditioner::ilu0) {
        if (prebuilt == nullptr) {
            owned = std::make_unique<Ilu0>(a);
            prebuilt = owned.get();
        }
        ilu = prebuilt;
        if (!ilu->ok()) {
            ilu = nullptr;
            pc = Preconditioner::jacobi;
            st.note = "ilu0 pivot breakdown, fell back to jacobi";
        }
    }
    if (pc == Preconditioner::jacobi) {
        inv_diag.assign(n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a.at(i, i);
            inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
        }
    }
    st.preconditioner = pc == Preconditioner::ilu0 ? "ilu0" : pc == Preconditioner::jacobi ? "jacobi"
                                                                                          : "none";
    const auto precondition = [&](std::span<const double> in, std::span<double> out) {
        if (ilu) {
            ilu->apply(in, out);
        } else if (pc == Preconditioner::jacobi) {
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = inv_diag[i] * in[i];
            }
        } else {
            std::copy(in.begin(), in.end(), out.begin());
        }
    };

    const double bnorm = std::sqrt(kernels::dot(be, b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        st.converged = true;
        return st;
    }
    std::vector<double> r(n), rhat(n), p(n), v(n), s(n), t(n), phat(n), shat(n);
    std::size_t used = 0;
    // restarts recover from drift between the recursive and the true residual
    for (int cycle = 0; cycle < 8; ++cycle) {
        kernels::matvec(be, a, x, r);
        kernels::axpby(be, 1.0, b, -1.0, r);
        st.relative_residual = std::sqrt(kernels::dot(be, r, r)) / bnorm;
        if (st.relative_residual <= opts.tol || used >= opts.max_iterations) {
            break;
        }
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        while (used < opts.max_iterations) {
            ++used;
            const double rho_new = kernels::dot(be, rhat, r);
            if (rho_new == 0.0 || !std::isfinite(rho_new)) {
                st.note = "breakdown: rho vanished";
                break;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            // p = r + beta (p - omega v)
            kernels::axpby(be, -omega, v, 1.0, p);
            kernels::axpby(be, 1.0, r, beta, p);
            precondition(p, phat);
            kernels::matvec(be, a, phat, v);
            const double rv = kernels::dot(be, rhat, v);
            if (rv == 0.0 || !std::isfinite(rv)) {
                st.note = "breakdown: (rhat, v) vanished";
                break;
            }
            alpha = rho / rv;
            s = r;
            kernels::axpby(be, -alpha, v, 1.0, s);
            if (std::sqrt(kernels::dot(be, s, s)) / bnorm <= 0.5 * opts.tol) {
                kernels::axpby(be, alpha, phat, 1.0, x);
                break;
            }
            precondition(s, shat);
            kernels::matvec(be, a, shat, t);
            const double tt = kernels::dot(be, t, t);
            if (tt == 0.0) {
                st.note = "breakdown: t vanished";
                break;
            }
            omega = kernels::dot(be, t, s) / tt;
            kernels::axpby(be, alpha, phat, 1.0, x);
            kernels::axpby(be, omega, shat, 1.0, x);
            r = s;
            kernels::axpby(be, -omega, t, 1.0, r);
            if (std::sqrt(kernels::dot(be, r, r)) / bnorm <= 0.5 * opts.tol) {
                break;
            }
            if (omega == 0.0 || !std::isfinite(omega)) {
                st.note = "breakdown: omega vanished";
                break;
            }
        }
    }
    st.iterations = used;
    st.converged = st.relative_residual <= opts.tol;
    st.stagnated = !st.converged;
    if (st.stagnated && st.note.empty()) {
        st.note = "iteration limit reached";
    }
    return st;
}

}  // namespace glab
