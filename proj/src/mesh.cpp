#include "glab/mesh.hpp"

#include "glab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace glab {

double norm(const Vec3& v)
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double distance(const Point& a, const Point& b)
{
    return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

namespace {

int cells_along(double lo, double hi, double h, const char* who)
{
    if (!(h > 0.0) || !(hi > lo)) {
        throw std::invalid_argument(std::string(who) + ": need h > 0 and hi > lo");
    }
    const double ratio = (hi - lo) / h;
    const auto cells = std::llround(ratio);
    if (cells < 2 || std::abs(ratio - static_cast<double>(cells)) > 1e-9 * ratio) {
        std::ostringstream os;
        os << who << ": extent " << (hi - lo) << " is not a multiple (>= 2) of h = " << h;
        throw std::invalid_argument(os.str());
    }
    return static_cast<int>(cells);
}

void centered_lattice(const Point& center, double radius, double h, Point& lo,
                      std::array<int, kDim>& cells)
{
    if (!(h > 0.0) || !(radius > 0.0)) {
        throw std::invalid_argument("Domain: need h > 0 and a positive radius");
    }
    const int half = static_cast<int>(std::ceil(radius / h - 1e-9)) + 1;
    for (int d = 0; d < kDim; ++d) {
        lo[d] = center[d] - half * h;
        cells[d] = 2 * half;
    }
}

}  // namespace

Domain Domain::box(const Point& lo, const Point& hi, double h)
{
    Domain dom;
    dom.kind_ = DomainKind::box;
    dom.h_ = h;
    dom.lo_ = lo;
    for (int d = 0; d < kDim; ++d) {
        dom.cells_[d] = cells_along(lo[d], hi[d], h, "Domain::box");
        dom.center_[d] = 0.5 * (lo[d] + hi[d]);
    }
    dom.box_lo_ = lo;
    dom.box_hi_ = hi;
    dom.finalize();
    return dom;
}

Domain Domain::ball(const Point& center, double radius, double h)
{
    Domain dom;
    dom.kind_ = DomainKind::ball;
    dom.h_ = h;
    dom.center_ = center;
    dom.r_outer_ = radius;
    centered_lattice(center, radius, h, dom.lo_, dom.cells_);
    dom.finalize();
    return dom;
}

Domain Domain::annulus(const Point& center, double inner, double outer, double h)
{
    if (!(inner > 0.0) || !(outer > inner)) {
        throw std::invalid_argument("Domain::annulus: need 0 < inner < outer");
    }
    Domain dom;
    dom.kind_ = DomainKind::annulus;
    dom.h_ = h;
    dom.center_ = center;
    dom.r_inner_ = inner;
    dom.r_outer_ = outer;
    centered_lattice(center, outer, h, dom.lo_, dom.cells_);
    dom.finalize();
    return dom;
}

Domain Domain::box_minus_ball(const Point& lo, const Point& hi, const Point& center, double radius,
                              double h)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("Domain::box_minus_ball: radius must be positive");
    }
    Domain dom;
    dom.kind_ = DomainKind::box_minus_ball;
    dom.h_ = h;
    dom.lo_ = lo;
    for (int d = 0; d < kDim; ++d) {
        dom.cells_[d] = cells_along(lo[d], hi[d], h, "Domain::box_minus_ball");
    }
    dom.box_lo_ = lo;
    dom.box_hi_ = hi;
    dom.center_ = center;
    dom.r_inner_ = radius;
    dom.finalize();
    return dom;
}

Domain Domain::scaled(double s) const
{
    if (!(s > 0.0)) {
        throw std::invalid_argument("Domain::scaled: factor must be positive");
    }
    const auto mul = [s](const Point& p) { return Point{s * p[0], s * p[1], s * p[2]}; };
    switch (kind_) {
    case DomainKind::box:
        return box(mul(box_lo_), mul(box_hi_), s * h_);
    case DomainKind::ball:
        return ball(mul(center_), s * r_outer_, s * h_);
    case DomainKind::annulus:
        return annulus(mul(center_), s * r_inner_, s * r_outer_, s * h_);
    case DomainKind::box_minus_ball:
        return box_minus_ball(mul(box_lo_), mul(box_hi_), mul(center_), s * r_inner_, s * h_);
    }
    throw std::logic_error("Domain::scaled: unknown kind");
}

Point Domain::hi() const
{
    Point p;
    for (int d = 0; d < kDim; ++d) {
        p[d] = lo_[d] + cells_[d] * h_;
    }
    return p;
}

std::array<int, kDim> Domain::nodes_per_axis() const
{
    return {cells_[0] + 1, cells_[1] + 1, cells_[2] + 1};
}

std::size_t Domain::cell_count() const
{
    return static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
}

double Domain::diameter() const
{
    switch (kind_) {
    case DomainKind::ball:
    case DomainKind::annulus:
        return 2.0 * r_outer_;
    default:
        return distance(box_lo_, box_hi_);
    }
}

std::size_t Domain::node_index(int i, int j, int k) const
{
    const auto nx = static_cast<std::size_t>(cells_[0] + 1);
    const auto ny = static_cast<std::size_t>(cells_[1] + 1);
    return static_cast<std::size_t>(i) + nx * (static_cast<std::size_t>(j) + ny * k);
}

std::array<int, kDim> Domain::node_ijk(std::size_t idx) const
{
    const auto nx = static_cast<std::size_t>(cells_[0] + 1);
    const auto ny = static_cast<std::size_t>(cells_[1] + 1);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
            static_cast<int>(idx / (nx * ny))};
}

Point Domain::node(std::size_t idx) const
{
    const auto ijk = node_ijk(idx);
    return {lo_[0] + ijk[0] * h_, lo_[1] + ijk[1] * h_, lo_[2] + ijk[2] * h_};
}

std::size_t Domain::cell_index(int i, int j, int k) const
{
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const auto ny = static_cast<std::size_t>(cells_[1]);
    return static_cast<std::size_t>(i) + nx * (static_cast<std::size_t>(j) + ny * k);
}

std::array<int, kDim> Domain::cell_ijk(std::size_t idx) const
{
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const auto ny = static_cast<std::size_t>(cells_[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
            static_cast<int>(idx / (nx * ny))};
}

std::size_t Domain::cell_node(std::size_t cell, int a) const
{
    const auto c = cell_ijk(cell);
    return node_index(c[0] + (a & 1), c[1] + ((a >> 1) & 1), c[2] + ((a >> 2) & 1));
}

std::size_t Domain::locate(const Point& p, Vec3& local) const
{
    std::array<int, kDim> c{};
    for (int d = 0; d < kDim; ++d) {
        const double t = (p[d] - lo_[d]) / h_;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, cells_[d] - 1);
        c[d] = i;
        local[d] = std::clamp(t - i, 0.0, 1.0);
    }
    return cell_index(c[0], c[1], c[2]);
}

double Domain::signed_distance(const Point& p) const
{
    const auto box_distance = [&] {
        double s = std::numeric_limits<double>::infinity();
        for (int d = 0; d < kDim; ++d) {
            s = std::min({s, p[d] - box_lo_[d], box_hi_[d] - p[d]});
        }
        return s;
    };
    switch (kind_) {
    case DomainKind::box:
        return box_distance();
    case DomainKind::ball:
        return r_outer_ - distance(p, center_);
    case DomainKind::annulus: {
        const double r = distance(p, center_);
        return std::min(r - r_inner_, r_outer_ - r);
    }
    case DomainKind::box_minus_ball:
        return std::min(box_distance(), distance(p, center_) - r_inner_);
    }
    return 0.0;
}

double Domain::measure() const
{
    double s = 0.0;
    for (double w : weights_) {
        s += w;
    }
    return s;
}

void Domain::finalize()
{
    node_count_ = static_cast<std::size_t>(cells_[0] + 1) * (cells_[1] + 1) * (cells_[2] + 1);
    interior_.assign(node_count_, 0);
    dof_.assign(node_count_, -1);
    node_of_dof_.clear();
    const double tiny = 1e-12 * h_;
    for (std::size_t idx = 0; idx < node_count_; ++idx) {
        const auto ijk = node_ijk(idx);
        bool on_face = false;
        for (int d = 0; d < kDim; ++d) {
            on_face = on_face || ijk[d] == 0 || ijk[d] == cells_[d];
        }
        if (!on_face && signed_distance(node(idx)) > tiny) {
            interior_[idx] = 1;
            dof_[idx] = static_cast<std::int64_t>(node_of_dof_.size());
            node_of_dof_.push_back(idx);
        }
    }
    interior_count_ = node_of_dof_.size();
    if (interior_count_ == 0) {
        throw std::invalid_argument("Domain: no interior nodes at this resolution");
    }

    // connectivity over the 27-point coupling graph of the multilinear basis
    std::vector<std::uint8_t> seen(node_count_, 0);
    std::deque<std::size_t> queue{node_of_dof_.front()};
    seen[node_of_dof_.front()] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        const auto c = node_ijk(cur);
        for (int dk = -1; dk <= 1; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
                    if (i < 0 || j < 0 || k < 0 || i > cells_[0] || j > cells_[1] ||
                        k > cells_[2]) {
                        continue;
                    }
                    const std::size_t nb = node_index(i, j, k);
                    if (interior_[nb] && !seen[nb]) {
                        seen[nb] = 1;
                        ++reached;
                        queue.push_back(nb);
                    }
                }
            }
        }
    }
    if (reached != interior_count_) {
        throw std::invalid_argument("Domain: interior node set is disconnected");
    }

    // |dual cell ∩ domain|, sub-sampled 4^3 where the boundary may cut the dual cell
    weights_.assign(node_count_, 0.0);
    const double reach = 0.5 * std::sqrt(3.0) * h_;
    const Point top = hi();
    constexpr int kSub = 4;
    for (std::size_t idx = 0; idx < node_count_; ++idx) {
        const Point x = node(idx);
        const double sd = signed_distance(x);
        if (sd < -reach) {
            continue;
        }
        Point a, b;
        double vol = 1.0;
        for (int d = 0; d < kDim; ++d) {
            a[d] = std::max(lo_[d], x[d] - 0.5 * h_);
            b[d] = std::min(top[d], x[d] + 0.5 * h_);
            vol *= b[d] - a[d];
        }
        if (sd > reach) {
            weights_[idx] = vol;
            continue;
        }
        int inside = 0;
        for (int s = 0; s < kSub * kSub * kSub; ++s) {
            const int si[3] = {s % kSub, (s / kSub) % kSub, s / (kSub * kSub)};
            Point q;
            for (int d = 0; d < kDim; ++d) {
                q[d] = a[d] + (si[d] + 0.5) * (b[d] - a[d]) / kSub;
            }
            inside += contains(q) ? 1 : 0;
        }
        weights_[idx] = vol * inside / (kSub * kSub * kSub);
    }
}

GridField::GridField(DomainPtr domain, double fill) : domain_(std::move(domain))
{
    if (!domain_) {
        throw std::invalid_argument("GridField: null domain");
    }
    values_.assign(domain_->node_count(), fill);
}

GridField::GridField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values))
{
    if (!domain_ || values_.size() != domain_->node_count()) {
        throw std::invalid_argument("GridField: value count must match the node count");
    }
    for (double v : values_) {
        if (std::isnan(v)) {
            throw std::invalid_argument("GridField: NaN value");
        }
    }
}

double GridField::interpolate(const Point& p) const
{
    Vec3 local;
    const std::size_t cell = domain_->locate(p, local);
    double s = 0.0;
    for (int a = 0; a < 8; ++a) {
        s += values_[domain_->cell_node(cell, a)] * basis_value(a, local);
    }
    return s;
}

double GridField::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

GridVectorField::GridVectorField(DomainPtr domain) : domain_(std::move(domain))
{
    if (!domain_) {
        throw std::invalid_argument("GridVectorField: null domain");
    }
    values_.assign(domain_->node_count(), Vec3{0.0, 0.0, 0.0});
}

GridVectorField::GridVectorField(DomainPtr domain, std::vector<Vec3> values)
    : domain_(std::move(domain)), values_(std::move(values))
{
    if (!domain_ || values_.size() != domain_->node_count()) {
        throw std::invalid_argument("GridVectorField: value count must match the node count");
    }
    for (const auto& v : values_) {
        if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2])) {
            throw std::invalid_argument("GridVectorField: NaN value");
        }
    }
}

GridField GridVectorField::magnitude() const
{
    std::vector<double> m(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        m[i] = norm(values_[i]);
    }
    return GridField(domain_, std::move(m));
}

GridField GridVectorField::component(int d) const
{
    std::vector<double> m(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        m[i] = values_[i][static_cast<std::size_t>(d)];
    }
    return GridField(domain_, std::move(m));
}

double GridVectorField::max_abs() const
{
    double m = 0.0;
    for (const auto& v : values_) {
        m = std::max(m, norm(v));
    }
    return m;
}

namespace {

Point avoid_poles(const Point& x, double h, const SampleOptions& opts)
{
    for (const Point& y : opts.singularities) {
        const Vec3 dx{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
        const double r = norm(dx);
        if (r < 0.5 * h) {
            Vec3 dir{1.0, 1.0, 1.0};
            double len = std::sqrt(3.0);
            if (r > 0.0) {
                dir = dx;
                len = r;
            }
            const double step = 0.25 * h / len;
            return {x[0] + step * dir[0], x[1] + step * dir[1], x[2] + step * dir[2]};
        }
    }
    return x;
}

void check_sample(double v, const Point& x)
{
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "sample: non-finite value at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
        throw std::domain_error(os.str());
    }
}

}  // namespace

GridField sample(const ScalarClosure& f, const DomainPtr& domain, const SampleOptions& opts)
{
    std::vector<double> v(domain->node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point x = avoid_poles(domain->node(i), domain->h(), opts);
        v[i] = f(x);
        check_sample(v[i], x);
    }
    return GridField(domain, std::move(v));
}

GridVectorField sample(const VectorClosure& f, const DomainPtr& domain, const SampleOptions& opts)
{
    std::vector<Vec3> v(domain->node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point x = avoid_poles(domain->node(i), domain->h(), opts);
        v[i] = f(x);
        for (double c : v[i]) {
            check_sample(c, x);
        }
    }
    return GridVectorField(domain, std::move(v));
}

double integrate(const GridField& f)
{
    const auto w = f.domain().node_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += w[i] * f[i];
    }
    return s;
}

BallQuadrature::BallQuadrature(const Domain& domain, const Ball& ball, int subdivisions)
    : domain_(&domain), ball_(ball)
{
    if (!(ball.radius > 0.0) || subdivisions < 1) {
        throw std::invalid_argument("BallQuadrature: need a positive radius and subdivisions");
    }
    const double h = domain.h();
    const double sub = h / subdivisions;
    const double w = sub * sub * sub;
    std::array<int, kDim> first{}, last{};
    for (int d = 0; d < kDim; ++d) {
        first[d] = std::max(0, static_cast<int>(std::floor((ball.center[d] - ball.radius -
                                                            domain.lo()[d]) / h)));
        last[d] = std::min(domain.cells()[d] - 1,
                           static_cast<int>(std::floor((ball.center[d] + ball.radius -
                                                        domain.lo()[d]) / h)));
    }
    for (int k = first[2]; k <= last[2]; ++k) {
        for (int j = first[1]; j <= last[1]; ++j) {
            for (int i = first[0]; i <= last[0]; ++i) {
                const std::size_t cell = domain.cell_index(i, j, k);
                const Point corner{domain.lo()[0] + i * h, domain.lo()[1] + j * h,
                                   domain.lo()[2] + k * h};
                for (int s = 0; s < subdivisions * subdivisions * subdivisions; ++s) {
                    const int si[3] = {s % subdivisions, (s / subdivisions) % subdivisions,
                                       s / (subdivisions * subdivisions)};
                    Vec3 local;
                    Point q;
                    for (int d = 0; d < kDim; ++d) {
                        local[d] = (si[d] + 0.5) / subdivisions;
                        q[d] = corner[d] + local[d] * h;
                    }
                    if (distance(q, ball.center) < ball.radius && domain.contains(q)) {
                        samples_.push_back({cell, local, w});
                        volume_ += w;
                    }
                }
            }
        }
    }
    if (samples_.empty()) {
        throw std::invalid_argument("BallQuadrature: ball does not meet the domain");
    }
}

double BallQuadrature::integrate(const GridField& f) const
{
    double s = 0.0;
    for (const auto& q : samples_) {
        double v = 0.0;
        for (int a = 0; a < 8; ++a) {
            v += f[domain_->cell_node(q.cell, a)] * basis_value(a, q.local);
        }
        s += q.weight * v;
    }
    return s;
}

double BallQuadrature::average_abs(const GridField& f) const
{
    double s = 0.0;
    for (const auto& q : samples_) {
        double v = 0.0;
        for (int a = 0; a < 8; ++a) {
            v += f[domain_->cell_node(q.cell, a)] * basis_value(a, q.local);
        }
        s += q.weight * std::abs(v);
    }
    return s / volume_;
}

std::vector<double> BallQuadrature::normalized_load() const
{
    std::vector<double> load(domain_->node_count(), 0.0);
    for (const auto& q : samples_) {
        for (int a = 0; a < 8; ++a) {
            load[domain_->cell_node(q.cell, a)] += q.weight * basis_value(a, q.local) / volume_;
        }
    }
    return load;
}

double integrate(const GridField& f, const Ball& ball)
{
    return BallQuadrature(f.domain(), ball).integrate(f);
}

double fint(const GridField& f, const Ball& ball)
{
    return BallQuadrature(f.domain(), ball).average(f);
}

std::vector<double> node_weights_in_ball(const Domain& domain, const Ball& ball)
{
    std::vector<double> w(domain.node_count(), 0.0);
    const double h = domain.h();
    const double reach = 0.5 * std::sqrt(3.0) * h;
    const auto base = domain.node_weights();
    constexpr int kSub = 4;
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
        if (base[idx] == 0.0) {
            continue;
        }
        const Point x = domain.node(idx);
        const double r = distance(x, ball.center);
        if (r > ball.radius + reach) {
            continue;
        }
        if (r < ball.radius - reach) {
            w[idx] = base[idx];
            continue;
        }
        int inside = 0;
        for (int s = 0; s < kSub * kSub * kSub; ++s) {
            const int si[3] = {s % kSub, (s / kSub) % kSub, s / (kSub * kSub)};
            Point q;
            for (int d = 0; d < kDim; ++d) {
                q[d] = x[d] + ((si[d] + 0.5) / kSub - 0.5) * h;
            }
            inside += (distance(q, ball.center) < ball.radius && domain.contains(q)) ? 1 : 0;
        }
        w[idx] = std::min(base[idx], h * h * h * inside / (kSub * kSub * kSub));
    }
    return w;
}

namespace {

kernels::Stencil bump_stencil(double h, double j)
{
    if (!(j >= 1.0)) {
        throw std::invalid_argument("mollify: j must be at least 1");
    }
    const double radius = 1.0 / j;
    if (radius < 2.0 * h * (1.0 - 1e-12)) {
        throw std::invalid_argument("mollify: support radius 1/j is below 2h");
    }
    kernels::Stencil st;
    const int reach = static_cast<int>(std::floor(radius / h));
    double total = 0.0;
    for (int dk = -reach; dk <= reach; ++dk) {
        for (int dj = -reach; dj <= reach; ++dj) {
            for (int di = -reach; di <= reach; ++di) {
                const double z2 = (di * di + dj * dj + dk * dk) * h * h * j * j;
                if (z2 >= 1.0) {
                    continue;
                }
                const double w = std::exp(-1.0 / (1.0 - z2));
                st.offsets.push_back({di, dj, dk});
                st.weights.push_back(w);
                total += w;
            }
        }
    }
    for (double& w : st.weights) {
        w /= total;
    }
    return st;
}

std::vector<std::uint8_t> mollify_masks(const Domain& dom, double j,
                                        std::vector<std::uint8_t>& inside)
{
    std::vector<std::uint8_t> keep(dom.node_count(), 0);
    inside.assign(dom.node_count(), 0);
    const double radius = 1.0 / j;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const double sd = dom.signed_distance(dom.node(i));
        inside[i] = sd > 0.0 ? 1 : 0;
        keep[i] = sd > radius ? 1 : 0;
    }
    return keep;
}

}  // namespace

GridField mollify(const GridField& raw, double j)
{
    const Domain& dom = raw.domain();
    const kernels::Stencil st = bump_stencil(dom.h(), j);
    std::vector<std::uint8_t> inside;
    const auto keep = mollify_masks(dom, j, inside);
    std::vector<double> out(raw.size(), 0.0);
    kernels::convolve(kernels::default_backend(), dom, st, inside, keep, raw.values(), out);
    return GridField(raw.domain_ptr(), std::move(out));
}

GridVectorField mollify(const GridVectorField& raw, double j)
{
    const Domain& dom = raw.domain();
    const kernels::Stencil st = bump_stencil(dom.h(), j);
    std::vector<std::uint8_t> inside;
    const auto keep = mollify_masks(dom, j, inside);
    std::vector<Vec3> out(raw.size(), Vec3{0.0, 0.0, 0.0});
    std::vector<double> in(raw.size()), res(raw.size());
    for (int d = 0; d < kDim; ++d) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            in[i] = raw[i][static_cast<std::size_t>(d)];
        }
        kernels::convolve(kernels::default_backend(), dom, st, inside, keep, in, res);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i][static_cast<std::size_t>(d)] = res[i];
        }
    }
    return GridVectorField(raw.domain_ptr(), std::move(out));
}

double basis_value(int a, const Vec3& local)
{
    double v = 1.0;
    for (int d = 0; d < kDim; ++d) {
        v *= ((a >> d) & 1) ? local[static_cast<std::size_t>(d)]
                            : 1.0 - local[static_cast<std::size_t>(d)];
    }
    return v;
}

Vec3 basis_gradient(int a, const Vec3& local, double h)
{
    Vec3 g;
    for (int d = 0; d < kDim; ++d) {
        double v = ((a >> d) & 1) ? 1.0 : -1.0;
        for (int e = 0; e < kDim; ++e) {
            if (e != d) {
                v *= ((a >> e) & 1) ? local[static_cast<std::size_t>(e)]
                                    : 1.0 - local[static_cast<std::size_t>(e)];
            }
        }
        g[static_cast<std::size_t>(d)] = v / h;
    }
    return g;
}

}  // namespace glab
