#pragma once

// Uniform axis-aligned lattices masked to a domain, nodal fields on them, and
// the integration / averaging / mollification used by the experiments.
//
// All lattices are three-dimensional. Nodes are numbered x-fastest.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace glab {

inline constexpr int kDim = 3;

using Point = std::array<double, kDim>;
using Vec3 = std::array<double, kDim>;

[[nodiscard]] double norm(const Vec3& v);
[[nodiscard]] double distance(const Point& a, const Point& b);

enum class DomainKind { box, ball, annulus, box_minus_ball };

class Domain {
public:
    /// [lo, hi] per axis; (hi - lo)/h must be integral on each axis.
    static Domain box(const Point& lo, const Point& hi, double h);
    /// Lattice is the smallest grid-aligned box (with one spare layer) around the ball;
    /// the center is a lattice node.
    static Domain ball(const Point& center, double radius, double h);
    static Domain annulus(const Point& center, double inner, double outer, double h);
    static Domain box_minus_ball(const Point& lo, const Point& hi, const Point& center,
                                 double radius, double h);

    /// The same shape and lattice with every length multiplied by s.
    [[nodiscard]] Domain scaled(double s) const;

    [[nodiscard]] DomainKind kind() const { return kind_; }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] const Point& lo() const { return lo_; }
    [[nodiscard]] Point hi() const;
    [[nodiscard]] const std::array<int, kDim>& cells() const { return cells_; }
    [[nodiscard]] std::array<int, kDim> nodes_per_axis() const;
    [[nodiscard]] std::size_t node_count() const { return node_count_; }
    [[nodiscard]] std::size_t cell_count() const;
    [[nodiscard]] double diameter() const;
    [[nodiscard]] Point center() const { return center_; }

    [[nodiscard]] std::size_t node_index(int i, int j, int k) const;
    [[nodiscard]] std::array<int, kDim> node_ijk(std::size_t idx) const;
    [[nodiscard]] Point node(std::size_t idx) const;
    [[nodiscard]] std::size_t cell_index(int i, int j, int k) const;
    [[nodiscard]] std::array<int, kDim> cell_ijk(std::size_t idx) const;
    /// Global node of local corner `a` (bit d set means +1 along axis d).
    [[nodiscard]] std::size_t cell_node(std::size_t cell, int a) const;
    /// Cell containing p (clamped to the lattice) and local coordinates in [0,1]^3.
    [[nodiscard]] std::size_t locate(const Point& p, Vec3& local) const;

    /// Positive inside the open set, negative outside.
    [[nodiscard]] double signed_distance(const Point& p) const;
    [[nodiscard]] bool contains(const Point& p) const { return signed_distance(p) > 0.0; }

    /// Node is an unknown: inside the open domain and off the lattice faces.
    [[nodiscard]] bool is_interior(std::size_t node) const { return interior_[node] != 0; }
    [[nodiscard]] std::size_t interior_count() const { return interior_count_; }
    /// Node -> unknown number, or -1 for boundary/exterior nodes.
    [[nodiscard]] std::span<const std::int64_t> dof_of_node() const { return dof_; }
    [[nodiscard]] std::span<const std::size_t> node_of_dof() const { return node_of_dof_; }

    /// |dual cell of the node intersected with the domain|.
    [[nodiscard]] std::span<const double> node_weights() const { return weights_; }
    [[nodiscard]] double measure() const;

private:
    Domain() = default;
    void finalize();

    DomainKind kind_ = DomainKind::box;
    double h_ = 0.0;
    Point lo_{};
    std::array<int, kDim> cells_{};
    std::size_t node_count_ = 0;
    // shape parameters
    Point box_lo_{};
    Point box_hi_{};
    Point center_{};
    double r_inner_ = 0.0;
    double r_outer_ = 0.0;

    std::vector<std::uint8_t> interior_;
    std::vector<std::int64_t> dof_;
    std::vector<std::size_t> node_of_dof_;
    std::vector<double> weights_;
    std::size_t interior_count_ = 0;
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Scalar nodal data on every lattice node of a domain.
class GridField {
public:
    GridField() = default;
    explicit GridField(DomainPtr domain, double fill = 0.0);
    GridField(DomainPtr domain, std::vector<double> values);

    [[nodiscard]] const Domain& domain() const { return *domain_; }
    [[nodiscard]] const DomainPtr& domain_ptr() const { return domain_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    /// Trilinear interpolant at p.
    [[nodiscard]] double interpolate(const Point& p) const;
    [[nodiscard]] double max_abs() const;

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

/// n-vector nodal data on every lattice node.
class GridVectorField {
public:
    GridVectorField() = default;
    explicit GridVectorField(DomainPtr domain);
    GridVectorField(DomainPtr domain, std::vector<Vec3> values);

    [[nodiscard]] const Domain& domain() const { return *domain_; }
    [[nodiscard]] const DomainPtr& domain_ptr() const { return domain_; }
    [[nodiscard]] std::span<const Vec3> values() const { return values_; }
    [[nodiscard]] std::span<Vec3> values() { return values_; }
    [[nodiscard]] const Vec3& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] Vec3& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] GridField magnitude() const;
    [[nodiscard]] GridField component(int d) const;
    [[nodiscard]] double max_abs() const;

private:
    DomainPtr domain_;
    std::vector<Vec3> values_;
};

using ScalarClosure = std::function<double(const Point&)>;
using VectorClosure = std::function<Vec3(const Point&)>;

struct SampleOptions {
    /// Nodes within h/2 of one of these points are sampled at a point moved
    /// radially outward by h/4.
    std::vector<Point> singularities;
};

[[nodiscard]] GridField sample(const ScalarClosure& f, const DomainPtr& domain,
                               const SampleOptions& opts = {});
[[nodiscard]] GridVectorField sample(const VectorClosure& f, const DomainPtr& domain,
                                     const SampleOptions& opts = {});

/// Nodal (trapezoid) quadrature with the domain's node weights.
[[nodiscard]] double integrate(const GridField& f);

struct Ball {
    Point center{};
    double radius = 0.0;
};

/// Sub-sampled quadrature of a ball: 4^3 midpoints per cell meeting the ball,
/// kept when inside the ball. Exact for the trilinear interpolant on cells
/// fully inside the ball.
class BallQuadrature {
public:
    BallQuadrature(const Domain& domain, const Ball& ball, int subdivisions = 4);

    [[nodiscard]] double volume() const { return volume_; }
    [[nodiscard]] const Ball& ball() const { return ball_; }
    [[nodiscard]] double integrate(const GridField& f) const;
    [[nodiscard]] double average(const GridField& f) const { return integrate(f) / volume_; }
    /// Average of |interpolant|.
    [[nodiscard]] double average_abs(const GridField& f) const;
    /// Entries int (chi_B/|B|) phi_i for every lattice node (zero off the ball).
    [[nodiscard]] std::vector<double> normalized_load() const;

private:
    struct Sample {
        std::size_t cell;
        Vec3 local;
        double weight;
    };
    const Domain* domain_;
    Ball ball_;
    std::vector<Sample> samples_;
    double volume_ = 0.0;
};

[[nodiscard]] double integrate(const GridField& f, const Ball& ball);
/// Ball average; throws when the ball misses the domain.
[[nodiscard]] double fint(const GridField& f, const Ball& ball);

/// Node weights of |dual cell ∩ domain ∩ ball| (ball given), sub-sampled.
[[nodiscard]] std::vector<double> node_weights_in_ball(const Domain& domain, const Ball& ball);

/// Normalized discrete convolution with the bump exp(-1/(1-|jx|^2)).
/// Input is taken as zero outside the domain; output is zero outside
/// {dist(x, boundary) > 1/j}. Requires 1/j >= 2h.
[[nodiscard]] GridField mollify(const GridField& raw, double j);
[[nodiscard]] GridVectorField mollify(const GridVectorField& raw, double j);

/// Trilinear basis on the unit cube: value and reference gradient of corner a.
[[nodiscard]] double basis_value(int a, const Vec3& local);
[[nodiscard]] Vec3 basis_gradient(int a, const Vec3& local, double h);

}  // namespace glab
