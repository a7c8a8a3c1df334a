#pragma once

// Empirical constants of the global bound, the inhomogeneous maximum
// principle and the local (Moser-type) bounds, tracked across grid ladders.

#include "glab/elliptic.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace glab {

struct ExperimentSpec {
    std::string name;
    std::function<DomainPtr(double h)> domain;
    std::function<OperatorData(const DomainPtr&)> op;
    VectorClosure f;         // empty: zero
    ScalarClosure g;         // empty: zero
    ScalarClosure boundary;  // empty: zero Dirichlet data
    SampleOptions sampling;
    Ball ball{};             // for local estimates
    std::vector<double> ladder;  // grid spacings
    double tol = 1e-10;

    /// Throws listing every problem that can be seen without building a rung.
    void validate() const;
};

enum class Verdict { stable, growing, inconclusive };

[[nodiscard]] const char* to_string(Verdict v);

struct ConstantTrace {
    std::vector<double> rung;      // h (or r for radius ladders)
    std::vector<double> constant;
    Verdict verdict = Verdict::inconclusive;
    double spread = 0.0;           // max/min over rungs
    double log_slope = 0.0;        // least-squares slope of ln C against ln(1/rung)
    std::vector<std::string> notes;
};

/// stable: all finite and positive with max/min <= 1.5; growing: strictly
/// increasing with last/first > 1.5; otherwise inconclusive.
[[nodiscard]] ConstantTrace classify(std::vector<double> rung, std::vector<double> constant);

/// Gate on the divergence condition: accepts when either (b, d) or (c, d) has
/// discrete margin >= -slack, slack = h^2 (|b|_inf + |c|_inf + |d|_inf).
/// Returns the better margin; throws with both margins otherwise.
double require_divergence_condition(const OperatorData& op);

/// Throws when h |b - c|_inf exceeds lambda.
void require_peclet(const OperatorData& op);

/// ||u||_inf / (||f||_{n,1} + ||g||_{n/2,1}) per rung, zero boundary data.
[[nodiscard]] ConstantTrace global_bound_constant(const ExperimentSpec& spec);

/// sup u / (max(0, sup boundary) + ||f||_{n,1} + ||g||_{n/2,1}) per rung.
[[nodiscard]] ConstantTrace inhomogeneous_max_principle(const ExperimentSpec& spec);

/// sup_{B_{r/2}} |u| / (avg_{B_r} |u| + ||f||_{n,1}(B_r) + ||g||_{n/2,1}(B_r)) per rung.
[[nodiscard]] ConstantTrace moser_constant(const ExperimentSpec& spec);

/// The Moser constant at one grid spacing for several ball radii (rung = r).
[[nodiscard]] ConstantTrace moser_radius_ladder(const ExperimentSpec& spec, double h,
                                                const std::vector<double>& radii);

/// sup_{B_{r/2}} u / avg_{B_r} u for the nonnegative solution of the spec; throws
/// when u has a negative part beyond solver tolerance.
[[nodiscard]] ConstantTrace sup_by_integral(const ExperimentSpec& spec);

/// Lorentz norms of sampled data as used by the constants above.
[[nodiscard]] double data_norm_f(const GridVectorField& f, std::span<const double> weights);
[[nodiscard]] double data_norm_g(const GridField& g, std::span<const double> weights);

}  // namespace glab
