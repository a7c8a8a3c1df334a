#pragma once

// Decreasing rearrangements and Lorentz (quasi-)seminorms of finite weighted
// samples, plus quadrature-backed norms of radially decreasing profiles.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace glab {

/// A simple function given as (value, measure) atoms. Values are magnitudes:
/// callers pass |f|, the module never sees signs.
class WeightedSamples {
public:
    struct Entry {
        double value;
        double weight;
    };

    WeightedSamples() = default;
    explicit WeightedSamples(std::vector<Entry> entries);
    WeightedSamples(std::span<const double> values, std::span<const double> weights);

    [[nodiscard]] std::span<const Entry> entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] double total_measure() const { return total_measure_; }
    [[nodiscard]] double max_value() const;

    /// Same weights, values replaced by v^r.
    [[nodiscard]] WeightedSamples power(double r) const;
    /// Entries whose index is selected by the mask.
    [[nodiscard]] WeightedSamples restrict_to(std::span<const bool> mask) const;

private:
    std::vector<Entry> entries_;
    double total_measure_ = 0.0;
};

/// Piecewise-constant function: values[i] on [breakpoints[i], breakpoints[i+1]),
/// zero outside [breakpoints.front(), breakpoints.back()).
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breakpoints, std::vector<double> values);

    [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t intervals() const { return values_.size(); }

    [[nodiscard]] double operator()(double s) const;
    /// Lebesgue measure of {s : f(s) > t}.
    [[nodiscard]] double measure_above(double t) const;
    [[nodiscard]] bool non_increasing() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Lorentz index (p, q) with q = infinity held as a distinct state.
class LorentzIndex {
public:
    static LorentzIndex finite(double p, double q);
    static LorentzIndex weak(double p);

    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] bool is_weak() const { return weak_; }
    /// Second index; throws for the weak (q = infinity) index.
    [[nodiscard]] double q() const;
    [[nodiscard]] std::string to_string() const;

private:
    LorentzIndex(double p, double q, bool weak) : p_(p), q_(q), weak_(weak) {}
    double p_;
    double q_;
    bool weak_;
};

/// Norm value that may instead carry a divergence flag.
struct NormValue {
    double value = 0.0;
    bool divergent = false;
    /// Estimated absolute error of `value` (quadrature-backed norms only).
    double error_estimate = 0.0;

    [[nodiscard]] bool finite() const { return !divergent; }
};

/// mu_f(t): total weight of entries with value > t. Requires t >= 0.
[[nodiscard]] double distribution_function(const WeightedSamples& f, double t);

/// f*(s) = inf{t > 0 : mu_f(t) <= s}, built by sorting values descending and
/// accumulating weights. Zero-valued entries are dropped.
[[nodiscard]] StepFunction decreasing_rearrangement(const WeightedSamples& f);

/// Lorentz seminorm from the rearrangement, with closed-form integrals per step.
[[nodiscard]] NormValue lorentz_norm(const WeightedSamples& f, const LorentzIndex& idx);

/// The same seminorm evaluated from the distribution function instead:
/// p^{1/q} (int (mu(s)^{1/p} s)^q ds/s)^{1/q}, or sup_s s mu(s)^{1/p}.
[[nodiscard]] NormValue lorentz_norm_distribution(const WeightedSamples& f,
                                                  const LorentzIndex& idx);

/// Radial profile seen by the Lorentz machinery: a non-negative, non-increasing
/// function of the radius on (0, outer_radius).
struct RadialFunction {
    std::function<double(double)> eval;
    double outer_radius = 1.0;
};

/// Lorentz seminorm of x -> g(|x|) on the ball of radius R in dimension n,
/// using g*(s) = g((s/omega_n)^{1/n}). Divergence at the origin is detected
/// from truncated integrals over the cutoffs R exp(-2^k).
[[nodiscard]] NormValue lorentz_norm_radial(const RadialFunction& g, const LorentzIndex& idx,
                                            int n, double rel_tol = 1e-8);

struct HardyPair {
    double lhs;
    double rhs;
};

/// lhs = sum w u v, rhs = int_0^inf u* v*. Both samples must share weights.
[[nodiscard]] HardyPair hardy_pairing(const WeightedSamples& u, const WeightedSamples& v);

/// Discrete pseudo-rearrangement of f with respect to u: cells are ordered by
/// decreasing u (ties by index), the cumulative integral of f over that nested
/// family is differenced on s_grid. One value per s_grid interval.
[[nodiscard]] StepFunction pseudo_rearrangement(const WeightedSamples& u, const WeightedSamples& f,
                                                std::span<const double> s_grid);

/// Volume of the unit ball in R^n.
[[nodiscard]] double unit_ball_volume(int n);

}  // namespace glab
