#include "glab/lorentz.hpp"

#include "glab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace glab {

// ---------------------------------------------------------------------------
// WeightedSamples

WeightedSamples::WeightedSamples(std::vector<Entry> entries) : entries_(std::move(entries))
{
    for (const Entry& e : entries_) {
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw std::invalid_argument("WeightedSamples: weights must be finite and positive");
        }
        if (!(e.value >= 0.0) || !std::isfinite(e.value)) {
            throw std::invalid_argument("WeightedSamples: values must be finite and non-negative");
        }
        total_measure_ += e.weight;
    }
}

WeightedSamples::WeightedSamples(std::span<const double> values, std::span<const double> weights)
    : WeightedSamples([&] {
          if (values.size() != weights.size()) {
              throw std::invalid_argument("WeightedSamples: values/weights size mismatch");
          }
          std::vector<Entry> e(values.size());
          for (std::size_t i = 0; i < values.size(); ++i) {
              e[i] = {values[i], weights[i]};
          }
          return e;
      }())
{
}

double WeightedSamples::max_value() const
{
    double m = 0.0;
    for (const Entry& e : entries_) {
        m = std::max(m, e.value);
    }
    return m;
}

WeightedSamples WeightedSamples::power(double r) const
{
    std::vector<Entry> out(entries_);
    for (Entry& e : out) {
        e.value = std::pow(e.value, r);
    }
    return WeightedSamples(std::move(out));
}

WeightedSamples WeightedSamples::restrict_to(std::span<const bool> mask) const
{
    if (mask.size() != entries_.size()) {
        throw std::invalid_argument("WeightedSamples::restrict_to: mask size mismatch");
    }
    std::vector<Entry> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (mask[i]) {
            out.push_back(entries_[i]);
        }
    }
    return WeightedSamples(std::move(out));
}

// ---------------------------------------------------------------------------
// StepFunction

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values))
{
    if (breakpoints_.empty() ? !values_.empty() : breakpoints_.size() != values_.size() + 1) {
        throw std::invalid_argument("StepFunction: need one more breakpoint than values");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
            throw std::invalid_argument("StepFunction: breakpoints must be strictly increasing");
        }
    }
    if (!breakpoints_.empty() && breakpoints_.front() < 0.0) {
        throw std::invalid_argument("StepFunction: breakpoints must be non-negative");
    }
}

double StepFunction::operator()(double s) const
{
    if (values_.empty() || s < breakpoints_.front() || s >= breakpoints_.back()) {
        return 0.0;
    }
    // first breakpoint strictly greater than s, minus one
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::measure_above(double t) const
{
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > t) {
            m += breakpoints_[i + 1] - breakpoints_[i];
        }
    }
    return m;
}

bool StepFunction::non_increasing() const
{
    return std::is_sorted(values_.rbegin(), values_.rend());
}

// ---------------------------------------------------------------------------
// LorentzIndex

LorentzIndex LorentzIndex::finite(double p, double q)
{
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("LorentzIndex: p must be finite and positive");
    }
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("LorentzIndex: q must be finite and positive (use weak())");
    }
    return LorentzIndex(p, q, false);
}

LorentzIndex LorentzIndex::weak(double p)
{
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("LorentzIndex: p must be finite and positive");
    }
    return LorentzIndex(p, std::numeric_limits<double>::infinity(), true);
}

double LorentzIndex::q() const
{
    if (weak_) {
        throw std::logic_error("LorentzIndex::q: index has q = infinity");
    }
    return q_;
}

std::string LorentzIndex::to_string() const
{
    std::ostringstream os;
    os << "(" << p_ << ", " << (weak_ ? std::string("inf") : std::to_string(q_)) << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Rearrangement machinery

namespace {

struct Level {
    double value;       // distinct positive value, descending
    double cumulative;  // measure of {f >= value} = mu(value-)
};

// Distinct positive values in descending order with cumulative weights.
std::vector<Level> descending_levels(const WeightedSamples& f)
{
    std::vector<WeightedSamples::Entry> sorted(f.entries().begin(), f.entries().end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    std::vector<Level> levels;
    double acc = 0.0;
    for (const auto& e : sorted) {
        if (e.value <= 0.0) {
            break;
        }
        acc += e.weight;
        if (!levels.empty() && levels.back().value == e.value) {
            levels.back().cumulative = acc;
        } else {
            levels.push_back({e.value, acc});
        }
    }
    return levels;
}

void require_same_weights(const WeightedSamples& u, const WeightedSamples& v, const char* who)
{
    if (u.size() != v.size()) {
        throw std::invalid_argument(std::string(who) + ": samples live on different index sets");
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.entries()[i].weight != v.entries()[i].weight) {
            throw std::invalid_argument(std::string(who) + ": samples carry different weights");
        }
    }
}

NormValue finish(double value)
{
    NormValue r;
    if (!std::isfinite(value)) {
        r.divergent = true;
        r.value = std::numeric_limits<double>::infinity();
    } else {
        r.value = value;
    }
    return r;
}

}  // namespace

double distribution_function(const WeightedSamples& f, double t)
{
    if (!(t >= 0.0)) {
        throw std::invalid_argument("distribution_function: t must be non-negative");
    }
    double m = 0.0;
    for (const auto& e : f.entries()) {
        if (e.value > t) {
            m += e.weight;
        }
    }
    return m;
}

StepFunction decreasing_rearrangement(const WeightedSamples& f)
{
    const std::vector<Level> levels = descending_levels(f);
    if (levels.empty()) {
        return {};
    }
    std::vector<double> breaks{0.0};
    std::vector<double> values;
    breaks.reserve(levels.size() + 1);
    values.reserve(levels.size());
    for (const Level& l : levels) {
        breaks.push_back(l.cumulative);
        values.push_back(l.value);
    }
    return StepFunction(std::move(breaks), std::move(values));
}

NormValue lorentz_norm(const WeightedSamples& f, const LorentzIndex& idx)
{
    const StepFunction rs = decreasing_rearrangement(f);
    const auto b = rs.breakpoints();
    const auto v = rs.values();
    const double p = idx.p();
    if (idx.is_weak()) {
        double sup = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            sup = std::max(sup, std::pow(b[i + 1], 1.0 / p) * v[i]);
        }
        return finish(sup);
    }
    const double q = idx.q();
    const double e = q / p;
    // int_{b_i}^{b_{i+1}} t^{q/p - 1} dt = (p/q)(b_{i+1}^{q/p} - b_i^{q/p})
    double acc = 0.0;
    double lower = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double upper = std::pow(b[i + 1], e);
        acc += std::pow(v[i], q) * (upper - lower);
        lower = upper;
    }
    return finish(std::pow(acc / e, 1.0 / q));
}

NormValue lorentz_norm_distribution(const WeightedSamples& f, const LorentzIndex& idx)
{
    const std::vector<Level> levels = descending_levels(f);
    const double p = idx.p();
    if (idx.is_weak()) {
        // sup_s s mu(s)^{1/p}; on [v_{k+1}, v_k) mu = B_k, approached as s -> v_k
        double sup = 0.0;
        for (const Level& l : levels) {
            sup = std::max(sup, l.value * std::pow(l.cumulative, 1.0 / p));
        }
        return finish(sup);
    }
    const double q = idx.q();
    double acc = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double next = k + 1 < levels.size() ? levels[k + 1].value : 0.0;
        acc += std::pow(levels[k].cumulative, q / p) *
               (std::pow(levels[k].value, q) - std::pow(next, q));
    }
    return finish(std::pow(p * acc / q, 1.0 / q));
}

double unit_ball_volume(int n)
{
    if (n < 1) {
        throw std::invalid_argument("unit_ball_volume: dimension must be positive");
    }
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// ---------------------------------------------------------------------------
// Radial profiles

namespace {

void check_radial_profile(const RadialFunction& g)
{
    if (!(g.outer_radius > 0.0)) {
        throw std::invalid_argument("lorentz_norm_radial: outer radius must be positive");
    }
    // spot check on a logarithmic grid toward the origin
    double prev = -1.0;
    for (int k = 0; k <= 400; ++k) {
        const double r = g.outer_radius * std::exp(-0.05 * k) * (1.0 - 1e-12);
        const double val = g.eval(r);
        if (!(val >= 0.0)) {
            throw std::invalid_argument("lorentz_norm_radial: profile must be non-negative");
        }
        if (prev >= 0.0 && val < prev * (1.0 - 1e-12)) {
            throw std::invalid_argument("lorentz_norm_radial: profile must be non-increasing in r");
        }
        prev = val;
    }
}

// Cutoffs e^{-2^k} lying below R; the first entry is R itself.
std::vector<double> log_cutoffs(double radius)
{
    std::vector<double> u{-std::log(radius)};
    for (int k = 0; k <= 9; ++k) {
        const double uk = std::ldexp(1.0, k);
        if (uk > u.back()) {
            u.push_back(uk);
        }
    }
    return u;  // in u = -ln(sigma), increasing
}

// Drops trailing cutoffs where the profile overflows double range.
void trim_overflow(const RadialFunction& g, std::vector<double>& u)
{
    while (u.size() > 2 && !std::isfinite(g.eval(std::exp(-u.back())))) {
        u.pop_back();
    }
}

NormValue radial_weak(const RadialFunction& g, double p, int n)
{
    const double omega = unit_ball_volume(n);
    const auto weight = [&](double sigma) {
        const double gv = g.eval(sigma);
        if (gv == 0.0) {
            return 0.0;
        }
        return std::exp((std::log(omega) + n * std::log(sigma)) / p + std::log(gv));
    };
    std::vector<double> u = log_cutoffs(g.outer_radius);
    trim_overflow(g, u);
    std::vector<double> block_max;
    double sup = 0.0;
    for (std::size_t k = 1; k < u.size(); ++k) {
        double m = 0.0;
        constexpr int kSamples = 2000;
        for (int i = 0; i <= kSamples; ++i) {
            const double uu = u[k - 1] + (u[k] - u[k - 1]) * i / kSamples;
            const double sigma = std::exp(-uu) * (uu == u.front() ? 1.0 - 1e-14 : 1.0);
            m = std::max(m, weight(sigma));
        }
        block_max.push_back(m);
        sup = std::max(sup, m);
    }
    // unbounded growth toward the origin: block maxima keep increasing
    const std::size_t nb = block_max.size();
    if (nb >= 5) {
        bool growing = true;
        for (std::size_t k = nb - 4; k < nb; ++k) {
            growing = growing && block_max[k] > block_max[k - 1] * (1.0 + 1e-6);
        }
        if (growing) {
            return {std::numeric_limits<double>::infinity(), true, 0.0};
        }
    }
    return finish(sup);
}

}  // namespace

NormValue lorentz_norm_radial(const RadialFunction& g, const LorentzIndex& idx, int n,
                              double rel_tol)
{
    if (n < 1) {
        throw std::invalid_argument("lorentz_norm_radial: dimension must be positive");
    }
    check_radial_profile(g);
    const double p = idx.p();
    if (idx.is_weak()) {
        return radial_weak(g, p, n);
    }
    const double q = idx.q();
    const double omega = unit_ball_volume(n);
    const double scale = n * std::pow(omega, q / p);
    const double power = n * q / p - 1.0;
    // integrand in u = -ln(sigma): n omega^{q/p} sigma^{nq/p} g(sigma)^q
    const ScalarFn in_u = [&](double u) {
        const double sigma = std::exp(-u);
        const double gv = g.eval(sigma);
        if (gv == 0.0) {
            return 0.0;
        }
        return scale * std::exp(q * std::log(gv) - (power + 1.0) * u);
    };

    std::vector<double> u = log_cutoffs(g.outer_radius);
    trim_overflow(g, u);
    NormValue result;
    double total = 0.0;
    double err = 0.0;
    double prev_increment = -1.0;
    double last_ratio = 0.0;
    int slow_run = 0;
    bool converged = false;
    for (std::size_t k = 1; k < u.size(); ++k) {
        // the first piece starts exactly at R; nudge inside so g is evaluated in (0, R)
        const double lo = (k == 1) ? u[0] + 1e-14 * std::max(1.0, std::abs(u[0])) : u[k - 1];
        const QuadResult piece = integrate_adaptive(in_u, lo, u[k], rel_tol * 0.01);
        if (!std::isfinite(piece.value)) {
            return {std::numeric_limits<double>::infinity(), true, 0.0};
        }
        total += piece.value;
        err += piece.error;
        const double increment = piece.value;
        if (prev_increment > 0.0) {
            last_ratio = increment / prev_increment;
            slow_run = last_ratio >= 0.9 ? slow_run + 1 : 0;
            if (slow_run >= 4) {
                return {std::numeric_limits<double>::infinity(), true, 0.0};
            }
        }
        if (k > 1 && increment <= rel_tol * total) {
            converged = true;
            break;
        }
        prev_increment = increment;
    }
    if (!converged) {
        if (!(last_ratio > 0.0 && last_ratio < 0.9)) {
            return {std::numeric_limits<double>::infinity(), true, 0.0};
        }
        // geometric tail of the remaining dyadic blocks
        const double tail = prev_increment * last_ratio / (1.0 - last_ratio);
        total += tail;
        err += 0.1 * tail;
    }
    result.value = std::pow(total, 1.0 / q);
    result.error_estimate = result.value * err / (q * std::max(total, 1e-300));
    return result;
}

// ---------------------------------------------------------------------------
// Hardy pairing and pseudo-rearrangement

HardyPair hardy_pairing(const WeightedSamples& u, const WeightedSamples& v)
{
    require_same_weights(u, v, "hardy_pairing");
    HardyPair r{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        r.lhs += u.entries()[i].weight * u.entries()[i].value * v.entries()[i].value;
    }
    const StepFunction us = decreasing_rearrangement(u);
    const StepFunction vs = decreasing_rearrangement(v);
    if (us.intervals() == 0 || vs.intervals() == 0) {
        return r;
    }
    // merge breakpoints of the two step functions starting at 0
    const auto bu = us.breakpoints();
    const auto bv = vs.breakpoints();
    std::size_t i = 0;
    std::size_t j = 0;
    double s = 0.0;
    while (i < us.intervals() && j < vs.intervals()) {
        const double next = std::min(bu[i + 1], bv[j + 1]);
        r.rhs += us.values()[i] * vs.values()[j] * (next - s);
        s = next;
        if (bu[i + 1] == next) {
            ++i;
        }
        if (bv[j + 1] == next) {
            ++j;
        }
    }
    return r;
}

StepFunction pseudo_rearrangement(const WeightedSamples& u, const WeightedSamples& f,
                                  std::span<const double> s_grid)
{
    require_same_weights(u, f, "pseudo_rearrangement");
    if (s_grid.size() < 2) {
        throw std::invalid_argument("pseudo_rearrangement: s_grid needs at least two points");
    }
    const double total = u.total_measure();
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (s_grid[i] < 0.0 || s_grid[i] > total * (1.0 + 1e-12)) {
            throw std::invalid_argument("pseudo_rearrangement: s_grid must lie in [0, |Omega|]");
        }
        if (i > 0 && !(s_grid[i] > s_grid[i - 1])) {
            throw std::invalid_argument("pseudo_rearrangement: s_grid must be increasing");
        }
    }
    // nested family: cells by decreasing u, ties by index
    std::vector<std::size_t> order(u.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return u.entries()[a].value > u.entries()[b].value;
    });
    std::vector<double> cum_measure{0.0};
    std::vector<double> cum_mass{0.0};
    for (std::size_t idx : order) {
        const auto& e = f.entries()[idx];
        cum_measure.push_back(cum_measure.back() + e.weight);
        cum_mass.push_back(cum_mass.back() + e.weight * e.value);
    }
    const auto mass_at = [&](double s) {
        // partial inclusion of the cell straddling s
        const auto it = std::upper_bound(cum_measure.begin(), cum_measure.end(), s);
        if (it == cum_measure.end()) {
            return cum_mass.back();
        }
        const std::size_t j = static_cast<std::size_t>(it - cum_measure.begin());
        const double density = f.entries()[order[j - 1]].value;
        return cum_mass[j - 1] + density * (s - cum_measure[j - 1]);
    };
    std::vector<double> values(s_grid.size() - 1);
    for (std::size_t i = 0; i + 1 < s_grid.size(); ++i) {
        values[i] = (mass_at(s_grid[i + 1]) - mass_at(s_grid[i])) / (s_grid[i + 1] - s_grid[i]);
    }
    return StepFunction(std::vector<double>(s_grid.begin(), s_grid.end()), std::move(values));
}

}  // namespace glab
