#include "glab/acceptance.hpp"

#include "glab/green.hpp"
#include "glab/lorentz.hpp"
#include "glab/presets.hpp"
#include "glab/principles.hpp"
#include "glab/radial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace glab::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok) { passed = passed && ok; }
};

DomainPtr unit_box(double h)
{
    return std::make_shared<const Domain>(Domain::box({0, 0, 0}, {1, 1, 1}, h));
}

DomainPtr centered_box(double half, double h)
{
    return std::make_shared<const Domain>(Domain::box({-half, -half, -half}, {half, half, half}, h));
}

double relative(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

// f*(s) straight from inf{t >= 0 : mu(t) <= s}
double rearrangement_by_scan(const WeightedSamples& f, double s)
{
    double best = std::numeric_limits<double>::infinity();
    if (distribution_function(f, 0.0) <= s) {
        return 0.0;
    }
    for (const auto& e : f.entries()) {
        if (e.value < best && distribution_function(f, e.value) <= s) {
            best = e.value;
        }
    }
    return best;
}

// Dyadic weights keep every partial sum exact, so both sides can be compared with ==.
WeightedSamples random_samples(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> size(1, 256);
    std::uniform_int_distribution<int> weight(1, 1024);
    std::uniform_int_distribution<int> mode(0, 2);
    std::uniform_int_distribution<int> coarse(0, 16);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::bernoulli_distribution zero(0.1);
    const int n = size(rng);
    const int m = mode(rng);
    std::vector<WeightedSamples::Entry> e(static_cast<std::size_t>(n));
    for (auto& x : e) {
        x.weight = std::ldexp(weight(rng), -10);
        if (zero(rng)) {
            x.value = 0.0;
        } else if (m == 0) {
            x.value = coarse(rng) / 8.0;
        } else {
            x.value = value(rng);
        }
    }
    return WeightedSamples(std::move(e));
}

WeightedSamples random_positive_samples(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> size(1, 64);
    std::uniform_real_distribution<double> value(0.01, 5.0);
    std::uniform_real_distribution<double> weight(0.01, 2.0);
    std::vector<WeightedSamples::Entry> e(static_cast<std::size_t>(size(rng)));
    for (auto& x : e) {
        x = {value(rng), weight(rng)};
    }
    return WeightedSamples(std::move(e));
}

void c1_rearrangement(Outcome& o)
{
    std::mt19937_64 rng(20240601);
    std::size_t probe_mismatch = 0, measure_mismatch = 0, probes = 0, thresholds = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const WeightedSamples f = random_samples(rng);
        const StepFunction star = decreasing_rearrangement(f);
        std::uniform_real_distribution<double> s(0.0, 1.1 * f.total_measure());
        for (int k = 0; k < 100; ++k) {
            const double x = s(rng);
            ++probes;
            if (star(x) != rearrangement_by_scan(f, x)) {
                ++probe_mismatch;
            }
        }
        for (const auto& e : f.entries()) {
            ++thresholds;
            if (star.measure_above(e.value) != distribution_function(f, e.value)) {
                ++measure_mismatch;
            }
        }
    }
    o.require(probe_mismatch == 0 && measure_mismatch == 0);
    o.detail << probes << " probes, " << probe_mismatch << " mismatches; " << thresholds
             << " thresholds, " << measure_mismatch << " measure mismatches";
}

void c2_lorentz_golden(Outcome& o)
{
    const double ps[] = {1.2, 1.5, 2.0, 3.0, 4.5};
    const double qs[] = {1.0, 1.5, 2.0, 4.0};
    const double es[] = {0.25, 1.0, 3.5, 10.0};
    double worst_golden = 0.0;
    int triples = 0;
    for (double p : ps) {
        for (double q : qs) {
            const double e = es[triples % 4];
            ++triples;
            const WeightedSamples chi({{1.0, e / 4}, {1.0, e / 4}, {1.0, e / 2}});
            const double expect = std::pow(p / q, 1.0 / q) * std::pow(e, 1.0 / p);
            const double got = lorentz_norm(chi, LorentzIndex::finite(p, q)).value;
            worst_golden = std::max(worst_golden, relative(got, expect));
        }
    }
    std::mt19937_64 rng(77);
    double worst_formula = 0.0, worst_power = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const WeightedSamples f = random_positive_samples(rng);
        const double p = ps[trial % 5];
        const double q = qs[(trial / 5) % 4];
        for (const LorentzIndex& idx : {LorentzIndex::finite(p, q), LorentzIndex::weak(p)}) {
            worst_formula = std::max(
                worst_formula,
                relative(lorentz_norm_distribution(f, idx).value, lorentz_norm(f, idx).value));
        }
        for (double r : {0.5, 2.0, 3.0}) {
            const double lhs = lorentz_norm(f.power(r), LorentzIndex::finite(p, q)).value;
            const double rhs =
                std::pow(lorentz_norm(f, LorentzIndex::finite(p * r, q * r)).value, r);
            worst_power = std::max(worst_power, relative(lhs, rhs));
        }
    }
    o.require(triples == 20 && worst_golden <= 1e-12 && worst_formula <= 1e-10 &&
              worst_power <= 1e-10);
    o.detail << std::setprecision(3) << triples << " indicator triples, max rel err "
             << worst_golden << "; formulas agree to " << worst_formula << "; power law to "
             << worst_power;
}

void c3_radial_norms(Outcome& o)
{
    const RadialFunction drift = radial::counterexample_drift(kDim, 1.0).as_function();
    const double golden = std::sqrt(3.0) * std::cbrt(4.0 * kPi / 3.0);
    o.detail << std::setprecision(6);
    for (double q : {1.25, 2.0, 4.0}) {
        const NormValue v = lorentz_norm_radial(drift, LorentzIndex::finite(3.0, q), kDim);
        o.require(v.finite() && std::isfinite(v.value));
        o.detail << "q=" << q << ": " << v.value << "; ";
        if (q == 2.0) {
            o.require(std::abs(v.value - golden) <= 1e-4);
        }
    }
    const NormValue one = lorentz_norm_radial(drift, LorentzIndex::finite(3.0, 1.0), kDim);
    o.require(one.divergent);
    o.detail << "q=1: " << (one.divergent ? "divergent" : "finite") << "; golden " << golden;
}

double mms_error(const OperatorData& op, const ScalarClosure& rhs)
{
    RightSide rs;
    rs.g = sample(rhs, op.domain);
    const SolveReport rep = solve_dirichlet(op, rs, 1e-12);
    const GridField exact = sample(presets::product_sine(), op.domain);
    const auto w = op.domain->node_weights();
    double e = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = exact[i] - rep.solution[i];
        e += d * d * w[i];
    }
    return std::sqrt(e);
}

void c4_convergence(Outcome& o)
{
    o.detail << std::setprecision(4);
    for (int which = 0; which < 2; ++which) {
        std::vector<double> err;
        for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
            const DomainPtr dom = unit_box(h);
            if (which == 0) {
                err.push_back(mms_error(presets::laplacian(dom), [](const Point& x) {
                    return 3.0 * kPi * kPi * presets::product_sine()(x);
                }));
            } else {
                err.push_back(mms_error(presets::smooth_drift(dom, 1.0, 1.0, 0.0),
                                        presets::smooth_drift_manufactured_rhs(1.0, 1.0, 0.0)));
            }
        }
        o.detail << (which == 0 ? "laplacian" : "smooth drift") << " ratios";
        for (std::size_t k = 0; k + 1 < err.size(); ++k) {
            const double ratio = err[k] / err[k + 1];
            o.require(ratio >= 3.4 && ratio <= 4.6);
            o.detail << " " << ratio;
        }
        o.detail << (which == 0 ? "; " : "");
    }
}

void c5_duality(Outcome& o)
{
    const DomainPtr dom = unit_box(1.0 / 16);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const OperatorData op = presets::random_operator(dom, seed);
        const SymmetryReport rep =
            symmetry_defect(op, {0.3, 0.5, 0.5}, {0.7, 0.5, 0.5}, 8, 8, 1e-8);
        worst = std::max(worst, rep.defect / rep.scale);
    }
    o.require(worst <= 1e-6);
    o.detail << std::setprecision(3) << "5 operators on 17^3, max defect/scale " << worst;
}

void c6_laplacian_green(Outcome& o)
{
    const double h = 1.0 / 24;
    const DomainPtr dom = centered_box(1.5, h);
    const GreenColumn col = approximate_green(presets::laplacian(dom), {0, 0, 0}, 8);
    const double pc = pointwise_constant(col, Annulus{4 * h, 0.25});
    const double target = 1.0 / (4 * kPi);
    o.require(relative(pc, target) <= 0.15);
    o.detail << std::setprecision(5) << "constant " << pc << " vs " << target << " (rel "
             << relative(pc, target) << ")";
}

void c7_scale_invariance(Outcome& o)
{
    const DomainPtr dom = unit_box(1.0 / 16);
    const OperatorData op = presets::smooth_drift(dom, 1.0, 1.0, 0.0);
    const Point pole{0.5, 0.5, 0.5};
    const int m = 4;
    const WeakNorms base = weak_norm_report(approximate_green(op, pole, m));
    o.detail << std::setprecision(3) << "base weak " << base.weak << ", grad " << base.grad_weak;
    for (double s : {0.5, 2.0}) {
        const OperatorData scaled = rescale(op, s);
        const Point p{s * pole[0], s * pole[1], s * pole[2]};
        const int ms = static_cast<int>(std::lround(m / s));
        const WeakNorms w = weak_norm_report(approximate_green(scaled, p, ms));
        const double dw = relative(w.weak, base.weak);
        const double dg = relative(w.grad_weak, base.grad_weak);
        o.require(dw <= 0.01 && dg <= 0.01);
        o.detail << "; s=" << s << ": rel change " << dw << ", " << dg;
    }
}

void c8_blowup(Outcome& o)
{
    const auto eps = radial::default_eps_sequence();
    o.detail << std::setprecision(4);
    for (double delta : {0.0, 1.0, 2.0}) {
        const radial::BlowupFit fit = radial::blowup_rate(kDim, delta, 0.1, 0.3, eps);
        if (delta == 0.0) {
            o.require(std::abs(fit.slope) <= 0.05);
        } else {
            o.require(std::abs(fit.slope - delta) <= 0.1 * std::max(1.0, delta) &&
                      fit.r_squared >= 0.98);
        }
        o.detail << "delta=" << delta << ": slope " << fit.slope << " R2 " << fit.r_squared
                 << (delta < 2.0 ? "; " : "");
    }
}

void c9_radial_residual(Outcome& o)
{
    o.detail << std::setprecision(3);
    for (double delta : {0.0, 1.0}) {
        std::vector<double> res;
        for (double h : {0.01, 0.005, 0.0025}) {
            res.push_back(radial::radial_residual(
                radial::RadialSolution::tabulate(kDim, delta, 0.1, 0.02, 0.36, h), 0.04, 0.34));
        }
        o.detail << "delta=" << delta << " exponents";
        for (std::size_t k = 0; k + 1 < res.size(); ++k) {
            const double rate = std::log2(res[k] / res[k + 1]);
            o.require(std::abs(rate - 2.0) <= 0.3);
            o.detail << " " << rate;
        }
        o.detail << (delta == 0.0 ? "; " : "");
    }
}

void c10_max_principle(Outcome& o)
{
    const DomainPtr dom = unit_box(1.0 / 16);
    double worst = -std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        const OperatorData op = presets::random_operator(dom, 1000 + k);
        const double margin = check_divergence_condition(op.b, op.d);
        min_margin = std::min(min_margin, margin);
        std::mt19937_64 rng(7000 + k);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::array<double, 6> a{};
        for (double& x : a) {
            x = u(rng);
        }
        RightSide rs;
        rs.boundary = sample(
            [a](const Point& x) {
                return a[0] * std::sin(3 * x[0] + a[1]) + a[2] * std::cos(2 * x[1] - a[3] * x[2]) +
                       a[4] * x[0] * x[1] + a[5];
            },
            dom);
        const SolveReport rep = solve_dirichlet(op, rs, 1e-10);
        double interior = -std::numeric_limits<double>::infinity(), boundary = 0.0;
        for (std::size_t i = 0; i < dom->node_count(); ++i) {
            if (dom->is_interior(i)) {
                interior = std::max(interior, rep.solution[i]);
            } else {
                boundary = std::max(boundary, (*rs.boundary)[i]);
            }
        }
        worst = std::max(worst, (interior - boundary) / rs.boundary->max_abs());
    }
    o.require(min_margin >= 0.0 && worst <= 1e-6);
    o.detail << std::setprecision(3) << "20 operators, min margin " << min_margin
             << ", max (sup u - sup bd+)/scale " << worst;
}

void c11_constants(Outcome& o)
{
    ExperimentSpec torsion;
    torsion.name = "torsion";
    torsion.domain = [](double h) {
        return std::make_shared<const Domain>(Domain::ball({0, 0, 0}, 1.0, h));
    };
    torsion.op = [](const DomainPtr& d) { return presets::laplacian(d); };
    torsion.g = [](const Point&) { return 1.0; };
    torsion.ladder = {1.0 / 24};
    const double golden = 1.0 / (9.0 * std::pow(4.0 * kPi / 3.0, 2.0 / 3.0));
    const double c = global_bound_constant(torsion).constant.front();
    o.require(relative(c, golden) <= 0.05);
    o.detail << std::setprecision(4) << "torsion " << c << " vs " << golden;

    struct Drift {
        double beta, gamma, d0;
    };
    for (const Drift& dr : {Drift{1, 1, 0}, Drift{2, 0.5, 0}, Drift{0.5, 2, 0.5}}) {
        ExperimentSpec s;
        s.name = "smooth drift";
        s.domain = unit_box;
        s.op = [dr](const DomainPtr& d) { return presets::smooth_drift(d, dr.beta, dr.gamma, dr.d0); };
        s.g = [](const Point&) { return 1.0; };
        s.f = [](const Point& x) { return Vec3{std::sin(kPi * x[1]), 0.5, std::cos(kPi * x[0])}; };
        s.ladder = {1.0 / 8, 1.0 / 12, 1.0 / 16};
        s.ball = {{0.5, 0.5, 0.5}, 0.3};
        const ConstantTrace g = global_bound_constant(s);
        const ConstantTrace m = moser_constant(s);
        o.require(g.verdict == Verdict::stable && m.verdict == Verdict::stable);
        o.detail << "; (" << dr.beta << "," << dr.gamma << "," << dr.d0 << ") global "
                 << to_string(g.verdict) << " spread " << g.spread << ", moser "
                 << to_string(m.verdict) << " spread " << m.spread;
    }
}

void c12_discriminator(Outcome& o)
{
    const double half = 0.625;
    o.detail << std::setprecision(4);
    for (double delta : {0.0, 1.0}) {
        std::vector<double> pc;
        for (int m : {4, 8, 16}) {
            const DomainPtr dom = centered_box(half, 1.0 / (2 * m));
            const OperatorData op = presets::counterexample(dom, delta, m, {0, 0, 0});
            const GreenColumn col = approximate_green(op, {0, 0, 0}, m, Side::adjoint);
            pc.push_back(pointwise_constant(col, Annulus{0.5, half}));
        }
        o.detail << "delta=" << delta << ":";
        for (double v : pc) {
            o.detail << " " << v;
        }
        if (delta == 0.0) {
            const auto [lo, hi] = std::minmax_element(pc.begin(), pc.end());
            o.require(*hi / *lo - 1.0 <= 0.10);
            o.detail << " (variation " << *hi / *lo - 1.0 << "); ";
        } else {
            o.detail << " (steps";
            for (std::size_t k = 0; k + 1 < pc.size(); ++k) {
                o.require(pc[k + 1] >= 1.25 * pc[k]);
                o.detail << " +" << pc[k + 1] / pc[k] - 1.0;
            }
            o.detail << ")";
        }
    }
}

struct Entry {
    const char* title;
    double time_limit;
    void (*check)(Outcome&);
};

const Entry kEntries[kCriterionCount] = {
    {"rearrangement oracle equivalence", 10.0, c1_rearrangement},
    {"Lorentz golden values", 0.0, c2_lorentz_golden},
    {"radial drift norms and q=1 divergence", 5.0, c3_radial_norms},
    {"second-order solver convergence", 60.0, c4_convergence},
    {"discrete Green duality", 0.0, c5_duality},
    {"Laplacian Green pointwise constant", 120.0, c6_laplacian_green},
    {"scale invariance of weak norms", 0.0, c7_scale_invariance},
    {"counterexample blow-up rate", 30.0, c8_blowup},
    {"radial residual decay", 0.0, c9_radial_residual},
    {"maximum principle corpus", 0.0, c10_max_principle},
    {"constant stability and torsion value", 0.0, c11_constants},
    {"drift-integrability discriminator", 0.0, c12_discriminator},
};

}  // namespace

Result run(int id)
{
    if (id < 1 || id > kCriterionCount) {
        throw std::out_of_range("acceptance: no criterion " + std::to_string(id));
    }
    const Entry& e = kEntries[id - 1];
    Result r;
    r.id = id;
    r.title = e.title;
    r.time_limit = e.time_limit;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        e.check(o);
        r.passed = o.passed;
        r.detail = o.detail.str();
    } catch (const std::exception& ex) {
        r.passed = false;
        r.detail = o.detail.str() + " error: " + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
        r.passed = false;
        std::ostringstream os;
        os << " (time limit " << r.time_limit << " s exceeded)";
        r.detail += os.str();
    }
    return r;
}

std::vector<Result> run_all(const std::vector<int>& ids,
                            const std::function<void(const Result&)>& on_result)
{
    std::vector<int> todo = ids;
    if (todo.empty()) {
        for (int i = 1; i <= kCriterionCount; ++i) {
            todo.push_back(i);
        }
    }
    std::vector<Result> out;
    for (int id : todo) {
        out.push_back(run(id));
        if (on_result) {
            on_result(out.back());
        }
    }
    return out;
}

std::string format(const Result& r)
{
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << std::setfill('0') << r.id
       << std::setfill(' ') << ' ' << r.title << " (" << std::fixed << std::setprecision(2)
       << r.seconds << " s): " << r.detail;
    return os.str();
}

}  // namespace glab::acceptance
