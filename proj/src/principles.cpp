#include "glab/principles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace glab {

namespace {

constexpr double kN = kDim;

struct Rung {
    DomainPtr dom;
    OperatorData op;
    std::optional<GridVectorField> f;
    std::optional<GridField> g;
    std::optional<GridField> boundary;
    GridField u;
};

Rung solve_rung(const ExperimentSpec& spec, double h)
{
    Rung r;
    r.dom = spec.domain(h);
    r.op = spec.op(r.dom);
    require_peclet(r.op);
    require_divergence_condition(r.op);
    RightSide rs;
    if (spec.f) {
        r.f = sample(spec.f, r.dom, spec.sampling);
        rs.f = r.f;
    }
    if (spec.g) {
        r.g = sample(spec.g, r.dom, spec.sampling);
        rs.g = r.g;
    }
    if (spec.boundary) {
        r.boundary = sample(spec.boundary, r.dom, spec.sampling);
        rs.boundary = r.boundary;
    }
    const SolveReport rep = solve_dirichlet(r.op, rs, spec.tol);
    if (rep.stagnated) {
        throw std::runtime_error("principles: solver stagnated on rung h = " + std::to_string(h) +
                                 " (" + rep.note + ")");
    }
    r.u = rep.solution;
    return r;
}

double data_norms(const Rung& r, std::span<const double> weights)
{
    double s = 0.0;
    if (r.f) {
        s += data_norm_f(*r.f, weights);
    }
    if (r.g) {
        s += data_norm_g(*r.g, weights);
    }
    return s;
}

double ratio_or_nan(double num, double den, std::vector<std::string>& notes, double h)
{
    if (den == 0.0) {
        std::ostringstream os;
        os << "rung " << h << ": 0/0, data and solution vanish";
        notes.push_back(os.str());
        return std::numeric_limits<double>::quiet_NaN();
    }
    return num / den;
}

double local_sup(const GridField& u, const Ball& ball)
{
    const Domain& dom = u.domain();
    double s = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (distance(dom.node(i), ball.center) <= ball.radius) {
            s = std::max(s, std::abs(u[i]));
            any = true;
        }
    }
    if (!any) {
        throw std::invalid_argument("local_sup: no node in the ball");
    }
    return s;
}

double moser_at(const Rung& r, const Ball& ball)
{
    const Ball half{ball.center, 0.5 * ball.radius};
    const double sup = local_sup(r.u, half);
    const double avg = BallQuadrature(*r.dom, ball).average_abs(r.u);
    const std::vector<double> w = node_weights_in_ball(*r.dom, ball);
    return sup / (avg + data_norms(r, w));
}

void check_ball(const ExperimentSpec& spec, const Domain& dom)
{
    if (!(spec.ball.radius > 0.0) || dom.signed_distance(spec.ball.center) < spec.ball.radius) {
        throw std::invalid_argument("principles: the ball must lie inside the domain");
    }
}

}  // namespace

void ExperimentSpec::validate() const
{
    std::vector<std::string> errors;
    if (!domain) {
        errors.emplace_back("domain builder missing");
    }
    if (!op) {
        errors.emplace_back("operator builder missing");
    }
    if (ladder.empty()) {
        errors.emplace_back("ladder is empty");
    }
    for (double h : ladder) {
        if (!(h > 0.0)) {
            errors.emplace_back("ladder spacing must be positive");
            break;
        }
    }
    if (!(tol > 1e-14) || !(tol < 1e-4)) {
        errors.emplace_back("tol must lie in (1e-14, 1e-4)");
    }
    if (!errors.empty()) {
        std::string msg = "ExperimentSpec '" + name + "':";
        for (const auto& e : errors) {
            msg += " " + e + ";";
        }
        throw std::invalid_argument(msg);
    }
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::stable:
        return "stable";
    case Verdict::growing:
        return "growing";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

ConstantTrace classify(std::vector<double> rung, std::vector<double> constant)
{
    ConstantTrace t;
    t.rung = std::move(rung);
    t.constant = std::move(constant);
    const bool usable = !t.constant.empty() &&
                        std::all_of(t.constant.begin(), t.constant.end(),
                                    [](double c) { return std::isfinite(c) && c > 0.0; });
    if (!usable) {
        t.verdict = Verdict::inconclusive;
        t.spread = std::numeric_limits<double>::quiet_NaN();
        t.notes.emplace_back("non-finite or non-positive constant on some rung");
        return t;
    }
    const auto [lo, hi] = std::minmax_element(t.constant.begin(), t.constant.end());
    t.spread = *hi / *lo;
    if (t.constant.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(t.constant.size());
        for (std::size_t i = 0; i < t.constant.size(); ++i) {
            const double x = -std::log(t.rung[i]);
            const double y = std::log(t.constant[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double den = k * sxx - sx * sx;
        t.log_slope = den != 0.0 ? (k * sxy - sx * sy) / den : 0.0;
    }
    bool increasing = true;
    for (std::size_t i = 1; i < t.constant.size(); ++i) {
        increasing = increasing && t.constant[i] > t.constant[i - 1];
    }
    if (t.spread <= 1.5) {
        t.verdict = Verdict::stable;
    } else if (increasing && t.constant.back() / t.constant.front() > 1.5) {
        t.verdict = Verdict::growing;
    } else {
        t.verdict = Verdict::inconclusive;
    }
    return t;
}

double require_divergence_condition(const OperatorData& op)
{
    const double h = op.domain->h();
    const double slack = h * h * (op.b.max_abs() + op.c.max_abs() + op.d.max_abs());
    const double mb = check_divergence_condition(op.b, op.d);
    const double mc = check_divergence_condition(op.c, op.d);
    const double best = std::max(mb, mc);
    if (best < -slack) {
        std::ostringstream os;
        os << "divergence condition fails: margin(b,d) = " << mb << ", margin(c,d) = " << mc
           << ", allowed slack " << slack;
        throw std::invalid_argument(os.str());
    }
    return best;
}

void require_peclet(const OperatorData& op)
{
    const double pe = op.peclet();
    if (pe > op.lambda) {
        std::ostringstream os;
        os << "Peclet gate: h |b - c|_inf = " << pe << " exceeds lambda = " << op.lambda;
        throw std::invalid_argument(os.str());
    }
}

double data_norm_f(const GridVectorField& f, std::span<const double> weights)
{
    return lorentz_norm(nodal_samples(f.magnitude(), weights), LorentzIndex::finite(kN, 1.0)).value;
}

double data_norm_g(const GridField& g, std::span<const double> weights)
{
    return lorentz_norm(nodal_samples(g, weights), LorentzIndex::finite(kN / 2.0, 1.0)).value;
}

ConstantTrace global_bound_constant(const ExperimentSpec& spec)
{
    spec.validate();
    ExperimentSpec zero = spec;
    zero.boundary = nullptr;
    std::vector<double> c;
    std::vector<std::string> notes;
    for (double h : spec.ladder) {
        const Rung r = solve_rung(zero, h);
        c.push_back(ratio_or_nan(r.u.max_abs(), data_norms(r, r.dom->node_weights()), notes, h));
    }
    ConstantTrace t = classify(spec.ladder, std::move(c));
    t.notes.insert(t.notes.begin(), notes.begin(), notes.end());
    return t;
}

ConstantTrace inhomogeneous_max_principle(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<double> c;
    std::vector<std::string> notes;
    for (double h : spec.ladder) {
        const Rung r = solve_rung(spec, h);
        double sup_u = -std::numeric_limits<double>::infinity();
        double sup_bd = 0.0;
        for (std::size_t i = 0; i < r.u.size(); ++i) {
            if (r.dom->is_interior(i)) {
                sup_u = std::max(sup_u, r.u[i]);
            } else if (r.boundary) {
                sup_bd = std::max(sup_bd, (*r.boundary)[i]);
            }
        }
        c.push_back(ratio_or_nan(sup_u, sup_bd + data_norms(r, r.dom->node_weights()), notes, h));
    }
    ConstantTrace t = classify(spec.ladder, std::move(c));
    t.notes.insert(t.notes.begin(), notes.begin(), notes.end());
    return t;
}

ConstantTrace moser_constant(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<double> c;
    for (double h : spec.ladder) {
        const Rung r = solve_rung(spec, h);
        check_ball(spec, *r.dom);
        c.push_back(moser_at(r, spec.ball));
    }
    return classify(spec.ladder, std::move(c));
}

ConstantTrace moser_radius_ladder(const ExperimentSpec& spec, double h,
                                  const std::vector<double>& radii)
{
    spec.validate();
    const Rung r = solve_rung(spec, h);
    std::vector<double> c;
    for (double radius : radii) {
        ExperimentSpec s = spec;
        s.ball.radius = radius;
        check_ball(s, *r.dom);
        c.push_back(moser_at(r, s.ball));
    }
    return classify(radii, std::move(c));
}

ConstantTrace sup_by_integral(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<double> c;
    for (double h : spec.ladder) {
        const Rung r = solve_rung(spec, h);
        check_ball(spec, *r.dom);
        double lowest = 0.0;
        for (double v : r.u.values()) {
            lowest = std::min(lowest, v);
        }
        if (lowest < -10.0 * spec.tol * std::max(1.0, r.u.max_abs())) {
            throw std::invalid_argument("sup_by_integral: the solution has a negative part");
        }
        const double sup = local_sup(r.u, Ball{spec.ball.center, 0.5 * spec.ball.radius});
        c.push_back(sup / BallQuadrature(*r.dom, spec.ball).average(r.u));
    }
    return classify(spec.ladder, std::move(c));
}

}  // namespace glab
