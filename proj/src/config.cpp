#include "glab/config.hpp"

#include "glab/presets.hpp"
#include "glab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace glab {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& errors)
{
    std::string s = "invalid configuration:";
    for (const auto& e : errors) {
        s += "\n  " + e;
    }
    return s;
}

// Reads typed fields from one JSON object, remembering every problem.
class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors)
    {
        if (!obj_.is_object()) {
            fail("", "must be an object");
        }
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }

    void number(const char* key, double& out)
    {
        if (const json* v = get(key)) {
            if (v->is_number()) {
                out = v->get<double>();
            } else {
                fail(key, "must be a number");
            }
        }
    }

    template <class Int>
    void integer(const char* key, Int& out)
    {
        if (const json* v = get(key)) {
            if (v->is_number_integer()) {
                out = v->get<Int>();
            } else {
                fail(key, "must be an integer");
            }
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (const json* v = get(key)) {
            if (v->is_boolean()) {
                out = v->get<bool>();
            } else {
                fail(key, "must be true or false");
            }
        }
    }

    void text(const char* key, std::string& out, std::initializer_list<const char*> allowed = {})
    {
        const json* v = get(key);
        if (!v) {
            return;
        }
        if (!v->is_string()) {
            fail(key, "must be a string");
            return;
        }
        out = v->get<std::string>();
        if (allowed.size() && std::none_of(allowed.begin(), allowed.end(),
                                           [&](const char* a) { return out == a; })) {
            std::string msg = "must be one of";
            for (const char* a : allowed) {
                msg += std::string(" ") + a;
            }
            fail(key, msg);
        }
    }

    void point(const char* key, Point& out)
    {
        if (const json* v = get(key)) {
            if (!read_point(*v, out)) {
                fail(key, "must be an array of 3 numbers");
            }
        }
    }

    void numbers(const char* key, std::vector<double>& out)
    {
        if (const json* v = get(key)) {
            out.clear();
            if (v->is_number()) {
                out.push_back(v->get<double>());
                return;
            }
            if (!v->is_array() || !std::all_of(v->begin(), v->end(),
                                               [](const json& x) { return x.is_number(); })) {
                fail(key, "must be a number or an array of numbers");
                return;
            }
            for (const json& x : *v) {
                out.push_back(x.get<double>());
            }
        }
    }

    void integers(const char* key, std::vector<int>& out)
    {
        if (const json* v = get(key)) {
            out.clear();
            if (v->is_number_integer()) {
                out.push_back(v->get<int>());
                return;
            }
            if (!v->is_array() || !std::all_of(v->begin(), v->end(),
                                               [](const json& x) { return x.is_number_integer(); })) {
                fail(key, "must be an integer or an array of integers");
                return;
            }
            for (const json& x : *v) {
                out.push_back(x.get<int>());
            }
        }
    }

    Reader child(const char* key)
    {
        static const json empty = json::object();
        const json* v = get(key);
        return Reader(v ? *v : empty, path_ + key + ".", errors_);
    }

    const json* get(const char* key)
    {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null()) {
            return nullptr;
        }
        return &obj_.at(key);
    }

    void fail(const std::string& key, const std::string& msg)
    {
        errors_.push_back(path_ + key + ": " + msg);
    }

    /// Flags keys that nothing asked for.
    void finish()
    {
        if (!obj_.is_object()) {
            return;
        }
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) {
                fail(k, "unknown key");
            }
        }
    }

    static bool read_point(const json& v, Point& out)
    {
        if (!v.is_array() || v.size() != 3 ||
            !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
            return false;
        }
        for (int d = 0; d < 3; ++d) {
            out[d] = v[d].get<double>();
        }
        return true;
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors))
{
}

RunConfig parse_config(const nlohmann::json& doc)
{
    std::vector<std::string> errors;
    RunConfig cfg;
    Reader top(doc, "", errors);
    if (!top.has("subcommand")) {
        errors.emplace_back("subcommand: required");
    }
    top.text("subcommand", cfg.subcommand, {"lorentz", "rearrange", "counterexample", "solve",
                                            "green", "principles", "suite"});

    if (cfg.subcommand == "green") {
        cfg.domain.lo = {-1.5, -1.5, -1.5};
        cfg.domain.hi = {1.5, 1.5, 1.5};
        cfg.domain.center = {0, 0, 0};
    }

    {
        Reader r = top.child("operator");
        r.text("preset", cfg.op.preset, {"laplacian", "smooth-drift", "counterexample", "random"});
        r.number("beta", cfg.op.beta);
        r.number("gamma", cfg.op.gamma);
        r.number("d0", cfg.op.d0);
        r.number("delta", cfg.op.delta);
        r.number("j", cfg.op.j);
        r.number("drift", cfg.op.drift);
        r.integer("seed", cfg.op.seed);
        r.finish();
    }
    {
        Reader r = top.child("domain");
        r.text("kind", cfg.domain.kind, {"box", "ball", "annulus", "box-minus-ball"});
        r.point("lo", cfg.domain.lo);
        r.point("hi", cfg.domain.hi);
        const bool center_given = r.has("center");
        r.point("center", cfg.domain.center);
        if (!center_given && cfg.domain.kind == "box") {
            for (int d = 0; d < 3; ++d) {
                cfg.domain.center[d] = 0.5 * (cfg.domain.lo[d] + cfg.domain.hi[d]);
            }
        }
        r.number("radius", cfg.domain.radius);
        r.number("inner", cfg.domain.inner);
        r.finish();
    }

    top.integers("grid", cfg.grid);
    if (const json* p = top.get("poles")) {
        if (p->is_string() && p->get<std::string>() == "center") {
            cfg.pole_center = true;
        } else if (p->is_array()) {
            cfg.pole_center = false;
            for (const json& x : *p) {
                Point pt{};
                if (!Reader::read_point(x, pt)) {
                    errors.emplace_back("poles: each pole must be an array of 3 numbers");
                    break;
                }
                cfg.poles.push_back(pt);
            }
        } else {
            errors.emplace_back("poles: must be \"center\" or a list of points");
        }
    }
    top.integer("m", cfg.m);
    top.number("tol", cfg.tol);
    top.integer("seed", cfg.seed);
    top.integer("threads", cfg.threads);
    top.text("output", cfg.output);
    top.text("rhs", cfg.solve_rhs, {"manufactured", "one"});
    top.boolean("export_matrix", cfg.export_matrix);
    top.integers("criteria", cfg.criteria);

    {
        Reader r = top.child("lorentz");
        r.text("radial", cfg.lorentz.radial, {"", "counterexample"});
        r.text("samples", cfg.lorentz.samples);
        r.number("p", cfg.lorentz.p);
        if (const json* q = r.get("q")) {
            if (q->is_string() && (q->get<std::string>() == "inf" || q->get<std::string>() == "weak")) {
                cfg.lorentz.weak = true;
            } else if (q->is_number()) {
                cfg.lorentz.q = q->get<double>();
            } else {
                r.fail("q", "must be a number or \"inf\"");
            }
        }
        r.boolean("weak", cfg.lorentz.weak);
        r.number("delta", cfg.lorentz.delta);
        r.integer("n", cfg.lorentz.n);
        r.finish();
    }
    {
        Reader r = top.child("counterexample");
        r.number("delta", cfg.counterexample.delta);
        r.integer("n", cfg.counterexample.n);
        r.number("inner", cfg.counterexample.inner);
        r.number("outer", cfg.counterexample.outer);
        r.numbers("eps", cfg.counterexample.eps);
        r.finish();
    }
    {
        Reader r = top.child("principles");
        r.text("experiment", cfg.principles.experiment,
               {"global", "max-principle", "moser", "moser-radius", "sup-by-integral"});
        r.text("expect", cfg.principles.expect, {"stable", "growing", "any"});
        r.text("rhs", cfg.principles.rhs, {"torsion", "smooth", "boundary"});
        Reader b = r.child("ball");
        b.point("center", cfg.principles.ball.center);
        b.number("radius", cfg.principles.ball.radius);
        b.finish();
        r.numbers("radii", cfg.principles.radii);
        r.finish();
    }
    top.finish();

    // defaults that depend on the subcommand
    if (cfg.grid.empty()) {
        if (cfg.subcommand == "principles") {
            cfg.grid = {8, 12, 16};
        } else {
            cfg.grid = {16};
        }
    }

    // static checks
    for (int n : cfg.grid) {
        if (n < 2) {
            errors.emplace_back("grid: cells per unit length must be >= 2");
            break;
        }
    }
    if (cfg.grid.size() > 1 && cfg.subcommand != "principles") {
        errors.emplace_back("grid: a ladder is only meaningful for principles");
    }
    if (cfg.subcommand == "principles" && cfg.principles.experiment != "moser-radius" &&
        cfg.grid.size() < 2) {
        errors.emplace_back("grid: principles needs a ladder of at least two rungs");
    }
    if (cfg.m < 1) {
        errors.emplace_back("m: must be positive");
    }
    if (!(cfg.tol > 1e-14 && cfg.tol < 1e-4)) {
        errors.emplace_back("tol: must lie in (1e-14, 1e-4)");
    }
    if (cfg.threads < 0) {
        errors.emplace_back("threads: must be >= 0");
    }
    if (cfg.op.j < 0.0) {
        errors.emplace_back("operator.j: must be >= 0");
    }
    if (cfg.op.delta < 0.0) {
        errors.emplace_back("operator.delta: must be >= 0");
    }
    if (cfg.domain.kind != "box" && !(cfg.domain.radius > 0.0)) {
        errors.emplace_back("domain.radius: must be positive");
    }
    if ((cfg.domain.kind == "annulus" || cfg.domain.kind == "box-minus-ball") &&
        !(cfg.domain.inner > 0.0)) {
        errors.emplace_back("domain.inner: must be positive");
    }
    if (cfg.domain.kind == "annulus" && !(cfg.domain.inner < cfg.domain.radius)) {
        errors.emplace_back("domain.inner: must be below domain.radius");
    }
    for (int d = 0; d < 3; ++d) {
        if ((cfg.domain.kind == "box" || cfg.domain.kind == "box-minus-ball") &&
            !(cfg.domain.hi[d] > cfg.domain.lo[d])) {
            errors.emplace_back("domain.hi: must exceed domain.lo on every axis");
            break;
        }
    }
    if (cfg.subcommand == "lorentz") {
        if (cfg.lorentz.radial.empty() && cfg.lorentz.samples.empty()) {
            errors.emplace_back("lorentz: give lorentz.radial or lorentz.samples");
        }
        if (!(cfg.lorentz.p > 0.0)) {
            errors.emplace_back("lorentz.p: must be positive");
        }
        if (!cfg.lorentz.weak && !(cfg.lorentz.q > 0.0)) {
            errors.emplace_back("lorentz.q: must be positive");
        }
        if (cfg.lorentz.n < 3) {
            errors.emplace_back("lorentz.n: must be >= 3");
        }
    }
    if (cfg.subcommand == "rearrange" && cfg.lorentz.samples.empty()) {
        errors.emplace_back("lorentz.samples: rearrange needs a samples CSV");
    }
    if (cfg.subcommand == "counterexample") {
        const auto& c = cfg.counterexample;
        if (!(c.inner > 0.0 && c.inner < c.outer && c.outer < radial::kOuterRadius)) {
            errors.emplace_back("counterexample.inner/outer: need 0 < inner < outer < 1/e");
        }
        if (!c.eps.empty() && c.eps.size() < 3) {
            errors.emplace_back("counterexample.eps: need at least three values");
        }
        for (double e : c.eps) {
            if (!(e > 0.0 && e < c.inner)) {
                errors.emplace_back("counterexample.eps: every value must lie in (0, inner)");
                break;
            }
        }
        if (c.n < 3) {
            errors.emplace_back("counterexample.n: must be >= 3");
        }
    }
    if (cfg.subcommand == "principles" && cfg.principles.experiment == "moser-radius" &&
        cfg.principles.radii.empty()) {
        errors.emplace_back("principles.radii: moser-radius needs radii");
    }
    for (int c : cfg.criteria) {
        if (c < 1 || c > 12) {
            errors.emplace_back("criteria: ids run from 1 to 12");
            break;
        }
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"config: cannot open " + path});
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("config: ") + e.what()});
    }
    return parse_config(doc);
}

DomainPtr build_domain(const RunConfig& cfg, int cells_per_unit)
{
    const double h = 1.0 / cells_per_unit;
    const DomainSpec& d = cfg.domain;
    if (d.kind == "ball") {
        return std::make_shared<const Domain>(Domain::ball(d.center, d.radius, h));
    }
    if (d.kind == "annulus") {
        return std::make_shared<const Domain>(Domain::annulus(d.center, d.inner, d.radius, h));
    }
    if (d.kind == "box-minus-ball") {
        return std::make_shared<const Domain>(Domain::box_minus_ball(d.lo, d.hi, d.center, d.inner, h));
    }
    return std::make_shared<const Domain>(Domain::box(d.lo, d.hi, h));
}

OperatorData build_operator(const RunConfig& cfg, const DomainPtr& dom)
{
    const OperatorSpec& o = cfg.op;
    if (o.preset == "smooth-drift") {
        return presets::smooth_drift(dom, o.beta, o.gamma, o.d0);
    }
    if (o.preset == "counterexample") {
        const double j = o.j > 0.0 ? o.j : cfg.m;
        return presets::counterexample(dom, o.delta, j, cfg.domain.center);
    }
    if (o.preset == "random") {
        return presets::random_operator(dom, o.seed, o.drift);
    }
    return presets::laplacian(dom);
}

std::vector<Point> resolve_poles(const RunConfig& cfg, const Domain&)
{
    if (cfg.pole_center) {
        return {cfg.domain.center};
    }
    return cfg.poles;
}

Ball resolve_ball(const RunConfig& cfg)
{
    Ball b = cfg.principles.ball;
    if (b.radius > 0.0) {
        return b;
    }
    b.center = cfg.domain.center;
    if (cfg.domain.kind == "box") {
        double side = std::numeric_limits<double>::infinity();
        for (int d = 0; d < 3; ++d) {
            side = std::min(side, cfg.domain.hi[d] - cfg.domain.lo[d]);
        }
        b.radius = 0.3 * side;
    } else {
        b.radius = 0.3 * cfg.domain.radius;
    }
    return b;
}

void validate(const RunConfig& cfg)
{
    const bool needs_pde = cfg.subcommand == "solve" || cfg.subcommand == "green" ||
                           cfg.subcommand == "principles";
    if (!needs_pde) {
        return;
    }
    std::vector<std::string> errors;
    for (int n : cfg.grid) {
        const double h = 1.0 / n;
        std::ostringstream rung;
        rung << "grid " << n << ": ";
        DomainPtr dom;
        try {
            dom = build_domain(cfg, n);
        } catch (const std::exception& e) {
            errors.push_back(rung.str() + "domain: " + e.what());
            continue;
        }
        if (cfg.op.preset == "counterexample") {
            const double j = cfg.op.j > 0.0 ? cfg.op.j : cfg.m;
            if (1.0 / j < 2.0 * h * (1.0 - 1e-12)) {
                errors.push_back(rung.str() + "operator.j: mollifier radius 1/j below 2h");
            }
        }
        try {
            const OperatorData op = build_operator(cfg, dom);
            const double pe = op.peclet();
            if (pe > op.lambda) {
                std::ostringstream os;
                os << rung.str() << "Peclet gate: h |b - c|_inf = " << pe << " exceeds lambda "
                   << op.lambda;
                errors.push_back(os.str());
            }
        } catch (const std::exception& e) {
            errors.push_back(rung.str() + "operator: " + e.what());
        }
        if (cfg.subcommand == "green") {
            if (1.0 / cfg.m < 2.0 * h * (1.0 - 1e-12)) {
                errors.push_back(rung.str() + "m: 1/m below 2h");
            }
            for (const Point& p : resolve_poles(cfg, *dom)) {
                if (dom->signed_distance(p) < 2.0 / cfg.m * (1.0 - 1e-12)) {
                    errors.push_back(rung.str() + "poles: B_{2/m}(pole) leaves the domain");
                    break;
                }
            }
        }
        if (cfg.subcommand == "principles") {
            const Ball b = resolve_ball(cfg);
            double largest = b.radius;
            for (double r : cfg.principles.radii) {
                largest = std::max(largest, r);
            }
            if (dom->signed_distance(b.center) < largest) {
                errors.push_back(rung.str() + "principles.ball: ball leaves the domain");
            }
            if (cfg.principles.experiment != "max-principle" &&
                cfg.principles.experiment != "global" && b.radius < 2.0 * h) {
                errors.push_back(rung.str() + "principles.ball: radius below 2h");
            }
        }
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
}

}  // namespace glab
