#include "glab/runner.hpp"

#include "glab/acceptance.hpp"
#include "glab/green.hpp"
#include "glab/io.hpp"
#include "glab/presets.hpp"
#include "glab/principles.hpp"
#include "glab/radial.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace glab {

namespace {

using nlohmann::ordered_json;

ordered_json point_json(const Point& p)
{
    return ordered_json::array({io::number(p[0]), io::number(p[1]), io::number(p[2])});
}

WeightedSamples load_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"lorentz.samples: cannot open " + path});
    }
    return io::read_samples_csv(in);
}

RunOutcome run_lorentz(const RunConfig& cfg)
{
    const LorentzSpec& l = cfg.lorentz;
    const LorentzIndex idx = l.weak ? LorentzIndex::weak(l.p) : LorentzIndex::finite(l.p, l.q);
    RunOutcome out;
    out.report["p"] = l.p;
    out.report["q"] = l.weak ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(l.q);
    if (!l.radial.empty()) {
        const RadialFunction g = radial::counterexample_drift(l.n, l.delta).as_function();
        const NormValue v = lorentz_norm_radial(g, idx, l.n);
        out.report["radial"] = l.radial;
        out.report["n"] = l.n;
        out.report["delta"] = l.delta;
        out.report["norm"] = io::to_json(v);
        return out;
    }
    const WeightedSamples f = load_samples(l.samples);
    out.report["samples"] = f.size();
    out.report["total_measure"] = io::number(f.total_measure());
    out.report["norm"] = io::to_json(lorentz_norm(f, idx));
    out.report["norm_by_distribution"] = io::to_json(lorentz_norm_distribution(f, idx));
    return out;
}

RunOutcome run_rearrange(const RunConfig& cfg)
{
    const WeightedSamples f = load_samples(cfg.lorentz.samples);
    const StepFunction star = decreasing_rearrangement(f);
    std::ostringstream csv;
    csv << "s_lo,s_hi,value\n";
    for (std::size_t i = 0; i < star.intervals(); ++i) {
        csv << io::format_double(star.breakpoints()[i]) << ','
            << io::format_double(star.breakpoints()[i + 1]) << ','
            << io::format_double(star.values()[i]) << '\n';
    }
    RunOutcome out;
    out.report["samples"] = f.size();
    out.report["intervals"] = star.intervals();
    out.report["total_measure"] = io::number(f.total_measure());
    out.artifacts.push_back({"rearrangement.csv", csv.str()});
    return out;
}

RunOutcome run_counterexample(const RunConfig& cfg)
{
    const CounterexampleSpec& c = cfg.counterexample;
    const std::vector<double> eps = c.eps.empty() ? radial::default_eps_sequence() : c.eps;
    const radial::BlowupFit fit = radial::blowup_rate(c.n, c.delta, c.inner, c.outer, eps);
    std::ostringstream csv;
    csv << "eps,m,slope\n";
    for (std::size_t k = 0; k < fit.eps.size(); ++k) {
        csv << io::format_double(fit.eps[k]) << ',' << io::format_double(fit.ratio[k]) << ','
            << io::format_double(fit.slope) << '\n';
    }
    RunOutcome out;
    out.report["n"] = c.n;
    out.report["delta"] = c.delta;
    out.report["fit"] = io::to_json(fit);
    out.artifacts.push_back({"blowup.csv", csv.str()});
    out.exit_code = fit.accepted ? kExitOk : kExitVerdict;
    return out;
}

std::string field_csv(const GridField& f)
{
    std::ostringstream os;
    io::write_field_csv(os, f);
    return os.str();
}

std::string field_binary(const GridField& f)
{
    std::ostringstream os(std::ios::binary);
    io::write_field_binary(os, f);
    return os.str();
}

RunOutcome run_solve(const RunConfig& cfg)
{
    const DomainPtr dom = build_domain(cfg, cfg.grid.front());
    const OperatorData op = build_operator(cfg, dom);
    RightSide rs;
    const bool manufactured = cfg.solve_rhs == "manufactured" && dom->kind() == DomainKind::box &&
                              (cfg.op.preset == "laplacian" || cfg.op.preset == "smooth-drift");
    if (manufactured) {
        const double beta = cfg.op.preset == "laplacian" ? 0.0 : cfg.op.beta;
        const double gamma = cfg.op.preset == "laplacian" ? 0.0 : cfg.op.gamma;
        const double d0 = cfg.op.preset == "laplacian" ? 0.0 : cfg.op.d0;
        rs.g = sample(presets::smooth_drift_manufactured_rhs(beta, gamma, d0), dom);
        rs.boundary = sample(presets::product_sine(), dom);
    } else {
        rs.g = GridField(dom, 1.0);
    }
    const SolveReport rep = solve_dirichlet(op, rs, cfg.tol);
    RunOutcome out;
    out.report["nodes"] = dom->node_count();
    out.report["unknowns"] = dom->interior_count();
    out.report["h"] = io::number(dom->h());
    out.report["rhs"] = manufactured ? "manufactured" : "one";
    out.report["solve"] = io::to_json(rep);
    if (manufactured) {
        const GridField exact = sample(presets::product_sine(), dom);
        const auto w = dom->node_weights();
        double e = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i) {
            e += (exact[i] - rep.solution[i]) * (exact[i] - rep.solution[i]) * w[i];
        }
        out.report["l2_error"] = io::number(std::sqrt(e));
    }
    out.artifacts.push_back({"solution.csv", field_csv(rep.solution)});
    out.artifacts.push_back({"solution.bin", field_binary(rep.solution)});
    if (cfg.export_matrix) {
        std::ostringstream mtx;
        io::write_matrix_market(mtx, assemble(op, rs).matrix);
        out.artifacts.push_back({"matrix.mtx", mtx.str()});
    }
    out.exit_code = rep.stagnated ? kExitVerdict : kExitOk;
    return out;
}

BoundReport bound_report(const OperatorData& op, const GreenColumn& col, double tol)
{
    const Domain& dom = *op.domain;
    BoundReport b;
    const WeakNorms w = weak_norm_report(col);
    b.weak_state = w.weak;
    b.grad_weak = w.grad_weak;
    b.pointwise_const = pointwise_constant(col);
    for (double k : {4.0, 6.0, 8.0}) {
        const double r = k / col.m;
        b.annulus_radii.push_back(r);
        b.annulus_consts.push_back(annulus_energy(col, r));
    }
    const Point x{col.pole[0] + 4.0 / col.m, col.pole[1], col.pole[2]};
    if (dom.signed_distance(x) >= 2.0 / col.m) {
        b.symmetry_defect = symmetry_defect(op, x, col.pole, col.m, col.m, tol).defect;
    } else {
        b.symmetry_defect = std::numeric_limits<double>::quiet_NaN();
    }
    return b;
}

RunOutcome run_green(const RunConfig& cfg)
{
    const DomainPtr dom = build_domain(cfg, cfg.grid.front());
    const OperatorData op = build_operator(cfg, dom);
    const std::vector<Point> poles = resolve_poles(cfg, *dom);
    const GreenSolver solver(op, Side::forward, cfg.tol);
    const std::vector<GreenColumn> cols = solver.columns(poles, cfg.m);
    RunOutcome out;
    out.report["h"] = io::number(dom->h());
    out.report["m"] = cfg.m;
    out.report["reference_constant"] = io::number(1.0 / (4.0 * std::numbers::pi));
    auto list = ordered_json::array();
    bool stagnated = false;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        ordered_json entry;
        entry["pole"] = point_json(cols[i].pole);
        entry["bound_report"] = io::to_json(bound_report(op, cols[i], cfg.tol));
        entry["solve"] = io::to_json(cols[i].report);
        list.push_back(entry);
        stagnated = stagnated || cols[i].report.stagnated;
        out.artifacts.push_back({"green_" + std::to_string(i) + ".csv", field_csv(cols[i].field)});
    }
    out.report["columns"] = list;
    out.exit_code = stagnated ? kExitVerdict : kExitOk;
    return out;
}

ExperimentSpec experiment_spec(const RunConfig& cfg)
{
    ExperimentSpec s;
    s.name = cfg.principles.experiment;
    s.domain = [cfg](double h) { return build_domain(cfg, static_cast<int>(std::lround(1.0 / h))); };
    s.op = [cfg](const DomainPtr& d) { return build_operator(cfg, d); };
    const std::string& rhs = cfg.principles.rhs;
    if (rhs == "torsion" || rhs == "smooth") {
        s.g = [](const Point&) { return 1.0; };
    }
    if (rhs == "smooth") {
        s.f = [](const Point& x) {
            return Vec3{std::sin(std::numbers::pi * x[1]), 0.5, std::cos(std::numbers::pi * x[0])};
        };
    }
    if (rhs == "boundary") {
        s.boundary = [](const Point& x) { return 1.0 + x[0]; };
    }
    s.ball = resolve_ball(cfg);
    for (int n : cfg.grid) {
        s.ladder.push_back(1.0 / n);
    }
    s.tol = cfg.tol;
    return s;
}

RunOutcome run_principles(const RunConfig& cfg)
{
    const ExperimentSpec spec = experiment_spec(cfg);
    const std::string& e = cfg.principles.experiment;
    ConstantTrace t;
    if (e == "global") {
        t = global_bound_constant(spec);
    } else if (e == "max-principle") {
        t = inhomogeneous_max_principle(spec);
    } else if (e == "moser") {
        t = moser_constant(spec);
    } else if (e == "moser-radius") {
        t = moser_radius_ladder(spec, spec.ladder.back(), cfg.principles.radii);
    } else {
        t = sup_by_integral(spec);
    }
    std::ostringstream csv;
    io::write_trace_csv(csv, t);
    RunOutcome out;
    out.report["experiment"] = e;
    out.report["expect"] = cfg.principles.expect;
    out.report["trace"] = io::to_json(t);
    out.artifacts.push_back({"trace.csv", csv.str()});
    const std::string& expect = cfg.principles.expect;
    out.exit_code = expect == "any" || expect == to_string(t.verdict) ? kExitOk : kExitVerdict;
    return out;
}

RunOutcome run_suite(const RunConfig& cfg, std::ostream* progress)
{
    RunOutcome out;
    auto list = ordered_json::array();
    bool all = true;
    acceptance::run_all(cfg.criteria, [&](const acceptance::Result& r) {
        if (progress) {
            *progress << acceptance::format(r) << std::endl;
        }
        ordered_json j;
        j["id"] = r.id;
        j["title"] = r.title;
        j["passed"] = r.passed;
        j["seconds"] = io::number(r.seconds);
        j["detail"] = r.detail;
        list.push_back(j);
        all = all && r.passed;
    });
    out.report["criteria"] = list;
    out.report["all_passed"] = all;
    out.exit_code = all ? kExitOk : kExitVerdict;
    return out;
}

}  // namespace

int apply_thread_setting(int requested)
{
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv("GLAB_NUM_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads > 0) {
        kernels::set_thread_count(threads);
    }
    return kernels::thread_count();
}

RunOutcome execute(const RunConfig& cfg, std::ostream* progress)
{
    RunOutcome out;
    const std::string& s = cfg.subcommand;
    if (s == "lorentz") {
        out = run_lorentz(cfg);
    } else if (s == "rearrange") {
        out = run_rearrange(cfg);
    } else if (s == "counterexample") {
        out = run_counterexample(cfg);
    } else if (s == "solve") {
        out = run_solve(cfg);
    } else if (s == "green") {
        out = run_green(cfg);
    } else if (s == "principles") {
        out = run_principles(cfg);
    } else if (s == "suite") {
        out = run_suite(cfg, progress);
    } else {
        throw ConfigError({"subcommand: unknown '" + s + "'"});
    }
    ordered_json report;
    report["subcommand"] = s;
    report["exit_code"] = out.exit_code;
    for (auto& [k, v] : out.report.items()) {
        report[k] = v;
    }
    out.report = std::move(report);
    return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    RunOutcome result;
    try {
        validate(cfg);
        apply_thread_setting(cfg.threads);
        result = execute(cfg, &err);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    }
    out << io::dump_json(result.report) << '\n';
    if (!cfg.output.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output);
        for (const Artifact& a : result.artifacts) {
            std::ofstream f(fs::path(cfg.output) / a.name, std::ios::binary);
            f << a.content;
        }
        std::ofstream f(fs::path(cfg.output) / "report.json");
        f << io::dump_json(result.report) << '\n';
    }
    return result.exit_code;
}

}  // namespace glab
