// glab: command-line front end. Every flag maps onto a key of the JSON run
// configuration, so `glab run config.json` and the flag form are equivalent.

#include "glab/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <iostream>
#include <list>
#include <memory>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// Flag values land in `doc` under a JSON pointer only when given on the command line.
class Binder {
public:
    Binder(CLI::App* app, json& doc) : app_(app), doc_(doc) {}

    template <class T>
    void value(const std::string& flag, const std::string& pointer, const std::string& help)
    {
        auto& slot = store<T>();
        CLI::Option* opt = app_->add_option(flag, slot, help);
        pending_.push_back([this, opt, pointer, &slot] {
            if (opt->count()) {
                doc_[json::json_pointer(pointer)] = slot;
            }
        });
    }

    void point(const std::string& flag, const std::string& pointer, const std::string& help)
    {
        auto& slot = store<std::vector<double>>();
        CLI::Option* opt = app_->add_option(flag, slot, help)->expected(3);
        pending_.push_back([this, opt, pointer, &slot] {
            if (opt->count()) {
                doc_[json::json_pointer(pointer)] = slot;
            }
        });
    }

    void flag(const std::string& name, const std::string& pointer, const std::string& help)
    {
        auto& slot = store<bool>();
        CLI::Option* opt = app_->add_flag(name, slot, help);
        pending_.push_back([this, opt, pointer, &slot] {
            if (opt->count()) {
                doc_[json::json_pointer(pointer)] = slot;
            }
        });
    }

    /// --q accepts a number or "inf".
    void lorentz_q()
    {
        auto& slot = store<std::string>();
        CLI::Option* opt = app_->add_option("--q", slot, "second Lorentz index, or inf");
        pending_.push_back([this, opt, &slot] {
            if (!opt->count()) {
                return;
            }
            if (slot == "inf" || slot == "weak") {
                doc_["/lorentz/q"_json_pointer] = "inf";
                return;
            }
            try {
                std::size_t used = 0;
                const double q = std::stod(slot, &used);
                doc_["/lorentz/q"_json_pointer] = used == slot.size() ? json(q) : json(slot);
            } catch (const std::exception&) {
                doc_["/lorentz/q"_json_pointer] = slot;
            }
        });
    }

    /// --pole center | --pole x y z (repeatable).
    void poles()
    {
        auto& slot = store<std::vector<std::string>>();
        CLI::Option* opt =
            app_->add_option("--pole", slot, "\"center\" or x y z; repeat for several poles");
        pending_.push_back([this, opt, &slot] {
            if (!opt->count()) {
                return;
            }
            if (slot.size() == 1 && slot.front() == "center") {
                doc_["poles"] = "center";
                return;
            }
            json list = json::array();
            json pt = json::array();
            for (const std::string& s : slot) {
                try {
                    pt.push_back(std::stod(s));
                } catch (const std::exception&) {
                    pt.push_back(s);
                }
                if (pt.size() == 3) {
                    list.push_back(pt);
                    pt = json::array();
                }
            }
            if (!pt.empty()) {
                list.push_back(pt);
            }
            doc_["poles"] = list;
        });
    }

    void commit()
    {
        for (auto& f : pending_) {
            f();
        }
    }

private:
    template <class T>
    T& store()
    {
        auto holder = std::make_shared<T>();
        keep_.push_back(holder);
        return *holder;
    }

    CLI::App* app_;
    json& doc_;
    std::vector<std::function<void()>> pending_;
    std::vector<std::shared_ptr<void>> keep_;
};

void operator_flags(Binder& b)
{
    b.value<std::string>("--preset", "/operator/preset",
                         "laplacian | smooth-drift | counterexample | random");
    b.value<double>("--beta", "/operator/beta", "smooth-drift amplitude of b");
    b.value<double>("--gamma", "/operator/gamma", "smooth-drift amplitude of c");
    b.value<double>("--d0", "/operator/d0", "zeroth-order constant");
    b.value<double>("--delta", "/operator/delta", "counterexample drift strength");
    b.value<double>("--j", "/operator/j", "mollification index (default m)");
    b.value<double>("--drift", "/operator/drift", "random operator drift amplitude");
    b.value<std::uint64_t>("--op-seed", "/operator/seed", "random operator seed");
}

void domain_flags(Binder& b)
{
    b.value<std::string>("--domain", "/domain/kind", "box | ball | annulus | box-minus-ball");
    b.point("--lo", "/domain/lo", "box lower corner");
    b.point("--hi", "/domain/hi", "box upper corner");
    b.point("--center", "/domain/center", "ball center / hole center / counterexample pole");
    b.value<double>("--radius", "/domain/radius", "ball or outer radius");
    b.value<double>("--inner", "/domain/inner", "annulus inner radius / hole radius");
    b.value<std::vector<int>>("--grid", "/grid", "cells per unit length (h = 1/N); a ladder for principles");
}

void common_flags(Binder& b)
{
    b.value<double>("--tol", "/tol", "relative residual tolerance");
    b.value<int>("--threads", "/threads", "thread count (default GLAB_NUM_THREADS)");
    b.value<std::string>("--out", "/output", "directory for artifacts");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"glab: Lorentz norms, Green's functions and maximum principles for drift operators"};
    app.require_subcommand(1);

    std::list<json> docs;
    std::list<Binder> binders;
    const auto sub = [&](const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        docs.emplace_back(json::object());
        docs.back()["subcommand"] = name;
        binders.emplace_back(s, docs.back());
        return std::pair<CLI::App*, Binder*>{s, &binders.back()};
    };

    {
        auto [s, b] = sub("lorentz", "Lorentz norm of samples or of the radial counterexample drift");
        b->value<std::string>("--radial", "/lorentz/radial", "counterexample");
        b->value<std::string>("--samples", "/lorentz/samples", "CSV with value,weight rows");
        b->value<double>("--p", "/lorentz/p", "first Lorentz index");
        b->lorentz_q();
        b->value<double>("--delta", "/lorentz/delta", "drift strength");
        b->value<int>("--n", "/lorentz/n", "dimension");
        common_flags(*b);
        (void)s;
    }
    {
        auto [s, b] = sub("rearrange", "Decreasing rearrangement of samples as CSV");
        b->value<std::string>("--samples", "/lorentz/samples", "CSV with value,weight rows");
        common_flags(*b);
        (void)s;
    }
    {
        auto [s, b] = sub("counterexample", "Blow-up fit of the explicit radial solutions");
        b->value<double>("--delta", "/counterexample/delta", "drift strength");
        b->value<int>("--n", "/counterexample/n", "dimension");
        b->value<double>("--inner", "/counterexample/inner", "annulus inner radius");
        b->value<double>("--outer", "/counterexample/outer", "annulus outer radius");
        b->value<std::vector<double>>("--eps", "/counterexample/eps", "eps sequence");
        common_flags(*b);
        (void)s;
    }
    {
        auto [s, b] = sub("solve", "Dirichlet solve on one grid");
        operator_flags(*b);
        domain_flags(*b);
        common_flags(*b);
        b->value<std::string>("--rhs", "/rhs", "manufactured | one");
        b->flag("--export-matrix", "/export_matrix", "write the assembled matrix");
        (void)s;
    }
    {
        auto [s, b] = sub("green", "Approximate Green's functions and their bound report");
        operator_flags(*b);
        domain_flags(*b);
        common_flags(*b);
        b->poles();
        b->value<int>("--m", "/m", "source ball radius 1/m");
        (void)s;
    }
    {
        auto [s, b] = sub("principles", "Empirical constants across a grid ladder");
        operator_flags(*b);
        domain_flags(*b);
        common_flags(*b);
        b->value<std::string>("--experiment", "/principles/experiment",
                              "global | max-principle | moser | moser-radius | sup-by-integral");
        b->value<std::string>("--expect", "/principles/expect", "stable | growing | any");
        b->value<std::string>("--rhs", "/principles/rhs", "torsion | smooth | boundary");
        b->point("--ball-center", "/principles/ball/center", "ball center");
        b->value<double>("--ball-radius", "/principles/ball/radius", "ball radius");
        b->value<std::vector<double>>("--radii", "/principles/radii", "radii for moser-radius");
        (void)s;
    }
    {
        auto [s, b] = sub("suite", "Run the acceptance battery");
        b->value<std::vector<int>>("--criteria", "/criteria", "criterion ids (default all)");
        common_flags(*b);
        (void)s;
    }
    std::string config_path;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a JSON configuration file");
    run_cmd->add_option("config", config_path, "configuration path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return glab::kExitValidation;
    }

    try {
        glab::RunConfig cfg;
        if (run_cmd->parsed()) {
            cfg = glab::load_config(config_path);
        } else {
            const std::string chosen = app.get_subcommands().front()->get_name();
            auto doc = docs.begin();
            auto binder = binders.begin();
            while ((*doc)["subcommand"] != chosen) {
                ++doc;
                ++binder;
            }
            binder->commit();
            cfg = glab::parse_config(*doc);
        }
        return glab::run(cfg, std::cout, std::cerr);
    } catch (const glab::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return glab::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return glab::kExitVerdict;
    }
}
