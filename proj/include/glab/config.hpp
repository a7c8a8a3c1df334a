#pragma once

// Run configuration: a JSON document, also assembled from CLI flags with the
// same keys. Parsing and validation collect every problem before failing.

#include "glab/elliptic.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace glab {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct OperatorSpec {
    std::string preset = "laplacian";  // laplacian | smooth-drift | counterexample | random
    double beta = 1.0;
    double gamma = 1.0;
    double d0 = 0.0;
    double delta = 1.0;
    double j = 0.0;  // mollification index; 0: use m
    double drift = 1.0;
    std::uint64_t seed = 1;
};

struct DomainSpec {
    std::string kind = "box";  // box | ball | annulus | box-minus-ball
    Point lo{0, 0, 0};
    Point hi{1, 1, 1};
    Point center{0.5, 0.5, 0.5};
    double radius = 0.5;
    double inner = 0.1;  // annulus inner radius / hole radius
};

struct LorentzSpec {
    std::string radial;   // "counterexample" or empty
    std::string samples;  // CSV path when not radial
    double p = 3.0;
    double q = 1.0;
    bool weak = false;
    double delta = 1.0;
    int n = 3;
};

struct CounterexampleSpec {
    double delta = 1.0;
    int n = 3;
    double inner = 0.1;
    double outer = 0.3;
    std::vector<double> eps;  // empty: e^{-k}, k = 3..8
};

struct PrinciplesSpec {
    std::string experiment = "global";  // global | max-principle | moser | moser-radius | sup-by-integral
    std::string expect = "stable";      // stable | growing | any
    std::string rhs = "torsion";        // torsion | smooth | boundary
    Ball ball{};                        // radius 0: derived from the domain
    std::vector<double> radii;          // moser-radius only
};

struct RunConfig {
    std::string subcommand;
    OperatorSpec op;
    DomainSpec domain;
    std::vector<int> grid;  // cells per unit length, h = 1/N; a ladder when several
    bool pole_center = true;
    std::vector<Point> poles;
    int m = 8;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: GLAB_NUM_THREADS or the runtime default
    std::string output;  // directory for artifacts; empty: report on stdout only
    std::string solve_rhs = "manufactured";  // manufactured | one
    bool export_matrix = false;
    LorentzSpec lorentz;
    CounterexampleSpec counterexample;
    PrinciplesSpec principles;
    std::vector<int> criteria;  // suite; empty: all
};

/// Parses the document; unknown keys and type errors are all reported.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Gates that need a built rung: Peclet, resolution (1/m >= 2h, 1/j >= 2h),
/// pole and ball containment. Throws ConfigError listing every failure.
void validate(const RunConfig& cfg);

[[nodiscard]] DomainPtr build_domain(const RunConfig& cfg, int cells_per_unit);
[[nodiscard]] OperatorData build_operator(const RunConfig& cfg, const DomainPtr& dom);
[[nodiscard]] std::vector<Point> resolve_poles(const RunConfig& cfg, const Domain& dom);
[[nodiscard]] Ball resolve_ball(const RunConfig& cfg);

}  // namespace glab
