#pragma once

// Scenario configuration. The file is YAML; see docs/config_schema.md.
// Everything is validated at load time and errors carry the line number.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqrtsg/expr.hpp"
#include "sqrtsg/operators.hpp"
#include "sqrtsg/rates.hpp"
#include "sqrtsg/second_order.hpp"
#include "sqrtsg/verification.hpp"

namespace sqrtsg {

struct SolverConfig {
    double T = 30.0;
    double h = 0.01;
    double margin = 3.0;
    SecondOrderOptions options;
};

struct RateDataConfig {
    double M = 1.0;
    std::optional<double> b;
    std::optional<double> D;
    std::optional<Nat> B;  // derived from the sampled orbit when absent
    std::optional<ProjectionModulus> omega;
    std::optional<Counterfunction> witness;  // uniform f_s
};

struct AccretivityCheckConfig {
    std::size_t samples = 2000;
    double radius = 2.0;
};

struct ChecksConfig {
    std::optional<AccretivityCheckConfig> accretivity;
    bool apriori = false;
    bool fejer = false;
    std::optional<ModulusCheckSpec> modulus;
};

struct SweepConfig {
    Theorem theorem = Theorem::Orbit;
    std::vector<Nat> ks;
    std::vector<Counterfunction> fs;  // empty: theorem default
    int line = 0;
};

struct ScenarioConfig {
    std::string id;
    SpaceContext space = SpaceContext::hilbert(1);
    OperatorPtr op;
    std::string operator_desc;
    std::vector<Vector> points;
    SolverConfig solver;
    std::optional<ConvergenceModulus> modulus;
    RateDataConfig rate;
    std::vector<AlmostOrbitSpec> almost_orbits;
    ChecksConfig checks;
    std::vector<SweepConfig> sweeps;
    int line = 0;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::shared_ptr<FunctionTable> functions;
    std::vector<ScenarioConfig> scenarios;
    std::string source;
};

/// Throws ConfigError (with line) on any schema or cross-field violation.
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>",
                       std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace sqrtsg
