#include "sqrtsg/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

namespace {

int line_of(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.is_null() ? 0 : m.line + 1;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& ctx) {
    if (!n.IsMap()) fail(n, ctx + " must be a mapping");
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            std::string list;
            for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
            fail(kv.first, "unknown field '" + ctx + "." + key + "' (expected one of: " + list + ")");
        }
    }
}

YAML::Node require(const YAML::Node& parent, const char* key, const std::string& ctx) {
    YAML::Node n = parent[key];
    if (!n) fail(parent, "missing required field '" + ctx + "." + key + "'");
    return n;
}

template <typename T>
T as(const YAML::Node& n, const std::string& name) {
    try {
        return n.as<T>();
    } catch (const YAML::BadConversion&) {
        fail(n, "field '" + name + "' has the wrong type");
    }
}

double positive(const YAML::Node& n, const std::string& name) {
    const double v = as<double>(n, name);
    if (!(v > 0.0)) fail(n, "field '" + name + "' must be positive");
    return v;
}

Nat natural(const YAML::Node& n, const std::string& name) {
    const long long v = as<long long>(n, name);
    if (v < 0) fail(n, "field '" + name + "' must be a natural number");
    return static_cast<Nat>(v);
}

Vector vector_of(const YAML::Node& n, const std::string& name) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "field '" + name + "' must be a nonempty list of numbers");
    Vector v(static_cast<int>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v[static_cast<int>(i)] = as<double>(n[i], name);
    return v;
}

Matrix matrix_of(const YAML::Node& n, const std::string& name) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "field '" + name + "' must be a list of rows");
    const std::size_t rows = n.size();
    const std::size_t cols = n[0].IsSequence() ? n[0].size() : 0;
    if (cols == 0) fail(n, "field '" + name + "' must be a list of rows");
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!n[i].IsSequence() || n[i].size() != cols) fail(n[i], "field '" + name + "' has ragged rows");
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<int>(i), static_cast<int>(j)) = as<double>(n[i][j], name);
    }
    return m;
}

// Library preconditions surface as ContractError/DimensionError; report them at the node.
template <typename F>
auto at_node(const YAML::Node& n, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(n, e.what());
    }
}

SpaceContext parse_space(const YAML::Node& n) {
    check_keys(n, {"kind", "dim", "p", "M", "validate_radius", "validate_samples"}, "space");
    const std::string kind = as<std::string>(require(n, "kind", "space"), "space.kind");
    const long long dim = as<long long>(require(n, "dim", "space"), "space.dim");
    if (dim < 1) fail(n["dim"], "field 'space.dim' must be at least 1");
    if (kind == "hilbert") {
        if (n["p"] || n["M"]) fail(n, "hilbert space takes no p or M (M = 1)");
        return SpaceContext::hilbert(static_cast<int>(dim));
    }
    if (kind == "lp") {
        const double p = as<double>(require(n, "p", "space"), "space.p");
        const double M = as<double>(require(n, "M", "space"), "space.M");
        return at_node(n, [&] { return SpaceContext::finite_lp(static_cast<int>(dim), p, M); });
    }
    fail(n["kind"], "unknown space kind '" + kind + "' (hilbert | lp)");
}

OperatorPtr parse_operator(const YAML::Node& n, const SpaceContext& X, std::string& desc) {
    const std::string kind = as<std::string>(require(n, "kind", "operator"), "operator.kind");
    auto build = [&](auto&& make) { return at_node(n, make); };
    OperatorPtr A;
    if (kind == "scaled_identity") {
        check_keys(n, {"kind", "c"}, "operator");
        const double c = as<double>(require(n, "c", "operator"), "operator.c");
        A = build([&] { return scaled_identity(X, c); });
    } else if (kind == "zero") {
        check_keys(n, {"kind"}, "operator");
        A = zero_operator(X);
    } else if (kind == "linear_psd" || kind == "linear" || kind == "rotation") {
        check_keys(n, {"kind", "matrix"}, "operator");
        Matrix m;
        if (n["matrix"]) {
            m = matrix_of(n["matrix"], "operator.matrix");
        } else if (kind == "rotation") {
            m = Matrix(2, 2);
            m << 0, -1, 1, 0;
        } else {
            fail(n, "missing required field 'operator.matrix'");
        }
        if (kind == "linear_psd") A = build([&] { return linear_psd(X, m); });
        if (kind == "linear") A = build([&] { return linear(X, m); });
        if (kind == "rotation") A = build([&] { return rotation(X, m); });
    } else if (kind == "norm_subdifferential" || kind == "l1_subdifferential" || kind == "quartic_gradient") {
        check_keys(n, {"kind", "w"}, "operator");
        const double w = as<double>(require(n, "w", "operator"), "operator.w");
        if (kind == "norm_subdifferential") A = build([&] { return norm_subdifferential(X, w); });
        if (kind == "l1_subdifferential") A = build([&] { return l1_subdifferential(X, w); });
        if (kind == "quartic_gradient") A = build([&] { return quartic_gradient(X, w); });
    } else if (kind == "box_distance_gradient") {
        check_keys(n, {"kind", "lo", "hi"}, "operator");
        const Vector lo = vector_of(require(n, "lo", "operator"), "operator.lo");
        const Vector hi = vector_of(require(n, "hi", "operator"), "operator.hi");
        A = build([&] { return box_distance_gradient(X, lo, hi); });
    } else if (kind == "strongly_accretive") {
        check_keys(n, {"kind", "c", "base"}, "operator");
        const double c = as<double>(require(n, "c", "operator"), "operator.c");
        std::string base_desc;
        OperatorPtr base = parse_operator(require(n, "base", "operator"), X, base_desc);
        A = build([&] { return strongly_accretive(base, c); });
    } else {
        fail(n["kind"], "unknown operator kind '" + kind + "' (see list-catalog)");
    }
    desc = A->describe();
    return A;
}

SolverConfig parse_solver(const YAML::Node& n) {
    check_keys(n, {"T", "h", "margin", "stabilization_tol", "residual_tol", "max_newton", "schedule"}, "solver");
    SolverConfig s;
    s.T = positive(require(n, "T", "solver"), "solver.T");
    s.h = positive(require(n, "h", "solver"), "solver.h");
    s.margin = n["margin"] ? as<double>(n["margin"], "solver.margin") : s.T / 10.0;
    if (!(s.margin >= 0.0) || s.margin >= s.T) fail(n, "field 'solver.margin' must lie in [0, T)");
    at_node(n, [&] { return TimeGrid::make(s.T, s.h); });
    if (n["stabilization_tol"]) s.options.stabilization_tol = positive(n["stabilization_tol"], "solver.stabilization_tol");
    if (n["residual_tol"]) s.options.residual_tol = positive(n["residual_tol"], "solver.residual_tol");
    if (n["max_newton"]) s.options.max_newton = static_cast<int>(natural(n["max_newton"], "solver.max_newton"));
    if (const YAML::Node sch = n["schedule"]) {
        if (!sch.IsSequence() || sch.size() == 0) fail(sch, "field 'solver.schedule' must be a nonempty list");
        s.options.schedule.clear();
        for (const auto& step : sch) {
            check_keys(step, {"r", "p"}, "solver.schedule[]");
            s.options.schedule.push_back({positive(require(step, "r", "solver.schedule[]"), "solver.schedule.r"),
                                          positive(require(step, "p", "solver.schedule[]"), "solver.schedule.p")});
        }
    }
    return s;
}

ConvergenceModulus parse_modulus(const YAML::Node& n, const std::shared_ptr<const FunctionTable>& fns) {
    const std::string kind = as<std::string>(require(n, "kind", "modulus"), "modulus.kind");
    if (kind == "strongly_accretive") {
        check_keys(n, {"kind", "c"}, "modulus");
        const double c = as<double>(require(n, "c", "modulus"), "modulus.c");
        return at_node(n, [&] { return modulus_strongly_accretive(c); });
    }
    if (kind == "expression") {
        check_keys(n, {"kind", "expr"}, "modulus");
        const std::string e = as<std::string>(require(n, "expr", "modulus"), "modulus.expr");
        return at_node(n["expr"], [&] { return modulus_from_expression(e, fns); });
    }
    fail(n["kind"], "unknown modulus kind '" + kind + "' (strongly_accretive | expression)");
}

RateDataConfig parse_rate(const YAML::Node& n, const SpaceContext& X, const std::shared_ptr<const FunctionTable>& fns) {
    check_keys(n, {"M", "b", "D", "B", "omega", "witness"}, "rate_data");
    RateDataConfig r;
    r.M = positive(require(n, "M", "rate_data"), "rate_data.M");
    if (r.M > X.M() * (1.0 + 1e-12)) {
        fail(n["M"], "field 'rate_data.M' = " + std::to_string(r.M) + " exceeds the space constant " + std::to_string(X.M()));
    }
    if (n["b"]) r.b = as<double>(n["b"], "rate_data.b");
    if (n["D"]) r.D = as<double>(n["D"], "rate_data.D");
    if (n["B"]) {
        r.B = natural(n["B"], "rate_data.B");
        if (*r.B < 1) fail(n["B"], "field 'rate_data.B' must be at least 1");
    }
    if (n["omega"]) {
        const std::string e = as<std::string>(n["omega"], "rate_data.omega");
        r.omega = at_node(n["omega"], [&] { return ProjectionModulus::from_expression(e, fns); });
    }
    if (n["witness"]) {
        const std::string e = as<std::string>(n["witness"], "rate_data.witness");
        r.witness = at_node(n["witness"], [&] { return Counterfunction::from_expression(e, fns); });
    }
    return r;
}

std::vector<Nat> parse_ks(const YAML::Node& n, const std::string& ctx) {
    std::vector<Nat> ks;
    if (n["k"] && n["k_range"]) fail(n, ctx + ": give either k or k_range");
    if (const YAML::Node k = n["k"]) {
        if (!k.IsSequence() || k.size() == 0) fail(k, "field '" + ctx + ".k' must be a nonempty list");
        for (const auto& v : k) ks.push_back(natural(v, ctx + ".k"));
    } else if (const YAML::Node kr = n["k_range"]) {
        if (!kr.IsSequence() || kr.size() != 2) fail(kr, "field '" + ctx + ".k_range' must be [lo, hi]");
        const Nat lo = natural(kr[0], ctx + ".k_range"), hi = natural(kr[1], ctx + ".k_range");
        if (lo > hi || hi - lo > 1000) fail(kr, "field '" + ctx + ".k_range' must satisfy lo <= hi <= lo + 1000");
        for (Nat k = lo; k <= hi; ++k) ks.push_back(k);
    } else {
        fail(n, "missing required field '" + ctx + ".k_range'");
    }
    return ks;
}

ChecksConfig parse_checks(const YAML::Node& n) {
    check_keys(n, {"accretivity", "apriori", "fejer", "modulus"}, "checks");
    ChecksConfig c;
    if (const YAML::Node a = n["accretivity"]) {
        if (a.IsScalar()) {
            if (as<bool>(a, "checks.accretivity")) c.accretivity = AccretivityCheckConfig{};
        } else {
            check_keys(a, {"samples", "radius"}, "checks.accretivity");
            AccretivityCheckConfig cfg;
            if (a["samples"]) cfg.samples = natural(a["samples"], "checks.accretivity.samples");
            if (a["radius"]) cfg.radius = positive(a["radius"], "checks.accretivity.radius");
            c.accretivity = cfg;
        }
    }
    if (n["apriori"]) c.apriori = as<bool>(n["apriori"], "checks.apriori");
    if (n["fejer"]) c.fejer = as<bool>(n["fejer"], "checks.fejer");
    if (const YAML::Node m = n["modulus"]) {
        if (m.IsScalar()) {
            if (as<bool>(m, "checks.modulus")) c.modulus = ModulusCheckSpec{};
        } else {
            check_keys(m, {"samples", "k_max", "K_max"}, "checks.modulus");
            ModulusCheckSpec spec;
            if (m["samples"]) spec.samples = natural(m["samples"], "checks.modulus.samples");
            if (m["k_max"]) spec.k_max = natural(m["k_max"], "checks.modulus.k_max");
            if (m["K_max"]) spec.K_max = natural(m["K_max"], "checks.modulus.K_max");
            if (spec.K_max < 1) fail(m, "field 'checks.modulus.K_max' must be at least 1");
            c.modulus = spec;
        }
    }
    return c;
}

ScenarioConfig parse_scenario(const YAML::Node& n, const std::shared_ptr<const FunctionTable>& fns, std::uint64_t seed,
                              std::size_t index) {
    check_keys(n,
               {"id", "space", "operator", "initial_points", "solver", "modulus", "rate_data", "almost_orbits", "checks",
                "sweeps"},
               "scenario");
    ScenarioConfig s;
    s.line = line_of(n);
    s.id = as<std::string>(require(n, "id", "scenario"), "scenario.id");
    if (s.id.empty() || s.id.find_first_of("/ ,\"") != std::string::npos) {
        fail(n["id"], "scenario id must be nonempty without '/', ',', quotes or spaces");
    }
    s.space = parse_space(require(n, "space", "scenario"));
    s.op = parse_operator(require(n, "operator", "scenario"), s.space, s.operator_desc);

    const YAML::Node pts = require(n, "initial_points", "scenario");
    if (!pts.IsSequence() || pts.size() == 0) fail(pts, "field 'scenario.initial_points' must be a nonempty list");
    for (const auto& p : pts) {
        Vector x = vector_of(p, "scenario.initial_points[]");
        if (x.size() != s.space.dim()) fail(p, "initial point dimension does not match space.dim");
        s.points.push_back(std::move(x));
    }

    if (s.space.kind() == SpaceContext::Kind::FiniteLp) {
        const YAML::Node sp = n["space"];
        double radius = 1.0;
        for (const auto& x : s.points) radius = std::max(radius, 2.0 * s.space.norm(x));
        if (sp["validate_radius"]) radius = positive(sp["validate_radius"], "space.validate_radius");
        const std::size_t samples = sp["validate_samples"] ? natural(sp["validate_samples"], "space.validate_samples") : 10000;
        std::seed_seq seq{seed, static_cast<std::uint64_t>(index), std::uint64_t{0x5eed}};
        std::mt19937_64 rng(seq);
        const MonotonicityReport rep = s.space.validate_monotonicity(radius, samples, rng);
        if (!rep.pass) {
            fail(sp["M"], "space.M = " + std::to_string(s.space.M()) + " is violated by sampling (observed ratio " +
                              std::to_string(rep.min_ratio) + ")");
        }
    }

    s.solver = parse_solver(require(n, "solver", "scenario"));
    if (n["modulus"]) s.modulus = parse_modulus(n["modulus"], fns);
    if (n["rate_data"]) s.rate = parse_rate(n["rate_data"], s.space, fns);

    if (const YAML::Node ao = n["almost_orbits"]) {
        if (!ao.IsSequence()) fail(ao, "field 'scenario.almost_orbits' must be a list");
        for (const auto& a : ao) {
            check_keys(a, {"kind", "v", "lambda", "delta", "certify_k"}, "almost_orbits[]");
            AlmostOrbitSpec spec;
            const std::string kind = as<std::string>(require(a, "kind", "almost_orbits[]"), "almost_orbits.kind");
            spec.kind = at_node(a["kind"], [&] { return almost_orbit_kind_from_string(kind); });
            if (spec.kind == AlmostOrbitKind::AdditiveDecay) {
                spec.v = vector_of(require(a, "v", "almost_orbits[]"), "almost_orbits.v");
                if (spec.v.size() != s.space.dim()) fail(a["v"], "almost_orbits.v dimension does not match space.dim");
                if (a["lambda"]) spec.lambda = positive(a["lambda"], "almost_orbits.lambda");
            }
            if (spec.kind == AlmostOrbitKind::TimeWarp && a["delta"]) spec.delta = positive(a["delta"], "almost_orbits.delta");
            if (const YAML::Node ck = a["certify_k"]) {
                if (!ck.IsSequence()) fail(ck, "field 'almost_orbits.certify_k' must be a list");
                spec.certify_k.clear();
                for (const auto& v : ck) spec.certify_k.push_back(natural(v, "almost_orbits.certify_k"));
            }
            s.almost_orbits.push_back(std::move(spec));
        }
    }

    if (n["checks"]) s.checks = parse_checks(n["checks"]);
    if (s.checks.modulus && !s.modulus) fail(n["checks"], "checks.modulus needs a 'modulus' section");

    if (const YAML::Node sw = n["sweeps"]) {
        if (!sw.IsSequence()) fail(sw, "field 'scenario.sweeps' must be a list");
        for (const auto& w : sw) {
            check_keys(w, {"theorem", "k", "k_range", "f"}, "sweeps[]");
            SweepConfig c;
            c.line = line_of(w);
            const std::string th = as<std::string>(require(w, "theorem", "sweeps[]"), "sweeps.theorem");
            c.theorem = at_node(w["theorem"], [&] { return theorem_from_string(th); });
            c.ks = parse_ks(w, "sweeps[]");
            if (const YAML::Node f = w["f"]) {
                if (!f.IsSequence() || f.size() == 0) fail(f, "field 'sweeps.f' must be a nonempty list of expressions");
                for (const auto& e : f) {
                    const std::string text = as<std::string>(e, "sweeps.f");
                    c.fs.push_back(at_node(e, [&] { return Counterfunction::from_expression(text, fns); }));
                }
            }
            if (c.theorem == Theorem::Orbit || c.theorem == Theorem::RateOfConvergence) {
                if (!c.fs.empty()) fail(w["f"], "theorem " + th + " takes no counterfunctions");
            }
            s.sweeps.push_back(std::move(c));
        }
    }

    if (!s.sweeps.empty()) {
        if (!s.modulus) fail(n, "sweeps need a 'modulus' section");
        if (!n["rate_data"]) fail(n, "missing required field 'scenario.rate_data' (sweeps need rate data)");
        const bool needs_omega = std::any_of(s.sweeps.begin(), s.sweeps.end(), [](const SweepConfig& c) {
            return c.theorem == Theorem::Metastable || c.theorem == Theorem::RateOfConvergence;
        });
        if (needs_omega && !s.space.is_hilbert() && !s.rate.omega) {
            fail(n["rate_data"], "missing required field 'rate_data.omega': no projection modulus is known outside Hilbert space");
        }
        // b and D must be admissible for every initial point
        for (const auto& x : s.points) {
            at_node(n["rate_data"], [&] {
                ScenarioRateData::Params p;
                p.M = s.rate.M;
                p.x_norm = s.space.norm(x);
                p.x_dist = s.space.norm(x - s.op->project_zeros(x));
                p.dist0 = s.op->dist_zero(x);
                p.b = s.rate.b;
                p.D = s.rate.D;
                return ScenarioRateData::make(p);
            });
        }
    }
    return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, std::optional<std::uint64_t> seed_override) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ": " + e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
    try {
        if (!root || !root.IsMap()) throw ConfigError(source + ": top level must be a mapping", 1);
        check_keys(root, {"seed", "functions", "scenarios"}, "config");
        RunConfig cfg;
        cfg.source = source;
        if (!root["seed"]) fail(root, "missing required field 'seed'");
        cfg.seed = as<std::uint64_t>(root["seed"], "seed");
        if (seed_override) cfg.seed = *seed_override;

        cfg.functions = std::make_shared<FunctionTable>();
        if (const YAML::Node fn = root["functions"]) {
            if (!fn.IsSequence()) fail(fn, "field 'functions' must be a list of {name, body}");
            for (const auto& f : fn) {
                check_keys(f, {"name", "body"}, "functions[]");
                const std::string name = as<std::string>(require(f, "name", "functions[]"), "functions.name");
                const std::string body = as<std::string>(require(f, "body", "functions[]"), "functions.body");
                at_node(f, [&] {
                    cfg.functions->define(name, body);
                    return 0;
                });
            }
        }

        const YAML::Node sc = require(root, "scenarios", "config");
        if (!sc.IsSequence() || sc.size() == 0) fail(sc, "field 'scenarios' must be a nonempty list");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < sc.size(); ++i) {
            cfg.scenarios.push_back(parse_scenario(sc[i], cfg.functions, cfg.seed, i));
            if (!ids.insert(cfg.scenarios.back().id).second) fail(sc[i]["id"], "duplicate scenario id '" + cfg.scenarios.back().id + "'");
        }
        return cfg;
    } catch (const YAML::Exception& e) {
        throw ConfigError(source + ": " + e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, seed_override);
}

}  // namespace sqrtsg
