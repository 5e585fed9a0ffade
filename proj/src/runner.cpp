#include "sqrtsg/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct UnitResult {
    std::vector<RateReport> reports;
    std::vector<CheckResult> checks;
    std::vector<CurveRecord> curves;
    std::vector<std::string> errors;
};

std::mt19937_64 unit_rng(std::uint64_t seed, std::size_t scenario, std::size_t point, std::uint64_t purpose) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(scenario), static_cast<std::uint64_t>(point), purpose};
    return std::mt19937_64(seq);
}

// Rate data for a sampled curve: B and the uniform f_s are read off the
// samples unless the config pins them.
struct CurveRateData {
    std::optional<ScenarioRateData> data;
    std::vector<CheckResult> checks;
};

CurveRateData rate_data_for(const ScenarioConfig& sc, const std::string& name, const Vector& x, const SampledCurve& c,
                            bool with_b_and_D) {
    const AccretiveOperator& A = *sc.op;
    const SpaceContext& X = sc.space;
    const Vector p = A.zero_point();
    double radius = 0.0, witness = 0.0;
    for (const auto& u : c.u) {
        radius = std::max(radius, X.norm(u - p));
        witness = std::max({witness, X.norm(u), X.norm(A.select(u))});
    }
    CurveRateData out;
    ScenarioRateData::Params prm;
    prm.M = sc.rate.M;
    prm.x_norm = X.norm(x);
    prm.x_dist = X.norm(x - A.project_zeros(x));
    prm.dist0 = A.dist_zero(x);
    if (with_b_and_D) {
        prm.b = sc.rate.b;
        prm.D = sc.rate.D;
    }
    const Nat sampled_B = std::max<Nat>(1, ceil_nat(radius));
    prm.B = sc.rate.B.value_or(sampled_B);
    if (sc.rate.B) {
        const bool ok = static_cast<double>(*sc.rate.B) >= radius;
        out.checks.push_back({name, "orbit_bound", ok,
                              "B=" + std::to_string(*sc.rate.B) + " sampled sup|u-p|=" + num(radius) + " (horizon-certified)"});
    }
    if (sc.rate.omega) prm.omega = *sc.rate.omega;
    const Nat needed = ceil_nat(witness);
    if (sc.rate.witness) {
        prm.witness = WitnessFamily::uniform_from(*sc.rate.witness);
        const Nat f0 = (*sc.rate.witness)(0);
        out.checks.push_back({name, "witness_bound", f0 >= needed,
                              "f_s(0)=" + std::to_string(f0) + " sampled max(|u|,|Au|)=" + num(witness)});
    } else {
        prm.witness = WitnessFamily::constant(needed);
    }
    out.data = ScenarioRateData::make(prm);
    return out;
}

void orbit_sweeps(const ScenarioConfig& sc, const std::string& name, const Vector& x, const SampledCurve& curve,
                  double tol, UnitResult& res) {
    bool any = false;
    for (const auto& sw : sc.sweeps) any = any || sw.theorem == Theorem::Orbit || sw.theorem == Theorem::Closure;
    if (!any) return;
    CurveRateData rd = rate_data_for(sc, name, x, curve, true);
    res.checks.insert(res.checks.end(), rd.checks.begin(), rd.checks.end());
    SweepInput in;
    in.scenario = name;
    in.A = sc.op.get();
    in.curve = curve;
    in.Omega = &*sc.modulus;
    in.data = &*rd.data;
    in.tol = tol;
    for (const auto& sw : sc.sweeps) {
        if (sw.theorem == Theorem::Orbit) {
            auto r = sweep_theorem(Theorem::Orbit, in, sw.ks, {});
            res.reports.insert(res.reports.end(), r.begin(), r.end());
        } else if (sw.theorem == Theorem::Closure) {
            std::vector<Counterfunction> fs = sw.fs;
            // x in dom A: x_n = x, y_n = the minimal selection
            const double need = std::max(sc.space.norm(x), sc.op->dist_zero(x));
            if (fs.empty()) fs.push_back(Counterfunction::constant(std::max<Nat>(1, std::max(rd.data->b_ceil(), ceil_nat(need)))));
            for (const auto& f : fs) {
                const Nat top = nat_add(nat_mul(3, *std::max_element(sw.ks.begin(), sw.ks.end())), 2);
                bool valid = true;
                for (Nat n = 0; n <= top && valid; ++n) valid = static_cast<double>(f(n)) >= need;
                res.checks.push_back({name, "closure_f_bounds_witnesses", valid,
                                      "f=" + f.desc() + " needs f(n) >= " + num(need) + " for n <= " + std::to_string(top)});
            }
            auto r = sweep_theorem(Theorem::Closure, in, sw.ks, fs);
            for (const auto& rep : r) {
                const Nat orbit_bound = rate_pr(rep.k, *sc.modulus, *rd.data);
                res.checks.push_back({name, "closure_dominates_orbit_rate", rep.bound >= orbit_bound,
                                      "k=" + std::to_string(rep.k) + " f=" + rep.f_desc + " closure=" +
                                          std::to_string(rep.bound) + " orbit=" + std::to_string(orbit_bound)});
            }
            res.reports.insert(res.reports.end(), r.begin(), r.end());
        }
    }
}

void almost_orbit_sweeps(const ScenarioConfig& sc, const SquareRootSemigroup& S, const std::string& base_name,
                         const Vector& x, double tol, UnitResult& res) {
    bool any = false;
    for (const auto& sw : sc.sweeps) any = any || sw.theorem == Theorem::Metastable || sw.theorem == Theorem::RateOfConvergence;
    if (!any) return;
    std::vector<AlmostOrbitSpec> specs = sc.almost_orbits;
    if (specs.empty()) specs.push_back(AlmostOrbitSpec{});
    for (const auto& spec : specs) {
        const std::string name = base_name + "/" + to_string(spec.kind);
        std::optional<AlmostOrbit> u;
        try {
            u = make_almost_orbit(S, x, spec);
        } catch (const ContractError& e) {
            res.checks.push_back({name, "almost_orbit_certified", false, e.what()});
            continue;
        }
        double worst = 0.0;
        for (const auto& d : u->certification()) worst = std::max(worst, d.defect * (static_cast<double>(d.k) + 1.0));
        res.checks.push_back({name, "almost_orbit_certified", true,
                              u->describe() + " samples=" + std::to_string(u->certification().size()) +
                                  " max (k+1)*defect=" + num(worst)});

        const SampledCurve curve =
            sample_curve([&u](double t) { return (*u)(t); }, *sc.op, u->domain(), S.grid().step());
        res.curves.push_back({name, to_string(spec.kind), curve});

        CurveRateData rd = rate_data_for(sc, name, curve.u.front(), curve, false);
        res.checks.insert(res.checks.end(), rd.checks.begin(), rd.checks.end());
        SweepInput in;
        in.scenario = name;
        in.A = sc.op.get();
        in.curve = curve;
        in.Omega = &*sc.modulus;
        in.data = &*rd.data;
        in.roc = u->roc_function();
        in.tol = tol;
        // Gamma' still runs through h/j/g; only the outer max over N uses
        // the f-independence of Phi.
        const MetastabilityRate Phi = u->metastability_rate();
        const std::vector<double> diam = tail_diameters(curve, sc.space);

        for (const auto& sw : sc.sweeps) {
            if (sw.theorem == Theorem::Metastable) {
                const std::vector<Counterfunction> fs = sw.fs.empty() ? sample_counterfunctions() : sw.fs;
                auto r = sweep_theorem(Theorem::Metastable, in, sw.ks, fs);
                res.reports.insert(res.reports.end(), r.begin(), r.end());
                for (Nat k : sw.ks) {
                    const double eps = 1.0 / (static_cast<double>(k) + 1.0);
                    const bool finite = !diam.empty() &&
                                        std::any_of(diam.begin(), diam.end(), [&](double d) { return d <= eps + tol; });
                    res.checks.push_back({name, "cauchy_threshold_finite", finite, "k=" + std::to_string(k)});
                    if (spec.kind == AlmostOrbitKind::Exact) {
                        const Nat expect = omega_s(0, nat_add(nat_mul(24, k), 23), *sc.modulus, *rd.data);
                        for (const auto& f : fs) {
                            const Nat g = gamma(k, f, Phi, *sc.modulus, *rd.data);
                            res.checks.push_back({name, "gamma_collapse", g == expect,
                                                  "k=" + std::to_string(k) + " f=" + f.desc() + " gamma=" +
                                                      std::to_string(g) + " Omega_0(24k+23)=" + std::to_string(expect)});
                        }
                    }
                }
            } else if (sw.theorem == Theorem::RateOfConvergence) {
                auto r = sweep_theorem(Theorem::RateOfConvergence, in, sw.ks, {});
                res.reports.insert(res.reports.end(), r.begin(), r.end());
                const std::vector<Counterfunction> fs = sw.fs.empty() ? sample_counterfunctions() : sw.fs;
                for (const auto& rep : r) {
                    bool same = true;
                    for (const auto& f : fs) same = same && gamma(rep.k, f, Phi, *sc.modulus, *rd.data) == rep.bound;
                    res.checks.push_back({name, "roc_matches_gamma", same,
                                          "k=" + std::to_string(rep.k) + " bound=" + std::to_string(rep.bound) +
                                              " over " + std::to_string(fs.size()) + " counterfunctions"});
                }
            }
        }
    }
}

UnitResult run_unit(const RunConfig& cfg, std::size_t si, std::size_t pi) {
    const ScenarioConfig& sc = cfg.scenarios[si];
    const Vector& x = sc.points[pi];
    const std::string name = sc.id + "/x" + std::to_string(pi);
    UnitResult res;

    if (pi == 0) {
        if (sc.checks.accretivity) {
            auto rng = unit_rng(cfg.seed, si, pi, 1);
            const AccretivityReport r = verify_accretive(*sc.op, sc.checks.accretivity->samples, sc.checks.accretivity->radius, rng);
            res.checks.push_back({sc.id, "accretivity", r.pass,
                                  "min pairing " + num(r.min_pairing) + " over " + std::to_string(r.samples) + " pairs"});
        }
        if (sc.checks.modulus) {
            auto rng = unit_rng(cfg.seed, si, pi, 2);
            const ModulusCheckReport r = modulus_check(*sc.op, *sc.modulus, *sc.checks.modulus, rng);
            std::string detail = std::to_string(r.premise_held) + " of " + std::to_string(r.in_range) +
                                 " in-range samples met the premise, " + std::to_string(r.counterexamples) +
                                 " counterexamples";
            if (r.first) {
                detail += "; first at k=" + std::to_string(r.first->k) + " K=" + std::to_string(r.first->K) +
                          " pairing=" + num(r.first->pairing) + " |x-Px|=" + num(r.first->distance);
            }
            res.checks.push_back({sc.id, "modulus", r.pass, detail});
        }
    }

    const TimeGrid grid = TimeGrid::make(sc.solver.T, sc.solver.h);
    const SquareRootSemigroup S(sc.op, grid, sc.solver.options, sc.solver.margin);
    const SecondOrderSolution sol = S.orbit(x);
    const double tol = 1e-6 + sc.solver.options.stabilization_tol;

    res.checks.push_back({name, "continuation_stabilized", sol.stabilized,
                          "steps=" + std::to_string(sol.steps_used) + " last change=" + num(sol.last_change)});
    res.checks.push_back({name, "truncation", !sol.last_info.truncation_flag,
                          "|u(T-h)-Pu(T-h)|=" + num(sol.last_info.tail_distance)});
    if (sc.checks.apriori) {
        const AprioriBounds b = check_apriori(*sc.op, x, sol.trajectory, sc.rate.M);
        res.checks.push_back({name, "apriori", b.pass,
                              "sup " + num(b.sup_norm) + "<=" + num(b.rhs_sup) + ", int|u'|^2 " + num(b.int_du_sq) +
                                  "<=" + num(b.rhs_du) + ", int|u''|^2 " + num(b.int_ddu_sq) + "<=" + num(b.rhs_ddu) +
                                  (b.swapped_pass ? "; swapped-exponent bounds hold" : "; swapped-exponent bounds fail")});
    }
    if (sc.checks.fejer) {
        const FejerReport f = check_fejer(*sc.op, sol.trajectory, S.trusted_horizon());
        res.checks.push_back({name, "fejer", f.pass,
                              "max step increase " + num(f.max_increase) + ", max step excess " +
                                  num(f.max_stability_excess) + ", max shift excess " + num(f.max_shift_excess)});
    }

    const SampledCurve curve = sample_curve(sol.trajectory, *sc.op, S.trusted_horizon());
    res.curves.push_back({name, "orbit", curve});
    if (!sc.sweeps.empty()) {
        orbit_sweeps(sc, name, x, curve, tol, res);
        almost_orbit_sweeps(sc, S, name, x, tol, res);
    }
    return res;
}

}  // namespace

int RunResult::exit_code() const {
    if (!errors.empty()) return 1;
    for (const auto& c : checks) {
        if (!c.pass) return 2;
    }
    for (const auto& r : reports) {
        if (!r.extrapolated && !r.pass) return 2;
    }
    return 0;
}

RunResult execute(const RunConfig& cfg, unsigned jobs) {
    std::vector<std::pair<std::size_t, std::size_t>> units;
    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
        for (std::size_t p = 0; p < cfg.scenarios[s].points.size(); ++p) units.emplace_back(s, p);
    }
    std::vector<UnitResult> results(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            try {
                results[i] = run_unit(cfg, units[i].first, units[i].second);
            } catch (const std::exception& e) {
                results[i].errors.push_back(cfg.scenarios[units[i].first].id + "/x" + std::to_string(units[i].second) +
                                            ": " + e.what());
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(units.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    RunResult out;
    for (auto& r : results) {
        std::move(r.reports.begin(), r.reports.end(), std::back_inserter(out.reports));
        std::move(r.checks.begin(), r.checks.end(), std::back_inserter(out.checks));
        std::move(r.curves.begin(), r.curves.end(), std::back_inserter(out.curves));
        std::move(r.errors.begin(), r.errors.end(), std::back_inserter(out.errors));
    }
    return out;
}

json to_json(const RateReport& r) {
    // JSON has no infinity; an observed threshold beyond the samples is null
    auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return json{{"scenario", r.scenario}, {"theorem", r.theorem},   {"k", r.k},
                {"f_desc", r.f_desc},     {"bound", r.bound},       {"observed", finite(r.observed)},
                {"margin", finite(r.margin)}, {"pass", r.pass},     {"extrapolated", r.extrapolated}};
}

json reports_json(const RunConfig& cfg, const RunResult& res) {
    json reports = json::array();
    for (const auto& r : res.reports) reports.push_back(to_json(r));
    json checks = json::array();
    for (const auto& c : res.checks) {
        checks.push_back({{"scenario", c.scenario}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    std::size_t failed = 0, extrapolated = 0, failed_checks = 0;
    for (const auto& r : res.reports) {
        if (r.extrapolated) ++extrapolated;
        else if (!r.pass) ++failed;
    }
    for (const auto& c : res.checks) failed_checks += c.pass ? 0 : 1;
    return json{{"seed", cfg.seed},
                {"reports", reports},
                {"checks", checks},
                {"errors", res.errors},
                {"summary",
                 {{"reports", res.reports.size()},
                  {"failed_reports", failed},
                  {"extrapolated_reports", extrapolated},
                  {"checks", res.checks.size()},
                  {"failed_checks", failed_checks},
                  {"exit_code", res.exit_code()}}}};
}

namespace {

void write_atomic(const fs::path& target, const std::function<void(std::ostream&)>& body) {
    const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + tmp.string());
        body(os);
        os.flush();
        if (!os) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string file_stem(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == '/' || c == '.') c = '_';
    }
    return out;
}

}  // namespace

void write_outputs(const RunConfig& cfg, const RunResult& res, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    write_atomic(dir / "reports.json", [&](std::ostream& os) { os << reports_json(cfg, res).dump(2) << '\n'; });
    write_atomic(dir / "reports.csv", [&](std::ostream& os) { write_reports_csv(os, res.reports); });

    int dmax = 0;
    for (const auto& c : res.curves) {
        if (!c.samples.u.empty()) dmax = std::max(dmax, static_cast<int>(c.samples.u.front().size()));
    }
    write_atomic(dir / "trajectories.csv", [&](std::ostream& os) {
        os << "scenario,curve,t";
        for (int i = 1; i <= dmax; ++i) os << ",u" << i;
        os << ",norm,dist_zero_set\n";
        for (const auto& c : res.curves) {
            const SampledCurve& s = c.samples;
            for (std::size_t i = 0; i < s.t.size(); ++i) {
                os << c.scenario << ',' << c.curve << ',' << num(s.t[i]);
                for (int j = 0; j < dmax; ++j) os << ',' << (j < s.u[i].size() ? num(s.u[i][j]) : "");
                os << ',' << num(s.u[i].norm()) << ',' << num(s.q[i]) << '\n';
            }
        }
    });

    // plot data: one file per curve and per (scenario, theorem), plus a gnuplot script
    const fs::path plot = dir / "plot";
    const fs::path staging = dir / ".plot.tmp";
    fs::remove_all(staging);
    fs::create_directories(staging);
    std::vector<std::string> curve_files;
    for (const auto& c : res.curves) {
        const std::string fname = "curve_" + file_stem(c.scenario) + ".dat";
        std::ofstream os(staging / fname);
        os << "# " << c.scenario << " (" << c.curve << ")\n# t norm dist_zero_set\n";
        for (std::size_t i = 0; i < c.samples.t.size(); ++i) {
            os << num(c.samples.t[i]) << ' ' << num(c.samples.u[i].norm()) << ' ' << num(c.samples.q[i]) << '\n';
        }
        curve_files.push_back(fname);
    }
    std::map<std::string, std::vector<const RateReport*>> by_key;
    for (const auto& r : res.reports) by_key[file_stem(r.scenario) + "_thm" + file_stem(r.theorem)].push_back(&r);
    std::vector<std::string> rate_files;
    for (const auto& [key, reps] : by_key) {
        const std::string fname = "rates_" + key + ".dat";
        std::ofstream os(staging / fname);
        os << "# k bound observed pass extrapolated f\n";
        for (const RateReport* r : reps) {
            os << r->k << ' ' << r->bound << ' ' << (std::isfinite(r->observed) ? num(r->observed) : "NaN") << ' '
               << (r->pass ? 1 : 0) << ' ' << (r->extrapolated ? 1 : 0) << " \"" << r->f_desc << "\"\n";
        }
        rate_files.push_back(fname);
    }
    {
        std::ofstream os(staging / "plot.gp");
        os << "# gnuplot plot.gp  (run inside this directory)\n";
        os << "set terminal pngcairo size 900,600\nset key outside\n";
        os << "set logscale y\nset xlabel 't'\nset ylabel '|u(t) - Pu(t)|'\n";
        for (const auto& f : curve_files) {
            os << "set output '" << f.substr(0, f.size() - 4) << ".png'\n";
            os << "plot '" << f << "' using 1:($3 > 0 ? $3 : 1e-300) with lines title 'dist to zero set'\n";
        }
        os << "set xlabel 'k'\nset ylabel 'time'\n";
        for (const auto& f : rate_files) {
            os << "set output '" << f.substr(0, f.size() - 4) << ".png'\n";
            os << "plot '" << f << "' using 1:2 with points pt 7 title 'bound', '' using 1:3 with points pt 5 title 'observed'\n";
        }
    }
    fs::remove_all(plot);
    fs::rename(staging, plot);
}

int run(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path, opts.seed);
    } catch (const ConfigError& e) {
        err << config_path << ": " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << config_path << ": " << e.what() << '\n';
        return 1;
    }
    const RunResult res = execute(cfg, opts.jobs);
    try {
        write_outputs(cfg, res, opts.out_dir);
    } catch (const std::exception& e) {
        err << "cannot write outputs: " << e.what() << '\n';
        return 1;
    }
    for (const auto& e : res.errors) err << "error: " << e << '\n';
    std::size_t failed = 0, extrapolated = 0;
    for (const auto& r : res.reports) {
        if (r.extrapolated) ++extrapolated;
        else if (!r.pass) ++failed;
    }
    std::size_t failed_checks = 0;
    for (const auto& c : res.checks) {
        if (!c.pass) {
            ++failed_checks;
            err << "check failed: " << c.scenario << " " << c.name << ": " << c.detail << '\n';
        }
    }
    for (const auto& r : res.reports) {
        if (!r.extrapolated && !r.pass) {
            err << "report failed: " << r.scenario << " theorem " << r.theorem << " k=" << r.k << " f=" << r.f_desc
                << " bound=" << r.bound << '\n';
        }
    }
    out << res.reports.size() << " reports (" << failed << " failed, " << extrapolated << " extrapolated), "
        << res.checks.size() << " checks (" << failed_checks << " failed); outputs in " << opts.out_dir << '\n';
    return res.exit_code();
}

void list_catalog(std::ostream& os, bool as_json) {
    const auto ops = operator_catalog();
    const std::vector<std::pair<std::string, std::string>> moduli = {
        {"strongly_accretive", "c > 0; Omega(k,K) = ceil((k+1)^2/c) - 1, K unused"},
        {"expression", "expr over k and K in the counterfunction grammar"},
    };
    const std::vector<std::pair<std::string, std::string>> orbits = {
        {"exact", "u = S(t)x; rate 0"},
        {"additive-decay", "v, lambda; u = S(t)x + e^{-lambda t} v; rate ceil(ln(2|v|(k+1))/lambda)"},
        {"time-warp", "delta; u = S(t + delta e^{-t})x; rate ceil(ln(L delta (k+1))), L sampled slope"},
    };
    const std::string grammar =
        "expr := term (('+' | '-') term)*; term := atom ('*' atom)*; "
        "atom := NUMBER | VAR | name '(' expr, ... ')' | '(' expr ')'. "
        "'-' is truncated subtraction; builtins max, min, sq; user functions of n via 'functions'. "
        "Arithmetic is exact over 64-bit naturals; overflow is an error.";
    if (as_json) {
        json j;
        j["operators"] = json::array();
        for (const auto& e : ops) j["operators"].push_back({{"kind", e.kind}, {"parameters", e.parameters}, {"description", e.description}});
        j["moduli"] = json::array();
        for (const auto& [k, d] : moduli) j["moduli"].push_back({{"kind", k}, {"description", d}});
        j["almost_orbits"] = json::array();
        for (const auto& [k, d] : orbits) j["almost_orbits"].push_back({{"kind", k}, {"description", d}});
        j["theorems"] = {"4.1", "4.2", "5.1", "5.3"};
        j["counterfunction_grammar"] = grammar;
        os << j.dump(2) << '\n';
        return;
    }
    os << "operators:\n";
    for (const auto& e : ops) os << "  " << e.kind << "  [" << e.parameters << "]  " << e.description << '\n';
    os << "moduli:\n";
    for (const auto& [k, d] : moduli) os << "  " << k << "  " << d << '\n';
    os << "almost-orbits:\n";
    for (const auto& [k, d] : orbits) os << "  " << k << "  " << d << '\n';
    os << "sweeps: theorems 4.1 4.2 5.1 5.3\n";
    os << "counterfunction grammar:\n  " << grammar << '\n';
}

}  // namespace sqrtsg
