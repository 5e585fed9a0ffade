#include "sqrtsg/verification.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

double integral_liminf_search(const std::vector<double>& values, double h, double L, Nat k, Nat n) {
    if (!(h > 0.0)) throw ContractError("lim-inf search: step must be positive");
    if (!(L >= 0.0)) throw ContractError("lim-inf search: L must be nonnegative");
    if (values.empty()) throw ContractError("lim-inf search: no samples");
    double integral = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) throw ContractError("lim-inf search: samples must be nonnegative");
        if (i > 0) integral += 0.5 * h * (values[i - 1] + values[i]);
    }
    // Relative slack for the trapezoid error on convex samples (h^2/12 per unit).
    if (integral > L * (1.0 + 1e-6) + 1e-300) {
        throw ContractError("lim-inf search: integral " + std::to_string(integral) + " exceeds L = " + std::to_string(L));
    }
    const double eps = 1.0 / (static_cast<double>(k) + 1.0);
    const double lo = static_cast<double>(n);
    const double hi = (L + 1.0) * (static_cast<double>(k) + 1.0) + lo;
    const double slack = 1e-9 * h;
    auto i = static_cast<std::size_t>(std::ceil(lo / h - 1e-9));
    for (; i < values.size() && static_cast<double>(i) * h <= hi + slack; ++i) {
        if (values[i] <= eps) return static_cast<double>(i) * h;
    }
    const double last = static_cast<double>(values.size() - 1) * h;
    if (last + slack < hi) {
        throw ContractError("lim-inf search: samples end at t = " + std::to_string(last) + " before the interval end " +
                            std::to_string(hi));
    }
    throw LemmaViolation("no t in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] with f(t) <= 1/" +
                         std::to_string(k + 1));
}

namespace {

Vector random_on_sphere(const SpaceContext& X, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector x(X.dim());
    double nx = 0.0;
    while (nx == 0.0) {
        for (int i = 0; i < X.dim(); ++i) x[i] = gauss(rng);
        nx = X.norm(x);
    }
    return x * (radius / nx);
}

}  // namespace

ModulusCheckReport modulus_check(const AccretiveOperator& A, const ConvergenceModulus& Omega,
                                 const ModulusCheckSpec& spec, std::mt19937_64& rng) {
    if (spec.K_max < 1) throw ContractError("modulus check: K_max must be at least 1");
    const SpaceContext& X = A.space();
    std::uniform_int_distribution<Nat> pick_k(0, spec.k_max);
    std::uniform_int_distribution<Nat> pick_K(1, spec.K_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ModulusCheckReport rep;
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const Nat k = pick_k(rng);
        const Nat K = pick_K(rng);
        const double Kd = static_cast<double>(K);
        const double radius = (i % 2 == 0) ? Kd * unit(rng) : Kd * std::pow(10.0, -6.0 * unit(rng));
        const Vector x = random_on_sphere(X, radius, rng);
        ++rep.samples;
        const Vector y = A.select(x);
        if (X.norm(y) > Kd) continue;
        ++rep.in_range;
        const Vector d = x - A.project_zeros(x);
        const double dist = X.norm(d);
        const double pairing = X.pairing(y, d);
        const double threshold = 1.0 / (static_cast<double>(Omega(k, K)) + 1.0);
        if (pairing > threshold) continue;
        ++rep.premise_held;
        if (dist > 1.0 / (static_cast<double>(k) + 1.0) + 1e-12) {
            ++rep.counterexamples;
            if (!rep.first) rep.first = ModulusCounterexample{k, K, x, pairing, dist};
        }
    }
    rep.pass = rep.counterexamples == 0;
    return rep;
}

std::string to_string(AlmostOrbitKind kind) {
    switch (kind) {
        case AlmostOrbitKind::Exact:
            return "exact";
        case AlmostOrbitKind::AdditiveDecay:
            return "additive-decay";
        case AlmostOrbitKind::TimeWarp:
            return "time-warp";
    }
    return "?";
}

AlmostOrbitKind almost_orbit_kind_from_string(const std::string& s) {
    if (s == "exact") return AlmostOrbitKind::Exact;
    if (s == "additive-decay") return AlmostOrbitKind::AdditiveDecay;
    if (s == "time-warp") return AlmostOrbitKind::TimeWarp;
    throw ContractError("unknown almost-orbit kind '" + s + "' (exact | additive-decay | time-warp)");
}

Vector AlmostOrbit::operator()(double t) const {
    if (!(t >= 0.0) || t > domain_ * (1.0 + 1e-14)) {
        throw DomainError("almost-orbit evaluated at t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(domain_) + "]");
    }
    switch (kind_) {
        case AlmostOrbitKind::Exact:
            return base_->at(t);
        case AlmostOrbitKind::AdditiveDecay:
            return base_->at(t) + std::exp(-lambda_ * t) * v_;
        case AlmostOrbitKind::TimeWarp:
            return base_->at(t + delta_ * std::exp(-t));
    }
    return {};
}

MetastabilityRate AlmostOrbit::metastability_rate() const { return MetastabilityRate::from_roc(roc_, desc_ + " rate"); }

AlmostOrbit make_almost_orbit(const SquareRootSemigroup& S, const Vector& x, const AlmostOrbitSpec& spec) {
    const AccretiveOperator& A = S.op();
    const SpaceContext& X = A.space();
    X.check_dim(x);
    const double trusted = S.trusted_horizon();
    const double h = S.grid().step();

    AlmostOrbit u;
    u.kind_ = spec.kind;
    u.base_ = std::make_shared<const Trajectory>(S.orbit(x).trajectory);
    u.domain_ = trusted;

    switch (spec.kind) {
        case AlmostOrbitKind::Exact:
            u.roc_ = [](Nat) { return Nat{0}; };
            u.desc_ = "exact";
            break;
        case AlmostOrbitKind::AdditiveDecay: {
            X.check_dim(spec.v);
            if (!(spec.lambda > 0.0)) throw ContractError("additive-decay almost-orbit needs lambda > 0");
            u.v_ = spec.v;
            u.lambda_ = spec.lambda;
            const double nv = X.norm(spec.v);
            const double lambda = spec.lambda;
            // defect <= e^{-lambda(s+t)}|v| + e^{-lambda s}|v| <= 2 e^{-lambda s}|v|
            u.roc_ = [nv, lambda](Nat k) -> Nat {
                if (nv == 0.0) return 0;
                return ceil_nat(std::log(2.0 * nv * (static_cast<double>(k) + 1.0)) / lambda);
            };
            u.desc_ = "additive-decay(|v|=" + std::to_string(nv) + ", lambda=" + std::to_string(lambda) + ")";
            break;
        }
        case AlmostOrbitKind::TimeWarp: {
            if (!(spec.delta > 0.0)) throw ContractError("time-warp almost-orbit needs delta > 0");
            if (spec.delta >= trusted) throw ContractError("time-warp delta exceeds the trusted horizon");
            u.delta_ = spec.delta;
            u.domain_ = trusted - spec.delta;
            const Trajectory& base = *u.base_;
            double L = 0.0;
            for (std::size_t i = 0; i + 1 < base.size() && base.grid().node(i + 1) <= trusted; ++i) {
                L = std::max(L, X.norm(base[i + 1] - base[i]) / h);
            }
            u.lipschitz_ = L;
            const double Ld = L * spec.delta;
            // |S(a)x - S(b)x| <= L|a - b| and |a - b| <= delta e^{-s}
            u.roc_ = [Ld](Nat k) -> Nat {
                if (Ld == 0.0) return 0;
                return ceil_nat(std::log(Ld * (static_cast<double>(k) + 1.0)));
            };
            u.desc_ = "time-warp(delta=" + std::to_string(spec.delta) + ", L=" + std::to_string(L) + ")";
            break;
        }
    }

    // Certification: solve again from u(s) and compare along [0, domain - s].
    const double tol = 1e-6 + S.options().stabilization_tol;
    std::map<double, double> defect_at;
    auto defect = [&](double s) {
        if (auto it = defect_at.find(s); it != defect_at.end()) return it->second;
        const Vector us = u(s);
        const Trajectory restart = S.orbit(us).trajectory;
        const double span = u.domain_ - s;
        const std::size_t steps = std::max<std::size_t>(1, std::min<std::size_t>(1000, static_cast<std::size_t>(span / h)));
        double worst = 0.0;
        for (std::size_t i = 0; i <= steps; ++i) {
            const double t = span * static_cast<double>(i) / static_cast<double>(steps);
            worst = std::max(worst, X.norm(u(s + t) - restart.at(t)));
        }
        defect_at.emplace(s, worst);
        return worst;
    };
    for (Nat k : spec.certify_k) {
        const double s0 = static_cast<double>(u.roc_(k));
        for (double s : {s0, s0 + 1.0}) {
            if (s >= u.domain_) continue;
            const double d = defect(s);
            u.certification_.push_back({k, s, d});
            if (d > 1.0 / (static_cast<double>(k) + 1.0) + tol) {
                throw ContractError(u.desc_ + ": sampled defect " + std::to_string(d) + " at s = " + std::to_string(s) +
                                    " exceeds 1/" + std::to_string(k + 1));
            }
        }
    }
    return u;
}

SampledCurve sample_curve(const std::function<Vector(double)>& u, const AccretiveOperator& A, double horizon, double h,
                          std::size_t max_samples) {
    if (!(h > 0.0) || !(horizon >= 0.0)) throw ContractError("sample_curve: bad horizon or step");
    const std::size_t nodes = static_cast<std::size_t>(std::floor(horizon / h + 1e-9));
    const std::size_t m = std::max<std::size_t>(1, (nodes + max_samples - 1) / std::max<std::size_t>(1, max_samples));
    SampledCurve c;
    for (std::size_t i = 0; i <= nodes; i += m) {
        const double t = static_cast<double>(i) * h;
        c.t.push_back(t);
        c.u.push_back(u(t));
        c.q.push_back(A.space().norm(c.u.back() - A.project_zeros(c.u.back())));
    }
    return c;
}

SampledCurve sample_curve(const Trajectory& traj, const AccretiveOperator& A, double horizon, std::size_t max_samples) {
    const double h = traj.grid().step();
    return sample_curve(
        [&traj, h](double t) { return traj[static_cast<std::size_t>(std::llround(t / h))]; }, A, horizon, h,
        max_samples);
}

std::vector<double> tail_diameters(const SampledCurve& c, const SpaceContext& X) {
    const std::size_t n = c.u.size();
    std::vector<double> d(n, 0.0);
    if (n == 0) return d;
    for (std::size_t i = n - 1; i-- > 0;) {
        double m = d[i + 1];
        for (std::size_t l = i + 1; l < n; ++l) m = std::max(m, X.norm(c.u[i] - c.u[l]));
        d[i] = m;
    }
    return d;
}

std::string to_string(Theorem th) {
    switch (th) {
        case Theorem::Orbit:
            return "4.1";
        case Theorem::Closure:
            return "4.2";
        case Theorem::Metastable:
            return "5.1";
        case Theorem::RateOfConvergence:
            return "5.3";
    }
    return "?";
}

Theorem theorem_from_string(const std::string& s) {
    if (s == "4.1") return Theorem::Orbit;
    if (s == "4.2") return Theorem::Closure;
    if (s == "5.1") return Theorem::Metastable;
    if (s == "5.3") return Theorem::RateOfConvergence;
    throw ContractError("unknown theorem '" + s + "' (4.1 | 4.2 | 5.1 | 5.3)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// For t, t' >= s >= roc(K): |u(t) - u(t')| <= 2/(K+1) + 2|u(s) - Pu(s)|, since
// S(.)u(s) stays within |u(s) - Pu(s)| of the zero Pu(s). Orbits have roc = 0
// and the first term drops; there the distance must also be nonincreasing.
bool tail_certificate(const SweepInput& in, Nat k) {
    const SampledCurve& c = in.curve;
    if (c.q.empty()) return false;
    const double eps = 1.0 / (static_cast<double>(k) + 1.0);
    if (!in.roc) {
        for (std::size_t i = 0; i + 1 < c.q.size(); ++i) {
            if (c.q[i + 1] > c.q[i] + 1e-6) return false;
        }
        return 2.0 * c.q.back() <= eps + in.tol;
    }
    const Nat K = nat_add(nat_mul(4, k), 3);
    const double s0 = static_cast<double>(in.roc(K));
    if (c.t.back() < s0) return false;
    return 2.0 / (static_cast<double>(K) + 1.0) + 2.0 * c.q.back() <= eps + in.tol;
}

RateReport cauchy_report(const SweepInput& in, const std::vector<double>& diam, Theorem th, Nat k, Nat bound,
                         std::string f_desc) {
    const SampledCurve& c = in.curve;
    const double eps = 1.0 / (static_cast<double>(k) + 1.0);
    RateReport r;
    r.scenario = in.scenario;
    r.theorem = to_string(th);
    r.k = k;
    r.f_desc = std::move(f_desc);
    r.bound = bound;
    r.observed = kInf;
    for (std::size_t i = 0; i < diam.size(); ++i) {
        if (diam[i] <= eps + in.tol) {
            r.observed = c.t[i];
            break;
        }
    }
    r.margin = static_cast<double>(bound) - r.observed;
    const double b = static_cast<double>(bound);
    if (b <= c.horizon()) {
        std::size_t i = 0;
        while (i < c.t.size() && c.t[i] < b - 1e-9) ++i;
        r.pass = diam[i] <= eps + in.tol;
    } else {
        r.extrapolated = true;
        r.pass = tail_certificate(in, k);
    }
    return r;
}

double window_diameter(const SampledCurve& c, const SpaceContext& X, double a, double b) {
    std::size_t lo = 0;
    while (lo < c.t.size() && c.t[lo] < a - 1e-9) ++lo;
    std::size_t hi = lo;
    while (hi < c.t.size() && c.t[hi] <= b + 1e-9) ++hi;
    double d = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = i + 1; j < hi; ++j) d = std::max(d, X.norm(c.u[i] - c.u[j]));
    }
    return d;
}

RateReport metastable_report(const SweepInput& in, Nat k, const Counterfunction& f) {
    const SampledCurve& c = in.curve;
    const SpaceContext& X = in.A->space();
    const double eps = 1.0 / (static_cast<double>(k) + 1.0);
    const std::function<Nat(Nat)> roc = in.roc ? in.roc : [](Nat) { return Nat{0}; };
    const MetastabilityRate Phi = MetastabilityRate::from_roc(roc, "roc");

    RateReport r;
    r.scenario = in.scenario;
    r.theorem = to_string(Theorem::Metastable);
    r.k = k;
    r.f_desc = f.desc();
    r.bound = gamma(k, f, Phi, *in.Omega, *in.data);
    r.observed = kInf;

    bool out_of_horizon = false;
    for (Nat n = 0; n <= r.bound; ++n) {
        const Nat w = f(n);
        const double a = static_cast<double>(n);
        const double b = a + static_cast<double>(w);
        if (b > c.horizon() + 1e-9) {
            out_of_horizon = true;
            break;
        }
        if (window_diameter(c, X, a, b) <= eps + in.tol) {
            r.observed = a;
            r.pass = true;
            break;
        }
    }
    r.margin = static_cast<double>(r.bound) - r.observed;
    if (!r.pass && out_of_horizon) {
        // every window from ceil(horizon) on satisfies the inequality, so
        // n = ceil(horizon) is a witness whenever it is within the bound
        r.extrapolated = true;
        r.pass = tail_certificate(in, k) && std::ceil(c.horizon()) <= static_cast<double>(r.bound);
    }
    return r;
}

}  // namespace

std::vector<RateReport> sweep_theorem(Theorem th, const SweepInput& in, const std::vector<Nat>& ks,
                                      const std::vector<Counterfunction>& fs) {
    if (in.A == nullptr || in.Omega == nullptr || in.data == nullptr) throw ContractError("sweep: incomplete input");
    if (in.curve.u.empty()) throw ContractError("sweep: empty curve");
    if ((th == Theorem::Closure || th == Theorem::Metastable) && fs.empty()) {
        throw ContractError("sweep " + to_string(th) + " needs at least one counterfunction");
    }
    std::vector<RateReport> out;
    std::vector<double> diam;
    if (th != Theorem::Metastable) diam = tail_diameters(in.curve, in.A->space());
    const std::function<Nat(Nat)> roc = in.roc ? in.roc : [](Nat) { return Nat{0}; };
    for (Nat k : ks) {
        switch (th) {
            case Theorem::Orbit:
                out.push_back(cauchy_report(in, diam, th, k, rate_pr(k, *in.Omega, *in.data), "-"));
                break;
            case Theorem::Closure:
                for (const auto& f : fs) {
                    out.push_back(cauchy_report(in, diam, th, k, rate_pr_closure(k, *in.Omega, f, *in.data), f.desc()));
                }
                break;
            case Theorem::RateOfConvergence:
                out.push_back(cauchy_report(in, diam, th, k, rate_xu_roc(k, roc, *in.Omega, *in.data), "-"));
                break;
            case Theorem::Metastable:
                for (const auto& f : fs) out.push_back(metastable_report(in, k, f));
                break;
        }
    }
    return out;
}

std::vector<Counterfunction> sample_counterfunctions() {
    return {Counterfunction::constant(0),
            Counterfunction::constant(1),
            Counterfunction::constant(5),
            Counterfunction::constant(20),
            Counterfunction::plain([](Nat n) { return n; }, "n"),
            Counterfunction::plain([](Nat n) { return nat_add(nat_mul(2, n), 3); }, "2n+3")};
}

namespace {

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_reports_csv(std::ostream& os, const std::vector<RateReport>& reports) {
    os << "scenario,theorem,k,f_desc,bound,observed,margin,pass,extrapolated\n";
    for (const auto& r : reports) {
        os << csv_field(r.scenario) << ',' << r.theorem << ',' << r.k << ',' << csv_field(r.f_desc) << ',' << r.bound
           << ',' << fmt_double(r.observed) << ',' << fmt_double(r.margin) << ',' << (r.pass ? "true" : "false") << ','
           << (r.extrapolated ? "true" : "false") << '\n';
    }
}

}  // namespace sqrtsg
