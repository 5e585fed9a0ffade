#include "sqrtsg/rates.hpp"

#include <algorithm>
#include <cmath>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

void EvalBudget::charge(const std::string& what) {
    if (++used_ > cap_) {
        throw CapError("evaluation cap " + std::to_string(cap_) + " exceeded while evaluating " + what);
    }
}

Counterfunction Counterfunction::constant(Nat c) {
    return Counterfunction([c](Nat, EvalBudget&) { return c; }, "const " + std::to_string(c));
}

Counterfunction Counterfunction::from_expression(const std::string& text, std::shared_ptr<const FunctionTable> functions) {
    auto e = std::make_shared<const Expression>(Expression::parse(text, {"n"}, std::move(functions)));
    return Counterfunction([e](Nat n, EvalBudget&) { return (*e)(n); }, text);
}

Counterfunction Counterfunction::plain(std::function<Nat(Nat)> fn, std::string desc) {
    return Counterfunction([fn = std::move(fn)](Nat n, EvalBudget&) { return fn(n); }, std::move(desc));
}

ConvergenceModulus modulus_strongly_accretive(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("strong accretivity constant must be positive");
    ConvergenceModulus m;
    m.provenance = ConvergenceModulus::Provenance::StronglyAccretive;
    m.desc = "ceil((k+1)^2/" + std::to_string(c) + ")-1";
    m.fn = [c](Nat k, Nat) {
        const Nat sq = nat_sq(nat_add(k, 1));
        return ceil_nat(static_cast<double>(sq) / c) - 1;
    };
    return m;
}

ConvergenceModulus modulus_from_expression(const std::string& text, std::shared_ptr<const FunctionTable> functions) {
    auto e = std::make_shared<const Expression>(Expression::parse(text, {"k", "K"}, std::move(functions)));
    ConvergenceModulus m;
    m.provenance = ConvergenceModulus::Provenance::UserSupplied;
    m.desc = text;
    m.fn = [e](Nat k, Nat K) {
        const Nat args[2] = {k, K};
        return e->eval(args);
    };
    return m;
}

std::string to_string(ConvergenceModulus::Provenance p) {
    return p == ConvergenceModulus::Provenance::StronglyAccretive ? "strongly-accretive-derived" : "user-supplied";
}

Nat chi(double D, Nat k) {
    if (!(D >= 0.0)) throw ContractError("chi requires D >= 0");
    const Nat k1 = nat_add(k, 1);
    // exact when D is integral, which is the common case after rounding
    if (D == std::floor(D) && D < 9007199254740992.0) return chi(static_cast<Nat>(D), k);
    return ceil_nat((D + 1.0) * static_cast<double>(k1));
}

ProjectionModulus ProjectionModulus::identity() {
    return ProjectionModulus{[](Nat, Nat k) { return k; }, "k"};
}

ProjectionModulus ProjectionModulus::from_expression(const std::string& text,
                                                     std::shared_ptr<const FunctionTable> functions) {
    auto e = std::make_shared<const Expression>(Expression::parse(text, {"r", "k"}, std::move(functions)));
    return ProjectionModulus{[e](Nat r, Nat k) {
                                 const Nat args[2] = {r, k};
                                 return e->eval(args);
                             },
                             text};
}

Nat ProjectionModulus::operator()(Nat r, Nat k) const {
    const Nat v = fn(r, k);
    if (v < k) {
        throw ContractError("projection modulus '" + desc + "' violates omega(r,k) >= k at r=" + std::to_string(r) +
                            ", k=" + std::to_string(k));
    }
    return v;
}

WitnessFamily WitnessFamily::constant(Nat c) {
    return WitnessFamily{[c](Nat, Nat) { return c; }, true, "const " + std::to_string(c)};
}

WitnessFamily WitnessFamily::uniform_from(Counterfunction f) {
    std::string desc = f.desc();
    return WitnessFamily{[f = std::move(f)](Nat, Nat n) { return f(n); }, true, std::move(desc)};
}

ScenarioRateData ScenarioRateData::make(Params p) {
    if (!(p.M > 0.0) || !std::isfinite(p.M)) throw ContractError("rate data: M must be positive");
    if (p.x_norm < 0.0 || p.x_dist < 0.0 || p.dist0 < 0.0) throw ContractError("rate data: norms must be nonnegative");
    if (p.B < 1) throw ContractError("rate data: B must be at least 1");
    if (!p.omega.fn) throw ContractError("rate data: projection modulus missing");
    if (!p.witness.fn) throw ContractError("rate data: witness family missing");

    ScenarioRateData d(p);
    const double b_min = std::max(p.x_norm, p.x_dist);
    if (p.b) {
        if (*p.b + 1e-12 < b_min) {
            throw ContractError("rate data: b = " + std::to_string(*p.b) + " below max(|x|, |x-Px|) = " +
                                std::to_string(b_min));
        }
        d.b_ = *p.b;
    } else {
        d.b_ = b_min;
    }
    d.b_ceil_ = ceil_nat(d.b_);
    d.D_required_ = (1.0 + d.b_ * d.b_) * (2.0 / (p.M * p.M)) * std::sqrt(p.dist0) * std::pow(d.b_, 1.5);
    if (p.D) {
        if (*p.D < d.D_required_) {
            throw ContractError("rate data: D = " + std::to_string(*p.D) + " below required " +
                                std::to_string(d.D_required_));
        }
        d.D_ = ceil_nat(*p.D);
    } else {
        d.D_ = ceil_nat(d.D_required_);
    }
    return d;
}

double ScenarioRateData::b_closure(Nat F) const { return p_.x_dist + p_.x_norm + static_cast<double>(F); }

Nat ScenarioRateData::D_closure(Nat F) const {
    const double bk = b_closure(F);
    const double f = static_cast<double>(F);
    return ceil_nat((1.0 + bk * bk) * (2.0 / (p_.M * p_.M)) * f * f);
}

Nat ScenarioRateData::D_orbit(Nat F) const {
    const double b1 = static_cast<double>(p_.B) + 1.0;
    const double f = static_cast<double>(F);
    return ceil_nat((1.0 + b1 * b1) * (2.0 / (p_.M * p_.M)) * f * f);
}

MetastabilityRate MetastabilityRate::from_roc(std::function<Nat(Nat)> roc, std::string desc) {
    MetastabilityRate r;
    r.roc = roc;
    r.fn = [roc](Nat k, const Counterfunction&, EvalBudget&) { return roc(k); };
    r.desc = std::move(desc);
    return r;
}

MetastabilityRate MetastabilityRate::general(Fn fn, std::string desc) {
    MetastabilityRate r;
    r.fn = std::move(fn);
    r.desc = std::move(desc);
    return r;
}

Nat MetastabilityRate::operator()(Nat k, const Counterfunction& f, EvalBudget& budget) const {
    budget.charge(desc);
    return fn(k, f, budget);
}

namespace {

Nat squared_less_one(Nat omega) { return trunc_sub(nat_sq(nat_add(omega, 1)), 1); }

}  // namespace

Nat rate_pr(Nat k, const ConvergenceModulus& Omega, const ScenarioRateData& data) {
    const Nat K = std::max<Nat>(1, data.b_ceil());
    const Nat inner = squared_less_one(Omega(nat_add(nat_mul(2, k), 1), K));
    return chi(data.D(), inner);
}

Nat rate_pr_closure(Nat k, const ConvergenceModulus& Omega, const Counterfunction& f, const ScenarioRateData& data) {
    EvalBudget budget;
    const Nat idx = nat_add(nat_mul(3, k), 2);
    Nat prev = 0;
    for (Nat n = 0; n <= idx; ++n) {
        const Nat v = f(n, budget);
        if (n > 0 && v < prev) {
            throw ContractError("counterfunction '" + f.desc() + "' is not nondecreasing at n=" + std::to_string(n));
        }
        prev = v;
    }
    const Nat F = prev;
    const Nat K = std::max<Nat>(1, F);
    const Nat inner = squared_less_one(Omega(nat_add(nat_mul(6, k), 5), K));
    return chi(data.D_closure(F), inner);
}

MetastabilityCalculator::MetastabilityCalculator(const ConvergenceModulus& Omega, const ScenarioRateData& data,
                                                 const MetastabilityRate& Phi, Nat cap)
    : Omega_(Omega), data_(data), Phi_(Phi), budget_(cap) {}

Nat MetastabilityCalculator::omega_s(Nat s, Nat k) {
    const Nat key_s = data_.witness().uniform ? 0 : s;
    const auto key = std::make_pair(key_s, k);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    budget_.charge("Omega_s");
    const Nat idx = nat_add(nat_mul(3, k), 2);
    const Nat F = data_.witness()(key_s, data_.omega()(nat_add(data_.B(), 1), idx));
    const Nat inner = squared_less_one(Omega_(idx, std::max<Nat>(1, F)));
    const Nat v = chi(data_.D_orbit(F), inner);
    memo_.emplace(key, v);
    return v;
}

Nat MetastabilityCalculator::max_omega(Nat bound, Nat k) {
    if (data_.witness().uniform) return omega_s(0, k);
    Nat best = 0;
    for (Nat m = 0;; ++m) {
        best = std::max(best, omega_s(m, k));
        if (m == bound) break;
    }
    return best;
}

Counterfunction MetastabilityCalculator::h(Nat N, const Counterfunction& f) {
    return Counterfunction(
        [N, f](Nat n, EvalBudget& b) {
            const Nat m = std::max(N, n);
            return trunc_sub(nat_add(f(m, b), m), n);
        },
        "h[" + std::to_string(N) + "," + f.desc() + "]");
}

Counterfunction MetastabilityCalculator::j(Nat k, const Counterfunction& f) {
    return Counterfunction(
        [this, k, f](Nat n, EvalBudget& b) {
            const Nat phi = Phi_(nat_add(nat_mul(8, k), 7), h(n, f), b);
            return std::max(n, phi) - n;
        },
        "j[" + std::to_string(k) + "," + f.desc() + "]");
}

Counterfunction MetastabilityCalculator::g(Nat k, const Counterfunction& f) {
    return Counterfunction(
        [this, idx = nat_add(nat_mul(3, k), 2), f](Nat m, EvalBudget& b) {
            const Nat om = omega_s(m, idx);
            return nat_add(om, f(nat_add(m, om), b));
        },
        "g[" + std::to_string(k) + "," + f.desc() + "]");
}

Nat MetastabilityCalculator::gamma_prime(Nat k, const Counterfunction& f) {
    const Nat idx = nat_add(nat_mul(3, k), 2);
    const Nat bound = Phi_(data_.omega()(data_.B(), idx), g(k, f), budget_);
    return nat_add(bound, max_omega(bound, idx));
}

Nat MetastabilityCalculator::gamma(Nat k, const Counterfunction& f) {
    const Nat K = nat_add(nat_mul(8, k), 7);
    const Nat G = gamma_prime(K, j(k, f));
    Nat best = G;
    if (Phi_.roc) {
        // Phi(K, h_N) = roc(K) for every N
        budget_.charge(Phi_.desc);
        return std::max(best, (*Phi_.roc)(K));
    }
    for (Nat N = 0;; ++N) {
        best = std::max(best, Phi_(K, h(N, f), budget_));
        if (N == G) break;
    }
    return best;
}

Nat omega_s(Nat s, Nat k, const ConvergenceModulus& Omega, const ScenarioRateData& data) {
    const MetastabilityRate none = MetastabilityRate::from_roc([](Nat) { return Nat{0}; }, "0");
    MetastabilityCalculator calc(Omega, data, none);
    return calc.omega_s(s, k);
}

Nat gamma_prime(Nat k, const Counterfunction& f, const MetastabilityRate& Phi, const ConvergenceModulus& Omega,
                const ScenarioRateData& data) {
    MetastabilityCalculator calc(Omega, data, Phi);
    return calc.gamma_prime(k, f);
}

Nat gamma(Nat k, const Counterfunction& f, const MetastabilityRate& Phi, const ConvergenceModulus& Omega,
          const ScenarioRateData& data) {
    MetastabilityCalculator calc(Omega, data, Phi);
    return calc.gamma(k, f);
}

Nat rate_xu_roc(Nat k, const std::function<Nat(Nat)>& roc, const ConvergenceModulus& Omega,
                const ScenarioRateData& data) {
    const Nat K = nat_add(nat_mul(24, k), 23);
    const Nat s_star = roc(data.omega()(data.B(), K));
    const MetastabilityRate none = MetastabilityRate::from_roc([](Nat) { return Nat{0}; }, "0");
    MetastabilityCalculator calc(Omega, data, none);
    return std::max(roc(nat_add(nat_mul(8, k), 7)), nat_add(s_star, calc.omega_s(s_star, K)));
}

}  // namespace sqrtsg
