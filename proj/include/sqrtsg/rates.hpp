#pragma once

// Explicit rate functionals: moduli for the convergence condition, Cauchy
// rates for orbits of S_{1/2}, and the metastability functionals for
// almost-orbits. All arithmetic is exact over Nat; real-valued data is
// rounded up once when ScenarioRateData is built.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "sqrtsg/expr.hpp"
#include "sqrtsg/nat.hpp"

namespace sqrtsg {

inline constexpr Nat kDefaultEvalCap = 1'000'000;

/// Counts function evaluations within one top-level query.
class EvalBudget {
public:
    explicit EvalBudget(Nat cap = kDefaultEvalCap) : cap_(cap) {}
    void charge(const std::string& what);
    Nat used() const noexcept { return used_; }
    Nat cap() const noexcept { return cap_; }

private:
    Nat cap_;
    Nat used_ = 0;
};

class Counterfunction {
public:
    using Fn = std::function<Nat(Nat, EvalBudget&)>;

    Counterfunction(Fn fn, std::string desc) : fn_(std::move(fn)), desc_(std::move(desc)) {}

    static Counterfunction constant(Nat c);
    static Counterfunction from_expression(const std::string& text,
                                           std::shared_ptr<const FunctionTable> functions = nullptr);
    /// Plain function of n; evaluations are still charged.
    static Counterfunction plain(std::function<Nat(Nat)> fn, std::string desc);

    Nat operator()(Nat n, EvalBudget& budget) const {
        budget.charge(desc_);
        return fn_(n, budget);
    }
    /// Evaluation under a fresh budget.
    Nat operator()(Nat n) const {
        EvalBudget b;
        return (*this)(n, b);
    }
    const std::string& desc() const noexcept { return desc_; }

private:
    Fn fn_;
    std::string desc_;
};

struct ConvergenceModulus {
    enum class Provenance { StronglyAccretive, UserSupplied };

    std::function<Nat(Nat k, Nat K)> fn;
    Provenance provenance = Provenance::UserSupplied;
    std::string desc;

    Nat operator()(Nat k, Nat K) const { return fn(k, K); }
};

/// Omega(k, K) = ceil((k+1)^2 / c) - 1, from <y, J(x-Px)> >= c |x-Px|^2.
ConvergenceModulus modulus_strongly_accretive(double c);
/// Expression in the variables k and K.
ConvergenceModulus modulus_from_expression(const std::string& text,
                                           std::shared_ptr<const FunctionTable> functions = nullptr);
std::string to_string(ConvergenceModulus::Provenance p);

/// chi(k) = (D+1)(k+1), rounded up for real D.
Nat chi(double D, Nat k);
inline Nat chi(Nat D, Nat k) { return nat_mul(nat_add(D, 1), nat_add(k, 1)); }

/// Modulus of uniform continuity of P on balls around the distinguished zero.
struct ProjectionModulus {
    std::function<Nat(Nat r, Nat k)> fn;
    std::string desc;

    static ProjectionModulus identity();
    static ProjectionModulus from_expression(const std::string& text,
                                             std::shared_ptr<const FunctionTable> functions = nullptr);
    /// Enforces omega(r, k) >= k.
    Nat operator()(Nat r, Nat k) const;
};

/// The bounds f_s(n) on approximating graph points near u(s). A uniform
/// family does not depend on s.
struct WitnessFamily {
    std::function<Nat(Nat s, Nat n)> fn;
    bool uniform = true;
    std::string desc;

    static WitnessFamily constant(Nat c);
    static WitnessFamily uniform_from(Counterfunction f);
    Nat operator()(Nat s, Nat n) const { return fn(uniform ? 0 : s, n); }
};

class ScenarioRateData {
public:
    struct Params {
        double M = 1.0;
        double x_norm = 0.0;  ///< |x|
        double x_dist = 0.0;  ///< |x - Px|
        double dist0 = 0.0;   ///< d(0, Ax)
        std::optional<double> b;
        std::optional<double> D;
        Nat B = 1;  ///< orbit bound |u(t) - p| <= B
        ProjectionModulus omega = ProjectionModulus::identity();
        WitnessFamily witness = WitnessFamily::constant(1);
    };

    /// Throws ContractError when b or D violate their lower bounds.
    static ScenarioRateData make(Params p);

    double M() const noexcept { return p_.M; }
    double b() const noexcept { return b_; }
    Nat b_ceil() const noexcept { return b_ceil_; }
    Nat D() const noexcept { return D_; }
    /// Smallest admissible D for the orbit rate, before rounding.
    double D_required() const noexcept { return D_required_; }
    Nat B() const noexcept { return p_.B; }
    double x_norm() const noexcept { return p_.x_norm; }
    double x_dist() const noexcept { return p_.x_dist; }
    double dist0() const noexcept { return p_.dist0; }
    const ProjectionModulus& omega() const noexcept { return p_.omega; }
    const WitnessFamily& witness() const noexcept { return p_.witness; }

    /// b_k = |x-Px| + |x| + F.
    double b_closure(Nat F) const;
    /// D_k = ceil((1 + b_k^2)(2/M^2) F^2).
    Nat D_closure(Nat F) const;
    /// D_{s,k} = ceil((1 + (B+1)^2)(2/M^2) F^2).
    Nat D_orbit(Nat F) const;

private:
    explicit ScenarioRateData(Params p) : p_(std::move(p)) {}
    Params p_;
    double b_ = 0.0;
    Nat b_ceil_ = 0;
    double D_required_ = 0.0;
    Nat D_ = 0;
};

/// Rate of metastability Phi(k, f). When roc is set, Phi(k, f) = roc(k)
/// for every f and fn is derived from it.
struct MetastabilityRate {
    using Fn = std::function<Nat(Nat k, const Counterfunction& f, EvalBudget&)>;

    Fn fn;
    std::optional<std::function<Nat(Nat)>> roc;
    std::string desc;

    static MetastabilityRate from_roc(std::function<Nat(Nat)> roc, std::string desc);
    static MetastabilityRate general(Fn fn, std::string desc);

    Nat operator()(Nat k, const Counterfunction& f, EvalBudget& budget) const;
};

Nat rate_pr(Nat k, const ConvergenceModulus& Omega, const ScenarioRateData& data);
/// f must be nondecreasing on 0..3k+2.
Nat rate_pr_closure(Nat k, const ConvergenceModulus& Omega, const Counterfunction& f, const ScenarioRateData& data);

/// Shared state for one metastability query: the Omega_s memo and the budget.
class MetastabilityCalculator {
public:
    MetastabilityCalculator(const ConvergenceModulus& Omega, const ScenarioRateData& data, const MetastabilityRate& Phi,
                            Nat cap = kDefaultEvalCap);

    Nat omega_s(Nat s, Nat k);
    /// max{Omega_m(k) | m <= bound}.
    Nat max_omega(Nat bound, Nat k);

    /// h_{N,f}(n) = f(max{N,n}) + max{N,n} - n.
    Counterfunction h(Nat N, const Counterfunction& f);
    /// j_{k,f}(n) = max{n, Phi(8k+7, h_{n,f})} - n.
    Counterfunction j(Nat k, const Counterfunction& f);
    /// g_{k,f}(m) = Omega_m(3k+2) + f(m + Omega_m(3k+2)).
    Counterfunction g(Nat k, const Counterfunction& f);

    Nat gamma_prime(Nat k, const Counterfunction& f);
    Nat gamma(Nat k, const Counterfunction& f);

    EvalBudget& budget() noexcept { return budget_; }

private:
    const ConvergenceModulus& Omega_;
    const ScenarioRateData& data_;
    const MetastabilityRate& Phi_;
    EvalBudget budget_;
    std::map<std::pair<Nat, Nat>, Nat> memo_;
};

Nat omega_s(Nat s, Nat k, const ConvergenceModulus& Omega, const ScenarioRateData& data);
Nat gamma_prime(Nat k, const Counterfunction& f, const MetastabilityRate& Phi, const ConvergenceModulus& Omega,
                const ScenarioRateData& data);
Nat gamma(Nat k, const Counterfunction& f, const MetastabilityRate& Phi, const ConvergenceModulus& Omega,
          const ScenarioRateData& data);
/// max{Phi(8k+7), s* + Omega_{s*}(24k+23)} with s* = Phi(omega(B, 24k+23)).
Nat rate_xu_roc(Nat k, const std::function<Nat(Nat)>& roc, const ConvergenceModulus& Omega,
                const ScenarioRateData& data);

}  // namespace sqrtsg
