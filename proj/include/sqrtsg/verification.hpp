#pragma once

// Empirical certification of the rate functionals against sampled
// trajectories: the integral lim-inf search, modulus validity, almost-orbit
// construction and the per-theorem sweeps.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sqrtsg/rates.hpp"
#include "sqrtsg/second_order.hpp"

namespace sqrtsg {

/// First grid time t in [n, (L+1)(k+1)+n] with values(t) <= 1/(k+1).
/// values are samples at t_i = i*h. Throws ContractError when the trapezoidal
/// integral exceeds L (relative slack 1e-6) or the samples end before the
/// interval does without a witness; LemmaViolation when the interval is
/// covered and no witness exists.
double integral_liminf_search(const std::vector<double>& values, double h, double L, Nat k, Nat n);

struct ModulusCheckSpec {
    std::size_t samples = 10000;
    Nat k_max = 5;
    Nat K_max = 10;
};

struct ModulusCounterexample {
    Nat k = 0;
    Nat K = 0;
    Vector x;
    double pairing = 0.0;   // <y, J(x - Px)>
    double distance = 0.0;  // |x - Px|
};

struct ModulusCheckReport {
    std::size_t samples = 0;
    std::size_t in_range = 0;  // |x|, |y| <= K
    std::size_t premise_held = 0;
    std::size_t counterexamples = 0;
    std::optional<ModulusCounterexample> first;
    bool pass = false;
};

/// Samples graph pairs with |x|, |y| <= K and checks
/// <y, J(x-Px)> <= 1/(Omega(k,K)+1)  =>  |x - Px| <= 1/(k+1).
/// Radii are drawn half uniformly, half log-uniformly down to K*1e-6.
ModulusCheckReport modulus_check(const AccretiveOperator& A, const ConvergenceModulus& Omega,
                                 const ModulusCheckSpec& spec, std::mt19937_64& rng);

enum class AlmostOrbitKind { Exact, AdditiveDecay, TimeWarp };
std::string to_string(AlmostOrbitKind kind);
AlmostOrbitKind almost_orbit_kind_from_string(const std::string& s);

struct AlmostOrbitSpec {
    AlmostOrbitKind kind = AlmostOrbitKind::Exact;
    Vector v;             // additive-decay offset
    double lambda = 1.0;  // additive-decay rate
    double delta = 0.5;   // time-warp amplitude
    /// Precisions k at which the certified rate is checked against sampled defects.
    std::vector<Nat> certify_k = {0, 1, 2, 3, 7, 15, 31};
};

struct DefectSample {
    Nat k = 0;
    double s = 0.0;
    double defect = 0.0;  // sup_t |u(s+t) - S(t)u(s)|
};

class AlmostOrbit {
public:
    Vector operator()(double t) const;
    /// u is evaluated on [0, domain()].
    double domain() const noexcept { return domain_; }
    AlmostOrbitKind kind() const noexcept { return kind_; }
    /// Rate of convergence on the almost-orbit condition.
    Nat roc(Nat k) const { return roc_(k); }
    std::function<Nat(Nat)> roc_function() const { return roc_; }
    MetastabilityRate metastability_rate() const;
    std::string describe() const { return desc_; }
    const std::vector<DefectSample>& certification() const noexcept { return certification_; }
    double lipschitz() const noexcept { return lipschitz_; }

private:
    friend AlmostOrbit make_almost_orbit(const SquareRootSemigroup&, const Vector&, const AlmostOrbitSpec&);
    AlmostOrbit() = default;

    std::shared_ptr<const Trajectory> base_;
    AlmostOrbitKind kind_ = AlmostOrbitKind::Exact;
    Vector v_;
    double lambda_ = 1.0;
    double delta_ = 0.0;
    double domain_ = 0.0;
    double lipschitz_ = 0.0;
    std::function<Nat(Nat)> roc_;
    std::string desc_;
    std::vector<DefectSample> certification_;
};

/// exact: u = S(.)x, rate 0. additive-decay: u = S(t)x + e^{-lambda t}v,
/// rate ceil(ln(2|v|(k+1))/lambda). time-warp: u = S(t + delta e^{-t})x,
/// rate ceil(ln(L delta (k+1))) with L the sampled slope of the orbit.
/// The rate is re-checked by solving from u(s); a sampled defect above
/// 1/(k+1) throws ContractError.
AlmostOrbit make_almost_orbit(const SquareRootSemigroup& S, const Vector& x, const AlmostOrbitSpec& spec);

/// Curve sampled at a uniform stride together with the distance to A^{-1}0.
struct SampledCurve {
    std::vector<double> t;
    std::vector<Vector> u;
    std::vector<double> q;  // |u - Pu|

    double horizon() const { return t.empty() ? 0.0 : t.back(); }
};

/// stride = max(h, horizon/max_samples), rounded to a multiple of h.
SampledCurve sample_curve(const std::function<Vector(double)>& u, const AccretiveOperator& A, double horizon, double h,
                          std::size_t max_samples = 500);
SampledCurve sample_curve(const Trajectory& traj, const AccretiveOperator& A, double horizon,
                          std::size_t max_samples = 500);

/// d_i = max{|u_j - u_l| : j, l >= i}.
std::vector<double> tail_diameters(const SampledCurve& c, const SpaceContext& X);

enum class Theorem { Orbit, Closure, Metastable, RateOfConvergence };
std::string to_string(Theorem th);
Theorem theorem_from_string(const std::string& s);

struct RateReport {
    std::string scenario;
    std::string theorem;
    Nat k = 0;
    std::string f_desc;
    Nat bound = 0;
    double observed = 0.0;
    double margin = 0.0;
    bool pass = false;
    bool extrapolated = false;
};

struct SweepInput {
    std::string scenario;
    const AccretiveOperator* A = nullptr;
    SampledCurve curve;
    const ConvergenceModulus* Omega = nullptr;
    const ScenarioRateData* data = nullptr;
    /// Almost-orbit rate; empty for plain orbits (equivalent to 0).
    std::function<Nat(Nat)> roc;
    double tol = 2e-6;
};

/// Orbit/Closure/RateOfConvergence: Cauchy inequality at all sampled
/// t, t' >= bound. Metastable: some n <= Gamma(k,f) with the inequality on
/// [n, n+f(n)]. Bounds past the sampled horizon are marked extrapolated and
/// judged by the tail certificate only.
std::vector<RateReport> sweep_theorem(Theorem th, const SweepInput& in, const std::vector<Nat>& ks,
                                      const std::vector<Counterfunction>& fs);

/// Default counterfunctions for metastability sweeps:
/// 0, 1, 5, 20, n, 2n+3.
std::vector<Counterfunction> sample_counterfunctions();

void write_reports_csv(std::ostream& os, const std::vector<RateReport>& reports);

}  // namespace sqrtsg
