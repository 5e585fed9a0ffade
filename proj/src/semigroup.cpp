#include "sqrtsg/semigroup.hpp"

#include <limits>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

Vector exp_formula(const AccretiveOperator& A, double t, const Vector& x, std::size_t n) {
    if (!(t >= 0.0)) throw ContractError("exponential formula requires t >= 0");
    if (n == 0) throw ContractError("exponential formula requires n >= 1");
    A.space().check_dim(x);
    if (t == 0.0) return x;
    const double gamma = t / static_cast<double>(n);
    Vector z = x;
    for (std::size_t i = 0; i < n; ++i) z = A.resolvent(gamma, z);
    return z;
}

SemigroupPoint semigroup_point(const AccretiveOperator& A, double t, const Vector& x, const ExpFormulaConfig& cfg) {
    if (cfg.n_min == 0 || cfg.n_min > cfg.n_max) throw ContractError("invalid exponential formula step range");
    SemigroupPoint out;
    std::size_t n = cfg.n_min;
    Vector prev = exp_formula(A, t, x, n);
    out.value = prev;
    out.steps = n;
    out.achieved_tol = std::numeric_limits<double>::infinity();
    while (n * 2 <= cfg.n_max) {
        n *= 2;
        Vector next = exp_formula(A, t, x, n);
        out.achieved_tol = A.space().norm(next - prev);
        out.value = next;
        if (out.achieved_tol <= cfg.tol) {
            // n/2 is the step count whose iterate was confirmed by doubling.
            out.steps = n / 2;
            out.converged = true;
            return out;
        }
        out.steps = n;
        prev = std::move(next);
    }
    return out;
}

}  // namespace sqrtsg
