#pragma once

#include <cstddef>

#include "sqrtsg/operators.hpp"

namespace sqrtsg {

/// Step-count control for the exponential formula.
struct ExpFormulaConfig {
    std::size_t n_min = 16;
    std::size_t n_max = std::size_t{1} << 20;
    double tol = 1e-8;
};

/// n-fold composition of J_{t/n} applied to x.
Vector exp_formula(const AccretiveOperator& A, double t, const Vector& x, std::size_t n);

struct SemigroupPoint {
    Vector value;
    std::size_t steps = 0;        // n confirmed by doubling (or the last n tried)
    double achieved_tol = 0.0;    // |result(n) - result(n/2)|
    bool converged = false;       // false: n_max reached before tol
};

/// S(t)x by doubling n from n_min until successive iterates agree to tol.
SemigroupPoint semigroup_point(const AccretiveOperator& A, double t, const Vector& x, const ExpFormulaConfig& cfg = {});

}  // namespace sqrtsg
