#include <doctest.h>

#include <cmath>

#include "sqrtsg/errors.hpp"
#include "sqrtsg/semigroup.hpp"

using namespace sqrtsg;

namespace {
Vector v2(double a, double b) {
    Vector x(2);
    x << a, b;
    return x;
}
}  // namespace

TEST_SUITE("semigroup_engine") {

TEST_CASE("exponential formula, fixed n") {
    const auto H = SpaceContext::hilbert(2);
    const Vector x = v2(1.5, -2);
    CHECK((exp_formula(*zero_operator(H), 3.0, x, 50) - x).norm() == 0.0);
    CHECK((exp_formula(*scaled_identity(H, 1.0), 0.0, x, 10) - x).norm() == 0.0);

    const Vector y = exp_formula(*scaled_identity(H, 1.0), 1.0, x, 100);
    const double c = std::pow(1.01, -100.0);
    CHECK((y - c * x).norm() <= 1e-13);
    CHECK(c == doctest::Approx(0.36971).epsilon(1e-4));
    CHECK_THROWS_AS(exp_formula(*zero_operator(H), -1.0, x, 4), ContractError);
}

TEST_CASE("exponential formula converges to e^{-t}") {
    const auto H = SpaceContext::hilbert(2);
    const Vector x = v2(1, 0);
    const Vector y = exp_formula(*scaled_identity(H, 1.0), 1.0, x, 1 << 16);
    CHECK(y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
}

TEST_CASE("semigroup_point") {
    const auto H = SpaceContext::hilbert(2);
    const SemigroupPoint z = semigroup_point(*zero_operator(H), 2.0, v2(1, 1));
    CHECK(z.converged);
    CHECK(z.steps == ExpFormulaConfig{}.n_min);

    ExpFormulaConfig cfg;
    cfg.tol = 1e-6;
    Matrix B = Matrix::Zero(2, 2);
    B(0, 0) = 1;
    B(1, 1) = 4;
    const SemigroupPoint p = semigroup_point(*linear_psd(H, B), 1.0, v2(1, 1), cfg);
    CHECK(p.converged);
    CHECK(std::abs(p.value[0] - std::exp(-1.0)) <= 2e-6);
    CHECK(std::abs(p.value[1] - std::exp(-4.0)) <= 2e-6);

    const SemigroupPoint q = semigroup_point(*scaled_identity(H, 1.0), 2.0, v2(1, 0), cfg);
    CHECK(std::abs(q.value[0] - std::exp(-2.0)) <= 2e-6);
    CHECK(std::abs(q.value[1]) == 0.0);
}

TEST_CASE("semigroup_point reports non-convergence") {
    const auto H = SpaceContext::hilbert(1);
    ExpFormulaConfig cfg;
    cfg.n_max = 64;
    cfg.tol = 1e-12;
    const SemigroupPoint p = semigroup_point(*scaled_identity(H, 1.0), 1.0, Vector::Ones(1), cfg);
    CHECK_FALSE(p.converged);
    CHECK(p.achieved_tol > 1e-12);
}

TEST_CASE("contraction along the semigroup") {
    const auto H = SpaceContext::hilbert(2);
    const auto A = quartic_gradient(H, 1.0);
    const Vector x = v2(1.2, -0.4);
    const Vector y = v2(-0.3, 0.9);
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        const Vector a = exp_formula(*A, t, x, 256);
        const Vector b = exp_formula(*A, t, y, 256);
        CHECK((a - b).norm() <= (x - y).norm() + 1e-12);
    }
}

}  // TEST_SUITE
