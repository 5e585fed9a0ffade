#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "sqrtsg/errors.hpp"
#include "sqrtsg/second_order.hpp"

using namespace sqrtsg;

namespace {
Vector v2(double a, double b) {
    Vector x(2);
    x << a, b;
    return x;
}
Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}
double max_error(const Trajectory& u, double t_max, const std::function<Vector(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < u.size() && u.grid().node(i) <= t_max; ++i) {
        e = std::max(e, (u[i] - exact(u.grid().node(i))).norm());
    }
    return e;
}
}  // namespace

TEST_SUITE("second_order") {

TEST_CASE("time grid") {
    const TimeGrid g = TimeGrid::make(2.0, 0.25);
    CHECK(g.intervals() == 8);
    CHECK(g.size() == 9);
    CHECK(g.node(3) == 0.75);
    CHECK_THROWS_AS(TimeGrid::make(1.0, 0.3), ContractError);
    CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0), ContractError);
}

TEST_CASE("hermite interpolation") {
    const TimeGrid g = TimeGrid::make(4.0, 0.05);
    std::vector<Vector> vals;
    for (std::size_t i = 0; i < g.size(); ++i) vals.push_back(Vector::Constant(1, std::exp(-g.node(i))));
    const Trajectory u(g, vals);
    for (double t : {0.0, 0.025, 0.3333, 1.01, 2.777, 4.0}) CHECK(std::abs(u.at(t)[0] - std::exp(-t)) <= 2e-5);
    CHECK(u.first()[20][0] == doctest::Approx(-std::exp(-1.0)).epsilon(1e-3));
    CHECK(u.second()[20][0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
    CHECK_THROWS_AS(u.at(4.5), DomainError);
}

TEST_CASE("regularized solve: zero operator with p = 1 gives e^{-t}") {
    const auto A = zero_operator(SpaceContext::hilbert(1));
    const TimeGrid g = TimeGrid::make(20.0, 0.01);
    RegularizedSolveInfo info;
    const Trajectory u = solve_regularized(*A, 0.1, 1.0, Vector::Ones(1), g, {}, nullptr, &info);
    CHECK(max_error(u, 15.0, [](double t) { return Vector::Constant(1, std::exp(-t)); }) <= 1e-4);
    CHECK(info.residual <= 1e-8);
    CHECK_FALSE(info.truncation_flag);
}

TEST_CASE("regularized solve: decay rate for c = 1, r = 0.1, p = 0.01") {
    const auto A = scaled_identity(SpaceContext::hilbert(2), 1.0);
    const TimeGrid g = TimeGrid::make(30.0, 0.01);
    const Trajectory u = solve_regularized(*A, 0.1, 0.01, v2(1, 0), g);
    const double rate = std::sqrt(1.0 / 1.1 + 0.01);
    CHECK(rate == doctest::Approx(0.9587).epsilon(1e-4));
    const double t = 5.0;
    CHECK(-std::log(u.at(t).norm()) / t == doctest::Approx(rate).epsilon(1e-4));
}

TEST_CASE("regularized solve: x = 0 stays 0") {
    const auto A = quartic_gradient(SpaceContext::hilbert(2), 1.0);
    const Trajectory u = solve_regularized(*A, 0.1, 0.01, Vector::Zero(2), TimeGrid::make(5.0, 0.05));
    for (const auto& v : u.values()) CHECK(v.norm() == 0.0);
}

TEST_CASE("truncation flag for short horizons") {
    const auto A = scaled_identity(SpaceContext::hilbert(1), 0.01);
    RegularizedSolveInfo info;
    solve_regularized(*A, 0.1, 1e-4, Vector::Ones(1), TimeGrid::make(2.0, 0.05), {}, nullptr, &info);
    CHECK(info.truncation_flag);
}

TEST_CASE("default schedule decreases to 0") {
    const auto s = default_schedule();
    REQUIRE(s.size() >= 3);
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].r < s[i - 1].r);
        CHECK(s[i].reg_p < s[i - 1].reg_p);
    }
    CHECK(s.back().r <= 1e-8);
}

TEST_CASE("continuation: oracle examples") {
    const auto H = SpaceContext::hilbert(2);
    const TimeGrid g = TimeGrid::make(30.0, 0.01);

    const SecondOrderSolution lin = solve_second_order(*linear_psd(H, diag2(1, 4)), v2(1, 1), g);
    CHECK(lin.stabilized);
    CHECK(max_error(lin.trajectory, 25.0, [](double t) { return v2(std::exp(-t), std::exp(-2 * t)); }) <= 1e-4);

    const SecondOrderSolution zero = solve_second_order(*zero_operator(H), v2(1, -2), g);
    CHECK(zero.stabilized);
    // The final Yosida term drifts u by about r T^2/2 |x| = 1e-5.
    CHECK(max_error(zero.trajectory, 30.0, [](double) { return v2(1, -2); }) <= 2e-5);

    const SecondOrderSolution c4 = solve_second_order(*scaled_identity(H, 4.0), v2(1, 0), g);
    CHECK(max_error(c4.trajectory, 25.0, [](double t) { return v2(std::exp(-2 * t), 0); }) <= 1e-4);
}

TEST_CASE("square root semigroup evaluation") {
    const auto H = SpaceContext::hilbert(2);
    const SquareRootSemigroup S(linear_psd(H, diag2(1, 4)), TimeGrid::make(20.0, 0.01), {}, 2.0);
    const Vector x = v2(1, 1);
    CHECK((sqrt_semigroup(S, 0.0, x) - x).norm() <= 1e-12);
    const Vector y = S.apply(1.0, x);
    CHECK(y[0] == doctest::Approx(0.3679).epsilon(1e-3));
    CHECK(y[1] == doctest::Approx(0.1353).epsilon(1e-3));
    CHECK_THROWS_AS(S.apply(19.0, x), DomainError);
    CHECK_THROWS_AS(S.apply(-1.0, x), DomainError);

    const SquareRootSemigroup Z(zero_operator(H), TimeGrid::make(10.0, 0.05), {}, 1.0);
    for (double t : {0.0, 1.0, 4.5, 9.0}) CHECK((Z.apply(t, x) - x).norm() <= 1e-5);
}

TEST_CASE("semigroup property S(t+s) = S(t)S(s) on a linear example") {
    const auto H = SpaceContext::hilbert(2);
    const SquareRootSemigroup S(linear_psd(H, diag2(0.5, 2)), TimeGrid::make(30.0, 0.01), {}, 5.0);
    const Vector x = v2(0.3, -1.1);
    const Trajectory u = S.orbit(x).trajectory;
    const Trajectory w = S.orbit(u.at(1.5)).trajectory;
    for (double t : {0.0, 0.7, 2.0, 5.0}) CHECK((w.at(t) - u.at(t + 1.5)).norm() <= 1e-4);
}

TEST_CASE("linear oracle") {
    const Vector y = linear_oracle(diag2(1, 4), 1.0, v2(1, 1));
    CHECK(y[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(y[1] == doctest::Approx(std::exp(-2.0)));
    CHECK((linear_oracle(diag2(1, 4), 0.0, v2(3, 2)) - v2(3, 2)).norm() == 0.0);
    CHECK((linear_oracle(Matrix::Zero(2, 2), 7.0, v2(3, 2)) - v2(3, 2)).norm() <= 1e-15);
    CHECK_THROWS_AS(linear_oracle(diag2(-1, 1), 1.0, v2(1, 1)), ContractError);
}

TEST_CASE("a-priori bounds") {
    const auto H = SpaceContext::hilbert(2);
    const TimeGrid g = TimeGrid::make(30.0, 0.01);

    const auto Z = zero_operator(H);
    const AprioriBounds z = check_apriori(*Z, v2(1, 1), solve_second_order(*Z, v2(1, 1), g).trajectory, 1.0);
    CHECK(z.pass);
    CHECK(z.int_du_sq <= 1e-8);

    const auto I = scaled_identity(H, 1.0);
    const AprioriBounds b = check_apriori(*I, v2(1, 0), solve_second_order(*I, v2(1, 0), g).trajectory, 1.0);
    CHECK(b.pass);
    CHECK(b.int_du_sq == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(b.int_ddu_sq == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(b.rhs_du == doctest::Approx(2.0));
    CHECK(b.rhs_ddu == doctest::Approx(2.0));
    CHECK(b.rhs_ddu - b.int_ddu_sq >= 1.4);

    // c = 9: int |u''|^2 = c^{3/2}/2 = 13.5 against 2 c^{1/2} = 6. The stated
    // bound fails, the exponent-swapped one holds.
    const auto C = scaled_identity(H, 9.0);
    const AprioriBounds c = check_apriori(*C, v2(1, 0), solve_second_order(*C, v2(1, 0), g).trajectory, 1.0);
    CHECK_FALSE(c.pass_ddu);
    CHECK(c.swapped_pass);
}

TEST_CASE("fejer monotonicity") {
    const auto H = SpaceContext::hilbert(2);
    const TimeGrid g = TimeGrid::make(20.0, 0.02);
    for (const auto& A : {scaled_identity(H, 1.0), zero_operator(H), linear_psd(H, diag2(0, 2)),
                          box_distance_gradient(H, v2(-0.2, -0.2), v2(0.2, 0.2))}) {
        CAPTURE(A->describe());
        const Trajectory u = solve_second_order(*A, v2(1, -0.5), g).trajectory;
        const FejerReport f = check_fejer(*A, u, 18.0);
        CHECK(f.pass);
        CHECK(f.max_increase <= 1e-6);
    }
}

TEST_CASE("trajectory csv layout") {
    const auto A = scaled_identity(SpaceContext::hilbert(2), 1.0);
    const Trajectory u = solve_second_order(*A, v2(1, 0), TimeGrid::make(2.0, 0.5)).trajectory;
    std::ostringstream os;
    write_trajectory_csv(os, *A, u);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,u1,u2,norm,dist_zero_set");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
}

}  // TEST_SUITE
