#include "sqrtsg/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

TimeGrid TimeGrid::make(double horizon, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("time step must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ContractError("horizon must be positive");
    const double ratio = horizon / step;
    const double n = std::round(ratio);
    if (n < 2 || std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio)) {
        throw ContractError("horizon must be an integral multiple (>= 2) of the step");
    }
    return TimeGrid(horizon, step, static_cast<std::size_t>(n));
}

Trajectory::Trajectory(TimeGrid grid, std::vector<Vector> values) : grid_(grid), values_(std::move(values)) {
    const std::size_t n = values_.size();
    if (n != grid_.size()) throw DimensionError("trajectory length does not match the grid");
    const Eigen::Index d = values_.front().size();
    for (const auto& v : values_) {
        if (v.size() != d) throw DimensionError("trajectory values have inconsistent dimension");
        if (!v.allFinite()) throw SolverError("trajectory contains non-finite values", std::nan(""));
    }
    const double h = grid_.step();
    first_.resize(n);
    second_.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        first_[i] = (values_[i + 1] - values_[i - 1]) / (2.0 * h);
        second_[i] = (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / (h * h);
    }
    const auto& u = values_;
    if (n >= 4) {
        first_[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        first_[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        second_[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
        second_[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
    } else {
        first_[0] = (u[1] - u[0]) / h;
        first_[n - 1] = (u[n - 1] - u[n - 2]) / h;
        second_[0] = second_[1];
        second_[n - 1] = second_[n - 2];
    }
}

Vector Trajectory::at(double t) const {
    const double T = grid_.horizon();
    if (!(t >= 0.0) || t > T * (1.0 + 1e-14)) throw DomainError("time " + std::to_string(t) + " outside the grid");
    const double h = grid_.step();
    const double pos = std::min(t / h, static_cast<double>(grid_.intervals()));
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i >= grid_.intervals()) i = grid_.intervals() - 1;
    const double s = pos - static_cast<double>(i);
    if (s == 0.0) return values_[i];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * values_[i] + h10 * h * first_[i] + h01 * values_[i + 1] + h11 * h * first_[i + 1];
}

std::vector<ScheduleStep> default_schedule() {
    std::vector<ScheduleStep> s;
    for (int e = 1; e <= 8; ++e) {
        const double v = std::pow(10.0, -e);
        s.push_back({v, v * v});
    }
    return s;
}

namespace {

// Discrete equations, rows i = 1..N (u_0 = x fixed):
//   (u_{i+1} - 2u_i + u_{i-1})/h^2 - A_r u_i - p u_i = 0        (i < N)
//   (2u_{N-1} - 2u_N)/h^2          - A_r u_N - p u_N = 0        (ghost u_{N+1} = u_{N-1})
struct DiscreteSystem {
    const AccretiveOperator& A;
    double r;
    double p;
    double h;
    const Vector& x;
    std::size_t N;

    const Vector& left(const std::vector<Vector>& u, std::size_t i) const { return i == 1 ? x : u[i - 2]; }

    // u holds u_1..u_N at indices 0..N-1.
    // maxres is the sup norm (convergence test), merit the squared l2 norm
    // (line search; the Newton direction is a descent direction for it).
    std::vector<Vector> residual(const std::vector<Vector>& u, double& maxres, double& merit) const {
        const double ih2 = 1.0 / (h * h);
        std::vector<Vector> F(N);
        maxres = 0.0;
        merit = 0.0;
        for (std::size_t i = 1; i <= N; ++i) {
            const Vector& ui = u[i - 1];
            const Vector force = A.yosida(r, ui) + p * ui;
            if (i < N) {
                F[i - 1] = (u[i] - 2.0 * ui + left(u, i)) * ih2 - force;
            } else {
                F[i - 1] = (2.0 * left(u, i) - 2.0 * ui) * ih2 - force;
            }
            maxres = std::max(maxres, F[i - 1].lpNorm<Eigen::Infinity>());
            merit += F[i - 1].squaredNorm();
        }
        if (!std::isfinite(maxres) || !std::isfinite(merit)) {
            maxres = merit = std::numeric_limits<double>::infinity();
        }
        return F;
    }

    // Block Thomas elimination for J * delta = -F. Off-diagonal blocks are
    // multiples of the identity.
    std::vector<Vector> newton_step(const std::vector<Vector>& u, const std::vector<Vector>& F) const {
        const int d = A.dim();
        const double ih2 = 1.0 / (h * h);
        const Matrix I = Matrix::Identity(d, d);
        std::vector<Matrix> inv(N);
        std::vector<Vector> dp(N);
        for (std::size_t i = 1; i <= N; ++i) {
            Matrix D = -2.0 * ih2 * I - A.yosida_jacobian(r, u[i - 1]) - p * I;
            const double lower = (i == N) ? 2.0 * ih2 : ih2;
            Vector rhs = -F[i - 1];
            if (i > 1) {
                // D - lower * inv_{i-1} * upper, with upper = ih2
                D -= lower * ih2 * inv[i - 2];
                rhs -= lower * dp[i - 2];
            }
            inv[i - 1] = D.inverse();
            dp[i - 1] = inv[i - 1] * rhs;
        }
        std::vector<Vector> delta(N);
        delta[N - 1] = dp[N - 1];
        for (std::size_t i = N - 1; i >= 1; --i) {
            delta[i - 1] = dp[i - 1] - inv[i - 1] * (ih2 * delta[i]);
        }
        return delta;
    }
};

}  // namespace

Trajectory solve_regularized(const AccretiveOperator& A, double r, double reg_p, const Vector& x, const TimeGrid& grid,
                             const SecondOrderOptions& opts, const Trajectory* warm_start, RegularizedSolveInfo* info) {
    if (!(r > 0.0)) throw ContractError("Yosida parameter r must be positive");
    if (!(reg_p > 0.0)) throw ContractError("regularization weight must be positive");
    A.space().check_dim(x);
    const std::size_t N = grid.intervals();
    DiscreteSystem sys{A, r, reg_p, grid.step(), x, N};

    std::vector<Vector> u(N);
    if (warm_start != nullptr && warm_start->grid() == grid && warm_start->dim() == A.dim()) {
        for (std::size_t i = 1; i <= N; ++i) u[i - 1] = (*warm_start)[i];
    } else {
        for (auto& v : u) v = x;
    }

    const double tol = opts.residual_tol * std::max(1.0, A.space().norm(x));
    double res = 0.0, merit = 0.0;
    std::vector<Vector> F = sys.residual(u, res, merit);
    int it = 0;
    for (; it < opts.max_newton && res > tol; ++it) {
        const std::vector<Vector> delta = sys.newton_step(u, F);
        double damping = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 30; ++halvings) {
            std::vector<Vector> trial(N);
            for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + damping * delta[i];
            double tres = 0.0, tmerit = 0.0;
            std::vector<Vector> Ft = sys.residual(trial, tres, tmerit);
            if (tmerit < merit) {
                u = std::move(trial);
                F = std::move(Ft);
                res = tres;
                merit = tmerit;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(res <= tol)) throw SolverError("regularized second-order Newton solve did not converge", res);

    std::vector<Vector> values;
    values.reserve(N + 1);
    values.push_back(x);
    for (auto& v : u) values.push_back(std::move(v));
    Trajectory traj(grid, std::move(values));

    if (info != nullptr) {
        info->residual = res;
        info->newton_iterations = it;
        const Vector& tail = traj[N - 1];
        info->tail_distance = A.space().norm(tail - A.project_zeros(tail));
        const double scale = A.space().norm(x - A.project_zeros(x));
        info->truncation_flag = info->tail_distance > 0.01 * scale + 1e-12;
    }
    return traj;
}

SecondOrderSolution solve_second_order(const AccretiveOperator& A, const Vector& x, const TimeGrid& grid,
                                       const SecondOrderOptions& opts) {
    if (opts.schedule.empty()) throw ContractError("continuation schedule is empty");
    std::optional<Trajectory> current;
    SecondOrderSolution out{Trajectory(grid, std::vector<Vector>(grid.size(), x)), false, 0, 0.0, {}};
    for (std::size_t k = 0; k < opts.schedule.size(); ++k) {
        const ScheduleStep& step = opts.schedule[k];
        RegularizedSolveInfo info;
        Trajectory next = solve_regularized(A, step.r, step.reg_p, x, grid, opts, current ? &*current : nullptr, &info);
        out.last_info = info;
        out.steps_used = k + 1;
        if (current) {
            double change = 0.0;
            for (std::size_t i = 0; i < next.size(); ++i) {
                change = std::max(change, A.space().norm(next[i] - (*current)[i]));
            }
            out.last_change = change;
            current = std::move(next);
            if (change <= opts.stabilization_tol) {
                out.stabilized = true;
                break;
            }
        } else {
            current = std::move(next);
        }
    }
    out.trajectory = std::move(*current);
    return out;
}

SquareRootSemigroup::SquareRootSemigroup(OperatorPtr A, TimeGrid grid, SecondOrderOptions opts, double margin)
    : A_(std::move(A)), grid_(grid), opts_(std::move(opts)), margin_(margin) {
    if (!A_) throw ContractError("square-root semigroup needs an operator");
    if (!(margin >= 0.0) || margin >= grid_.horizon()) throw ContractError("trust margin must lie in [0, T)");
}

SecondOrderSolution SquareRootSemigroup::orbit(const Vector& x) const { return solve_second_order(*A_, x, grid_, opts_); }

Vector SquareRootSemigroup::apply(double t, const Vector& x) const {
    if (!(t >= 0.0) || t > trusted_horizon()) {
        throw DomainError("t = " + std::to_string(t) + " outside the trusted horizon [0, " +
                          std::to_string(trusted_horizon()) + "]");
    }
    if (t == 0.0) return x;
    return orbit(x).trajectory.at(t);
}

Vector sqrt_semigroup(const SquareRootSemigroup& S, double t, const Vector& x) { return S.apply(t, x); }

AprioriBounds check_apriori(const AccretiveOperator& A, const Vector& x, const Trajectory& traj, double M) {
    if (!(M > 0.0)) throw ContractError("M must be positive");
    const SpaceContext& X = A.space();
    AprioriBounds b;
    const double h = traj.grid().step();
    double du = 0.0, ddu = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double w = (i == 0 || i + 1 == traj.size()) ? 0.5 : 1.0;
        b.sup_norm = std::max(b.sup_norm, X.norm(traj[i]));
        const double n1 = X.norm(traj.first()[i]);
        const double n2 = X.norm(traj.second()[i]);
        du += w * n1 * n1;
        ddu += w * n2 * n2;
    }
    b.int_du_sq = du * h;
    b.int_ddu_sq = ddu * h;
    b.dist0 = A.dist_zero(x);
    b.x_norm = X.norm(x);
    const double c = 2.0 / (M * M);
    b.rhs_sup = b.x_norm;
    b.rhs_du = c * std::pow(b.dist0, 1.5) * std::sqrt(b.x_norm);
    b.rhs_ddu = c * std::sqrt(b.dist0) * std::pow(b.x_norm, 1.5);
    b.pass_sup = b.sup_norm <= b.rhs_sup + 1e-6;
    b.pass_du = b.int_du_sq <= b.rhs_du + 1e-3 * (1.0 + b.rhs_du);
    b.pass_ddu = b.int_ddu_sq <= b.rhs_ddu + 1e-3 * (1.0 + b.rhs_ddu);
    b.pass = b.pass_sup && b.pass_du && b.pass_ddu;
    b.swapped_rhs_du = b.rhs_ddu;
    b.swapped_rhs_ddu = b.rhs_du;
    b.swapped_pass = b.pass_sup && b.int_du_sq <= b.swapped_rhs_du + 1e-3 * (1.0 + b.swapped_rhs_du) &&
                     b.int_ddu_sq <= b.swapped_rhs_ddu + 1e-3 * (1.0 + b.swapped_rhs_ddu);
    return b;
}

Vector linear_oracle(const Matrix& B, double t, const Vector& x) {
    if (B.rows() != B.cols() || B.rows() != x.size()) throw DimensionError("oracle matrix/vector dimension mismatch");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw ContractError("oracle matrix is not symmetric");
    if (!(t >= 0.0)) throw ContractError("oracle requires t >= 0");
    Eigen::SelfAdjointEigenSolver<Matrix> es(B);
    const Vector& lam = es.eigenvalues();
    if (lam.minCoeff() < -1e-10) throw ContractError("oracle matrix is not positive semidefinite");
    const Matrix& V = es.eigenvectors();
    Vector coef = V.transpose() * x;
    for (Eigen::Index i = 0; i < lam.size(); ++i) coef[i] *= std::exp(-t * std::sqrt(std::max(0.0, lam[i])));
    return V * coef;
}

FejerReport check_fejer(const AccretiveOperator& A, const Trajectory& traj, double trusted_horizon) {
    const SpaceContext& X = A.space();
    const TimeGrid& g = traj.grid();
    const std::size_t last = std::min(g.intervals(), static_cast<std::size_t>(std::floor(trusted_horizon / g.step() + 1e-9)));
    std::vector<double> q(last + 1);
    for (std::size_t i = 0; i <= last; ++i) q[i] = X.norm(traj[i] - A.project_zeros(traj[i]));

    FejerReport rep;
    rep.max_increase = -std::numeric_limits<double>::infinity();
    rep.max_stability_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < last; ++i) {
        rep.max_increase = std::max(rep.max_increase, q[i + 1] - q[i]);
        rep.max_stability_excess = std::max(rep.max_stability_excess, X.norm(traj[i + 1] - traj[i]) - 2.0 * q[i]);
    }
    rep.max_shift_excess = rep.max_stability_excess;
    const std::size_t stride = std::max<std::size_t>(1, last / 400);
    for (std::size_t i = 0; i <= last; i += stride) {
        for (std::size_t j = i + stride; j <= last; j += stride) {
            rep.max_shift_excess = std::max(rep.max_shift_excess, X.norm(traj[j] - traj[i]) - 2.0 * q[i]);
        }
    }
    rep.monotone = rep.max_increase <= 1e-6;
    rep.stable = rep.max_stability_excess <= 1e-6;
    rep.pass = rep.monotone && rep.stable;
    return rep;
}

void write_trajectory_csv(std::ostream& os, const AccretiveOperator& A, const Trajectory& traj, std::size_t stride) {
    if (stride == 0) stride = 1;
    const int d = traj.dim();
    os << "t";
    for (int j = 0; j < d; ++j) os << ",u" << (j + 1);
    os << ",norm,dist_zero_set\n";
    const std::size_t n = traj.size();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; i += stride) rows.push_back(i);
    if (rows.back() != n - 1) rows.push_back(n - 1);
    for (const std::size_t i : rows) {
        const Vector& u = traj[i];
        os << traj.grid().node(i);
        for (int j = 0; j < d; ++j) os << "," << u[j];
        os << "," << A.space().norm(u) << "," << A.space().norm(u - A.project_zeros(u)) << "\n";
    }
}

}  // namespace sqrtsg
