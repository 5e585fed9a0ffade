#include "sqrtsg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string fmt_matrix(const Matrix& m) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << (i ? ", " : "") << "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
        os << "]";
    }
    os << "]";
    return os.str();
}

constexpr int kNewtonMaxIter = 200;
constexpr double kNewtonTol = 1e-12;

}  // namespace

void AccretiveOperator::check_gamma(double gamma) const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ContractError("resolvent parameter must be positive");
}

Matrix AccretiveOperator::select_jacobian(const Vector& x) const {
    const int d = dim();
    Matrix jac(d, d);
    for (int j = 0; j < d; ++j) {
        const double step = 1e-7 * (1.0 + std::abs(x[j]));
        Vector xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        jac.col(j) = (select(xp) - select(xm)) / (2.0 * step);
    }
    return jac;
}

Vector AccretiveOperator::newton_resolvent(double gamma, const Vector& x) const {
    const int d = dim();
    const double tol = kNewtonTol * std::max(1.0, x.norm());
    auto residual = [&](const Vector& z) { return Vector(z + gamma * select(z) - x); };
    Vector z = x;
    Vector F = residual(z);
    double res = F.norm();
    for (int it = 0; it < kNewtonMaxIter && res > tol; ++it) {
        const Matrix jac = Matrix::Identity(d, d) + gamma * select_jacobian(z);
        const Vector step = jac.partialPivLu().solve(-F);
        double damping = 1.0;
        // Halve the damping factor while the residual increases.
        for (int halvings = 0; halvings < 40; ++halvings) {
            const Vector trial = z + damping * step;
            const Vector Ft = residual(trial);
            if (Ft.norm() < res || halvings == 39) {
                z = trial;
                F = Ft;
                res = Ft.norm();
                break;
            }
            damping *= 0.5;
        }
    }
    if (!(res <= tol)) throw SolverError("resolvent Newton iteration did not converge for " + kind(), res);
    return z;
}

Vector AccretiveOperator::resolvent(double gamma, const Vector& x) const {
    check_gamma(gamma);
    space().check_dim(x);
    return newton_resolvent(gamma, x);
}

Matrix AccretiveOperator::resolvent_jacobian(double gamma, const Vector& x) const {
    const Vector z = resolvent(gamma, x);
    const int d = dim();
    return (Matrix::Identity(d, d) + gamma * select_jacobian(z)).inverse();
}

Vector AccretiveOperator::yosida(double r, const Vector& x) const { return (x - resolvent(r, x)) / r; }

Matrix AccretiveOperator::yosida_jacobian(double r, const Vector& x) const {
    const int d = dim();
    return (Matrix::Identity(d, d) - resolvent_jacobian(r, x)) / r;
}

DomainWitness AccretiveOperator::domain_witness(const Vector& x) const {
    DomainWitness w;
    w.x = x;
    w.y = select(x);
    w.bound = ceil_nat(std::max(space_.norm(w.x), space_.norm(w.y)));
    return w;
}

// ---------------------------------------------------------------------------
// Linear operators: LinearPSD, scaled identity, rotation, unchecked linear.

namespace {

class LinearOperator final : public AccretiveOperator {
public:
    LinearOperator(const SpaceContext& space, Matrix B, std::string kind, std::string params)
        : AccretiveOperator(space), B_(std::move(B)), kind_(std::move(kind)), params_(std::move(params)) {
        const int d = space.dim();
        if (B_.rows() != d || B_.cols() != d) throw DimensionError("operator matrix does not match space dimension");
        build_projector();
    }

    std::string kind() const override { return kind_; }
    std::string describe() const override { return kind_ + "(" + params_ + ")"; }

    Vector select(const Vector& x) const override {
        space().check_dim(x);
        return B_ * x;
    }

    Vector resolvent(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        space().check_dim(x);
        const int d = dim();
        return (Matrix::Identity(d, d) + gamma * B_).partialPivLu().solve(x);
    }

    Matrix resolvent_jacobian(double gamma, const Vector&) const override {
        check_gamma(gamma);
        const int d = dim();
        return (Matrix::Identity(d, d) + gamma * B_).inverse();
    }

    // B (I + rB)^{-1} x directly; avoids the cancellation in (x - J_r x)/r.
    Vector yosida(double r, const Vector& x) const override { return B_ * resolvent(r, x); }
    Matrix yosida_jacobian(double r, const Vector& x) const override { return B_ * resolvent_jacobian(r, x); }

    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return projector_ * x;
    }

protected:
    Matrix select_jacobian(const Vector&) const override { return B_; }

private:
    void build_projector() {
        const int d = dim();
        Eigen::FullPivLU<Matrix> lu(B_);
        lu.setThreshold(1e-12);
        const Matrix kernel = lu.dimensionOfKernel() > 0 ? Matrix(lu.kernel()) : Matrix(d, 0);
        if (kernel.cols() == 0) {
            projector_ = Matrix::Zero(d, d);
            return;
        }
        if (kernel.cols() == d) {
            projector_ = Matrix::Identity(d, d);
            return;
        }
        if (space().is_hilbert()) {
            Eigen::HouseholderQR<Matrix> qr(kernel);
            const Matrix Q = qr.householderQ() * Matrix::Identity(d, kernel.cols());
            projector_ = Q * Q.transpose();
            return;
        }
        // In l^p the nearest point onto a coordinate subspace zeroes the
        // remaining coordinates; other subspaces have no closed form here.
        Matrix off = B_;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 0.0) {
            throw ContractError("nearest-point projection onto a non-coordinate nullspace is only supported in Hilbert space");
        }
        projector_ = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            if (B_(i, i) == 0.0) projector_(i, i) = 1.0;
        }
    }

    Matrix B_;
    std::string kind_;
    std::string params_;
    Matrix projector_;
};

// Subdifferential of w*|x|_2.
class NormSubdifferential final : public AccretiveOperator {
public:
    NormSubdifferential(const SpaceContext& space, double w) : AccretiveOperator(space), w_(w) {
        if (!(w > 0.0)) throw ContractError("norm subdifferential weight must be positive");
    }
    std::string kind() const override { return "subdifferential"; }
    std::string describe() const override { return "subdifferential(norm2, w=" + fmt_num(w_) + ")"; }

    Vector select(const Vector& x) const override {
        space().check_dim(x);
        const double n = x.norm();
        if (n == 0.0) return Vector::Zero(dim());
        return w_ * x / n;
    }
    Vector resolvent(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        space().check_dim(x);
        const double n = x.norm();
        if (n <= gamma * w_) return Vector::Zero(dim());
        return x * (1.0 - gamma * w_ / n);
    }
    Vector yosida(double r, const Vector& x) const override {
        check_gamma(r);
        space().check_dim(x);
        const double n = x.norm();
        if (n <= r * w_) return x / r;
        return w_ * x / n;
    }
    Matrix yosida_jacobian(double r, const Vector& x) const override {
        check_gamma(r);
        const int d = dim();
        const double n = x.norm();
        if (n <= r * w_) return Matrix::Identity(d, d) / r;
        return w_ * (Matrix::Identity(d, d) - x * x.transpose() / (n * n)) / n;
    }
    Matrix resolvent_jacobian(double gamma, const Vector& x) const override {
        const int d = dim();
        return Matrix::Identity(d, d) - gamma * yosida_jacobian(gamma, x);
    }
    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return Vector::Zero(dim());
    }

private:
    double w_;
};

// Subdifferential of w*|x|_1.
class L1Subdifferential final : public AccretiveOperator {
public:
    L1Subdifferential(const SpaceContext& space, double w) : AccretiveOperator(space), w_(w) {
        if (!(w > 0.0)) throw ContractError("l1 subdifferential weight must be positive");
    }
    std::string kind() const override { return "subdifferential"; }
    std::string describe() const override { return "subdifferential(norm1, w=" + fmt_num(w_) + ")"; }

    Vector select(const Vector& x) const override {
        space().check_dim(x);
        Vector y(dim());
        for (int i = 0; i < dim(); ++i) y[i] = x[i] > 0 ? w_ : (x[i] < 0 ? -w_ : 0.0);
        return y;
    }
    Vector resolvent(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        space().check_dim(x);
        const double t = gamma * w_;
        Vector z(dim());
        for (int i = 0; i < dim(); ++i) {
            const double a = std::abs(x[i]) - t;
            z[i] = a > 0 ? std::copysign(a, x[i]) : 0.0;
        }
        return z;
    }
    Vector yosida(double r, const Vector& x) const override {
        check_gamma(r);
        space().check_dim(x);
        Vector y(dim());
        for (int i = 0; i < dim(); ++i) y[i] = std::clamp(x[i] / r, -w_, w_);
        return y;
    }
    Matrix yosida_jacobian(double r, const Vector& x) const override {
        check_gamma(r);
        Matrix J = Matrix::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) {
            if (std::abs(x[i]) <= r * w_) J(i, i) = 1.0 / r;
        }
        return J;
    }
    Matrix resolvent_jacobian(double gamma, const Vector& x) const override {
        return Matrix::Identity(dim(), dim()) - gamma * yosida_jacobian(gamma, x);
    }
    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return Vector::Zero(dim());
    }

private:
    double w_;
};

// Gradient of 0.5*dist(x, C)^2 for a box C = [lo, hi].
class BoxDistanceGradient final : public AccretiveOperator {
public:
    BoxDistanceGradient(const SpaceContext& space, Vector lo, Vector hi)
        : AccretiveOperator(space), lo_(std::move(lo)), hi_(std::move(hi)) {
        space.check_dim(lo_);
        space.check_dim(hi_);
        if ((lo_.array() > hi_.array()).any()) throw ContractError("box lower bound exceeds upper bound");
    }
    std::string kind() const override { return "subdifferential"; }
    std::string describe() const override {
        return "subdifferential(dist2_box, lo=" + fmt_matrix(lo_.transpose()) + ", hi=" + fmt_matrix(hi_.transpose()) + ")";
    }

    Vector clamp(const Vector& x) const { return x.cwiseMax(lo_).cwiseMin(hi_); }

    Vector select(const Vector& x) const override {
        space().check_dim(x);
        return x - clamp(x);
    }
    Vector resolvent(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        space().check_dim(x);
        return x + gamma / (1.0 + gamma) * (clamp(x) - x);
    }
    Vector yosida(double r, const Vector& x) const override {
        check_gamma(r);
        space().check_dim(x);
        return (x - clamp(x)) / (1.0 + r);
    }
    Matrix yosida_jacobian(double r, const Vector& x) const override {
        check_gamma(r);
        Matrix J = Matrix::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) {
            if (x[i] < lo_[i] || x[i] > hi_[i]) J(i, i) = 1.0 / (1.0 + r);
        }
        return J;
    }
    Matrix resolvent_jacobian(double gamma, const Vector& x) const override {
        return Matrix::Identity(dim(), dim()) - gamma * yosida_jacobian(gamma, x);
    }
    // Coordinatewise clamping is the nearest point in every l^p norm.
    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return clamp(x);
    }

private:
    Vector lo_;
    Vector hi_;
};

class QuarticGradient final : public AccretiveOperator {
public:
    QuarticGradient(const SpaceContext& space, double w) : AccretiveOperator(space), w_(w) {
        if (!(w > 0.0)) throw ContractError("quartic weight must be positive");
    }
    std::string kind() const override { return "subdifferential"; }
    std::string describe() const override { return "subdifferential(quartic, w=" + fmt_num(w_) + ")"; }

    Vector select(const Vector& x) const override {
        space().check_dim(x);
        return w_ * x.array().cube();
    }
    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return Vector::Zero(dim());
    }

protected:
    Matrix select_jacobian(const Vector& x) const override {
        return Matrix((3.0 * w_ * x.array().square()).matrix().asDiagonal());
    }

private:
    double w_;
};

class StronglyAccretiveOperator final : public AccretiveOperator {
public:
    StronglyAccretiveOperator(OperatorPtr base, double c)
        : AccretiveOperator(base->space()), base_(std::move(base)), c_(c) {
        if (!(c > 0.0)) throw ContractError("strong accretivity constant must be positive");
        find_zero();
    }
    std::string kind() const override { return "strongly_accretive"; }
    std::string describe() const override { return "strongly_accretive(" + base_->describe() + ", c=" + fmt_num(c_) + ")"; }

    Vector select(const Vector& x) const override { return base_->select(x) + c_ * x; }

    // z + g(B z + c z) = x  <=>  z + g/(1+gc) B z = x/(1+gc)
    Vector resolvent(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        const double s = 1.0 + gamma * c_;
        return base_->resolvent(gamma / s, x / s);
    }
    Matrix resolvent_jacobian(double gamma, const Vector& x) const override {
        check_gamma(gamma);
        const double s = 1.0 + gamma * c_;
        return base_->resolvent_jacobian(gamma / s, x / s) / s;
    }
    Vector project_zeros(const Vector& x) const override {
        space().check_dim(x);
        return zero_;
    }

private:
    // J_1 is a strict contraction with factor 1/(1+c); its fixed point is the unique zero.
    void find_zero() {
        Vector z = Vector::Zero(dim());
        for (int it = 0; it < 100000; ++it) {
            const Vector next = resolvent(1.0, z);
            const double change = (next - z).norm();
            z = next;
            if (change <= 1e-15 * std::max(1.0, z.norm())) break;
        }
        zero_ = z;
    }

    OperatorPtr base_;
    double c_;
    Vector zero_;
};

}  // namespace

OperatorPtr linear_psd(const SpaceContext& space, const Matrix& B) {
    if (B.rows() != B.cols()) throw DimensionError("LinearPSD matrix must be square");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw ContractError("LinearPSD matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(B);
    if (es.eigenvalues().minCoeff() < -1e-10) throw ContractError("LinearPSD matrix has a negative eigenvalue");
    return std::make_shared<LinearOperator>(space, B, "linear_psd", fmt_matrix(B));
}

OperatorPtr scaled_identity(const SpaceContext& space, double c) {
    if (!(c >= 0.0)) throw ContractError("scaled identity requires c >= 0");
    const int d = space.dim();
    return std::make_shared<LinearOperator>(space, c * Matrix::Identity(d, d), "scaled_identity", "c=" + fmt_num(c));
}

OperatorPtr zero_operator(const SpaceContext& space) { return scaled_identity(space, 0.0); }

OperatorPtr rotation(const SpaceContext& space, const Matrix& R) {
    if (R.rows() != 2 || R.cols() != 2) throw DimensionError("rotation operator must be 2x2");
    if ((R + R.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ContractError("rotation matrix must be skew-symmetric");
    if (R(0, 1) == 0.0) throw ContractError("rotation matrix must be nonzero");
    return std::make_shared<LinearOperator>(space, R, "rotation", fmt_matrix(R));
}

OperatorPtr linear(const SpaceContext& space, const Matrix& L) {
    return std::make_shared<LinearOperator>(space, L, "linear", fmt_matrix(L));
}

OperatorPtr norm_subdifferential(const SpaceContext& space, double w) {
    return std::make_shared<NormSubdifferential>(space, w);
}

OperatorPtr l1_subdifferential(const SpaceContext& space, double w) {
    return std::make_shared<L1Subdifferential>(space, w);
}

OperatorPtr box_distance_gradient(const SpaceContext& space, const Vector& lo, const Vector& hi) {
    return std::make_shared<BoxDistanceGradient>(space, lo, hi);
}

OperatorPtr quartic_gradient(const SpaceContext& space, double w) {
    return std::make_shared<QuarticGradient>(space, w);
}

OperatorPtr strongly_accretive(OperatorPtr base, double c) {
    if (!base) throw ContractError("strongly_accretive needs a base operator");
    return std::make_shared<StronglyAccretiveOperator>(std::move(base), c);
}

std::vector<CatalogEntry> operator_catalog() {
    return {
        {"linear_psd", "matrix: symmetric PSD d x d", "x -> Bx; zero set = nullspace of B"},
        {"scaled_identity", "c >= 0", "x -> c x; c = 0 is the zero operator"},
        {"zero", "-", "x -> 0; every point is a zero"},
        {"rotation", "matrix: 2x2 skew (default [[0,-1],[1,0]])", "x -> Rx; accretive, admits no modulus for the convergence condition"},
        {"linear", "matrix: d x d", "x -> Lx without structural checks (accretivity is sampled)"},
        {"norm_subdifferential", "w > 0", "subdifferential of w|x|_2; zero set {0}"},
        {"l1_subdifferential", "w > 0", "subdifferential of w|x|_1; zero set {0}"},
        {"box_distance_gradient", "lo, hi", "gradient of dist(x, box)^2 / 2; zero set = box"},
        {"quartic_gradient", "w > 0", "gradient of (w/4) sum x_i^4; Newton resolvent"},
        {"strongly_accretive", "base: operator, c > 0", "base + c Id; unique zero"},
    };
}

AccretivityReport verify_accretive(const AccretiveOperator& A, std::size_t sample_count, double radius,
                                   std::mt19937_64& rng) {
    const SpaceContext& X = A.space();
    AccretivityReport rep;
    rep.min_pairing = std::numeric_limits<double>::infinity();
    // Coordinate probes (radius*e_i, 0) first, then random pairs.
    const std::size_t probes = static_cast<std::size_t>(X.dim());
    for (std::size_t i = 0; i < sample_count + probes; ++i) {
        Vector x1, x2;
        if (i < probes) {
            x1 = Vector::Unit(X.dim(), static_cast<Eigen::Index>(i)) * radius;
            x2 = Vector::Zero(X.dim());
        } else {
            x1 = X.sample_ball(radius, rng);
            x2 = X.sample_ball(radius, rng);
        }
        const double val = X.pairing(A.select(x1) - A.select(x2), x1 - x2);
        if (val < rep.min_pairing) {
            rep.min_pairing = val;
            rep.witness_x1 = x1;
            rep.witness_x2 = x2;
        }
        ++rep.samples;
    }
    rep.pass = rep.samples > 0 && rep.min_pairing >= -1e-9;
    return rep;
}

}  // namespace sqrtsg
