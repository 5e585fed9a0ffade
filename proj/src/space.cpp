#include "sqrtsg/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

SpaceContext SpaceContext::hilbert(int dim) {
    if (dim <= 0) throw ContractError("space dimension must be positive");
    return SpaceContext(Kind::Hilbert, dim, 2.0, 1.0);
}

SpaceContext SpaceContext::finite_lp(int dim, double p, double M) {
    if (dim <= 0) throw ContractError("space dimension must be positive");
    // p < 2 makes |x_i|^{p-2} singular at zero coordinates.
    if (!(p >= 2.0) || !std::isfinite(p)) throw ContractError("finite l^p space requires p >= 2, got " + std::to_string(p));
    if (!(M > 0.0)) throw ContractError("strong-monotonicity constant M must be positive");
    return SpaceContext(Kind::FiniteLp, dim, p, M);
}

void SpaceContext::check_dim(const Vector& x) const {
    if (x.size() != dim_) {
        throw DimensionError("vector of dimension " + std::to_string(x.size()) + " in a space of dimension " +
                             std::to_string(dim_));
    }
}

double SpaceContext::norm(const Vector& x) const {
    check_dim(x);
    if (kind_ == Kind::Hilbert) return x.norm();
    return x.lpNorm<Eigen::Infinity>() == 0.0 ? 0.0 : std::pow(x.array().abs().pow(p_).sum(), 1.0 / p_);
}

double SpaceContext::dual_norm(const DualVector& f) const {
    if (f.coords.size() != dim_) throw DimensionError("dual vector dimension mismatch");
    if (kind_ == Kind::Hilbert) return f.coords.norm();
    const double q = p_ / (p_ - 1.0);
    return f.coords.lpNorm<Eigen::Infinity>() == 0.0 ? 0.0 : std::pow(f.coords.array().abs().pow(q).sum(), 1.0 / q);
}

double SpaceContext::dual_pair(const DualVector& f, const Vector& x) const {
    check_dim(x);
    if (f.coords.size() != dim_) throw DimensionError("dual vector dimension mismatch");
    return f.coords.dot(x);
}

DualVector SpaceContext::duality_map(const Vector& x) const {
    check_dim(x);
    if (kind_ == Kind::Hilbert) return DualVector{x};
    const double n = norm(x);
    if (n == 0.0) return DualVector{Vector::Zero(dim_)};
    // J(x)_i = |x|^{2-p} |x_i|^{p-2} x_i
    const double scale = std::pow(n, 2.0 - p_);
    Vector j = x.array().abs().pow(p_ - 2.0) * x.array() * scale;
    return DualVector{std::move(j)};
}

Vector SpaceContext::sample_ball(double radius, std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector dir(dim_);
    for (int i = 0; i < dim_; ++i) dir[i] = gauss(rng);
    const double dn = dir.norm();
    if (dn == 0.0) return Vector::Zero(dim_);
    const double rad = radius * std::pow(unif(rng), 1.0 / dim_);
    return dir * (rad / dn);
}

MonotonicityReport SpaceContext::validate_monotonicity(double radius, std::size_t samples, std::mt19937_64& rng) const {
    MonotonicityReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        const Vector x = sample_ball(radius, rng);
        const Vector y = sample_ball(radius, rng);
        const Vector d = x - y;
        const double nd = norm(d);
        if (nd < 1e-12) continue;
        const double lhs = (duality_map(x).coords - duality_map(y).coords).dot(d);
        rep.min_ratio = std::min(rep.min_ratio, lhs / (nd * nd));
        ++rep.samples;
    }
    rep.pass = rep.samples > 0 && rep.min_ratio >= M_ - 1e-12;
    return rep;
}

}  // namespace sqrtsg
