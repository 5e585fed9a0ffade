#pragma once

#include <cstddef>
#include <random>

#include <Eigen/Dense>

namespace sqrtsg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Element of the dual space. Kept distinct from Vector so primal and dual
/// coordinates cannot be mixed up silently.
struct DualVector {
    Eigen::VectorXd coords;
};

struct MonotonicityReport {
    double min_ratio = 0.0;  // min of <x-y, Jx-Jy> / |x-y|^2 over the samples
    std::size_t samples = 0;
    bool pass = false;
};

/// A concrete finite-dimensional uniformly convex / smooth space: either
/// Euclidean R^d or (R^d, |.|_p) with p >= 2. Immutable.
class SpaceContext {
public:
    enum class Kind { Hilbert, FiniteLp };

    static SpaceContext hilbert(int dim);
    /// M is the configured strong-monotonicity constant of J; it is not
    /// verified here (see validate_monotonicity).
    static SpaceContext finite_lp(int dim, double p, double M);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    double p() const noexcept { return p_; }
    double M() const noexcept { return M_; }
    bool is_hilbert() const noexcept { return kind_ == Kind::Hilbert; }

    double norm(const Vector& x) const;
    /// Norm of X*, i.e. the conjugate-exponent norm.
    double dual_norm(const DualVector& f) const;
    double dual_pair(const DualVector& f, const Vector& x) const;
    /// Normalized duality map J. Single-valued since the space is smooth.
    DualVector duality_map(const Vector& x) const;
    /// <y, J(x)>, the quantity in the accretivity inequality.
    double pairing(const Vector& y, const Vector& x) const { return dual_pair(duality_map(x), y); }

    /// Samples pairs in the ball of the given radius and checks
    /// <x-y, Jx-Jy> >= M |x-y|^2.
    MonotonicityReport validate_monotonicity(double radius, std::size_t samples, std::mt19937_64& rng) const;

    /// Uniform sample from the Euclidean ball of the given radius.
    Vector sample_ball(double radius, std::mt19937_64& rng) const;

    void check_dim(const Vector& x) const;

private:
    SpaceContext(Kind kind, int dim, double p, double M) : kind_(kind), dim_(dim), p_(p), M_(M) {}

    Kind kind_;
    int dim_;
    double p_;
    double M_;
};

}  // namespace sqrtsg
