#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sqrtsg/nat.hpp"
#include "sqrtsg/space.hpp"

namespace sqrtsg {

/// Graph point (x, y) with y in Ax and a natural bound on both norms.
struct DomainWitness {
    Vector x;
    Vector y;
    Nat bound = 0;
};

/// m-accretive operator on a concrete space. Multi-valued operators are
/// represented through their minimal-norm selection.
class AccretiveOperator {
public:
    explicit AccretiveOperator(SpaceContext space) : space_(space) {}
    virtual ~AccretiveOperator() = default;

    const SpaceContext& space() const noexcept { return space_; }
    int dim() const noexcept { return space_.dim(); }

    virtual std::string kind() const = 0;
    virtual std::string describe() const = 0;

    /// Minimal-norm element of Ax. Throws DomainError outside dom A.
    virtual Vector select(const Vector& x) const = 0;

    /// (Id + gamma A)^{-1} x. The default solves z + gamma*select(z) = x by
    /// damped Newton.
    virtual Vector resolvent(double gamma, const Vector& x) const;
    virtual Matrix resolvent_jacobian(double gamma, const Vector& x) const;

    /// Yosida approximate A_r x = (x - J_r x) / r.
    virtual Vector yosida(double r, const Vector& x) const;
    virtual Matrix yosida_jacobian(double r, const Vector& x) const;

    /// Nearest point of A^{-1}0 in the norm of the space.
    virtual Vector project_zeros(const Vector& x) const = 0;
    /// The distinguished zero used as the reference point p.
    virtual Vector zero_point() const { return project_zeros(Vector::Zero(dim())); }

    /// d(0, Ax); equals |select(x)| for every catalog entry.
    double dist_zero(const Vector& x) const { return space_.norm(select(x)); }

    /// Catalog operators have dom A = X, so the witness is the point itself.
    DomainWitness domain_witness(const Vector& x) const;

protected:
    /// Jacobian of the selection; central differences unless overridden.
    virtual Matrix select_jacobian(const Vector& x) const;
    Vector newton_resolvent(double gamma, const Vector& x) const;
    void check_gamma(double gamma) const;

private:
    SpaceContext space_;
};

using OperatorPtr = std::shared_ptr<const AccretiveOperator>;

// Catalog.
OperatorPtr linear_psd(const SpaceContext& space, const Matrix& B);
OperatorPtr scaled_identity(const SpaceContext& space, double c);
OperatorPtr zero_operator(const SpaceContext& space);
OperatorPtr rotation(const SpaceContext& space, const Matrix& R);
/// Arbitrary square matrix, no structural validation; accretivity is left
/// to verify_accretive.
OperatorPtr linear(const SpaceContext& space, const Matrix& L);
/// Subdifferential of w*|x|_2.
OperatorPtr norm_subdifferential(const SpaceContext& space, double w);
/// Subdifferential of w*|x|_1.
OperatorPtr l1_subdifferential(const SpaceContext& space, double w);
/// Gradient of 0.5*dist(x, box)^2; its zero set is the box.
OperatorPtr box_distance_gradient(const SpaceContext& space, const Vector& lo, const Vector& hi);
/// Gradient of (w/4) sum x_i^4; resolvent has no closed form.
OperatorPtr quartic_gradient(const SpaceContext& space, double w);
/// base + c*Id.
OperatorPtr strongly_accretive(OperatorPtr base, double c);

struct CatalogEntry {
    std::string kind;
    std::string parameters;
    std::string description;
};
std::vector<CatalogEntry> operator_catalog();

struct AccretivityReport {
    double min_pairing = 0.0;
    Vector witness_x1;
    Vector witness_x2;
    std::size_t samples = 0;
    bool pass = false;
};

/// Samples graph pairs in the ball of the given radius; passes iff every
/// <y1 - y2, J(x1 - x2)> >= -1e-9.
AccretivityReport verify_accretive(const AccretiveOperator& A, std::size_t sample_count, double radius,
                                   std::mt19937_64& rng);

}  // namespace sqrtsg
