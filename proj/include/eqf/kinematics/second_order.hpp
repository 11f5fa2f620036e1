#pragma once

#include <Eigen/Core>

#include "eqf/lie/sim3.hpp"

namespace eqf::kinematics {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector4 = Eigen::Matrix<double, 4, 1>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Position (m) and velocity (m/s). Every symmetry operation needs p != 0.
struct KinematicState {
    Vector3 p = Vector3::Zero();
    Vector3 v = Vector3::Zero();

    Vector6 vector() const {
        Vector6 x;
        x << p, v;
        return x;
    }
    static KinematicState fromVector(const Vector6& x) { return {x.head<3>(), x.tail<3>()}; }
};

/// Virtual velocity omega (held at zero in practice) and acceleration a.
struct KinematicInput {
    Vector3 omega = Vector3::Zero();
    Vector3 a = Vector3::Zero();
};

struct BearingRange {
    Vector3 bearing = Vector3::UnitZ();  ///< unit vector
    double range = 1.0;

    /// Stacked (bearing, range) as used by the filter update.
    Vector4 vector() const {
        Vector4 y;
        y << bearing, range;
        return y;
    }
};

/// Exact integration over `t` seconds with constant acceleration.
KinematicState transition(const KinematicState& xi, const KinematicInput& u, double t);

/// phi((R, r, beta), (p, v)) = (R^T p / r, R^T (v - beta) / r).
KinematicState act(const Sim3d& X, const KinematicState& xi);

/// psi((R, r, beta), (omega, a)) = (R^T (omega + beta) / r, R^T a / r).
KinematicInput actInput(const Sim3d& X, const KinematicInput& u);

/// Group element whose action on xi gives transition(xi, u, t).
/// Throws std::domain_error when p or the propagated position is zero, or
/// when the two are antiparallel.
Sim3d lift(const KinematicState& xi, const KinematicInput& u, double t);

/// Right-trivialised derivative of lift with respect to the state:
/// column j is the algebra vector log(lift(xi + d e_j) lift(xi)^-1) / d in
/// the limit d -> 0.
Eigen::Matrix<double, 7, 6> liftDifferential(const KinematicState& xi, const KinematicInput& u, double t);

Vector3 bearing(const KinematicState& xi);
double range(const KinematicState& xi);
BearingRange measure(const KinematicState& xi);
/// Derivative of (bearing, range) with respect to (p, v).
Eigen::Matrix<double, 4, 6> measurementJacobian(const KinematicState& xi);

/**
 * @brief Second-order kinematics with bearing and range outputs, posed as an
 * equivariant system about a fixed origin.
 *
 * Chart coordinates are tangent coordinates at the origin: the algebra is
 * split into the one-dimensional stabilizer of the origin and the complement
 * {(Omega, s, b) : <Omega, p0> = 0}, and eps maps to
 * phi(exp(pinv(eps)), xi0) where pinv inverts Dphi_xi0(id) on that
 * complement. Hence DTheta^-1 at 0 is the identity and chart units are
 * metres and metres per second.
 */
class SecondOrderSystem {
  public:
    using Scalar = double;
    using Group = Sim3d;
    using State = KinematicState;
    using Input = KinematicInput;
    static constexpr int StateDim = 6;
    static constexpr int OutputDim = 4;

    SecondOrderSystem(const KinematicState& origin, double step);

    const KinematicState& origin() const { return origin_; }
    double step() const { return step_; }

    KinematicState transition(const KinematicState& xi, const KinematicInput& u) const {
        return kinematics::transition(xi, u, step_);
    }
    KinematicState act(const Sim3d& X, const KinematicState& xi) const { return kinematics::act(X, xi); }
    KinematicInput actInput(const Sim3d& X, const KinematicInput& u) const { return kinematics::actInput(X, u); }
    Sim3d lift(const KinematicState& xi, const KinematicInput& u) const { return kinematics::lift(xi, u, step_); }
    Vector4 output(const KinematicState& xi) const { return measure(xi).vector(); }

    KinematicState retract(const KinematicState& xi, const Vector6& delta) const {
        return KinematicState::fromVector(xi.vector() + delta);
    }

    /// Theta^-1.
    KinematicState chart(const Vector6& eps) const;
    /// Theta, closed form. Throws ChartDomainError when the bearing of xi is
    /// opposite to the origin bearing.
    Vector6 chartInverse(const KinematicState& xi) const;
    /// Theta by Newton iteration with a finite-difference Jacobian
    /// (tolerance 1e-12, at most 50 iterations).
    Vector6 chartInverseNewton(const KinematicState& xi) const;

    /// Dphi_xi0(id), 6 x 7.
    const Eigen::Matrix<double, 6, 7>& originDifferential() const { return originDifferential_; }
    /// Right inverse of Dphi_xi0(id) with image in the horizontal subspace.
    const Eigen::Matrix<double, 7, 6>& originDifferentialPinv() const { return originPinv_; }
    Eigen::Matrix<double, 7, 1> originDifferentialPinv(const Vector6& w) const { return originPinv_ * w; }
    Matrix6 chartDifferential() const { return Matrix6::Identity(); }
    Eigen::Matrix<double, 7, 6> liftDifferential(const KinematicInput& u0) const {
        return kinematics::liftDifferential(origin_, u0, step_);
    }
    Eigen::Matrix<double, 4, 6> outputJacobian(const KinematicState& xi) const { return measurementJacobian(xi); }
    /// Dphi_X, identical at every base point since phi_X is linear.
    Matrix6 actionDifferential(const Sim3d& X) const;

    /// Generator (p0/|p0|, 0, -p0/|p0| x v0) of the stabilizer of the origin.
    Eigen::Matrix<double, 7, 1> stabilizerGenerator() const;

  private:
    KinematicState origin_;
    double step_;
    Eigen::Matrix<double, 6, 7> originDifferential_;
    Eigen::Matrix<double, 7, 6> originPinv_;
};

}  // namespace eqf::kinematics
