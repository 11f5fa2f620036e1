#pragma once

#include <Eigen/Core>

#include "eqf/core/filter.hpp"
#include "eqf/kinematics/second_order.hpp"

namespace eqf::baselines {

using kinematics::Matrix3;
using kinematics::Matrix6;
using kinematics::Vector3;
using kinematics::Vector6;

/// Classical EKF belief over the stacked state (p, v).
struct EkfBelief {
    Vector6 mean = Vector6::Zero();
    Matrix6 covariance = Matrix6::Identity();
};

/// Exact transition matrix [[I, tI], [0, I]] of the constant-acceleration model.
Matrix6 transitionMatrix(double t);

EkfBelief ekfPredict(const EkfBelief& belief, const Vector3& a, double t, const Matrix6& P);

/// Orthonormal frame [t1, t2, y] completing the unit vector y; t1 is built by
/// Gram-Schmidt from the coordinate axis least aligned with y.
Matrix3 completeFrame(const Vector3& y);

/// First-order covariance of the position reconstructed as range * bearing:
/// range^2 R_f diag(sb^2, sb^2, 0) R_f^T + sr^2 y y^T.
Matrix3 reconstructedPositionCovariance(const Vector3& bearing, double range, double sigmaBearing,
                                        double sigmaRange);

/// Kalman update with the reconstructed position range * bearing, H = [I 0].
/// Throws NotPositiveDefiniteError when the innovation covariance is singular.
EkfBelief ekfUpdatePosition(const EkfBelief& belief, const Vector3& bearing, double range, double sigmaBearing,
                            double sigmaRange);

/// Equivariant filter cycle with the covariance transport switched off: the
/// base point still moves by exp(Delta) but Sigma keeps its fused value.
template <EquivariantSystem System>
ConcentratedGaussian<System> eqfNoResetStep(const System& sys, const ConcentratedGaussian<System>& belief,
                                            const typename System::Input& u,
                                            const typename SystemTypes<System>::OutputVector& y,
                                            const typename SystemTypes<System>::StateMatrix& P,
                                            const typename SystemTypes<System>::NoiseMatrix& Q,
                                            FilterOptions opts = {}) {
    opts.covarianceReset = CovarianceReset::None;
    return filterStep(sys, belief, u, y, P, Q, opts);
}

}  // namespace eqf::baselines
