#include "eqf/baselines/ekf.hpp"

#include <Eigen/Dense>

#include "eqf/core/errors.hpp"

namespace eqf::baselines {

Matrix6 transitionMatrix(double t) {
    Matrix6 F = Matrix6::Identity();
    F.block<3, 3>(0, 3) = t * Matrix3::Identity();
    return F;
}

EkfBelief ekfPredict(const EkfBelief& belief, const Vector3& a, double t, const Matrix6& P) {
    const Matrix6 F = transitionMatrix(t);
    Vector6 drive;
    drive << 0.5 * t * t * a, t * a;
    return {F * belief.mean + drive, symmetrize(F * belief.covariance * F.transpose() + P)};
}

Matrix3 completeFrame(const Vector3& y) {
    Eigen::Index axis = 0;
    y.cwiseAbs().minCoeff(&axis);
    const Vector3 e = Vector3::Unit(axis);
    const Vector3 t1 = (e - e.dot(y) * y).normalized();
    const Vector3 t2 = y.cross(t1);
    Matrix3 frame;
    frame << t1, t2, y;
    return frame;
}

Matrix3 reconstructedPositionCovariance(const Vector3& bearing, double range, double sigmaBearing,
                                        double sigmaRange) {
    const Matrix3 Rf = completeFrame(bearing);
    const Vector3 tangential(sigmaBearing * sigmaBearing, sigmaBearing * sigmaBearing, 0.0);
    return range * range * Rf * tangential.asDiagonal() * Rf.transpose() +
           sigmaRange * sigmaRange * bearing * bearing.transpose();
}

EkfBelief ekfUpdatePosition(const EkfBelief& belief, const Vector3& bearing, double range, double sigmaBearing,
                            double sigmaRange) {
    const Vector3 y = range * bearing;
    const Matrix3 R = reconstructedPositionCovariance(bearing, range, sigmaBearing, sigmaRange);

    Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
    H.block<3, 3>(0, 0).setIdentity();
    const Matrix3 S = H * belief.covariance * H.transpose() + R;
    Eigen::LLT<Matrix3> llt(S);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("ekfUpdatePosition: innovation covariance is singular");
    }
    const Eigen::Matrix<double, 6, 3> K = llt.solve(H * belief.covariance).transpose();
    const Matrix6 IKH = Matrix6::Identity() - K * H;
    EkfBelief out;
    out.mean = belief.mean + K * (y - H * belief.mean);
    out.covariance = symmetrize(IKH * belief.covariance * IKH.transpose() + K * R * K.transpose());
    return out;
}

}  // namespace eqf::baselines
