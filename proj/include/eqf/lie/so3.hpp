#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace eqf::so3 {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    Matrix3<Scalar> m;
    m << Scalar(0), -w(2), w(1),
         w(2), Scalar(0), -w(0),
         -w(1), w(0), Scalar(0);
    return m;
}

template <typename Derived>
Vector3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m) {
    return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Rodrigues formula, Taylor-expanded below 1e-4 rad.
template <typename Derived>
Matrix3<typename Derived::Scalar> exp(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    const Scalar theta2 = w.squaredNorm();
    const Scalar theta = std::sqrt(theta2);
    const Matrix3<Scalar> K = skew(w);
    Scalar a, b;
    if (theta < Scalar(1e-4)) {
        a = Scalar(1) - theta2 / Scalar(6);
        b = Scalar(0.5) - theta2 / Scalar(24);
    } else {
        a = std::sin(theta) / theta;
        b = (Scalar(1) - std::cos(theta)) / theta2;
    }
    return Matrix3<Scalar>::Identity() + a * K + b * K * K;
}

/// Rotation vector of R. Throws std::domain_error when the rotation angle is
/// within 1e-10 of pi, where the logarithm is not unique.
template <typename Derived>
Vector3<typename Derived::Scalar> log(const Eigen::MatrixBase<Derived>& R) {
    using Scalar = typename Derived::Scalar;
    const Vector3<Scalar> w = Scalar(0.5) * vee(R - R.transpose());
    const Scalar sinTheta = w.norm();
    const Scalar cosTheta = std::clamp((R.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
    const Scalar theta = std::atan2(sinTheta, cosTheta);
    if (std::numbers::pi_v<Scalar> - theta < Scalar(1e-10)) {
        throw std::domain_error("so3::log: rotation angle at pi is outside the injectivity radius");
    }
    if (theta < Scalar(1e-4)) {
        return (Scalar(1) + theta * theta / Scalar(6)) * w;
    }
    if (cosTheta > Scalar(-0.9)) {
        return (theta / sinTheta) * w;
    }
    // Near pi: recover the axis from the symmetric part, sign from w.
    const Matrix3<Scalar> S = Scalar(0.5) * (R + R.transpose()) - cosTheta * Matrix3<Scalar>::Identity();
    Eigen::Index col = 0;
    S.diagonal().maxCoeff(&col);
    Vector3<Scalar> axis = S.col(col).normalized();
    if (axis.dot(w) < Scalar(0)) axis = -axis;
    return theta * axis;
}

/// Nearest rotation in the Frobenius sense (polar factor).
template <typename Derived>
Matrix3<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& R) {
    using Scalar = typename Derived::Scalar;
    Eigen::JacobiSVD<Matrix3<Scalar>> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3<Scalar> U = svd.matrixU();
    const Matrix3<Scalar> V = svd.matrixV();
    if ((U * V.transpose()).determinant() < Scalar(0)) U.col(2) = -U.col(2);
    return U * V.transpose();
}

/// Rotation taking unit vector `from` onto unit vector `to` about the axis
/// from x to. Antiparallel inputs have no continuous choice and throw
/// std::domain_error.
template <typename Derived1, typename Derived2>
Matrix3<typename Derived1::Scalar> align(const Eigen::MatrixBase<Derived1>& from,
                                         const Eigen::MatrixBase<Derived2>& to) {
    using Scalar = typename Derived1::Scalar;
    const Vector3<Scalar> k = from.cross(to);
    const Scalar c = from.dot(to);
    // I + K + K^2 / (1 + c) is exact down to k = 0; only c -> -1 is singular.
    if (c < Scalar(0) && k.norm() < Scalar(1e-12)) {
        throw std::domain_error("so3::align: antiparallel directions have no unique minimal rotation");
    }
    const Matrix3<Scalar> K = skew(k);
    return Matrix3<Scalar>::Identity() + K + K * K / (Scalar(1) + c);
}

}  // namespace eqf::so3
