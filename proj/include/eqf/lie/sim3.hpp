#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "eqf/lie/so3.hpp"

namespace eqf {

/**
 * @brief The group SO(3) x MR(1) |x R^3 of rotations, positive scales and
 * translations, isomorphic to Sim(3).
 *
 * Elements are stored as the explicit factors (R, r, beta) with
 *
 *   (R1, r1, b1)(R2, r2, b2) = (R1 R2, r1 r2, b1 + r1 R1 b2).
 *
 * Lie algebra coordinates are ordered (Omega, s, b): rotation (3), log-scale
 * (1), translation (3). The wedge map sends them to
 *
 *   [ Omega^x + s I   b ]
 *   [       0         0 ]
 */
template <typename _Scalar>
class Sim3 {
  public:
    using Scalar = _Scalar;
    static constexpr int Dim = 7;

    using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
    using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
    using Tangent = Eigen::Matrix<Scalar, Dim, 1>;
    using AdjointMatrix = Eigen::Matrix<Scalar, Dim, Dim>;

    /// Rotation factor is re-projected onto SO(3) once it drifts this far.
    static constexpr Scalar kOrthonormalityTolerance = Scalar(1e-9);

    Sim3() : R_(Matrix3::Identity()), r_(Scalar(1)), beta_(Vector3::Zero()) {}

    Sim3(const Matrix3& R, Scalar r, const Vector3& beta) : R_(R), r_(r), beta_(beta) {
        if (!(r > Scalar(0))) throw std::invalid_argument("Sim3: scale must be positive");
        renormalize();
    }

    static Sim3 Identity() { return Sim3(); }

    const Matrix3& R() const { return R_; }
    Scalar r() const { return r_; }
    const Vector3& beta() const { return beta_; }

    Sim3 operator*(const Sim3& other) const {
        Sim3 out;
        out.R_ = R_ * other.R_;
        out.r_ = r_ * other.r_;
        out.beta_ = beta_ + r_ * (R_ * other.beta_);
        out.renormalize();
        return out;
    }

    Sim3 inverse() const {
        Sim3 out;
        out.R_ = R_.transpose();
        out.r_ = Scalar(1) / r_;
        out.beta_ = -(out.r_ * (out.R_ * beta_));
        return out;
    }

    static Sim3 exp(const Tangent& v);
    Tangent log() const;

    /// Matrix of v -> (X v^ X^-1)^v.
    AdjointMatrix Adjoint() const {
        AdjointMatrix A = AdjointMatrix::Zero();
        A.template block<3, 3>(0, 0) = R_;
        A(3, 3) = Scalar(1);
        A.template block<3, 3>(4, 0) = so3::skew(beta_) * R_;
        A.template block<3, 1>(4, 3) = -beta_;
        A.template block<3, 3>(4, 4) = r_ * R_;
        return A;
    }

    /// Matrix of w -> [v, w].
    static AdjointMatrix ad(const Tangent& v) {
        AdjointMatrix A = AdjointMatrix::Zero();
        const Matrix3 OmegaX = so3::skew(v.template head<3>());
        A.template block<3, 3>(0, 0) = OmegaX;
        A.template block<3, 3>(4, 0) = so3::skew(v.template tail<3>());
        A.template block<3, 1>(4, 3) = -v.template tail<3>();
        A.template block<3, 3>(4, 4) = OmegaX + v(3) * Matrix3::Identity();
        return A;
    }

    /// V = int_0^1 e^{st} exp(t Omega^x) dt, so that exp(Omega, s, b) has
    /// translation V b.
    static Matrix3 translationFactor(const Vector3& Omega, Scalar s);

    template <typename Other>
    Sim3<Other> cast() const {
        return Sim3<Other>(R_.template cast<Other>(), Other(r_), beta_.template cast<Other>());
    }

  private:
    void renormalize() {
        if ((R_.transpose() * R_ - Matrix3::Identity()).norm() > kOrthonormalityTolerance) {
            R_ = so3::orthonormalize(R_);
        }
    }

    Matrix3 R_;
    Scalar r_;
    Vector3 beta_;
};

using Sim3d = Sim3<double>;

/// Inner automorphism Z -> X Z X^-1.
template <typename Scalar>
Sim3<Scalar> innerAutomorphism(const Sim3<Scalar>& X, const Sim3<Scalar>& Z) {
    return X * Z * X.inverse();
}

namespace detail {

/// g_n(s) = int_0^1 t^n e^{st} dt for n = 0..6.
template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> expMoments(Scalar s) {
    Eigen::Matrix<Scalar, 7, 1> g;
    if (std::abs(s) < Scalar(2)) {
        for (int n = 0; n < 7; ++n) {
            Scalar term = Scalar(1);  // s^k / k!
            Scalar sum = Scalar(0);
            for (int k = 0; k < 60; ++k) {
                const Scalar add = term / Scalar(n + k + 1);
                sum += add;
                if (std::abs(add) < std::numeric_limits<Scalar>::epsilon() * std::abs(sum)) break;
                term *= s / Scalar(k + 1);
            }
            g(n) = sum;
        }
    } else {
        const Scalar es = std::exp(s);
        g(0) = std::expm1(s) / s;
        for (int n = 1; n < 7; ++n) g(n) = (es - Scalar(n) * g(n - 1)) / s;
    }
    return g;
}

}  // namespace detail

template <typename Scalar>
typename Sim3<Scalar>::Matrix3 Sim3<Scalar>::translationFactor(const Vector3& Omega, Scalar s) {
    // V = A I + B Omega^x + C Omega^x^2 with
    //   A = g(s), B = Im g(s + i theta) / theta, C = (g(s) - Re g(s + i theta)) / theta^2
    // where g(z) = (e^z - 1) / z.
    const Scalar theta = Omega.norm();
    const auto g = detail::expMoments(s);
    Scalar A = g(0), B, C;
    if (theta < Scalar(1e-2)) {
        const Scalar t2 = theta * theta;
        B = g(1) - t2 * g(3) / Scalar(6) + t2 * t2 * g(5) / Scalar(120);
        C = g(2) / Scalar(2) - t2 * g(4) / Scalar(24) + t2 * t2 * g(6) / Scalar(720);
    } else {
        const Scalar halfSin = std::sin(theta / Scalar(2));
        const Scalar re = std::expm1(s) * std::cos(theta) - Scalar(2) * halfSin * halfSin;
        const Scalar im = std::exp(s) * std::sin(theta);
        const Scalar denom = s * s + theta * theta;
        const Scalar gRe = (re * s + im * theta) / denom;
        const Scalar gIm = (im * s - re * theta) / denom;
        B = gIm / theta;
        C = (A - gRe) / (theta * theta);
    }
    const Matrix3 K = so3::skew(Omega);
    return A * Matrix3::Identity() + B * K + C * K * K;
}

template <typename Scalar>
Sim3<Scalar> Sim3<Scalar>::exp(const Tangent& v) {
    const Vector3 Omega = v.template head<3>();
    const Scalar s = v(3);
    Sim3 out;
    out.R_ = so3::exp(Omega);
    out.r_ = std::exp(s);
    out.beta_ = translationFactor(Omega, s) * v.template tail<3>();
    return out;
}

template <typename Scalar>
typename Sim3<Scalar>::Tangent Sim3<Scalar>::log() const {
    Tangent v;
    const Vector3 Omega = so3::log(R_);
    const Scalar s = std::log(r_);
    v.template head<3>() = Omega;
    v(3) = s;
    v.template tail<3>() = translationFactor(Omega, s).partialPivLu().solve(beta_);
    return v;
}

}  // namespace eqf
