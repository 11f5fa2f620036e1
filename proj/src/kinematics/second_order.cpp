#include "eqf/kinematics/second_order.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "eqf/core/errors.hpp"
#include "eqf/lie/so3.hpp"

namespace eqf::kinematics {

namespace {

Vector3 propagatedPosition(const KinematicState& xi, const KinematicInput& u, double t) {
    return xi.p + t * (xi.v + u.omega) + 0.5 * t * t * u.a;
}

void requireNonzero(const Vector3& p, const char* what) {
    if (!(p.norm() > 0.0) || !p.allFinite()) throw std::domain_error(what);
}

/// Differential of x -> x / |x| applied to dx.
Vector3 unitDifferential(const Vector3& x, const Vector3& dx) {
    const double n = x.norm();
    const Vector3 xhat = x / n;
    return (dx - xhat * xhat.dot(dx)) / n;
}

}  // namespace

KinematicState transition(const KinematicState& xi, const KinematicInput& u, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("transition: step must be positive");
    return {propagatedPosition(xi, u, t), xi.v + t * u.a};
}

KinematicState act(const Sim3d& X, const KinematicState& xi) {
    const double invR = 1.0 / X.r();
    return {invR * (X.R().transpose() * xi.p), invR * (X.R().transpose() * (xi.v - X.beta()))};
}

KinematicInput actInput(const Sim3d& X, const KinematicInput& u) {
    const double invR = 1.0 / X.r();
    return {invR * (X.R().transpose() * (u.omega + X.beta())), invR * (X.R().transpose() * u.a)};
}

Sim3d lift(const KinematicState& xi, const KinematicInput& u, double t) {
    requireNonzero(xi.p, "lift: position is zero");
    const Vector3 pNext = propagatedPosition(xi, u, t);
    requireNonzero(pNext, "lift: propagated position passes through the origin");

    const Matrix3 R = so3::align(pNext.normalized(), xi.p.normalized());
    const double r = xi.p.norm() / pNext.norm();
    const Vector3 beta = xi.v - r * R * (xi.v + t * u.a);
    return Sim3d(R, r, beta);
}

Eigen::Matrix<double, 7, 6> liftDifferential(const KinematicState& xi, const KinematicInput& u, double t) {
    requireNonzero(xi.p, "liftDifferential: position is zero");
    const Vector3 pNext = propagatedPosition(xi, u, t);
    requireNonzero(pNext, "liftDifferential: propagated position passes through the origin");

    // R = I + K + K^2 / (1 + c), K = (from x to)^x, c = from . to
    const Vector3 from = pNext.normalized();
    const Vector3 to = xi.p.normalized();
    const Vector3 k = from.cross(to);
    const double c = from.dot(to);
    if (k.norm() < 1e-12 && c < 0.0) {
        throw std::domain_error("liftDifferential: antiparallel positions");
    }
    const Matrix3 K = so3::skew(k);
    const Matrix3 R = so3::align(from, to);
    const double r = xi.p.norm() / pNext.norm();
    const Vector3 w = xi.v + t * u.a;
    const Vector3 beta = xi.v - r * R * w;

    Eigen::Matrix<double, 7, 6> D;
    for (int j = 0; j < 6; ++j) {
        Vector6 delta = Vector6::Zero();
        delta(j) = 1.0;
        const Vector3 dp = delta.head<3>();
        const Vector3 dv = delta.tail<3>();
        const Vector3 dpNext = dp + t * dv;

        const Vector3 dFrom = unitDifferential(pNext, dpNext);
        const Vector3 dTo = unitDifferential(xi.p, dp);
        const Vector3 dk = dFrom.cross(to) + from.cross(dTo);
        const double dc = dFrom.dot(to) + from.dot(dTo);
        const Matrix3 dK = so3::skew(dk);
        const Matrix3 dR = dK + (dK * K + K * dK) / (1.0 + c) - K * K * dc / ((1.0 + c) * (1.0 + c));
        const Matrix3 dRRt = dR * R.transpose();
        const Vector3 Omega = 0.5 * so3::vee(dRRt - dRRt.transpose());

        const double s = to.dot(dp) / xi.p.norm() - from.dot(dpNext) / pNext.norm();
        const Vector3 dBeta = dv - s * r * (R * w) - r * (dR * w) - r * (R * dv);
        const Vector3 b = dBeta - s * beta + beta.cross(Omega);

        D.col(j) << Omega, s, b;
    }
    return D;
}

Vector3 bearing(const KinematicState& xi) {
    requireNonzero(xi.p, "bearing: position is zero");
    return xi.p.normalized();
}

double range(const KinematicState& xi) {
    requireNonzero(xi.p, "range: position is zero");
    return xi.p.norm();
}

BearingRange measure(const KinematicState& xi) { return {bearing(xi), range(xi)}; }

Eigen::Matrix<double, 4, 6> measurementJacobian(const KinematicState& xi) {
    requireNonzero(xi.p, "measurementJacobian: position is zero");
    const double rho = xi.p.norm();
    const Vector3 y = xi.p / rho;
    Eigen::Matrix<double, 4, 6> H = Eigen::Matrix<double, 4, 6>::Zero();
    H.block<3, 3>(0, 0) = (Matrix3::Identity() - y * y.transpose()) / rho;
    H.block<1, 3>(3, 0) = y.transpose();
    return H;
}

SecondOrderSystem::SecondOrderSystem(const KinematicState& origin, double step) : origin_(origin), step_(step) {
    requireNonzero(origin.p, "SecondOrderSystem: origin position is zero");
    if (!(step > 0.0)) throw std::invalid_argument("SecondOrderSystem: step must be positive");

    const Vector3& p0 = origin_.p;
    const Vector3& v0 = origin_.v;
    const double p0sq = p0.squaredNorm();

    // d/dt phi(exp(t (Omega, s, b)), xi0) = (p0 x Omega - s p0, v0 x Omega - s v0 - b)
    originDifferential_.setZero();
    originDifferential_.block<3, 3>(0, 0) = so3::skew(p0);
    originDifferential_.block<3, 1>(0, 3) = -p0;
    originDifferential_.block<3, 3>(3, 0) = so3::skew(v0);
    originDifferential_.block<3, 1>(3, 3) = -v0;
    originDifferential_.block<3, 3>(3, 4) = -Matrix3::Identity();

    // Inverse on {<Omega, p0> = 0}:
    //   Omega = w_p x p0 / |p0|^2,  s = -p0 . w_p / |p0|^2,  b = v0 x Omega - s v0 - w_v
    originPinv_.setZero();
    const Matrix3 omegaFromWp = -so3::skew(p0) / p0sq;
    originPinv_.block<3, 3>(0, 0) = omegaFromWp;
    originPinv_.block<1, 3>(3, 0) = -p0.transpose() / p0sq;
    originPinv_.block<3, 3>(4, 0) = so3::skew(v0) * omegaFromWp + v0 * p0.transpose() / p0sq;
    originPinv_.block<3, 3>(4, 3) = -Matrix3::Identity();
}

KinematicState SecondOrderSystem::chart(const Vector6& eps) const {
    return act(Sim3d::exp(originPinv_ * eps), origin_);
}

Vector6 SecondOrderSystem::chartInverse(const KinematicState& xi) const {
    requireNonzero(xi.p, "chartInverse: position is zero");
    Matrix3 R;
    try {
        R = so3::align(xi.p.normalized(), origin_.p.normalized());
    } catch (const std::domain_error&) {
        throw ChartDomainError("chartInverse: state bearing is opposite to the origin bearing");
    }
    const double r = origin_.p.norm() / xi.p.norm();
    const Vector3 beta = origin_.v - r * R * xi.v;

    const Vector3 Omega = so3::log(R);
    const double s = std::log(r);
    Eigen::Matrix<double, 7, 1> eta;
    eta << Omega, s, Sim3d::translationFactor(Omega, s).partialPivLu().solve(beta);
    return originDifferential_ * eta;
}

Vector6 SecondOrderSystem::chartInverseNewton(const KinematicState& xi) const {
    constexpr int kMaxIterations = 50;
    constexpr double kTolerance = 1e-12;
    constexpr double kStep = 1e-6;

    const Vector6 target = xi.vector();
    Vector6 eps = target - origin_.vector();
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
        const Vector6 residual = chart(eps).vector() - target;
        if (!residual.allFinite()) break;
        if (converged) return eps;
        if (residual.norm() <= kTolerance * (1.0 + target.norm())) converged = true;  // one polishing step
        Matrix6 J;
        for (int j = 0; j < 6; ++j) {
            Vector6 d = Vector6::Zero();
            d(j) = kStep;
            J.col(j) = (chart(eps + d).vector() - chart(eps - d).vector()) / (2 * kStep);
        }
        eps -= J.partialPivLu().solve(residual);
    }
    if (converged) return eps;
    throw ChartDomainError("chartInverseNewton: no convergence within 50 iterations");
}

Matrix6 SecondOrderSystem::actionDifferential(const Sim3d& X) const {
    Matrix6 D = Matrix6::Zero();
    D.block<3, 3>(0, 0) = X.R().transpose() / X.r();
    D.block<3, 3>(3, 3) = X.R().transpose() / X.r();
    return D;
}

Eigen::Matrix<double, 7, 1> SecondOrderSystem::stabilizerGenerator() const {
    const Vector3 n = origin_.p.normalized();
    Eigen::Matrix<double, 7, 1> g;
    g << n, 0.0, -n.cross(origin_.v);
    return g;
}

}  // namespace eqf::kinematics
