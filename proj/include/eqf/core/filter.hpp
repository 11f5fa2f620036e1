#pragma once

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "eqf/core/errors.hpp"
#include "eqf/core/system_model.hpp"

namespace eqf {

template <EquivariantSystem System>
struct SystemTypes {
    using Scalar = typename System::Scalar;
    using Group = typename System::Group;
    using State = typename System::State;
    using Input = typename System::Input;
    static constexpr int m = System::StateDim;
    static constexpr int n = Group::Dim;
    static constexpr int q = System::OutputDim;
    using StateVector = Eigen::Matrix<Scalar, m, 1>;
    using StateMatrix = Eigen::Matrix<Scalar, m, m>;
    using AlgebraVector = Eigen::Matrix<Scalar, n, 1>;
    using OutputVector = Eigen::Matrix<Scalar, q, 1>;
    using OutputMatrix = Eigen::Matrix<Scalar, q, m>;
    using NoiseMatrix = Eigen::Matrix<Scalar, q, q>;
};

/**
 * @brief Extended concentrated Gaussian on a homogeneous space.
 *
 * xi = phi(reference, Theta^-1(eps)) with eps ~ N(mean, covariance).
 */
template <EquivariantSystem System>
struct ConcentratedGaussian {
    using T = SystemTypes<System>;
    typename T::Group reference = T::Group::Identity();
    typename T::StateVector mean = T::StateVector::Zero();
    typename T::StateMatrix covariance = T::StateMatrix::Identity();
};

enum class CovarianceReset {
    /// Cartan-Schouten (0)-connection transport, Ad(exp(-Delta/2)).
    ParallelTransport,
    /// Ad(exp(+Delta/2)): the first-order Jacobian of the reset for the error
    /// E = X Xhat^-1, which the base point update right-multiplies by exp(-Delta).
    ErrorConsistentTransport,
    None,  ///< keep the fused covariance unchanged
};

enum class JacobianMode {
    Analytic,
    Checked,  ///< analytic, verified against central differences every call
};

struct FilterOptions {
    /// Largest local mean accepted by the reset, in chart units.
    double chartRadius = 1.0;
    CovarianceReset covarianceReset = CovarianceReset::ParallelTransport;
    JacobianMode jacobians = JacobianMode::Analytic;
    double finiteDifferenceStep = 1e-6;
    double finiteDifferenceTolerance = 1e-5;
};

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& M) {
    return (M + M.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
void requirePositiveDefinite(const Eigen::MatrixBase<Derived>& M, const char* what) {
    using Plain = typename Derived::PlainObject;
    if (!M.allFinite() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + M.cwiseAbs().maxCoeff())) {
        throw NotPositiveDefiniteError(std::string(what) + " is not symmetric");
    }
    Eigen::LLT<Plain> llt(symmetrize(M));
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError(std::string(what) + " is not positive definite");
    }
}

/// e = phi(Xhat^-1, xi).
template <EquivariantSystem System>
typename System::State equivariantError(const System& sys, const typename System::Group& Xhat,
                                        const typename System::State& xi) {
    return sys.act(Xhat.inverse(), xi);
}

/// u0 = psi(Xhat^-1, u).
template <EquivariantSystem System>
typename System::Input originInput(const System& sys, const typename System::Group& Xhat,
                                   const typename System::Input& u) {
    return sys.actInput(Xhat.inverse(), u);
}

/// e+ = phi(Lambda(e, u0) Lambda(xi0, u0)^-1 exp(-Delta), e).
template <EquivariantSystem System>
typename System::State errorDynamicsStep(const System& sys, const typename System::State& e,
                                         const typename System::Input& u0,
                                         const typename SystemTypes<System>::AlgebraVector& Delta) {
    using Group = typename System::Group;
    const Group drift = sys.lift(e, u0) * sys.lift(sys.origin(), u0).inverse();
    return sys.act(drift * Group::exp(-Delta), e);
}

/// Linearisation of the unforced error dynamics at the origin in chart
/// coordinates:
///
///   A = I + DTheta . Dphi_xi0(id) . D_xi (Lambda(xi, u0) Lambda(xi0, u0)^-1) . DTheta^-1
///
/// The identity is the derivative of the second argument of
/// phi(Lambda~(e), e) with respect to e.
template <EquivariantSystem System>
typename SystemTypes<System>::StateMatrix analyticStateMatrix(const System& sys, const typename System::Input& u0) {
    using T = SystemTypes<System>;
    const typename T::StateMatrix chartJac = sys.chartDifferential();
    const typename T::StateMatrix chartJacInv = chartJac.inverse();
    return T::StateMatrix::Identity() +
           chartJacInv * sys.originDifferential() * sys.liftDifferential(u0) * chartJac;
}

/// Central differences of eps -> Theta(errorDynamicsStep(Theta^-1(eps), u0, 0)).
template <EquivariantSystem System>
typename SystemTypes<System>::StateMatrix numericalStateMatrix(const System& sys, const typename System::Input& u0,
                                                               double step = 1e-6) {
    using T = SystemTypes<System>;
    const typename T::AlgebraVector zero = T::AlgebraVector::Zero();
    typename T::StateMatrix A;
    for (int j = 0; j < T::m; ++j) {
        typename T::StateVector d = T::StateVector::Zero();
        d(j) = step;
        const typename T::StateVector plus = sys.chartInverse(errorDynamicsStep(sys, sys.chart(d), u0, zero));
        const typename T::StateVector minus = sys.chartInverse(errorDynamicsStep(sys, sys.chart(-d), u0, zero));
        A.col(j) = (plus - minus) / (2 * step);
    }
    return A;
}

/// C = Dh(xihat) . Dphi_Xhat(xi0) . DTheta^-1.
template <EquivariantSystem System>
typename SystemTypes<System>::OutputMatrix analyticOutputMatrix(const System& sys,
                                                                const typename System::Group& Xhat) {
    return sys.outputJacobian(sys.act(Xhat, sys.origin())) * sys.actionDifferential(Xhat) *
           sys.chartDifferential();
}

/// Central differences of eps -> h(phi(Xhat, Theta^-1(eps))).
template <EquivariantSystem System>
typename SystemTypes<System>::OutputMatrix numericalOutputMatrix(const System& sys,
                                                                 const typename System::Group& Xhat,
                                                                 double step = 1e-6) {
    using T = SystemTypes<System>;
    typename T::OutputMatrix C;
    for (int j = 0; j < T::m; ++j) {
        typename T::StateVector d = T::StateVector::Zero();
        d(j) = step;
        const typename T::OutputVector plus = sys.output(sys.act(Xhat, sys.chart(d)));
        const typename T::OutputVector minus = sys.output(sys.act(Xhat, sys.chart(-d)));
        C.col(j) = (plus - minus) / (2 * step);
    }
    return C;
}

/// Frobenius-norm relative error ||a - b|| / max(||b||, 1e-300).
template <typename DerivedA, typename DerivedB>
double relativeError(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return (a - b).norm() / std::max(static_cast<double>(b.norm()), 1e-300);
}

namespace detail {

template <typename Analytic, typename Numeric>
void crossCheck(const Analytic& analytic, const Numeric& numeric, double tol, const char* name) {
    const double err = relativeError(analytic, numeric);
    // Matrices that vanish identically have no meaningful relative error.
    if (numeric.norm() < 1e-12 && analytic.norm() < 1e-12) return;
    if (!(err <= tol)) {
        std::ostringstream msg;
        msg << name << " differs from central differences: relative error " << err << " > " << tol;
        throw JacobianMismatchError(msg.str());
    }
}

}  // namespace detail

template <EquivariantSystem System>
typename SystemTypes<System>::StateMatrix stateMatrix(const System& sys, const typename System::Input& u0,
                                                      const FilterOptions& opts = {}) {
    auto A = analyticStateMatrix(sys, u0);
    if (opts.jacobians == JacobianMode::Checked) {
        detail::crossCheck(A, numericalStateMatrix(sys, u0, opts.finiteDifferenceStep),
                           opts.finiteDifferenceTolerance, "state matrix A");
    }
    return A;
}

template <EquivariantSystem System>
typename SystemTypes<System>::OutputMatrix outputMatrix(const System& sys, const typename System::Group& Xhat,
                                                        const FilterOptions& opts = {}) {
    auto C = analyticOutputMatrix(sys, Xhat);
    if (opts.jacobians == JacobianMode::Checked) {
        detail::crossCheck(C, numericalOutputMatrix(sys, Xhat, opts.finiteDifferenceStep),
                           opts.finiteDifferenceTolerance, "output matrix C");
    }
    return C;
}

/// Xhat+ = Xhat Lambda(phi_xi0(Xhat), u),  Sigma+ = A Sigma A^T + P.
template <EquivariantSystem System>
ConcentratedGaussian<System> predict(const System& sys, const ConcentratedGaussian<System>& belief,
                                     const typename System::Input& u,
                                     const typename SystemTypes<System>::StateMatrix& P,
                                     const FilterOptions& opts = {}) {
    requirePositiveDefinite(belief.covariance, "predict: covariance");
    const auto u0 = originInput(sys, belief.reference, u);
    const auto A = stateMatrix(sys, u0, opts);
    ConcentratedGaussian<System> out;
    out.reference = belief.reference * sys.lift(sys.act(belief.reference, sys.origin()), u);
    out.mean.setZero();
    out.covariance = symmetrize(A * belief.covariance * A.transpose() + P);
    return out;
}

/**
 * Gaussian fusion in the local coordinates of the predicted estimate:
 *
 *   Sigma* = (Sigma^-1 + C^T Q^-1 C)^-1,   mu = Sigma* C^T Q^-1 (y - h(xihat)).
 *
 * The reference is unchanged.
 */
template <EquivariantSystem System>
ConcentratedGaussian<System> update(const System& sys, const ConcentratedGaussian<System>& belief,
                                    const typename SystemTypes<System>::OutputVector& y,
                                    const typename SystemTypes<System>::NoiseMatrix& Q,
                                    const typename SystemTypes<System>::OutputMatrix& C) {
    using T = SystemTypes<System>;
    requirePositiveDefinite(belief.covariance, "update: covariance");
    Eigen::LDLT<typename T::NoiseMatrix> Qldlt(Q);
    if (Qldlt.info() != Eigen::Success || !Qldlt.isPositive() ||
        Qldlt.vectorD().minCoeff() <= 0.0) {
        throw NotPositiveDefiniteError("update: measurement covariance Q is singular or indefinite");
    }
    const typename T::OutputVector residual = y - typename T::OutputVector(sys.output(sys.act(belief.reference, sys.origin())));
    const Eigen::Matrix<typename T::Scalar, T::q, T::m> QinvC = Qldlt.solve(C);
    const typename T::StateMatrix information =
        belief.covariance.inverse() + C.transpose() * QinvC;
    ConcentratedGaussian<System> out;
    out.reference = belief.reference;
    out.covariance = symmetrize(information.inverse());
    out.mean = out.covariance * (C.transpose() * Qldlt.solve(residual));
    return out;
}

template <EquivariantSystem System>
ConcentratedGaussian<System> update(const System& sys, const ConcentratedGaussian<System>& belief,
                                    const typename SystemTypes<System>::OutputVector& y,
                                    const typename SystemTypes<System>::NoiseMatrix& Q,
                                    const FilterOptions& opts = {}) {
    return update(sys, belief, y, Q, outputMatrix(sys, belief.reference, opts));
}

/// Delta = Dphi_xi0(id)^+ DTheta^-1 mu.
template <EquivariantSystem System>
typename SystemTypes<System>::AlgebraVector resetCorrection(const System& sys,
                                                            const typename SystemTypes<System>::StateVector& mu) {
    return sys.originDifferentialPinv() * (sys.chartDifferential() * mu);
}

/**
 * Covariance transport over exp(t Delta), t in [0, 1].
 *
 * Chart tangent vectors are lifted into the horizontal subspace, moved by
 * Ad(exp(-Delta/2)) and projected back through DTheta . Dphi_xi0(id):
 *
 *   T = DTheta . Dphi_xi0(id) . Ad(exp(-Delta/2)) . Dphi_xi0(id)^+ . DTheta^-1
 *
 * `halfStep` is the exponent fed to Ad; -1/2 by default.
 */
template <EquivariantSystem System>
typename SystemTypes<System>::StateMatrix transportMatrix(const System& sys,
                                                          const typename SystemTypes<System>::AlgebraVector& Delta,
                                                          typename System::Scalar halfStep = -0.5) {
    using Group = typename System::Group;
    const auto chartJac = sys.chartDifferential();
    const auto Ad = Group::exp(halfStep * Delta).Adjoint();
    return chartJac.inverse() * sys.originDifferential() * Ad * sys.originDifferentialPinv() * chartJac;
}

/// Moves the base point by exp(Delta) and re-centres the belief (mu = 0).
template <EquivariantSystem System>
ConcentratedGaussian<System> reset(const System& sys, const ConcentratedGaussian<System>& belief,
                                   const FilterOptions& opts = {}) {
    const double meanNorm = belief.mean.norm();
    if (!std::isfinite(meanNorm) || meanNorm > opts.chartRadius) {
        std::ostringstream msg;
        msg << "reset: local mean norm " << meanNorm << " exceeds chart radius " << opts.chartRadius
            << "; use smaller steps or a larger chart radius";
        throw ChartDomainError(msg.str());
    }
    if (meanNorm == 0.0) return belief;

    using Group = typename System::Group;
    const auto Delta = resetCorrection(sys, belief.mean);
    ConcentratedGaussian<System> out;
    out.reference = Group::exp(Delta) * belief.reference;
    out.mean.setZero();
    if (opts.covarianceReset == CovarianceReset::None) {
        out.covariance = belief.covariance;
    } else {
        const typename System::Scalar halfStep = opts.covarianceReset == CovarianceReset::ParallelTransport ? -0.5 : 0.5;
        const auto T = transportMatrix(sys, Delta, halfStep);
        out.covariance = symmetrize(T * belief.covariance * T.transpose());
    }
    return out;
}

/// One predict / update / reset cycle.
template <EquivariantSystem System>
ConcentratedGaussian<System> filterStep(const System& sys, const ConcentratedGaussian<System>& belief,
                                        const typename System::Input& u,
                                        const typename SystemTypes<System>::OutputVector& y,
                                        const typename SystemTypes<System>::StateMatrix& P,
                                        const typename SystemTypes<System>::NoiseMatrix& Q,
                                        const FilterOptions& opts = {}) {
    const auto predicted = predict(sys, belief, u, P, opts);
    return reset(sys, update(sys, predicted, y, Q, opts), opts);
}

/// (1/m) eps^T Sigma^-1 eps.
template <typename DerivedE, typename DerivedS>
double filterEnergy(const Eigen::MatrixBase<DerivedE>& eps, const Eigen::MatrixBase<DerivedS>& Sigma) {
    Eigen::LLT<typename DerivedS::PlainObject> llt(Sigma);
    if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("filterEnergy: covariance is not positive definite");
    return eps.dot(llt.solve(eps)) / static_cast<double>(eps.size());
}

}  // namespace eqf
