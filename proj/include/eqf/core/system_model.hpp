#pragma once

#include <concepts>

#include <Eigen/Core>

namespace eqf {

/// Lie group with algebra coordinates in R^Dim.
template <typename G>
concept LieGroup = requires(const G& X, const G& Y, const typename G::Tangent& v) {
    typename G::Scalar;
    typename G::Tangent;
    { G::Dim } -> std::convertible_to<int>;
    { G::Identity() } -> std::same_as<G>;
    { X * Y } -> std::same_as<G>;
    { X.inverse() } -> std::same_as<G>;
    { G::exp(v) } -> std::same_as<G>;
    { X.log() } -> std::same_as<typename G::Tangent>;
    { X.Adjoint() };
};

/**
 * A discrete-time system with a transitive right symmetry, equivariant input
 * action and equivariant lift, together with the chart used by the filter.
 *
 * Tangent vectors of the state space are expressed in R^StateDim through
 * `retract`; every derivative below is taken in those coordinates.
 *
 * Required members (m = StateDim, n = Group::Dim, q = OutputDim):
 *  - transition(xi, u)           one step of the dynamics F_u(xi)
 *  - act(X, xi), actInput(X, u)  the state and input actions phi, psi
 *  - lift(xi, u)                 Lambda, with phi_xi(Lambda(xi, u)) = F_u(xi)
 *  - output(xi)                  h(xi) embedded in R^q
 *  - origin()                    the fixed origin xi0
 *  - chart(eps), chartInverse(xi)  Theta^-1 and Theta about xi0
 *  - retract(xi, delta)          state perturbation used for derivatives
 *  - originDifferential()        D phi_xi0(id), m x n
 *  - originDifferentialPinv()    a right inverse of it, n x m
 *  - chartDifferential()         D Theta^-1 at 0, m x m
 *  - liftDifferential(u0)        right-trivialised D_xi Lambda(xi0, u0), n x m
 *  - outputJacobian(xi)          D h(xi), q x m
 *  - actionDifferential(X)       D phi_X at xi0, m x m
 */
template <typename S>
concept EquivariantSystem = LieGroup<typename S::Group> && requires(
    const S& sys, const typename S::State& xi, const typename S::Input& u, const typename S::Group& X,
    const Eigen::Matrix<typename S::Scalar, S::StateDim, 1>& eps) {
    typename S::State;
    typename S::Input;
    { sys.transition(xi, u) } -> std::same_as<typename S::State>;
    { sys.act(X, xi) } -> std::same_as<typename S::State>;
    { sys.actInput(X, u) } -> std::same_as<typename S::Input>;
    { sys.lift(xi, u) } -> std::same_as<typename S::Group>;
    { sys.output(xi) } -> std::convertible_to<Eigen::Matrix<typename S::Scalar, S::OutputDim, 1>>;
    { sys.origin() } -> std::convertible_to<typename S::State>;
    { sys.chart(eps) } -> std::same_as<typename S::State>;
    { sys.chartInverse(xi) } -> std::convertible_to<Eigen::Matrix<typename S::Scalar, S::StateDim, 1>>;
    { sys.retract(xi, eps) } -> std::same_as<typename S::State>;
    { sys.originDifferential() };
    { sys.originDifferentialPinv() };
    { sys.chartDifferential() };
    { sys.liftDifferential(u) };
    { sys.outputJacobian(xi) };
    { sys.actionDifferential(X) };
};

}  // namespace eqf
