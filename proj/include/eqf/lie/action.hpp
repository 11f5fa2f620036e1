#pragma once

#include <functional>

namespace eqf {

/// Right action of a group on the diffeomorphisms of a state space induced by
/// a right action phi(X, xi):  F -> phi_X o F o phi_X^-1.
///
/// `phi` is any callable (Group, State) -> State. The returned map captures
/// its arguments by value.
template <typename Group, typename State, typename Action>
std::function<State(const State&)> conjugateDiffeo(const Group& X,
                                                   std::function<State(const State&)> F,
                                                   Action phi) {
    return [X, F = std::move(F), phi = std::move(phi)](const State& xi) {
        return phi(X, F(phi(X.inverse(), xi)));
    };
}

}  // namespace eqf
