#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eqf::sim {

/// Largest residual of one property over a batch of random samples.
struct PropertyCheck {
    std::string name;
    double maxResidual = 0.0;
    double tolerance = 0.0;
    int samples = 0;

    bool passed() const { return maxResidual < tolerance; }
};

/**
 * Runs the algebraic, lift, error-dynamics and linearisation checks of the
 * example system on `samples` seeded random draws each and reports residual
 * maxima. Residuals are absolute except for the Jacobian checks, which are
 * relative Frobenius errors against central differences.
 */
std::vector<PropertyCheck> runPropertyChecks(std::uint64_t seed, int samples = 1000);

}  // namespace eqf::sim
