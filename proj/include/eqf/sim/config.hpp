#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eqf/kinematics/second_order.hpp"

namespace eqf::sim {

enum class FilterKind {
    Eqf,
    EqfNoReset,
    Ekf,
    EqfConsistent,  ///< EqF with the +Delta/2 covariance transport
};

std::string_view filterName(FilterKind kind);
/// Parses "eqf", "eqf-noreset", "ekf" or "eqf-consistent"; throws
/// std::invalid_argument otherwise.
FilterKind parseFilterName(std::string_view name);
/// Comma separated list of filter names.
std::vector<FilterKind> parseFilterList(std::string_view list);

enum class AccelProfile {
    Cosine,  ///< a(tau) = (0, cos tau, 0)
    Zero,
};

/// Experiment parameters. Angles in degrees, everything else SI.
struct SimConfig {
    double duration = 10.0;
    double truthStep = 1e-4;
    double sampleRate = 100.0;
    kinematics::KinematicState initialState{{0.0, 0.0, 50.0}, {0.0, 0.0, 0.0}};
    AccelProfile accelProfile = AccelProfile::Cosine;

    // Noise injected into the simulation.
    double sigmaAccel = 0.22360679774997896;  ///< sqrt(0.05) m/s^2 per axis
    double sigmaBearingDeg = 1.0;
    double sigmaRange = 1.0;
    double sigmaP0 = 7.5;
    double sigmaV0 = 2.0;

    // Filter gains. Negative process-noise entries mean "derive from
    // gainSigmaAccel and the sample interval".
    double gainSigmaAccel = 0.22360679774997896;
    double processNoisePosition = -1.0;
    double processNoiseVelocity = -1.0;
    // Per-axis tangent-plane std of the bearing. A rotation by N(0, s^2)
    // about a uniformly random orthogonal axis puts s^2/2 on each axis.
    double gainSigmaBearingDeg = 0.70710678118654757;
    double gainSigmaRange = 1.0;
    double priorSigmaP0 = 7.5;
    double priorSigmaV0 = 2.0;
    double chartRadius = 100.0;

    std::uint64_t seed = 1;
    int runs = 100;
    int workers = 0;  ///< 0 selects the hardware concurrency
    std::vector<FilterKind> filters{FilterKind::Eqf, FilterKind::EqfNoReset, FilterKind::Ekf};

    double sampleInterval() const { return 1.0 / sampleRate; }
    int sampleCount() const;          ///< number of filter steps
    int substepsPerSample() const;
    double processNoisePositionValue() const;
    double processNoiseVelocityValue() const;
    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// Parses the flat `key = value` TOML subset used for experiment files.
/// Unknown keys, tables and malformed values throw std::invalid_argument.
SimConfig parseConfig(std::string_view text);
SimConfig loadConfig(const std::string& path);

}  // namespace eqf::sim
