#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eqf/kinematics/second_order.hpp"
#include "eqf/sim/config.hpp"

namespace eqf::sim {

using kinematics::KinematicState;
using kinematics::Vector3;

/// Acceleration of the configured profile at time tau (seconds).
Vector3 profileAcceleration(AccelProfile profile, double tau);

/// Sampled ground truth. `accel[k]` is the acceleration held over
/// [t_k, t_k+1); `states` has sampleCount() + 1 entries.
struct Trajectory {
    std::vector<double> times;
    std::vector<KinematicState> states;
    std::vector<Vector3> accel;
};

/**
 * Integrates p' = v, v' = a with steps of cfg.truthStep and samples at
 * cfg.sampleRate. The acceleration is held at its mid-interval value over
 * each sample interval; within a substep v advances by h a and p by the
 * average of the old and new velocity, so the samples follow the discrete
 * constant-acceleration model exactly.
 */
Trajectory simulateTruth(const SimConfig& cfg);

/// Sensor data seen by the filters. `accel[k]` drives step k -> k+1 and
/// `measurements[k]` observes states[k].
struct SensorData {
    std::vector<Vector3> accel;
    std::vector<kinematics::BearingRange> measurements;
};

/// Rotates `bearing` by `angle` about a unit axis orthogonal to it, chosen by
/// `axisAngle` within the tangent plane.
Vector3 perturbBearing(const Vector3& bearing, double angle, double axisAngle);

/// Adds accelerometer noise held per sample interval, bearing noise as a
/// Gaussian rotation about a random orthogonal axis and additive range noise.
SensorData corruptMeasurements(const Trajectory& truth, const SimConfig& cfg, std::mt19937_64& rng);

/// Per-run generator: a seed_seq over (seed, run).
std::mt19937_64 runGenerator(std::uint64_t seed, int run);

struct FilterSample {
    KinematicState estimate;
    double positionError = 0.0;
    double velocityError = 0.0;
    double energy = 0.0;
};

struct FilterTrack {
    FilterKind kind = FilterKind::Eqf;
    std::vector<FilterSample> samples;  ///< stops at divergence
    bool diverged = false;
    std::string failure;
};

struct RunRecord {
    int run = 0;
    std::vector<double> times;
    std::vector<KinematicState> truth;
    std::vector<FilterTrack> filters;
};

/// Runs every configured filter over one seeded realisation. Filter failures
/// (chart-domain errors and the like) end that filter's track and are
/// recorded, not thrown.
RunRecord runExperiment(const SimConfig& cfg, int run);

/// Same, with an explicit initial estimate and sensor stream.
RunRecord runFilters(const SimConfig& cfg, int run, const Trajectory& truth, const SensorData& sensors,
                     const KinematicState& initialEstimate);

struct FilterAggregate {
    FilterKind kind = FilterKind::Eqf;
    std::vector<double> meanPositionError;
    std::vector<double> medianPositionError;
    std::vector<double> meanVelocityError;
    std::vector<double> medianVelocityError;
    std::vector<double> meanEnergy;
    std::vector<int> count;  ///< runs contributing at each sample
    int divergedRuns = 0;
};

struct MonteCarloResult {
    std::vector<double> times;
    std::vector<FilterAggregate> filters;
    std::vector<RunRecord> runs;  ///< empty unless requested
};

/// Runs cfg.runs realisations (run indices 0..runs-1), in parallel when
/// cfg.workers allows, and reduces them in run order.
MonteCarloResult monteCarlo(const SimConfig& cfg, bool keepRuns = false);

/// Mean of `curve` over samples with t in [t0, t1].
double windowMean(const std::vector<double>& times, const std::vector<double>& curve, double t0, double t1);

/// First sample time where `curve` drops below `threshold`; +inf if never.
double firstTimeBelow(const std::vector<double>& times, const std::vector<double>& curve, double threshold);

}  // namespace eqf::sim
