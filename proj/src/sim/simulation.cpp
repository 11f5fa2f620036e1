#include "eqf/sim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "eqf/baselines/ekf.hpp"
#include "eqf/core/filter.hpp"

namespace eqf::sim {

using kinematics::BearingRange;
using kinematics::KinematicInput;
using kinematics::Matrix3;
using kinematics::Matrix6;
using kinematics::SecondOrderSystem;
using kinematics::Vector4;
using kinematics::Vector6;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
/// Radial variance added to the bearing covariance so that it is invertible.
constexpr double kBearingRadialVariance = 1e-9;

Matrix6 processNoise(const SimConfig& cfg) {
    Matrix6 P = Matrix6::Zero();
    P.diagonal() << Vector3::Constant(cfg.processNoisePositionValue()), Vector3::Constant(cfg.processNoiseVelocityValue());
    return P;
}

Matrix6 priorCovariance(const SimConfig& cfg) {
    Matrix6 S = Matrix6::Zero();
    S.diagonal() << Vector3::Constant(cfg.priorSigmaP0 * cfg.priorSigmaP0),
        Vector3::Constant(cfg.priorSigmaV0 * cfg.priorSigmaV0);
    return S;
}

class FilterDriver {
  public:
    virtual ~FilterDriver() = default;
    virtual void step(const Vector3& accel, const BearingRange& y) = 0;
    virtual KinematicState estimate() const = 0;
    virtual double energy(const KinematicState& truth) const = 0;
};

class EqfDriver final : public FilterDriver {
  public:
    EqfDriver(const SimConfig& cfg, const KinematicState& initial, CovarianceReset resetMode)
        : sys_(initial, cfg.sampleInterval()),
          P_(processNoise(cfg)),
          sigmaBearing_(cfg.gainSigmaBearingDeg * kDegToRad),
          sigmaRange_(cfg.gainSigmaRange) {
        belief_.covariance = priorCovariance(cfg);
        opts_.chartRadius = cfg.chartRadius;
        opts_.covarianceReset = resetMode;
    }

    void step(const Vector3& accel, const BearingRange& y) override {
        const KinematicInput u{Vector3::Zero(), accel};
        const auto predicted = predict(sys_, belief_, u, P_, opts_);
        // Bearing noise model lives in the tangent plane of the predicted bearing.
        const Vector3 yhat = kinematics::bearing(sys_.act(predicted.reference, sys_.origin()));
        Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
        Q.block<3, 3>(0, 0) = sigmaBearing_ * sigmaBearing_ * (Matrix3::Identity() - yhat * yhat.transpose()) +
                              kBearingRadialVariance * yhat * yhat.transpose();
        Q(3, 3) = sigmaRange_ * sigmaRange_;
        belief_ = reset(sys_, update(sys_, predicted, y.vector(), Q, opts_), opts_);
    }

    KinematicState estimate() const override { return sys_.act(belief_.reference, sys_.origin()); }

    double energy(const KinematicState& truth) const override {
        const Vector6 eps = sys_.chartInverse(equivariantError(sys_, belief_.reference, truth));
        return filterEnergy(eps, belief_.covariance);
    }

  private:
    SecondOrderSystem sys_;
    ConcentratedGaussian<SecondOrderSystem> belief_;
    FilterOptions opts_;
    Matrix6 P_;
    double sigmaBearing_;
    double sigmaRange_;
};

class EkfDriver final : public FilterDriver {
  public:
    EkfDriver(const SimConfig& cfg, const KinematicState& initial)
        : t_(cfg.sampleInterval()),
          P_(processNoise(cfg)),
          sigmaBearing_(cfg.gainSigmaBearingDeg * kDegToRad),
          sigmaRange_(cfg.gainSigmaRange) {
        belief_.mean = initial.vector();
        belief_.covariance = priorCovariance(cfg);
    }

    void step(const Vector3& accel, const BearingRange& y) override {
        belief_ = baselines::ekfPredict(belief_, accel, t_, P_);
        belief_ = baselines::ekfUpdatePosition(belief_, y.bearing, y.range, sigmaBearing_, sigmaRange_);
    }

    KinematicState estimate() const override { return KinematicState::fromVector(belief_.mean); }

    double energy(const KinematicState& truth) const override {
        return filterEnergy(Vector6(truth.vector() - belief_.mean), belief_.covariance);
    }

  private:
    double t_;
    baselines::EkfBelief belief_;
    Matrix6 P_;
    double sigmaBearing_;
    double sigmaRange_;
};

std::unique_ptr<FilterDriver> makeDriver(FilterKind kind, const SimConfig& cfg, const KinematicState& initial) {
    switch (kind) {
        case FilterKind::Eqf: return std::make_unique<EqfDriver>(cfg, initial, CovarianceReset::ParallelTransport);
        case FilterKind::EqfNoReset: return std::make_unique<EqfDriver>(cfg, initial, CovarianceReset::None);
        case FilterKind::Ekf: return std::make_unique<EkfDriver>(cfg, initial);
        case FilterKind::EqfConsistent:
            return std::make_unique<EqfDriver>(cfg, initial, CovarianceReset::ErrorConsistentTransport);
    }
    throw std::invalid_argument("unknown filter kind");
}

FilterSample sampleOf(const FilterDriver& driver, const KinematicState& truth) {
    FilterSample s;
    s.estimate = driver.estimate();
    s.positionError = (s.estimate.p - truth.p).norm();
    s.velocityError = (s.estimate.v - truth.v).norm();
    s.energy = driver.energy(truth);
    return s;
}

double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    const double upper = xs[mid];
    if (xs.size() % 2 == 1) return upper;
    return 0.5 * (upper + *std::max_element(xs.begin(), xs.begin() + mid));
}

}  // namespace

Vector3 profileAcceleration(AccelProfile profile, double tau) {
    switch (profile) {
        case AccelProfile::Cosine: return {0.0, std::cos(tau), 0.0};
        case AccelProfile::Zero: return Vector3::Zero();
    }
    return Vector3::Zero();
}

Trajectory simulateTruth(const SimConfig& cfg) {
    cfg.validate();
    const int samples = cfg.sampleCount();
    const int substeps = cfg.substepsPerSample();
    const double T = cfg.sampleInterval();
    const double h = cfg.truthStep;

    Trajectory traj;
    traj.times.reserve(samples + 1);
    traj.states.reserve(samples + 1);
    traj.accel.reserve(samples);

    KinematicState x = cfg.initialState;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (int k = 0; k < samples; ++k) {
        const Vector3 a = profileAcceleration(cfg.accelProfile, (k + 0.5) * T);
        for (int j = 0; j < substeps; ++j) {
            const Vector3 vNext = x.v + h * a;
            x.p += 0.5 * h * (x.v + vNext);
            x.v = vNext;
        }
        traj.accel.push_back(a);
        traj.times.push_back((k + 1) * T);
        traj.states.push_back(x);
    }
    return traj;
}

Vector3 perturbBearing(const Vector3& bearing, double angle, double axisAngle) {
    const Matrix3 frame = baselines::completeFrame(bearing);
    const Vector3 axis = std::cos(axisAngle) * frame.col(0) + std::sin(axisAngle) * frame.col(1);
    return so3::exp(Vector3(angle * axis)) * bearing;
}

SensorData corruptMeasurements(const Trajectory& truth, const SimConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniformAngle(0.0, 2.0 * std::numbers::pi);
    const double sigmaBearing = cfg.sigmaBearingDeg * kDegToRad;

    SensorData out;
    out.accel.reserve(truth.accel.size());
    out.measurements.reserve(truth.states.size());
    for (std::size_t k = 0; k < truth.states.size(); ++k) {
        if (k < truth.accel.size()) {
            const Vector3 noise(gauss(rng), gauss(rng), gauss(rng));
            out.accel.push_back(truth.accel[k] + cfg.sigmaAccel * noise);
        }
        BearingRange y = kinematics::measure(truth.states[k]);
        const double angle = sigmaBearing * gauss(rng);
        const double axisAngle = uniformAngle(rng);
        const double rangeNoise = cfg.sigmaRange * gauss(rng);
        if (angle != 0.0) y.bearing = perturbBearing(y.bearing, angle, axisAngle);
        y.range += rangeNoise;
        out.measurements.push_back(y);
    }
    return out;
}

std::mt19937_64 runGenerator(std::uint64_t seed, int run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run)};
    return std::mt19937_64(seq);
}

RunRecord runFilters(const SimConfig& cfg, int run, const Trajectory& truth, const SensorData& sensors,
                     const KinematicState& initialEstimate) {
    RunRecord record;
    record.run = run;
    record.times = truth.times;
    record.truth = truth.states;

    for (FilterKind kind : cfg.filters) {
        FilterTrack track;
        track.kind = kind;
        track.samples.reserve(truth.states.size());
        try {
            auto driver = makeDriver(kind, cfg, initialEstimate);
            track.samples.push_back(sampleOf(*driver, truth.states[0]));
            for (std::size_t k = 1; k < truth.states.size(); ++k) {
                driver->step(sensors.accel[k - 1], sensors.measurements[k]);
                track.samples.push_back(sampleOf(*driver, truth.states[k]));
            }
        } catch (const std::exception& e) {
            track.diverged = true;
            track.failure = e.what();
        }
        record.filters.push_back(std::move(track));
    }
    return record;
}

RunRecord runExperiment(const SimConfig& cfg, int run) {
    const Trajectory truth = simulateTruth(cfg);
    std::mt19937_64 rng = runGenerator(cfg.seed, run);
    std::normal_distribution<double> gauss(0.0, 1.0);
    KinematicState initial = truth.states.front();
    for (int i = 0; i < 3; ++i) initial.p(i) += cfg.sigmaP0 * gauss(rng);
    for (int i = 0; i < 3; ++i) initial.v(i) += cfg.sigmaV0 * gauss(rng);
    const SensorData sensors = corruptMeasurements(truth, cfg, rng);
    return runFilters(cfg, run, truth, sensors, initial);
}

MonteCarloResult monteCarlo(const SimConfig& cfg, bool keepRuns) {
    cfg.validate();
    std::vector<RunRecord> runs(cfg.runs);
    const int workers = std::clamp(cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency()),
                                   1, cfg.runs);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < cfg.runs; i = next++) runs[i] = runExperiment(cfg, i);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    MonteCarloResult result;
    result.times = runs.front().times;
    const std::size_t samples = result.times.size();
    for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
        FilterAggregate agg;
        agg.kind = cfg.filters[f];
        agg.meanPositionError.assign(samples, 0.0);
        agg.medianPositionError.assign(samples, 0.0);
        agg.meanVelocityError.assign(samples, 0.0);
        agg.medianVelocityError.assign(samples, 0.0);
        agg.meanEnergy.assign(samples, 0.0);
        agg.count.assign(samples, 0);
        std::vector<std::vector<double>> pos(samples), vel(samples);
        for (const RunRecord& r : runs) {
            const FilterTrack& track = r.filters[f];
            if (track.diverged) {
                ++agg.divergedRuns;
                continue;
            }
            for (std::size_t k = 0; k < track.samples.size(); ++k) {
                const FilterSample& s = track.samples[k];
                agg.meanPositionError[k] += s.positionError;
                agg.meanVelocityError[k] += s.velocityError;
                agg.meanEnergy[k] += s.energy;
                agg.count[k] += 1;
                pos[k].push_back(s.positionError);
                vel[k].push_back(s.velocityError);
            }
        }
        for (std::size_t k = 0; k < samples; ++k) {
            const double n = agg.count[k] > 0 ? agg.count[k] : std::numeric_limits<double>::quiet_NaN();
            agg.meanPositionError[k] /= n;
            agg.meanVelocityError[k] /= n;
            agg.meanEnergy[k] /= n;
            agg.medianPositionError[k] = median(std::move(pos[k]));
            agg.medianVelocityError[k] = median(std::move(vel[k]));
        }
        result.filters.push_back(std::move(agg));
    }
    if (keepRuns) result.runs = std::move(runs);
    return result;
}

double windowMean(const std::vector<double>& times, const std::vector<double>& curve, double t0, double t1) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < times.size() && k < curve.size(); ++k) {
        if (times[k] >= t0 - 1e-12 && times[k] <= t1 + 1e-12) {
            sum += curve[k];
            ++n;
        }
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double firstTimeBelow(const std::vector<double>& times, const std::vector<double>& curve, double threshold) {
    for (std::size_t k = 0; k < times.size() && k < curve.size(); ++k) {
        if (curve[k] < threshold) return times[k];
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace eqf::sim
