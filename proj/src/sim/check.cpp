#include "eqf/sim/check.hpp"

#include <algorithm>
#include <random>

#include "eqf/core/filter.hpp"
#include "eqf/kinematics/second_order.hpp"
#include "eqf/lie/action.hpp"

namespace eqf::sim {

using kinematics::KinematicInput;
using kinematics::KinematicState;
using kinematics::SecondOrderSystem;
using kinematics::Vector3;
using kinematics::Vector6;

namespace {

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double gauss() { return normal_(rng_); }
    Vector3 vector(double scale) { return Vector3(gauss(), gauss(), gauss()) * scale; }

    Sim3d::Tangent tangent(double maxNorm) {
        Sim3d::Tangent v;
        for (int i = 0; i < 7; ++i) v(i) = gauss();
        return v.normalized() * uniform(0.0, maxNorm);
    }
    Sim3d group(double maxNorm = 2.0) { return Sim3d::exp(tangent(maxNorm)); }

    KinematicState state() {
        Vector3 p = vector(1.0);
        p = p.normalized() * uniform(1.0, 100.0);
        return {p, vector(5.0)};
    }
    KinematicInput input() { return {vector(0.5), vector(2.0)}; }

  private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double distance(const Sim3d& X, const Sim3d& Y) {
    return (X.R() - Y.R()).norm() + std::abs(X.r() - Y.r()) + (X.beta() - Y.beta()).norm();
}
double distance(const KinematicState& a, const KinematicState& b) { return (a.vector() - b.vector()).norm(); }
double distance(const KinematicInput& a, const KinematicInput& b) {
    return (a.omega - b.omega).norm() + (a.a - b.a).norm();
}

struct Tracker {
    PropertyCheck check;
    void add(double residual) {
        check.maxResidual = std::max(check.maxResidual, residual);
        ++check.samples;
    }
};

}  // namespace

std::vector<PropertyCheck> runPropertyChecks(std::uint64_t seed, int samples) {
    Sampler rnd(seed);
    const double step = 0.01;
    const KinematicState origin{{0.0, 0.0, 50.0}, {0.0, 0.0, 0.0}};
    const SecondOrderSystem sys(origin, step);

    Tracker assoc{{"group associativity", 0, 1e-12}}, inverse{{"group inverse", 0, 1e-12}};
    Tracker expLog{{"exp/log roundtrip", 0, 1e-9}}, adHom{{"Ad homomorphism", 0, 1e-10}};
    Tracker adConj{{"Ad vs conjugation", 0, 1e-9}};
    Tracker phiAxioms{{"phi action axioms", 0, 1e-10}}, psiAxioms{{"psi action axioms", 0, 1e-10}};
    Tracker diffeo{{"diffeomorphism action compatibility", 0, 1e-10}};
    Tracker equiv{{"system equivariance", 0, 1e-9}};
    Tracker liftCond{{"lift condition", 0, 1e-9}}, liftEquiv{{"lift equivariance", 0, 1e-9}};
    Tracker jacA{{"state matrix A vs central differences", 0, 1e-5}};
    Tracker jacC{{"output matrix C vs central differences", 0, 1e-5}};

    for (int i = 0; i < samples; ++i) {
        const Sim3d X = rnd.group(), Y = rnd.group(), Z = rnd.group();
        assoc.add(distance((X * Y) * Z, X * (Y * Z)));
        inverse.add(std::max(distance(X * X.inverse(), Sim3d::Identity()), distance(X.inverse() * X, Sim3d::Identity())));

        const Sim3d::Tangent v = rnd.tangent(1.0);
        expLog.add((Sim3d::exp(v).log() - v).norm());
        adHom.add((( X * Y).Adjoint() - X.Adjoint() * Y.Adjoint()).norm());
        adConj.add(distance(innerAutomorphism(X, Sim3d::exp(v)), Sim3d::exp(X.Adjoint() * v)));

        // Lift-condition and linearisation residuals are relative to the state scale.
        const KinematicState xi = rnd.state();
        const KinematicInput u = rnd.input();
        const double scale = std::max(1.0, xi.vector().norm());
        phiAxioms.add(std::max(distance(sys.act(Sim3d::Identity(), xi), xi),
                               distance(sys.act(Y, sys.act(X, xi)), sys.act(X * Y, xi))) / scale);
        psiAxioms.add(std::max(distance(sys.actInput(Sim3d::Identity(), u), u),
                               distance(sys.actInput(Y, sys.actInput(X, u)), sys.actInput(X * Y, u))));

        auto phi = [&](const Sim3d& g, const KinematicState& s) { return sys.act(g, s); };
        std::function<KinematicState(const KinematicState&)> F = [&, u](const KinematicState& s) {
            return sys.transition(s, u);
        };
        const auto lhs = conjugateDiffeo<Sim3d, KinematicState>(Y, conjugateDiffeo<Sim3d, KinematicState>(X, F, phi), phi);
        const auto rhs = conjugateDiffeo<Sim3d, KinematicState>(X * Y, F, phi);
        diffeo.add(distance(lhs(xi), rhs(xi)) / scale);

        equiv.add(distance(sys.act(X, sys.transition(xi, u)), sys.transition(sys.act(X, xi), sys.actInput(X, u))) /
                  std::max(1.0, sys.act(X, xi).vector().norm()));

        try {
            const Sim3d L = sys.lift(xi, u);
            liftCond.add(distance(sys.act(L, xi), sys.transition(xi, u)) / scale);
            liftEquiv.add(distance(sys.lift(sys.act(X, xi), sys.actInput(X, u)), X.inverse() * L * X));
        } catch (const std::domain_error&) {
            // Lift undefined (antiparallel positions); not a residual.
        }

        const KinematicInput u0 = rnd.input();
        jacA.add(relativeError(analyticStateMatrix(sys, u0), numericalStateMatrix(sys, u0)));
        const Sim3d Xhat = rnd.group(1.0);
        jacC.add(relativeError(analyticOutputMatrix(sys, Xhat), numericalOutputMatrix(sys, Xhat)));
    }

    // Lifted trajectory against the direct one over 100 steps.
    Tracker lemma{{"lifted trajectory projection (100 steps)", 0, 1e-8}};
    for (int trial = 0; trial < std::max(1, samples / 100); ++trial) {
        KinematicState direct = rnd.state();
        const SecondOrderSystem local(direct, step);
        Sim3d lifted = Sim3d::Identity();
        for (int k = 0; k < 100; ++k) {
            const KinematicInput u = rnd.input();
            lifted = lifted * local.lift(local.act(lifted, local.origin()), u);
            direct = local.transition(direct, u);
            lemma.add(distance(local.act(lifted, local.origin()), direct) / std::max(1.0, direct.vector().norm()));
        }
    }

    // Error dynamics along a noisy filter run.
    Tracker errDyn{{"error dynamics (1000 steps)", 0, 1e-7}};
    {
        KinematicState truth = origin;
        truth.v = Vector3(0.3, -0.2, 0.1);
        ConcentratedGaussian<SecondOrderSystem> belief;
        belief.reference = Sim3d::exp(rnd.tangent(0.05));
        belief.covariance = Vector6(25, 25, 25, 4, 4, 4).asDiagonal();
        Eigen::Matrix<double, 6, 6> P = Eigen::Matrix<double, 6, 6>::Identity() * 1e-4;
        Eigen::Matrix4d Q = Eigen::Matrix4d::Identity() * 1e-4;
        Q(3, 3) = 1.0;
        FilterOptions opts;
        opts.chartRadius = 100.0;
        for (int k = 0; k < 1000; ++k) {
            const KinematicInput u{Vector3::Zero(), Vector3(0.0, std::cos(k * step), 0.0)};
            const KinematicState e = equivariantError(sys, belief.reference, truth);
            const KinematicInput u0 = originInput(sys, belief.reference, u);
            truth = sys.transition(truth, u);
            kinematics::BearingRange y = kinematics::measure(truth);
            y.range += 0.5 * rnd.gauss();
            y.bearing = (y.bearing + rnd.vector(0.01)).normalized();

            const auto predicted = predict(sys, belief, u, P, opts);
            const auto fused = update(sys, predicted, y.vector(), Q, opts);
            const auto Delta = resetCorrection(sys, fused.mean);
            belief = reset(sys, fused, opts);

            const KinematicState viaDynamics = errorDynamicsStep(sys, e, u0, Delta);
            const KinematicState direct = equivariantError(sys, belief.reference, truth);
            errDyn.add(distance(viaDynamics, direct) / std::max(1.0, direct.vector().norm()));
        }
    }

    return {assoc.check, inverse.check, expLog.check, adHom.check, adConj.check, phiAxioms.check, psiAxioms.check,
            diffeo.check, equiv.check, liftCond.check, liftEquiv.check, lemma.check, errDyn.check, jacA.check,
            jacC.check};
}

}  // namespace eqf::sim
