#include <gtest/gtest.h>

#include "eqf/core/errors.hpp"
#include "eqf/kinematics/second_order.hpp"
#include "oracles.hpp"

using namespace eqf::kinematics;
using eqf::Sim3d;
using oracle::Vector7;

namespace {

constexpr double kStep = 0.01;

TEST(Transition, Examples) {
    const KinematicState rest{{0, 0, 50}, {0, 0, 0}};
    for (double t : {1e-3, 0.01, 1.0, 10.0}) {
        const KinematicState out = transition(rest, {}, t);
        EXPECT_EQ(out.p, rest.p);
        EXPECT_EQ(out.v, rest.v);
    }
    const KinematicState out = transition({{0, 0, 50}, {1, 0, 0}}, {Vector3::Zero(), {0, 2, 0}}, 0.01);
    EXPECT_LT((out.p - Vector3(0.01, 1e-4, 50)).norm(), 1e-14);
    EXPECT_LT((out.v - Vector3(1, 0.02, 0)).norm(), 1e-15);
    EXPECT_THROW(transition(rest, {}, 0.0), std::invalid_argument);
}

TEST(Transition, ConstantVelocityFlow) {
    oracle::Random rnd(20);
    for (int i = 0; i < 1000; ++i) {
        const KinematicState xi = rnd.state();
        const KinematicInput u{rnd.vector(), Vector3::Zero()};
        const double t = rnd.uniform(1e-3, 1.0);
        const KinematicState whole = transition(xi, u, t);
        const KinematicState halves = transition(transition(xi, u, t / 2), u, t / 2);
        EXPECT_LT(oracle::stateDistance(whole, halves), 1e-12 * (1 + xi.p.norm()));
    }
}

TEST(Transition, ContinuousLimit) {
    const KinematicState xi{{1, -2, 3}, {0.5, 0.25, -1}};
    const KinematicInput u{Vector3::Zero(), {0.3, -0.7, 2}};
    const double t = 1e-6;
    const KinematicState next = transition(xi, u, t);
    const Vector3 pdot = (next.p - xi.p) / t, vdot = (next.v - xi.v) / t;
    EXPECT_LT((pdot - xi.v).norm() / xi.v.norm(), 1e-4);
    EXPECT_LT((vdot - u.a).norm() / u.a.norm(), 1e-4);
}

TEST(Actions, Examples) {
    const KinematicState xi = act(Sim3d(Matrix3::Identity(), 2.0, Vector3::Zero()), {{0, 0, 50}, {0, 0, 0}});
    EXPECT_EQ(xi.p, Vector3(0, 0, 25));
    EXPECT_EQ(xi.v, Vector3::Zero());

    const KinematicInput u = actInput(Sim3d(Matrix3::Identity(), 2.0, Vector3(0, 0, 1)), {Vector3::Zero(), {0, 2, 0}});
    EXPECT_EQ(u.omega, Vector3(0, 0, 0.5));
    EXPECT_EQ(u.a, Vector3(0, 1, 0));
}

TEST(Actions, AxiomsAndEquivariance) {
    oracle::Random rnd(21);
    for (int i = 0; i < 1000; ++i) {
        const Sim3d X = rnd.group(), Y = rnd.group();
        const KinematicState xi = rnd.state();
        const KinematicInput u = rnd.input();
        const double scale = 1.0 + xi.p.norm() + xi.v.norm();

        EXPECT_LT(oracle::stateDistance(act(X, xi), oracle::phi(X, xi)), 1e-12 * scale);
        EXPECT_LT(oracle::stateDistance(act(Sim3d::Identity(), xi), xi), 1e-15 * scale);
        EXPECT_LT(oracle::stateDistance(act(Y, act(X, xi)), act(X * Y, xi)), 1e-10 * scale);

        const KinematicInput a = actInput(Y, actInput(X, u)), b = actInput(X * Y, u);
        EXPECT_LT((a.omega - b.omega).norm() + (a.a - b.a).norm(), 1e-10 * (1 + u.omega.norm() + u.a.norm()) *
                                                                          oracle::toMatrix(X * Y).norm());

        const KinematicState lhs = act(X, transition(xi, u, kStep));
        const KinematicState rhs = transition(act(X, xi), actInput(X, u), kStep);
        EXPECT_LT(oracle::stateDistance(lhs, rhs), 1e-9 * (1 + lhs.p.norm() + lhs.v.norm()));
    }
}

TEST(Actions, Transitive) {
    oracle::Random rnd(22);
    for (int i = 0; i < 1000; ++i) {
        const KinematicState a = rnd.state(), b = rnd.state();
        // phi_X(a) = b: rotate bearings together, match ranges, then velocities.
        const Matrix3 R = eqf::so3::align(b.p.normalized(), a.p.normalized());
        const double r = a.p.norm() / b.p.norm();
        const Vector3 beta = a.v - r * R * b.v;
        EXPECT_LT(oracle::stateDistance(act(Sim3d(R, r, beta), a), b), 1e-9 * (1 + b.p.norm() + b.v.norm()));
    }
}

TEST(Lift, LiftConditionAndEquivariance) {
    oracle::Random rnd(23);
    for (int i = 0; i < 10000; ++i) {
        const KinematicState xi = rnd.state();
        const KinematicInput u = rnd.input();
        const Sim3d X = rnd.group();
        const Sim3d L = lift(xi, u, kStep);
        const KinematicState expected = oracle::step(xi, u, kStep);
        EXPECT_LT(oracle::stateDistance(oracle::phi(L, xi), expected), 1e-9 * (1 + expected.p.norm() + expected.v.norm()));
        const Sim3d lhs = lift(act(X, xi), actInput(X, u), kStep);
        const Sim3d rhs = X.inverse() * L * X;
        EXPECT_LT(oracle::groupDistance(lhs, rhs), 1e-9 * oracle::toMatrix(rhs).norm());
    }
}

TEST(Lift, AtRestIsIdentity) {
    const Sim3d L = lift({{0, 0, 50}, Vector3::Zero()}, {}, kStep);
    EXPECT_LT(oracle::groupDistance(L, Sim3d::Identity()), 1e-15);
}

TEST(Lift, Errors) {
    EXPECT_THROW(lift({Vector3::Zero(), Vector3::UnitX()}, {}, kStep), std::domain_error);
    // p' = p + t v = 0.
    EXPECT_THROW(lift({{1, 0, 0}, {-100, 0, 0}}, {}, kStep), std::domain_error);
    // p' = -p.
    EXPECT_THROW(lift({{1, 0, 0}, {-200, 0, 0}}, {}, kStep), std::domain_error);
}

TEST(Lift, DifferentialMatchesFiniteDifferences) {
    oracle::Random rnd(24);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const KinematicState xi = rnd.state();
        const KinematicInput u = rnd.input();
        const Sim3d L0 = lift(xi, u, kStep);
        Eigen::Matrix<double, 7, 6> fd;
        for (int j = 0; j < 6; ++j) {
            Vector6 d = Vector6::Zero();
            d(j) = h;
            const Sim3d Lp = lift(KinematicState::fromVector(xi.vector() + d), u, kStep);
            const Sim3d Lm = lift(KinematicState::fromVector(xi.vector() - d), u, kStep);
            // Right-trivialised: log(L(xi + d) L(xi)^-1).
            fd.col(j) = (oracle::vee(oracle::logm(oracle::toMatrix(Lp * L0.inverse()))) -
                         oracle::vee(oracle::logm(oracle::toMatrix(Lm * L0.inverse())))) /
                        (2 * h);
        }
        const auto analytic = liftDifferential(xi, u, kStep);
        EXPECT_LT((analytic - fd).norm() / std::max(1e-3, fd.norm()), 1e-6) << i;
    }
}

TEST(Outputs, BearingAndRange) {
    const KinematicState xi{{0, 0, 50}, Vector3::Zero()};
    EXPECT_EQ(bearing(xi), Vector3(0, 0, 1));
    EXPECT_DOUBLE_EQ(range(xi), 50.0);
    EXPECT_THROW(bearing({Vector3::Zero(), Vector3::Zero()}), std::domain_error);

    oracle::Random rnd(25);
    for (int i = 0; i < 1000; ++i) {
        const KinematicState s = rnd.state();
        const Sim3d X = rnd.group();
        EXPECT_NEAR(bearing(s).norm(), 1.0, 1e-15);
        EXPECT_LT((bearing(act(X, s)) - X.R().transpose() * bearing(s)).norm(), 1e-12);
        EXPECT_NEAR(range(act(X, s)), range(s) / X.r(), 1e-12 * range(s) / X.r());
    }
}

TEST(Outputs, JacobianMatchesFiniteDifferences) {
    oracle::Random rnd(26);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const KinematicState s = rnd.state();
        Eigen::Matrix<double, 4, 6> fd;
        for (int j = 0; j < 6; ++j) {
            Vector6 d = Vector6::Zero();
            d(j) = h;
            fd.col(j) = (measure(KinematicState::fromVector(s.vector() + d)).vector() -
                         measure(KinematicState::fromVector(s.vector() - d)).vector()) /
                        (2 * h);
        }
        EXPECT_LT((measurementJacobian(s) - fd).norm() / fd.norm(), 1e-7);
    }
}

class ChartTest : public ::testing::Test {
  protected:
    KinematicState origin{{3, -4, 50}, {0.5, 1, -0.2}};
    SecondOrderSystem sys{origin, kStep};
};

TEST_F(ChartTest, OriginAndRoundtrip) {
    EXPECT_LT(oracle::stateDistance(sys.chart(Vector6::Zero()), origin), 1e-14);
    EXPECT_LT(sys.chartInverse(origin).norm(), 1e-12);
    oracle::Random rnd(27);
    for (int i = 0; i < 1000; ++i) {
        Vector6 eps;
        for (int j = 0; j < 6; ++j) eps(j) = rnd.gauss();
        eps = eps.normalized() * rnd.uniform(0.0, 0.5);
        EXPECT_LT((sys.chartInverse(sys.chart(eps)) - eps).norm(), 1e-9);
        EXPECT_LT((sys.chartInverseNewton(sys.chart(eps)) - eps).norm(), 1e-9);
    }
}

TEST_F(ChartTest, LargeCoordinates) {
    oracle::Random rnd(28);
    for (int i = 0; i < 200; ++i) {
        Vector6 eps;
        for (int j = 0; j < 6; ++j) eps(j) = rnd.gauss() * 10.0;
        const KinematicState xi = sys.chart(eps);
        EXPECT_LT((sys.chartInverse(xi) - sys.chartInverseNewton(xi)).norm(), 1e-8 * (1 + eps.norm()));
    }
}

TEST_F(ChartTest, DifferentialIsIdentityAtOrigin) {
    const double h = 1e-6;
    Matrix6 fd;
    for (int j = 0; j < 6; ++j) {
        Vector6 d = Vector6::Zero();
        d(j) = h;
        fd.col(j) = (sys.chart(d).vector() - sys.chart(-d).vector()) / (2 * h);
    }
    EXPECT_LT((fd - sys.chartDifferential()).norm(), 1e-8);
}

TEST_F(ChartTest, OppositeBearingIsOutsideDomain) {
    const KinematicState opposite{-origin.p, origin.v};
    EXPECT_THROW(sys.chartInverse(opposite), eqf::ChartDomainError);
}

TEST_F(ChartTest, OriginDifferentialMatchesFiniteDifferences) {
    const double h = 1e-6;
    Eigen::Matrix<double, 6, 7> fd;
    for (int j = 0; j < 7; ++j) {
        const Vector7 d = Vector7::Unit(j) * h;
        fd.col(j) = (act(Sim3d::exp(d), origin).vector() - act(Sim3d::exp(-d), origin).vector()) / (2 * h);
    }
    EXPECT_LT((sys.originDifferential() - fd).norm() / fd.norm(), 1e-9);
}

TEST_F(ChartTest, StabilizerAndRank) {
    EXPECT_LT((sys.originDifferential() * sys.stabilizerGenerator()).norm(), 1e-12);
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 7>> svd(sys.originDifferential());
    EXPECT_GT(svd.singularValues()(5), 1e-6);
    // The generator really fixes the origin along its one-parameter subgroup.
    for (double t : {0.1, 1.0, 3.0}) {
        EXPECT_LT(oracle::stateDistance(act(Sim3d::exp(t * sys.stabilizerGenerator()), origin), origin), 1e-12);
    }
}

TEST_F(ChartTest, PseudoInverse) {
    EXPECT_EQ(sys.originDifferentialPinv(Vector6::Zero()), Vector7::Zero());
    EXPECT_LT((sys.originDifferential() * sys.originDifferentialPinv() - Matrix6::Identity()).norm(), 1e-10);
    oracle::Random rnd(29);
    const Vector3 axis = origin.p.normalized();
    for (int i = 0; i < 1000; ++i) {
        Vector6 w;
        for (int j = 0; j < 6; ++j) w(j) = rnd.gauss();
        const Vector7 eta = sys.originDifferentialPinv(w);
        EXPECT_LT((sys.originDifferential() * eta - w).norm(), 1e-10 * (1 + w.norm()));
        EXPECT_LT(std::abs(eta.head<3>().dot(axis)), 1e-12 * (1 + eta.norm()));
    }
}

TEST_F(ChartTest, ActionDifferential) {
    oracle::Random rnd(30);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const Sim3d X = rnd.group();
        Matrix6 fd;
        for (int j = 0; j < 6; ++j) {
            Vector6 d = Vector6::Zero();
            d(j) = h;
            fd.col(j) = (act(X, KinematicState::fromVector(origin.vector() + d)).vector() -
                         act(X, KinematicState::fromVector(origin.vector() - d)).vector()) /
                        (2 * h);
        }
        EXPECT_LT((sys.actionDifferential(X) - fd).norm() / fd.norm(), 1e-8);
    }
}

TEST(LiftedSystem, ProjectsOntoDirectTrajectory) {
    oracle::Random rnd(31);
    for (int trial = 0; trial < 20; ++trial) {
        KinematicState direct = rnd.state();
        const SecondOrderSystem sys(direct, kStep);
        Sim3d X = Sim3d::Identity();
        for (int k = 0; k < 100; ++k) {
            const KinematicInput u = rnd.input();
            X = X * sys.lift(sys.act(X, sys.origin()), u);
            direct = oracle::step(direct, u, kStep);
            EXPECT_LT(oracle::stateDistance(sys.act(X, sys.origin()), direct), 1e-8 * (1 + direct.p.norm()));
        }
    }
}

}  // namespace
