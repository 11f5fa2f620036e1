#include <gtest/gtest.h>

#include <functional>

#include "eqf/lie/action.hpp"
#include "eqf/lie/sim3.hpp"
#include "eqf/lie/so3.hpp"
#include "oracles.hpp"

using eqf::Sim3d;
using oracle::Vector7;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

constexpr int kSamples = 1000;

TEST(So3, ExpLogRoundtrip) {
    oracle::Random rnd(11);
    for (int i = 0; i < kSamples; ++i) {
        const Vector3d w = rnd.vector().normalized() * rnd.uniform(0.0, 3.0);
        const Matrix3d R = eqf::so3::exp(w);
        EXPECT_LT((R.transpose() * R - Matrix3d::Identity()).norm(), 1e-12);
        EXPECT_LT((R - oracle::hat(w).exp()).norm(), 1e-12);
        EXPECT_LT((eqf::so3::log(R) - w).norm(), 1e-9);
    }
}

TEST(So3, SmallAngles) {
    for (double theta : {0.0, 1e-12, 1e-8, 1e-5, 9e-5, 1.1e-4}) {
        const Vector3d w = Vector3d(1, -2, 0.5).normalized() * theta;
        EXPECT_LT((eqf::so3::exp(w) - oracle::hat(w).exp()).norm(), 1e-15);
        EXPECT_LT((eqf::so3::log(eqf::so3::exp(w)) - w).norm(), 1e-15);
    }
}

TEST(So3, LogNearPi) {
    const Vector3d axis = Vector3d(0.3, -0.4, 0.8).normalized();
    for (double theta : {M_PI - 1e-3, M_PI - 1e-6, M_PI - 1e-8}) {
        const Vector3d w = theta * axis;
        EXPECT_LT((eqf::so3::log(eqf::so3::exp(w)) - w).norm(), 1e-6) << theta;
    }
    EXPECT_THROW(eqf::so3::log(eqf::so3::exp(Vector3d(M_PI * axis))), std::domain_error);
}

TEST(So3, AlignMapsFromOntoTo) {
    oracle::Random rnd(12);
    for (int i = 0; i < kSamples; ++i) {
        const Vector3d a = rnd.vector().normalized(), b = rnd.vector().normalized();
        const Matrix3d R = eqf::so3::align(a, b);
        EXPECT_LT((R * a - b).norm(), 1e-12);
        EXPECT_LT((R.transpose() * R - Matrix3d::Identity()).norm(), 1e-12);
        EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
        // Minimal rotation: the axis is a x b.
        EXPECT_LT((R * a.cross(b) - a.cross(b)).norm(), 1e-12);
    }
}

TEST(So3, AlignDegenerate) {
    const Vector3d z = Vector3d::UnitZ();
    EXPECT_EQ(eqf::so3::align(z, z), Matrix3d::Identity());
    EXPECT_THROW(eqf::so3::align(z, Vector3d(-z)), std::domain_error);
    // Nearly parallel inputs still rotate exactly.
    const Vector3d tilted = (z + Vector3d(1e-13, 0, 0)).normalized();
    EXPECT_LT((eqf::so3::align(z, tilted) * z - tilted).norm(), 1e-16);
}

TEST(Sim3, ComposeExample) {
    const Sim3d X(Matrix3d::Identity(), 2.0, Vector3d(1, 0, 0));
    const Sim3d Y(Matrix3d::Identity(), 3.0, Vector3d(0, 1, 0));
    const Sim3d Z = X * Y;
    EXPECT_EQ(Z.R(), Matrix3d::Identity());
    EXPECT_DOUBLE_EQ(Z.r(), 6.0);
    EXPECT_EQ(Z.beta(), Vector3d(1, 2, 0));
}

TEST(Sim3, InverseExample) {
    const Sim3d X(Matrix3d::Identity(), 2.0, Vector3d(2, 0, 0));
    const Sim3d Xi = X.inverse();
    EXPECT_EQ(Xi.R(), Matrix3d::Identity());
    EXPECT_DOUBLE_EQ(Xi.r(), 0.5);
    EXPECT_EQ(Xi.beta(), Vector3d(-1, 0, 0));
    EXPECT_EQ(oracle::toMatrix(Sim3d::Identity().inverse()), oracle::Matrix4::Identity());
}

TEST(Sim3, RejectsNonPositiveScale) {
    EXPECT_THROW(Sim3d(Matrix3d::Identity(), 0.0, Vector3d::Zero()), std::invalid_argument);
    EXPECT_THROW(Sim3d(Matrix3d::Identity(), -1.0, Vector3d::Zero()), std::invalid_argument);
}

TEST(Sim3, GroupAxiomsAgainstMatrixRepresentation) {
    oracle::Random rnd(1);
    for (int i = 0; i < kSamples; ++i) {
        const Sim3d X = rnd.group(), Y = rnd.group(), Z = rnd.group();
        const auto MX = oracle::toMatrix(X), MY = oracle::toMatrix(Y), MZ = oracle::toMatrix(Z);
        // Relative to the matrix scale, which reaches e^2 per factor.
        const double scale = MX.norm() * MY.norm() * MZ.norm();
        EXPECT_LT((oracle::toMatrix(X * Y) - MX * MY).norm() / (MX.norm() * MY.norm()), 1e-14);
        EXPECT_LT((oracle::toMatrix((X * Y) * Z) - oracle::toMatrix(X * (Y * Z))).norm() / scale, 1e-12);
        EXPECT_LT((oracle::toMatrix(X * X.inverse()) - oracle::Matrix4::Identity()).norm(), 1e-12);
        EXPECT_LT((oracle::toMatrix(X.inverse()) - MX.inverse()).norm() / MX.inverse().norm(), 1e-12);
        EXPECT_LT(oracle::groupDistance(Sim3d::Identity() * X, X), 1e-15);
        EXPECT_LT(oracle::groupDistance(X * Sim3d::Identity(), X), 1e-15);
    }
}

TEST(Sim3, ExpMatchesMatrixExponential) {
    oracle::Random rnd(2);
    for (int i = 0; i < kSamples; ++i) {
        const Vector7 v = rnd.tangent(2.0);
        EXPECT_LT((oracle::toMatrix(Sim3d::exp(v)) - oracle::expm(oracle::wedge(v))).norm(), 1e-9);
    }
}

TEST(Sim3, LogMatchesMatrixLogarithm) {
    oracle::Random rnd(3);
    for (int i = 0; i < 200; ++i) {
        const Sim3d X = rnd.group(1.0);
        EXPECT_LT((X.log() - oracle::vee(oracle::logm(oracle::toMatrix(X)))).norm(), 1e-9);
    }
}

TEST(Sim3, ExpLogRoundtrip) {
    oracle::Random rnd(4);
    for (int i = 0; i < kSamples; ++i) {
        const Vector7 v = rnd.tangent(1.0);
        EXPECT_LT((Sim3d::exp(v).log() - v).norm(), 1e-9);
        const Sim3d X = rnd.group();
        EXPECT_LT(oracle::groupDistance(Sim3d::exp(X.log()), X), 1e-9);
    }
}

TEST(Sim3, ExpSpecialCases) {
    EXPECT_EQ(oracle::toMatrix(Sim3d::exp(Vector7::Zero())), oracle::Matrix4::Identity());
    Vector7 v = Vector7::Zero();
    v(3) = 0.7;
    const Sim3d X = Sim3d::exp(v);
    EXPECT_EQ(X.R(), Matrix3d::Identity());
    EXPECT_DOUBLE_EQ(X.r(), std::exp(0.7));
    EXPECT_EQ(X.beta(), Vector3d::Zero());
    // Translation with scale only: beta = (e^s - 1) / s b.
    v.tail<3>() << 1, 2, 3;
    EXPECT_LT((Sim3d::exp(v).beta() - std::expm1(0.7) / 0.7 * Vector3d(1, 2, 3)).norm(), 1e-14);
}

TEST(Sim3, ExpAcrossSeriesThresholds) {
    // Rotation angle and scale near the switch points of the closed form.
    for (double theta : {0.0, 1e-6, 9.99e-3, 1.001e-2, 0.5}) {
        for (double s : {-3.0, -2.0001, -1.9999, 0.0, 1e-9, 1.9999, 2.0001, 3.0}) {
            Vector7 v;
            v << theta * Vector3d(1, 2, -1).normalized(), s, 0.3, -0.2, 1.0;
            const auto M = oracle::expm(oracle::wedge(v));
            EXPECT_LT((oracle::toMatrix(Sim3d::exp(v)) - M).norm() / M.norm(), 1e-13) << theta << " " << s;
        }
    }
}

TEST(Sim3, OneParameterSubgroup) {
    oracle::Random rnd(5);
    for (int i = 0; i < kSamples; ++i) {
        const Vector7 v = rnd.tangent(1.0);
        const double s = rnd.uniform(-1, 1), t = rnd.uniform(-1, 1);
        EXPECT_LT(oracle::groupDistance(Sim3d::exp((s + t) * v), Sim3d::exp(s * v) * Sim3d::exp(t * v)), 1e-12);
    }
}

TEST(Sim3, AdjointIsConjugation) {
    oracle::Random rnd(6);
    EXPECT_EQ(Sim3d::Identity().Adjoint(), oracle::Matrix7::Identity());
    for (int i = 0; i < kSamples; ++i) {
        const Sim3d X = rnd.group();
        const oracle::Matrix7 Ad = oracle::adjoint(X);
        EXPECT_LT((X.Adjoint() - Ad).norm() / Ad.norm(), 1e-12);
    }
}

TEST(Sim3, AdjointHomomorphism) {
    oracle::Random rnd(7);
    for (int i = 0; i < kSamples; ++i) {
        const Sim3d X = rnd.group(), Y = rnd.group();
        const auto lhs = (X * Y).Adjoint();
        EXPECT_LT((lhs - X.Adjoint() * Y.Adjoint()).norm() / lhs.norm(), 1e-10);
    }
}

TEST(Sim3, AdjointOfExpIsExpOfLittleAdjoint) {
    oracle::Random rnd(8);
    for (int i = 0; i < 200; ++i) {
        const Vector7 v = rnd.tangent(1.5);
        const oracle::Matrix7 ad = oracle::littleAdjoint(v);
        EXPECT_LT((Sim3d::ad(v) - ad).norm(), 1e-14);
        EXPECT_LT((Sim3d::exp(v).Adjoint() - oracle::Matrix7(ad.exp())).norm(), 1e-9);
    }
}

TEST(Sim3, InnerAutomorphism) {
    oracle::Random rnd(9);
    const Sim3d Z = rnd.group();
    EXPECT_LT(oracle::groupDistance(eqf::innerAutomorphism(Sim3d::Identity(), Z), Z), 1e-15);
    EXPECT_LT(oracle::groupDistance(eqf::innerAutomorphism(Z, Sim3d::Identity()), Sim3d::Identity()), 1e-14);
    for (int i = 0; i < kSamples; ++i) {
        const Sim3d X = rnd.group();
        const Vector7 v = rnd.tangent(1.0);
        EXPECT_LT(oracle::groupDistance(eqf::innerAutomorphism(X, Sim3d::exp(v)), Sim3d::exp(X.Adjoint() * v)), 1e-9);
    }
}

TEST(Sim3, RotationStaysOrthonormalOverLongProducts) {
    oracle::Random rnd(10);
    const Sim3d step = Sim3d::exp(rnd.tangent(0.1));
    const Sim3d back = Sim3d::exp(rnd.tangent(0.1));
    Sim3d X = Sim3d::Identity();
    for (int i = 0; i < 1000000; ++i) X = (i % 2 == 0) ? X * step : X * back;
    EXPECT_LT((X.R().transpose() * X.R() - Matrix3d::Identity()).norm(), 1e-8);
    EXPECT_NEAR(X.R().determinant(), 1.0, 1e-8);
}

TEST(Sim3, CastPreservesElement) {
    oracle::Random rnd(13);
    const Sim3d X = rnd.group();
    const auto Xf = X.cast<float>();
    EXPECT_NEAR(Xf.r(), X.r(), 1e-5 * X.r());
    const auto back = Xf.cast<double>();
    EXPECT_LT(oracle::groupDistance(back, X), 1e-5 * oracle::toMatrix(X).norm());
}

using State = oracle::KinematicState;
using Map = std::function<State(const State&)>;

TEST(ConjugateDiffeo, IdentityAndCompatibility) {
    oracle::Random rnd(14);
    const oracle::KinematicInput u = rnd.input();
    const Map F = [&](const State& s) { return oracle::step(s, u, 0.05); };
    const Map id = [](const State& s) { return s; };
    auto phi = [](const Sim3d& X, const State& s) { return oracle::phi(X, s); };

    for (int i = 0; i < kSamples; ++i) {
        const Sim3d X = rnd.group(), Y = rnd.group();
        const State xi = rnd.state();
        const double scale = std::max(1.0, xi.p.norm() + xi.v.norm());

        EXPECT_LT(oracle::stateDistance(eqf::conjugateDiffeo(Sim3d::Identity(), F, phi)(xi), F(xi)), 1e-12 * scale);
        EXPECT_LT(oracle::stateDistance(eqf::conjugateDiffeo(X, id, phi)(xi), xi), 1e-10 * scale);

        const Map lhs = eqf::conjugateDiffeo(Y, eqf::conjugateDiffeo(X, F, phi), phi);
        const Map rhs = eqf::conjugateDiffeo(X * Y, F, phi);
        EXPECT_LT(oracle::stateDistance(lhs(xi), rhs(xi)), 1e-10 * scale);
    }
}

}  // namespace
