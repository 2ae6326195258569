#include <cmath>

#include <gtest/gtest.h>

#include "isingfin/errors.hpp"
#include "isingfin/exact.hpp"
#include "isingfin/tap.hpp"
#include "oracles.hpp"

using namespace isingfin;

TEST(TapFixedPoint, IndependentSpinsConvergeImmediately) {
    Vector h(4);
    h << 0.3, -1.2, 0.0, 2.0;
    TapOptions opt;
    opt.damping = 1.0;
    const auto sol = tap_fixed_point(IsingModel::independent(h), opt);
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(sol.iterations, 1u);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(sol.m(i), std::tanh(h(i)), 1e-15);
}

TEST(TapFixedPoint, SymmetricPairStaysParamagnetic) {
    Matrix j(2, 2);
    j << 0, 0.2, 0.2, 0;
    const auto sol = tap_fixed_point(IsingModel(j, Vector::Zero(2)));
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(sol.m(0), 0.0);
    EXPECT_EQ(sol.m(1), 0.0);
}

TEST(TapFixedPoint, MatchesEnumerationForWeakCouplings) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = oracle::planted_model(8, 0.0, 1.0 / 8.0, -0.5, 0.5, 300 + seed);
        const auto sol = tap_fixed_point(model);
        ASSERT_TRUE(sol.converged);
        const Vector exact = exact_moments(model).q;
        EXPECT_LE((sol.m - exact).cwiseAbs().maxCoeff(), 0.02) << "seed " << seed;
    }
}

TEST(TapFixedPoint, SolutionSatisfiesEquations) {
    const auto model = oracle::planted_model(6, 0.05, 0.2, -0.4, 0.4, 12);
    const auto sol = tap_fixed_point(model);
    ASSERT_TRUE(sol.converged);
    const Matrix& j = model.couplings();
    for (Eigen::Index i = 0; i < 6; ++i) {
        double field = model.fields()(i), onsager = 0.0;
        for (Eigen::Index k = 0; k < 6; ++k) {
            field += j(i, k) * sol.m(k);
            onsager += j(i, k) * j(i, k) * (1 - sol.m(k) * sol.m(k));
        }
        EXPECT_NEAR(sol.m(i), std::tanh(field - sol.m(i) * onsager), 1e-9);
        EXPECT_NEAR(sol.variances(i), 1 - sol.m(i) * sol.m(i), 1e-15);
        EXPECT_NEAR(sol.third_cumulants(i), 2 * (std::pow(sol.m(i), 3) - sol.m(i)), 1e-15);
    }
    EXPECT_NEAR(sol.x_stability, stability_x(sol.m), 1e-15);
}

TEST(TapFixedPointProperty, OddUnderGlobalFieldFlip) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = oracle::planted_model(7, 0.0, 0.15, -0.6, 0.6, 40 + seed);
        const auto a = tap_fixed_point(model);
        const auto b = tap_fixed_point(IsingModel(model.couplings(), -model.fields()));
        EXPECT_LE((a.m + b.m).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(TapFixedPoint, RejectsDampingOutsideUnitInterval) {
    const auto model = IsingModel::zeros(2);
    for (double d : {0.0, -0.1, 1.5, 2.0}) {
        TapOptions opt;
        opt.damping = d;
        EXPECT_THROW(tap_fixed_point(model, opt), DomainError) << d;
    }
}

TEST(TapFixedPoint, NonConvergenceReportsBestIterate) {
    // Strong antiferromagnetic pair with full steps oscillates.
    Matrix j(2, 2);
    j << 0, -3.0, -3.0, 0;
    Vector h(2);
    h << 0.5, 0.5;
    TapOptions opt;
    opt.damping = 1.0;
    opt.max_iter = 25;
    const auto sol = tap_fixed_point(IsingModel(j, h), opt);
    EXPECT_FALSE(sol.converged);
    EXPECT_TRUE(sol.m.allFinite());
    EXPECT_GT(sol.last_update, opt.tol);
}

TEST(StabilityX, Examples) {
    EXPECT_DOUBLE_EQ(stability_x(Vector::Constant(5, 0.5)), 0.4375);
    EXPECT_EQ(stability_x(Vector::Zero(4)), 0.0);
    Vector sat(4);
    sat << 1, -1, -1, 1;
    EXPECT_EQ(stability_x(sat), 1.0);
}
