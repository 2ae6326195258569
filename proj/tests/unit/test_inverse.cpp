#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "isingfin/errors.hpp"
#include "isingfin/exact.hpp"
#include "isingfin/inverse.hpp"
#include "isingfin/moments.hpp"
#include "isingfin/sampler.hpp"
#include "oracles.hpp"

using namespace isingfin;

namespace {

std::vector<double> upper(const Matrix& j) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < j.rows(); ++i)
        for (Eigen::Index k = i + 1; k < j.cols(); ++k) out.push_back(j(i, k));
    return out;
}

double rms_j_error(const Matrix& truth, const Matrix& est) {
    const auto a = upper(truth), b = upper(est);
    return oracle::rms_difference(a, b);
}

// Uniform couplings with |J| N <= 0.5.
IsingModel weak_model(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5 / static_cast<double>(n), 0.5 / static_cast<double>(n));
    Matrix j = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < j.rows(); ++i)
        for (Eigen::Index k = i + 1; k < j.cols(); ++k) j(i, k) = j(k, i) = u(rng);
    return IsingModel(j, oracle::uniform_fields(n, -0.4, 0.4, rng));
}

void expect_symmetric_zero_diagonal(const Matrix& j) {
    EXPECT_EQ(j, j.transpose());
    EXPECT_EQ(j.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

MomentSet independent_moments(const Vector& q) {
    Matrix Q = q * q.transpose();
    Q.diagonal().setOnes();
    return MomentSet::from_pair_moments(q, Q, {});
}

}  // namespace

TEST(NmfInvert, DiagonalCorrelationGivesIndependentModel) {
    Vector q(3);
    q << 0.2, -0.5, 0.0;
    const auto fit = nmf_invert(independent_moments(q));
    EXPECT_LE(oracle::max_abs(fit.model.couplings()), 1e-14);
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(fit.model.fields()(i), std::atanh(q(i)), 1e-14);
    EXPECT_EQ(fit.method, FitMethod::NaiveMeanField);
}

TEST(NmfInvert, WeakCouplingCorrelatesWithTruth) {
    const auto model = weak_model(12, 21);
    const auto fit = nmf_invert(exact_moments(model));
    const double r = oracle::pearson(upper(model.couplings()), upper(fit.model.couplings()));
    RecordProperty("pearson", std::to_string(r));
    EXPECT_GE(r, 0.9);
    expect_symmetric_zero_diagonal(fit.model.couplings());
}

TEST(NmfInvert, SingularCorrelationSuggestsRidge) {
    const auto base = oracle::fair_coins(200, 3, 4);
    SpinValues v(200, 4);
    v.leftCols(3) = base.values();
    v.col(3) = base.values().col(0);
    const auto mo = empirical_moments(SpinMatrix::with_default_labels(v));
    try {
        nmf_invert(mo);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
    }
    InversionOptions opt;
    opt.ridge_epsilon = 1e-2;
    const auto fit = nmf_invert(mo, opt);
    EXPECT_TRUE(fit.model.couplings().allFinite());
    EXPECT_FALSE(fit.warnings.empty());
}

TEST(InversionProperty, RelabelingPermutesEstimates) {
    std::mt19937_64 rng(13);
    const auto m = glauber_sample(oracle::planted_model(6, 0.05, 0.2, -0.3, 0.3, 9), SamplerConfig{200, 1, 2, 3000});
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto pm = m.permuted_columns(perm);
    const auto mo = empirical_moments(m), pmo = empirical_moments(pm);

    const auto check = [&](const FitReport& a, const FitReport& b, double tol) {
        const auto ap = a.model.permuted(perm);
        EXPECT_LE(oracle::max_abs(ap.couplings() - b.model.couplings()), tol);
        EXPECT_LE((ap.fields() - b.model.fields()).cwiseAbs().maxCoeff(), tol);
    };
    check(nmf_invert(mo), nmf_invert(pmo), 1e-10);
    check(tap_invert(mo), tap_invert(pmo), 1e-10);
    check(plm_fit(m), plm_fit(pm), 1e-6);
    check(fit_maxent_exact(mo), fit_maxent_exact(pmo), 1e-6);
}

TEST(TapPairCoupling, ReducesToNaiveValue) {
    for (double c : {-0.7, -0.01, 0.0, 0.03, 0.4}) {
        EXPECT_EQ(tap_pair_coupling(c, 0.0), -c);
        EXPECT_NEAR(tap_pair_coupling(c, 1e-9), -c, 1e-8 * std::abs(c) + 1e-300);
    }
    bool clamped = true;
    const double j = tap_pair_coupling(-0.2, 0.3, &clamped);
    EXPECT_FALSE(clamped);
    EXPECT_NEAR(-0.2, -j - j * j * 0.3, 1e-14);
}

TEST(TapPairCoupling, ClampsNegativeDiscriminant) {
    bool clamped = false;
    const double a = 0.5, c = 1.0;  // 1 - 4ac < 0
    EXPECT_DOUBLE_EQ(tap_pair_coupling(c, a, &clamped), -1.0 / (2 * a));
    EXPECT_TRUE(clamped);
}

TEST(TapInvert, UnpolarizedMomentsMatchNmfExactly) {
    const auto m = oracle::fair_coins(5000, 5, 3);
    auto mo = empirical_moments(m);
    mo = MomentSet::from_pair_moments(Vector::Zero(5), mo.Q, mo.sample_size);
    const auto a = tap_invert(mo), b = nmf_invert(mo);
    EXPECT_EQ(a.model.couplings(), b.model.couplings());
}

TEST(TapInvert, BeatsNmfOnPlantedInstance) {
    const auto model = oracle::planted_model(10, 0.0, 0.1, -0.5, 0.5, 1234);
    const auto mo = exact_moments(model);
    const double tap = rms_j_error(model.couplings(), tap_invert(mo).model.couplings());
    const double nmf = rms_j_error(model.couplings(), nmf_invert(mo).model.couplings());
    RecordProperty("tap_rms", std::to_string(tap));
    RecordProperty("nmf_rms", std::to_string(nmf));
    EXPECT_LT(tap, nmf);
}

TEST(TapInvert, SymmetricInputGivesSymmetricCouplings) {
    const auto mo = exact_moments(oracle::planted_model(7, 0.05, 0.15, 0.3, 0.3, 5));
    const auto fit = tap_invert(mo);
    expect_symmetric_zero_diagonal(fit.model.couplings());
}

TEST(TapInvert, ClampFractionWarnsOrThrowsUnderStrict) {
    Vector q(2);
    q << 0.9, 0.9;
    Matrix C(2, 2);
    C << 0.19, -0.1, -0.1, 0.19;
    const auto mo = MomentSet::from_pair_moments(q, C + q * q.transpose(), {});
    const auto fit = tap_invert(mo);
    ASSERT_EQ(fit.warnings.size(), 2u);
    InversionOptions strict;
    strict.strict = true;
    EXPECT_THROW(tap_invert(mo, strict), ReliabilityError);
}

TEST(TapInvert, FrozenSpinIsBoundaryError) {
    Vector q(2);
    q << 1.0, 0.0;
    EXPECT_THROW(tap_invert(independent_moments(q)), BoundaryError);
    EXPECT_THROW(nmf_invert(independent_moments(q)), BoundaryError);
}

TEST(PlmFit, RecoversPlantedCouplings) {
    const auto model = oracle::planted_model(6, 0.0, 0.4, -0.3, 0.3, 88);
    const auto m = glauber_sample(model, SamplerConfig{500, 1, 17, 20000});
    const auto fit = plm_fit(m);
    const double r = oracle::pearson(upper(model.couplings()), upper(fit.model.couplings()));
    EXPECT_GE(r, 0.95);
    EXPECT_LE((fit.model.fields() - model.fields()).cwiseAbs().maxCoeff(), 0.1);
    expect_symmetric_zero_diagonal(fit.model.couplings());
    EXPECT_EQ(fit.method, FitMethod::PseudoLikelihood);
}

TEST(PlmFit, IdenticalRowsStayFiniteWithRidge) {
    const auto m = oracle::spins({{1, -1, 1}, {1, -1, 1}, {1, -1, 1}, {1, -1, 1}});
    const auto fit = plm_fit(m);
    EXPECT_TRUE(fit.model.couplings().allFinite());
    EXPECT_TRUE(fit.model.fields().allFinite());
    PlmOptions none;
    none.ridge = 0.0;
    try {
        plm_fit(m, none);
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
    }
}

TEST(PlmFit, HeavyRidgeShrinksToZero) {
    PlmOptions heavy;
    heavy.ridge = 1e6;
    const auto fit = plm_fit(glauber_sample(oracle::planted_model(4, 0.3, 0.3, 0.5, 0.8, 2), SamplerConfig{100, 1, 3, 500}),
                             heavy);
    EXPECT_LE(oracle::max_abs(fit.model.couplings()), 1e-5);
    EXPECT_LE(fit.model.fields().cwiseAbs().maxCoeff(), 1e-5);
}

TEST(PlmFitProperty, ObjectiveNeverDecreases) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto m = glauber_sample(oracle::planted_model(5, 0.1, 0.5, -0.5, 0.5, seed), SamplerConfig{100, 1, seed, 800});
        for (std::size_t i = 0; i < 5; ++i) {
            const auto reg = plm_fit_spin(m, i);
            ASSERT_FALSE(reg.objective_trace.empty());
            for (std::size_t k = 1; k < reg.objective_trace.size(); ++k)
                EXPECT_GE(reg.objective_trace[k], reg.objective_trace[k - 1]);
            EXPECT_LT(reg.gradient_norm, 1e-6);
            EXPECT_EQ(reg.theta.size(), 5);
        }
    }
}

TEST(PlmFit, NeedsTwoRows) {
    EXPECT_THROW(plm_fit(oracle::spins({{1, -1}})), InsufficientSampleError);
}
