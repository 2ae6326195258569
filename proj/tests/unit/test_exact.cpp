#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "isingfin/errors.hpp"
#include "isingfin/exact.hpp"
#include "isingfin/moments.hpp"
#include "isingfin/sampler.hpp"
#include "oracles.hpp"

using namespace isingfin;

namespace {

IsingModel pair_model(double j12, double h1 = 0.0, double h2 = 0.0) {
    Matrix j(2, 2);
    j << 0, j12, j12, 0;
    Vector h(2);
    h << h1, h2;
    return IsingModel(j, h);
}

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

}  // namespace

TEST(LogPartition, ClosedForms) {
    Vector h(1);
    h << 0.5;
    EXPECT_NEAR(log_partition(IsingModel::independent(h)), std::log(2 * std::cosh(0.5)), 1e-14);
    EXPECT_NEAR(log_partition(IsingModel::independent(h)), 0.81326, 5e-6);
    EXPECT_NEAR(log_partition(pair_model(1.0)), std::log(2 * std::exp(1.0) + 2 * std::exp(-1.0)), 1e-14);
    // ln(2e + 2/e) = 1.820075; 1.82002 is a common rounding slip for it.
    EXPECT_NEAR(log_partition(pair_model(1.0)), 1.820075, 5e-7);
    for (std::size_t n = 1; n <= 12; ++n) {
        EXPECT_NEAR(log_partition(IsingModel::zeros(n)), static_cast<double>(n) * std::log(2.0), 1e-12);
    }
}

TEST(LogPartition, SizeLimit) {
    EXPECT_THROW(log_partition(IsingModel::zeros(26)), SizeLimitError);
    EXPECT_THROW(exact_moments(IsingModel::zeros(26)), SizeLimitError);
}

TEST(LogPartition, MatchesBruteForce) {
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto model = oracle::planted_model(n, 0.1, 0.6, -0.8, 0.8, 40 + n);
        const auto bf = oracle::brute_force(model);
        EXPECT_NEAR(log_partition(model), bf.log_z, 1e-10) << "N=" << n;
        const auto mo = exact_moments(model);
        EXPECT_LE((mo.q - bf.mean).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE(oracle::max_abs(mo.Q - bf.pair), 1e-12);
        EXPECT_NEAR(entropy_exact(model), bf.entropy, 1e-10);
    }
}

TEST(LogPartition, SurvivesLargeParameters) {
    const auto model = oracle::planted_model(6, 40.0, 10.0, 50.0, 80.0, 3);
    const double lz = log_partition(model);
    EXPECT_TRUE(std::isfinite(lz));
    EXPECT_NEAR(lz, oracle::brute_force(model).log_z, 1e-9 * std::abs(lz));
}

TEST(LogPartitionProperty, PermutationInvariant) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = oracle::planted_model(7, 0.0, 0.5, -1, 1, 500 + static_cast<std::uint64_t>(trial));
        std::vector<std::size_t> perm(7);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        EXPECT_NEAR(log_partition(model.permuted(perm)), log_partition(model), 1e-12);
    }
}

TEST(ExactMoments, PairAndIndependent) {
    const auto mo = exact_moments(pair_model(1.0));
    EXPECT_NEAR(mo.q(0), 0.0, 1e-15);
    EXPECT_NEAR(mo.Q(0, 1), std::tanh(1.0), 1e-14);
    EXPECT_NEAR(mo.Q(0, 1), 0.76159, 5e-6);
    EXPECT_FALSE(mo.sample_size.has_value());

    Vector h(3);
    h << 0.3, -0.7, 1.1;
    const auto ind = exact_moments(IsingModel::independent(h));
    const auto neg = exact_moments(IsingModel::independent(-h));
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(ind.q(i), std::tanh(h(i)), 1e-14);
        EXPECT_NEAR(neg.q(i), -ind.q(i), 1e-14);
        for (Eigen::Index k = 0; k < 3; ++k) {
            if (i == k) continue;
            EXPECT_NEAR(ind.Q(i, k), std::tanh(h(i)) * std::tanh(h(k)), 1e-14);
        }
    }
}

TEST(GibbsProbabilities, NormalizedAndMatchBruteForce) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = oracle::planted_model(6, 0.0, 0.5, -0.5, 0.5, seed);
        const auto p = gibbs_probabilities(model);
        const auto bf = oracle::brute_force(model);
        ASSERT_EQ(p.size(), bf.probs.size());
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        for (std::size_t c = 0; c < p.size(); ++c) EXPECT_NEAR(p[c], bf.probs[c], 1e-14);
    }
}

// Central differences with step 1e-4 on log Z.
TEST(LogPartitionProperty, GradientMatchesMoments) {
    const double step = 1e-4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = oracle::planted_model(6, 0.0, 1.0 / 6.0, -0.5, 0.5, 900 + seed);
        const auto mo = exact_moments(model);
        for (Eigen::Index i = 0; i < 6; ++i) {
            Vector hp = model.fields(), hm = model.fields();
            hp(i) += step;
            hm(i) -= step;
            const double d = (log_partition(IsingModel(model.couplings(), hp)) -
                              log_partition(IsingModel(model.couplings(), hm))) / (2 * step);
            EXPECT_NEAR(d, mo.q(i), 1e-6);
            for (Eigen::Index k = i + 1; k < 6; ++k) {
                Matrix jp = model.couplings(), jm = model.couplings();
                jp(i, k) += step;
                jp(k, i) += step;
                jm(i, k) -= step;
                jm(k, i) -= step;
                const double dj = (log_partition(IsingModel(jp, model.fields())) -
                                   log_partition(IsingModel(jm, model.fields()))) / (2 * step);
                EXPECT_NEAR(dj, mo.Q(i, k), 1e-6);
            }
        }
    }
}

TEST(Entropy, ExactExamples) {
    EXPECT_NEAR(entropy_exact(IsingModel::zeros(3)), 3 * std::log(2.0), 1e-13);
    Vector h(1);
    h << 0.5;
    EXPECT_NEAR(entropy_exact(IsingModel::independent(h)), binary_entropy((1 + std::tanh(0.5)) / 2), 1e-13);
    const double s0 = entropy_exact(pair_model(0.0));
    const double s1 = entropy_exact(pair_model(0.5));
    const double s2 = entropy_exact(pair_model(1.0));
    EXPECT_GT(s0, s1);
    EXPECT_GT(s1, s2);
    EXPECT_GT(entropy_exact(pair_model(-0.5)), s2);
}

TEST(Entropy, IndependentExamples) {
    EXPECT_NEAR(entropy_independent(Vector::Zero(3)), 3 * std::log(2.0), 1e-14);
    Vector sat(2);
    sat << 1, -1;
    EXPECT_EQ(entropy_independent(sat), 0.0);
    Vector half(1);
    half << 0.5;
    EXPECT_NEAR(entropy_independent(half), binary_entropy(0.75), 1e-14);
    EXPECT_NEAR(entropy_independent(half), 0.56234, 5e-6);
}

TEST(Entropy, EmpiricalExamples) {
    EXPECT_EQ(entropy_empirical(oracle::spins({{1, -1}, {1, -1}, {1, -1}})), 0.0);
    EXPECT_NEAR(entropy_empirical(oracle::spins({{1, 1}, {1, 1}, {-1, -1}, {-1, -1}})), std::log(2.0), 1e-15);
    std::vector<std::vector<int>> all;
    for (int c = 0; c < 16; ++c) all.push_back({c & 1 ? 1 : -1, c & 2 ? 1 : -1, c & 4 ? 1 : -1, c & 8 ? 1 : -1});
    EXPECT_NEAR(entropy_empirical(oracle::spins(all)), 4 * std::log(2.0), 1e-14);
    EXPECT_THROW(entropy_empirical(oracle::fair_coins(3, 21, 1)), SizeLimitError);
}

TEST(FitMaxentExact, RoundTripN5) {
    const auto model = oracle::planted_model(5, 0.0, 0.2, -0.5, 0.5, 77);
    const auto targets = exact_moments(model);
    const auto fit = fit_maxent_exact(targets, {1e-8, 500, ExactFitAlgorithm::Newton});
    ASSERT_TRUE(fit.residual.has_value());
    EXPECT_LE(*fit.residual, 1e-8);
    const auto got = exact_moments(fit.model);
    EXPECT_LE((got.q - targets.q).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(oracle::max_abs(got.Q - targets.Q), 1e-8);
    EXPECT_EQ(fit.method, FitMethod::Exact);
}

TEST(FitMaxentExact, UniformTargetsGiveZeroModel) {
    const auto fit = fit_maxent_exact(MomentSet::from_pair_moments(Vector::Zero(4), Matrix::Identity(4, 4), {}));
    EXPECT_LE(oracle::max_abs(fit.model.couplings()), 1e-10);
    EXPECT_LE(fit.model.fields().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitMaxentExact, SingleBiasedSpin) {
    Vector q = Vector::Zero(3);
    q(0) = 0.9;
    const auto fit = fit_maxent_exact(MomentSet::from_pair_moments(q, Matrix::Identity(3, 3) + (q * q.transpose() -
                                                                      Matrix(q.cwiseAbs2().asDiagonal())), {}));
    EXPECT_NEAR(fit.model.fields()(0), std::atanh(0.9), 1e-8);
    EXPECT_LE(oracle::max_abs(fit.model.couplings()), 1e-8);
}

TEST(FitMaxentExact, SaturatedTargetIsBoundaryError) {
    Vector q = Vector::Zero(2);
    q(0) = 1.0;
    EXPECT_THROW(fit_maxent_exact(MomentSet::from_pair_moments(q, Matrix::Identity(2, 2), {})), BoundaryError);
}

TEST(FitMaxentExact, NonConvergenceCarriesBestIterate) {
    const auto targets = exact_moments(oracle::planted_model(6, 0.2, 0.5, -0.5, 0.5, 4));
    try {
        fit_maxent_exact(targets, {1e-12, 1, ExactFitAlgorithm::GradientAscent});
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        ASSERT_TRUE(e.best().residual.has_value());
        EXPECT_GT(*e.best().residual, 1e-12);
        EXPECT_EQ(e.best().model.size(), 6u);
    }
}

TEST(FitMaxentExact, GradientAscentReachesSameFixedPoint) {
    const auto model = oracle::planted_model(3, 0.0, 0.3, -0.3, 0.3, 19);
    const auto targets = exact_moments(model);
    const auto fit = fit_maxent_exact(targets, {1e-8, 200000, ExactFitAlgorithm::GradientAscent});
    EXPECT_LE(*fit.residual, 1e-8);
    EXPECT_LE(oracle::max_abs(fit.model.couplings() - model.couplings()), 1e-6);
}

TEST(FitMaxentExactProperty, IdentifiesParametersUpToN8) {
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto model = oracle::planted_model(n, 0.0, 1.0 / static_cast<double>(n), -0.5, 0.5, 60 + n);
        const auto fit = fit_maxent_exact(exact_moments(model));
        EXPECT_LE(oracle::max_abs(fit.model.couplings() - model.couplings()), 1e-6) << "N=" << n;
        EXPECT_LE((fit.model.fields() - model.fields()).cwiseAbs().maxCoeff(), 1e-6) << "N=" << n;
    }
}

TEST(FitMaxentExact, SizeLimit) {
    EXPECT_THROW(fit_maxent_exact(MomentSet::from_pair_moments(Vector::Zero(21), Matrix::Identity(21, 21), {})),
                 SizeLimitError);
}

TEST(MultiInformation, RepeatedConfigurationIsDegenerate) {
    EXPECT_THROW(multi_information_ratio(oracle::spins({{1, -1, 1}, {1, -1, 1}, {1, -1, 1}})), DegenerateRatioError);
}

TEST(MultiInformation, IndependentDataIsDegenerateOrFlagged) {
    Vector h(4);
    h << 0.4, -0.3, 0.2, 0.6;
    const auto m = glauber_sample(IsingModel::independent(h), SamplerConfig{200, 1, 12, 20000});
    try {
        const auto r = multi_information_ratio(m);
        EXPECT_FALSE(r.warnings.empty());
    } catch (const DegenerateRatioError&) {
        SUCCEED();
    }
}

TEST(MultiInformation, OrderingAndFlags) {
    const auto model = oracle::planted_model(5, 0.05, 0.3, -0.2, 0.2, 31);
    const auto m = glauber_sample(model, SamplerConfig{500, 1, 5, 20000});
    const auto r = multi_information_ratio(m);
    EXPECT_FALSE(r.small_sample);
    EXPECT_GE(r.s1, r.s2 - 1e-9);
    EXPECT_GE(r.s2, r.sn - 0.05);
    EXPECT_GE(r.i2, -1e-9);
    EXPECT_GE(r.in, -1e-9);
    EXPECT_NEAR(r.ratio, r.i2 / r.in, 1e-15);
    EXPECT_LE(r.fit_residual, 1e-8);

    const auto small = multi_information_ratio(glauber_sample(model, SamplerConfig{500, 1, 6, 200}));
    EXPECT_TRUE(small.small_sample);
}
