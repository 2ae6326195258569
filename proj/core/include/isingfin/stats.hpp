#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/ising_model.hpp"
#include "isingfin/moments.hpp"

namespace isingfin {

struct QqResult {
    /// (empirical, theoretical) quantile pairs at probabilities k/count.
    std::vector<std::pair<double, double>> pairs;
    double mean = 0.0;
    double std = 0.0;
    /// Zero spread: every theoretical quantile equals the mean.
    bool degenerate = false;
};

/// Empirical quantiles against a Gaussian with matched mean and std.
/// @throws InsufficientSampleError when values.size() < quantile_count
QqResult qq_compare(std::span<const double> values, std::size_t quantile_count = 1000);

/// Number of values trim_upper_tail removes: ceil(fraction * n).
std::size_t upper_tail_count(std::size_t n, double fraction);

/// Drop the ceil(fraction * n) largest values, keeping the others in order.
/// @throws DomainError for fraction outside [0, 0.5)
std::vector<double> trim_upper_tail(std::span<const double> values, double fraction = 0.04);

struct NormalityReport {
    std::size_t n = 0;        ///< count before trimming
    std::size_t trimmed = 0;  ///< removed from the upper tail
    std::size_t bins = 0;     ///< chi-square bins actually used
    double chi2_stat = 0.0;
    double chi2_p = 0.0;
    double jb_stat = 0.0;
    double jb_p = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

/**
 * @brief Chi-square and Jarque-Bera normality tests.
 *
 * Chi-square uses equiprobable bins under the fitted Gaussian (bins reduced
 * until every expected count is at least 5) with bins - 3 degrees of freedom.
 * JB = n/6 (S^2 + K^2/4) is referred to chi-square with 2 degrees of freedom.
 *
 * @throws InsufficientSampleError for fewer than 50 values
 * @throws DomainError for zero variance
 */
NormalityReport normality_tests(std::span<const double> values, std::size_t bins = 20);

/// Trim the upper tail, then test the retained bulk.
NormalityReport normality_tests_trimmed(std::span<const double> values, double fraction = 0.04,
                                        std::size_t bins = 20);

/// Fraction of strictly negative upper-triangle couplings (0 when N < 2).
double negative_fraction(const Matrix& couplings);

struct ScalingFit {
    std::vector<double> sizes;
    std::vector<double> means;
    double alpha_hat = 0.0;
    double alpha_se = 0.0;
    double a_hat = 0.0;
    double r2 = 0.0;
};

/**
 * @brief Least-squares fit of means = a N^-alpha on log-log axes.
 *
 * Points are sorted before summation, so the result does not depend on
 * their order.
 *
 * @throws DomainError for fewer than 3 points, mismatched lengths or
 *         non-positive values
 */
ScalingFit powerlaw_fit(std::span<const double> sizes, std::span<const double> means);

struct BiasRow {
    std::string ticker;
    double h = 0.0;
    double h_int_mean = 0.0;
    double h_int_std = 0.0;
};

using BiasTable = std::vector<BiasRow>;

/// Internal bias h_i^int(t) = (1/2) sum_j J_ij s_j(t), averaged over rows.
/// @throws DomainError on dimension mismatch
BiasTable bias_decomposition(const IsingModel& model, const SpinMatrix& m);

struct CriticalDemoOptions {
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
};

/// IID Gaussian couplings with variance J^2/N and h = 0.
IsingModel gaussian_coupling_model(std::size_t n, double coupling_scale, std::uint64_t seed);

/**
 * @brief Covariance spectrum of Glauber samples from gaussian_coupling_model.
 *
 * coupling_scale = 1 is the Sherrington-Kirkpatrick transition.
 *
 * @throws DomainError unless N >= 20 and T >= 10 N
 */
Spectrum critical_spectrum_demo(std::size_t n, double coupling_scale, std::size_t t,
                                std::uint64_t seed, const CriticalDemoOptions& options = {});

}  // namespace isingfin
