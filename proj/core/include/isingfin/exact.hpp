#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/ising_model.hpp"
#include "isingfin/moments.hpp"

namespace isingfin {

/// Largest N for which partition function, moments and entropy enumerate.
inline constexpr std::size_t kMaxEnumerationSpins = 25;
/// Largest N for exact fitting and configuration histograms.
inline constexpr std::size_t kMaxFitSpins = 20;

// Configuration index convention used throughout: bit i of the index set
// means s_i = +1, clear means s_i = -1.

/// ln Z, evaluated by Gray-code enumeration with a max shift.
/// @throws SizeLimitError when N > kMaxEnumerationSpins
double log_partition(const IsingModel& model);

/// Gibbs probability of every configuration, indexed as above.
std::vector<double> gibbs_probabilities(const IsingModel& model);

/// <s_i> and <s_i s_j> under the Gibbs distribution; sample_size is empty.
MomentSet exact_moments(const IsingModel& model);

/// Gibbs entropy in nats, ln Z + <H>.
double entropy_exact(const IsingModel& model);

/// Sum of binary entropies H_b((1 + q_i)/2), nats.
double entropy_independent(const Vector& q);

/// Plug-in entropy of the observed configuration histogram.
/// @throws SizeLimitError when N > kMaxFitSpins
double entropy_empirical(const SpinMatrix& m);

enum class ExactFitAlgorithm {
    /// Damped Newton on the log-likelihood with backtracking.
    Newton,
    /// Fixed-step gradient ascent, step 0.1/N.
    GradientAscent,
};

struct ExactFitOptions {
    double tol = 1e-8;
    std::size_t max_iter = 500;
    ExactFitAlgorithm algorithm = ExactFitAlgorithm::Newton;
};

/**
 * @brief Exact maximum-entropy fit to target first and second moments.
 *
 * Maximizes the concave log-likelihood  theta . mu_target - ln Z(theta)
 * over theta = (h, J_{i<j}); its gradient is the moment mismatch. Stops once
 * the max-abs mismatch is at most tol.
 *
 * @throws SizeLimitError for N > kMaxFitSpins
 * @throws BoundaryError when some |q_i| = 1
 * @throws ConvergenceError after max_iter, carrying the best iterate
 */
FitReport fit_maxent_exact(const MomentSet& targets, const ExactFitOptions& options = {});

struct EntropyReport {
    double s1 = 0.0;  ///< independent model
    double s2 = 0.0;  ///< pairwise model
    double sn = 0.0;  ///< empirical plug-in
    double i2 = 0.0;  ///< s1 - s2
    double in = 0.0;  ///< s1 - sn
    double ratio = 0.0;
    std::size_t n = 0;
    std::size_t t = 0;
    /// T < 10 * 2^N.
    bool small_sample = false;
    std::size_t fit_iterations = 0;
    double fit_residual = 0.0;
    std::vector<std::string> warnings;
};

/**
 * @brief Share I2/IN = (S1 - S2)/(S1 - SN) of multi-information captured at
 * pairwise order.
 *
 * @param tol IN at or below this is treated as no correlation structure
 * @throws DegenerateRatioError when IN <= tol
 */
EntropyReport multi_information_ratio(const SpinMatrix& m, double tol = 1e-6,
                                      const ExactFitOptions& fit = {});

}  // namespace isingfin
