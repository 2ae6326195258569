#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/inverse.hpp"
#include "isingfin/ising_model.hpp"

namespace isingfin {

struct SamplerConfig {
    std::size_t burn_in = 1000;  ///< sweeps discarded before recording
    std::size_t thin = 1;        ///< sweeps between recorded rows
    std::uint64_t seed = 0;
    std::size_t rows = 1;

    /// @throws DomainError for thin == 0 or rows == 0
    void validate() const;
};

/**
 * @brief Heat-bath single-spin-flip chain.
 *
 * update(i) redraws spin i as +1 with probability sigma(2 f_i), where
 * f_i = h_i + sum_j J_ij s_j is kept current incrementally. A sweep visits
 * every spin once in a fresh random order. The generator is owned by the
 * chain, so chains with different seeds can run concurrently.
 */
class GlauberChain {
public:
    GlauberChain(const IsingModel& model, std::uint64_t seed);

    void update(std::size_t spin);
    void sweep();
    /// Same as sweep(), calling visit(state) after every single-spin update.
    template <class Visit>
    void sweep(Visit&& visit) {
        shuffle_order();
        for (std::size_t spin : order_) {
            update(spin);
            visit(std::span<const std::int8_t>(state_));
        }
    }

    std::span<const std::int8_t> state() const { return state_; }
    std::size_t size() const noexcept { return state_.size(); }

private:
    void shuffle_order();

    Matrix j_;
    Vector h_;
    std::vector<std::int8_t> state_;
    Vector field_;
    std::vector<std::size_t> order_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Record config.rows rows of a fresh chain; deterministic in config.seed.
SpinMatrix glauber_sample(const IsingModel& model, const SamplerConfig& config);

struct NoiseReport {
    double sigma_noise = 0.0;
    double sigma_j = 0.0;
    double ratio = 0.0;
    double mean_j = 0.0;
    std::size_t n = 0;
    std::size_t t = 0;
    FitMethod method = FitMethod::NaiveMeanField;
    SamplerConfig config;
};

struct NoiseOptions {
    InversionOptions inversion;
    PlmOptions plm;
};

/**
 * @brief Noise floor of an inversion method at sample length T.
 *
 * Builds the homogeneous model whose off-diagonal couplings all equal the mean
 * of real_fit's couplings (h = 0), samples T rows, re-infers with the same
 * method and compares the spread of the re-inferred couplings to the spread
 * of the real ones.
 *
 * @throws DomainError on dimension mismatch or sigma_J = 0
 */
NoiseReport noise_ratio(const FitReport& real_fit, std::size_t n, std::size_t t,
                        SamplerConfig config, FitMethod method, const NoiseOptions& options = {});

/// Population standard deviation.
double stddev(std::span<const double> values);

}  // namespace isingfin
