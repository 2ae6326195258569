#include "isingfin/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "isingfin/errors.hpp"
#include "isingfin/exact.hpp"
#include "isingfin/moments.hpp"

namespace isingfin {

void SamplerConfig::validate() const {
    std::string problems;
    if (thin < 1) problems += " thin must be >= 1;";
    if (rows < 1) problems += " rows must be >= 1;";
    if (!problems.empty()) {
        throw DomainError("invalid sampler configuration:" + problems);
    }
}

GlauberChain::GlauberChain(const IsingModel& model, std::uint64_t seed)
    : j_(model.couplings()), h_(model.fields()), state_(model.size()), order_(model.size()), rng_(seed) {
    for (auto& s : state_) s = uniform_(rng_) < 0.5 ? -1 : 1;
    Vector s(static_cast<Eigen::Index>(state_.size()));
    for (std::size_t i = 0; i < state_.size(); ++i) s(static_cast<Eigen::Index>(i)) = state_[i];
    field_ = h_ + j_ * s;
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void GlauberChain::update(std::size_t spin) {
    const auto i = static_cast<Eigen::Index>(spin);
    // P(s_i = +1 | rest) = sigma(2 f_i) = 1 / (1 + exp(-2 f_i)).
    const double p_up = 1.0 / (1.0 + std::exp(-2.0 * field_(i)));
    const std::int8_t next = uniform_(rng_) < p_up ? 1 : -1;
    const std::int8_t prev = state_[spin];
    if (next != prev) {
        state_[spin] = next;
        field_.noalias() += static_cast<double>(next - prev) * j_.col(i);
    }
}

void GlauberChain::shuffle_order() { std::shuffle(order_.begin(), order_.end(), rng_); }

void GlauberChain::sweep() {
    shuffle_order();
    for (std::size_t spin : order_) update(spin);
}

SpinMatrix glauber_sample(const IsingModel& model, const SamplerConfig& config) {
    config.validate();
    GlauberChain chain(model, config.seed);
    for (std::size_t k = 0; k < config.burn_in; ++k) chain.sweep();

    SpinValues values(static_cast<Eigen::Index>(config.rows), static_cast<Eigen::Index>(model.size()));
    for (std::size_t t = 0; t < config.rows; ++t) {
        for (std::size_t k = 0; k < config.thin; ++k) chain.sweep();
        const auto s = chain.state();
        std::copy(s.begin(), s.end(), values.row(static_cast<Eigen::Index>(t)).data());
    }
    return SpinMatrix::with_default_labels(std::move(values));
}

double stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

NoiseReport noise_ratio(const FitReport& real_fit, std::size_t n, std::size_t t, SamplerConfig config,
                        FitMethod method, const NoiseOptions& options) {
    if (real_fit.model.size() != n) {
        throw DomainError("noise_ratio: fitted model has N = " + std::to_string(real_fit.model.size()) +
                          " but N = " + std::to_string(n) + " was requested");
    }
    if (n < 2) throw DomainError("noise_ratio needs at least two spins");

    const auto real = real_fit.model.upper_couplings();
    NoiseReport report;
    report.n = n;
    report.t = t;
    report.method = method;
    report.sigma_j = stddev(real);
    report.mean_j = std::accumulate(real.begin(), real.end(), 0.0) / static_cast<double>(real.size());
    // Rounding leaves ~1e-17 of spread on constant couplings.
    if (!(report.sigma_j > 1e-12 * std::max(1.0, std::abs(report.mean_j)))) {
        throw DomainError("real couplings have zero spread (sigma_J = 0); the noise ratio is undefined");
    }

    const auto nn = static_cast<Eigen::Index>(n);
    Matrix homogeneous = Matrix::Constant(nn, nn, report.mean_j);
    homogeneous.diagonal().setZero();
    const IsingModel model(std::move(homogeneous), Vector::Zero(nn));

    config.rows = t;
    report.config = config;
    const SpinMatrix synthetic = glauber_sample(model, config);

    FitReport refit = [&] {
        switch (method) {
            case FitMethod::Exact: return fit_maxent_exact(empirical_moments(synthetic));
            case FitMethod::NaiveMeanField: return nmf_invert(empirical_moments(synthetic), options.inversion);
            case FitMethod::TapInversion: return tap_invert(empirical_moments(synthetic), options.inversion);
            case FitMethod::PseudoLikelihood: return plm_fit(synthetic, options.plm);
        }
        throw ConfigError("unknown inversion method");
    }();

    report.sigma_noise = stddev(refit.model.upper_couplings());
    report.ratio = report.sigma_noise / report.sigma_j;
    return report;
}

}  // namespace isingfin
