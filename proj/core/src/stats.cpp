#include "isingfin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "isingfin/errors.hpp"
#include "isingfin/sampler.hpp"

namespace isingfin {

namespace {

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Moments {
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

Moments central_moments(std::span<const double> values) {
    Moments mo;
    const double n = static_cast<double>(values.size());
    mo.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    for (double v : values) {
        const double d = v - mo.mean;
        const double d2 = d * d;
        mo.m2 += d2;
        mo.m3 += d2 * d;
        mo.m4 += d2 * d2;
    }
    mo.m2 /= n;
    mo.m3 /= n;
    mo.m4 /= n;
    return mo;
}

double chi2_sf(double stat, double df) { return boost::math::gamma_q(0.5 * df, 0.5 * stat); }

}  // namespace

QqResult qq_compare(std::span<const double> values, std::size_t quantile_count) {
    if (quantile_count < 2) throw DomainError("quantile count must be at least 2");
    if (values.size() < quantile_count) {
        throw InsufficientSampleError("QQ comparison needs at least " + std::to_string(quantile_count) +
                                      " values, got " + std::to_string(values.size()));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const Moments mo = central_moments(values);

    QqResult out;
    out.mean = mo.mean;
    out.std = std::sqrt(mo.m2);
    out.degenerate = !(out.std > 0.0);
    const boost::math::normal_distribution<double> unit;
    out.pairs.reserve(quantile_count - 1);
    for (std::size_t k = 1; k < quantile_count; ++k) {
        const double p = static_cast<double>(k) / static_cast<double>(quantile_count);
        const double theory = out.degenerate ? out.mean : out.mean + out.std * boost::math::quantile(unit, p);
        out.pairs.emplace_back(sorted_quantile(sorted, p), theory);
    }
    return out;
}

std::size_t upper_tail_count(std::size_t n, double fraction) {
    // The slack keeps exact ratios such as 200/4950 * 4950 from rounding up.
    const double raw = fraction * static_cast<double>(n);
    return std::min(n, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

std::vector<double> trim_upper_tail(std::span<const double> values, double fraction) {
    if (!(fraction >= 0.0 && fraction < 0.5)) {
        throw DomainError("trim fraction must lie in [0, 0.5), got " + std::to_string(fraction));
    }
    const std::size_t drop = upper_tail_count(values.size(), fraction);
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<bool> keep(values.size(), true);
    for (std::size_t k = values.size() - drop; k < values.size(); ++k) keep[idx[k]] = false;

    std::vector<double> out;
    out.reserve(values.size() - drop);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (keep[i]) out.push_back(values[i]);
    }
    return out;
}

NormalityReport normality_tests(std::span<const double> values, std::size_t bins) {
    if (values.size() < 50) {
        throw InsufficientSampleError("normality tests need at least 50 values, got " +
                                      std::to_string(values.size()));
    }
    if (bins < 4) throw DomainError("chi-square test needs at least 4 bins");
    const Moments mo = central_moments(values);
    if (!(mo.m2 > 0.0)) throw DomainError("values have zero variance");

    NormalityReport r;
    r.n = values.size();
    r.mean = mo.mean;
    r.std = std::sqrt(mo.m2);
    r.skewness = mo.m3 / std::pow(mo.m2, 1.5);
    r.excess_kurtosis = mo.m4 / (mo.m2 * mo.m2) - 3.0;

    const double n = static_cast<double>(values.size());
    r.jb_stat = n / 6.0 * (r.skewness * r.skewness + 0.25 * r.excess_kurtosis * r.excess_kurtosis);
    r.jb_p = std::exp(-0.5 * r.jb_stat);

    std::size_t k = bins;
    while (k > 4 && n / static_cast<double>(k) < 5.0) --k;
    r.bins = k;
    const boost::math::normal_distribution<double> fitted(r.mean, r.std);
    std::vector<double> edges(k - 1);
    for (std::size_t b = 1; b < k; ++b) {
        edges[b - 1] = boost::math::quantile(fitted, static_cast<double>(b) / static_cast<double>(k));
    }
    std::vector<std::size_t> counts(k, 0);
    for (double v : values) {
        counts[static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin())]++;
    }
    const double expected = n / static_cast<double>(k);
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        r.chi2_stat += d * d / expected;
    }
    r.chi2_p = chi2_sf(r.chi2_stat, static_cast<double>(k - 3));
    return r;
}

NormalityReport normality_tests_trimmed(std::span<const double> values, double fraction, std::size_t bins) {
    const auto kept = trim_upper_tail(values, fraction);
    if (kept.size() < 50) {
        throw InsufficientSampleError("normality tests need at least 50 values after trimming, got " +
                                      std::to_string(kept.size()));
    }
    NormalityReport r = normality_tests(kept, bins);
    r.n = values.size();
    r.trimmed = values.size() - kept.size();
    return r;
}

double negative_fraction(const Matrix& couplings) {
    const auto n = couplings.rows();
    if (n < 2) return 0.0;
    std::size_t negative = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) negative += couplings(i, j) < 0.0 ? 1 : 0;
    }
    return static_cast<double>(negative) / static_cast<double>(n * (n - 1) / 2);
}

ScalingFit powerlaw_fit(std::span<const double> sizes, std::span<const double> means) {
    if (sizes.size() != means.size()) throw DomainError("sizes and means differ in length");
    if (sizes.size() < 3) throw DomainError("power-law fit needs at least 3 points");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (!(sizes[k] > 0.0)) throw DomainError("sizes must be strictly positive");
        if (!(means[k] > 0.0)) {
            throw DomainError("mean " + std::to_string(means[k]) + " at N = " + std::to_string(sizes[k]) +
                              " is not positive; fit mean |J| instead");
        }
        pts.emplace_back(sizes[k], means[k]);
    }
    std::sort(pts.begin(), pts.end());

    ScalingFit fit;
    const double n = static_cast<double>(pts.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [size, mean] : pts) {
        fit.sizes.push_back(size);
        fit.means.push_back(mean);
        sx += std::log(size);
        sy += std::log(mean);
    }
    const double xbar = sx / n;
    const double ybar = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [size, mean] : pts) {
        const double dx = std::log(size) - xbar;
        const double dy = std::log(mean) - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DomainError("power-law fit needs at least two distinct sizes");
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;
    double ss_res = 0.0;
    for (const auto& [size, mean] : pts) {
        const double e = std::log(mean) - (intercept + slope * std::log(size));
        ss_res += e * e;
    }
    fit.alpha_hat = -slope;
    fit.a_hat = std::exp(intercept);
    fit.alpha_se = std::sqrt(ss_res / (n - 2.0) / sxx);
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

BiasTable bias_decomposition(const IsingModel& model, const SpinMatrix& m) {
    if (model.size() != m.cols()) {
        throw DomainError("model has N = " + std::to_string(model.size()) + " but the spin matrix has " +
                          std::to_string(m.cols()) + " columns");
    }
    if (m.rows() == 0) throw EmptyInputError("spin matrix has no rows");
    const Matrix internal = 0.5 * (m.as_double() * model.couplings());
    const double t = static_cast<double>(m.rows());
    BiasTable table;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto col = internal.col(static_cast<Eigen::Index>(i));
        const double mean = col.sum() / t;
        const double var = (col.array() - mean).square().sum() / t;
        table.push_back({m.tickers()[i], model.fields()(static_cast<Eigen::Index>(i)), mean, std::sqrt(var)});
    }
    return table;
}

IsingModel gaussian_coupling_model(std::size_t n, double coupling_scale, std::uint64_t seed) {
    if (!(coupling_scale >= 0.0)) throw DomainError("coupling scale must be non-negative");
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix j = Matrix::Zero(nn, nn);
    if (coupling_scale > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, coupling_scale / std::sqrt(static_cast<double>(n)));
        for (Eigen::Index a = 0; a < nn; ++a) {
            for (Eigen::Index b = a + 1; b < nn; ++b) {
                j(a, b) = normal(rng);
                j(b, a) = j(a, b);
            }
        }
    }
    return IsingModel(std::move(j), Vector::Zero(nn));
}

Spectrum critical_spectrum_demo(std::size_t n, double coupling_scale, std::size_t t, std::uint64_t seed,
                                const CriticalDemoOptions& options) {
    if (n < 20) throw DomainError("critical demo needs N >= 20, got " + std::to_string(n));
    if (t < 10 * n) throw DomainError("critical demo needs T >= 10 N, got T = " + std::to_string(t));
    const IsingModel model = gaussian_coupling_model(n, coupling_scale, seed);
    SamplerConfig config;
    config.burn_in = options.burn_in;
    config.thin = options.thin;
    config.rows = t;
    // Separate stream for the chain so the couplings and the dynamics do not share draws.
    config.seed = seed ^ 0x9E3779B97F4A7C15ULL;
    return covariance_spectrum(empirical_moments(glauber_sample(model, config)));
}

}  // namespace isingfin
