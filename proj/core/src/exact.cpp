#include "isingfin/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "isingfin/errors.hpp"

namespace isingfin {

namespace {

void require_enumerable(std::size_t n, std::size_t limit, const char* what) {
    if (n > limit) {
        throw SizeLimitError(std::string(what) + " enumerates 2^N configurations and is limited to N <= " +
                             std::to_string(limit) + " (got N = " + std::to_string(n) +
                             "); use the Glauber sampler or an approximate inversion instead");
    }
}

/**
 * Visit every configuration in Gray-code order. Consecutive configurations
 * differ in one spin, so the log weight and local fields update in O(N).
 * visit(index, spins, log_weight) receives the configuration index in the
 * bit convention documented in exact.hpp.
 */
template <class Visit>
void enumerate_gray(const IsingModel& model, Visit&& visit) {
    const std::size_t n = model.size();
    const Matrix& j = model.couplings();
    std::vector<std::int8_t> s(n, -1);
    Vector field = model.fields() - j.rowwise().sum();
    double log_w = model.log_weight(s);
    std::uint64_t index = 0;
    visit(index, std::span<const std::int8_t>(s), log_w);

    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const auto b = static_cast<Eigen::Index>(std::countr_zero(k));
        const double old = s[static_cast<std::size_t>(b)];
        log_w -= 2.0 * old * field(b);
        field.noalias() -= (2.0 * old) * j.col(b);
        s[static_cast<std::size_t>(b)] = static_cast<std::int8_t>(-old);
        index ^= std::uint64_t{1} << b;
        visit(index, std::span<const std::int8_t>(s), log_w);
    }
}

/// Running log-sum-exp with optional weighted average of a scalar.
struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double weighted = 0.0;  // sum of w * value under the same shift

    void add(double log_w, double value = 0.0) {
        if (log_w > max) {
            const double scale = std::isinf(max) ? 0.0 : std::exp(max - log_w);
            sum *= scale;
            weighted *= scale;
            max = log_w;
        }
        const double w = std::exp(log_w - max);
        sum += w;
        weighted += w * value;
    }
    double log_total() const { return max + std::log(sum); }
    double mean() const { return weighted / sum; }
};

double max_log_weight(const IsingModel& model) {
    double best = -std::numeric_limits<double>::infinity();
    enumerate_gray(model, [&](std::uint64_t, std::span<const std::int8_t>, double lw) { best = std::max(best, lw); });
    return best;
}

/// Weighted first and second moments of a feature map over all configurations.
struct FeatureMoments {
    double log_z = 0.0;
    Vector mean;
    Matrix second;  // E[phi phi^T], empty unless requested
};

template <class Features>
FeatureMoments feature_moments(const IsingModel& model, Eigen::Index dim, bool with_second, Features&& features) {
    constexpr Eigen::Index kBatch = 512;
    const double shift = max_log_weight(model);

    Matrix batch(kBatch, dim);
    Eigen::Index filled = 0;
    Vector first = Vector::Zero(dim);
    Matrix second = with_second ? Matrix::Zero(dim, dim) : Matrix();
    double total = 0.0;

    const auto flush = [&] {
        if (filled == 0) return;
        if (with_second) {
            second.selfadjointView<Eigen::Lower>().rankUpdate(batch.topRows(filled).transpose());
        }
        filled = 0;
    };

    Vector phi(dim);
    enumerate_gray(model, [&](std::uint64_t, std::span<const std::int8_t> s, double lw) {
        const double w = std::exp(lw - shift);
        total += w;
        features(s, phi);
        first.noalias() += w * phi;
        if (with_second) {
            batch.row(filled) = std::sqrt(w) * phi.transpose();
            if (++filled == kBatch) flush();
        }
    });
    flush();

    FeatureMoments out;
    out.log_z = shift + std::log(total);
    out.mean = first / total;
    if (with_second) {
        out.second = Matrix(second.selfadjointView<Eigen::Lower>()) / total;
    }
    return out;
}

// Parameter vector layout: theta = (h_0..h_{N-1}, J_01, J_02, ..., J_{N-2,N-1}).
Eigen::Index parameter_count(std::size_t n) { return static_cast<Eigen::Index>(n + n * (n - 1) / 2); }

void fill_statistics(std::span<const std::int8_t> s, Vector& phi) {
    const std::size_t n = s.size();
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < n; ++i) phi(k++) = s[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) phi(k++) = s[i] * s[j];
    }
}

Vector target_statistics(const MomentSet& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Vector mu(parameter_count(m.size()));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) mu(k++) = m.q(i);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) mu(k++) = m.Q(i, j);
    }
    return mu;
}

IsingModel model_from_parameters(const Vector& theta, std::size_t n) {
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix j = Matrix::Zero(nn, nn);
    Eigen::Index k = nn;
    for (Eigen::Index a = 0; a < nn; ++a) {
        for (Eigen::Index b = a + 1; b < nn; ++b) {
            j(a, b) = theta(k);
            j(b, a) = theta(k);
            ++k;
        }
    }
    return IsingModel(std::move(j), theta.head(nn));
}

void check_interior(const MomentSet& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(std::abs(t.q(i)) < 1.0)) {
            throw BoundaryError("target q_" + std::to_string(i) + " = " + std::to_string(t.q(i)) +
                                " lies on the boundary; the conjugate field diverges");
        }
    }
    // Every joint pair state must have positive probability, else J_ij diverges.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            for (int a : {-1, 1}) {
                for (int b : {-1, 1}) {
                    const double p = 0.25 * (1.0 + a * t.q(i) + b * t.q(j) + a * b * t.Q(i, j));
                    if (!(p > 1e-14)) {
                        throw BoundaryError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                            ") never takes one of its four joint states; the coupling diverges");
                    }
                }
            }
        }
    }
}

std::vector<std::uint32_t> configuration_counts(const SpinMatrix& m) {
    std::vector<std::uint32_t> counts(std::size_t{1} << m.cols(), 0);
    for (std::size_t t = 0; t < m.rows(); ++t) {
        std::size_t index = 0;
        const auto row = m.row(t);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] > 0) index |= std::size_t{1} << i;
        }
        ++counts[index];
    }
    return counts;
}

}  // namespace

double log_partition(const IsingModel& model) {
    require_enumerable(model.size(), kMaxEnumerationSpins, "log_partition");
    LogSumExp acc;
    enumerate_gray(model, [&](std::uint64_t, std::span<const std::int8_t>, double lw) { acc.add(lw); });
    return acc.log_total();
}

std::vector<double> gibbs_probabilities(const IsingModel& model) {
    require_enumerable(model.size(), kMaxFitSpins, "gibbs_probabilities");
    std::vector<double> p(std::size_t{1} << model.size());
    double best = -std::numeric_limits<double>::infinity();
    enumerate_gray(model, [&](std::uint64_t index, std::span<const std::int8_t>, double lw) {
        p[index] = lw;
        best = std::max(best, lw);
    });
    double total = 0.0;
    for (double& v : p) {
        v = std::exp(v - best);
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

MomentSet exact_moments(const IsingModel& model) {
    require_enumerable(model.size(), kMaxEnumerationSpins, "exact_moments");
    const auto n = static_cast<Eigen::Index>(model.size());
    auto fm = feature_moments(model, n, true, [](std::span<const std::int8_t> s, Vector& phi) {
        for (std::size_t i = 0; i < s.size(); ++i) phi(static_cast<Eigen::Index>(i)) = s[i];
    });
    return MomentSet::from_pair_moments(std::move(fm.mean), std::move(fm.second), std::nullopt);
}

double entropy_exact(const IsingModel& model) {
    require_enumerable(model.size(), kMaxEnumerationSpins, "entropy_exact");
    // -sum p ln p with p = e^{L}/Z equals ln Z - <L> = ln Z + <H>.
    LogSumExp acc;
    enumerate_gray(model, [&](std::uint64_t, std::span<const std::int8_t>, double lw) { acc.add(lw, lw); });
    return acc.log_total() - acc.mean();
}

double entropy_independent(const Vector& q) {
    double s = 0.0;
    for (double qi : q) {
        if (!(std::abs(qi) <= 1.0)) {
            throw DomainError("mean orientation outside [-1, 1]: " + std::to_string(qi));
        }
        for (double p : {0.5 * (1.0 + qi), 0.5 * (1.0 - qi)}) {
            if (p > 0.0) s -= p * std::log(p);
        }
    }
    return s;
}

double entropy_empirical(const SpinMatrix& m) {
    require_enumerable(m.cols(), kMaxFitSpins, "entropy_empirical");
    const double total = static_cast<double>(m.rows());
    double s = 0.0;
    for (auto c : configuration_counts(m)) {
        if (c == 0) continue;
        const double p = c / total;
        s -= p * std::log(p);
    }
    return s;
}

FitReport fit_maxent_exact(const MomentSet& targets, const ExactFitOptions& options) {
    const std::size_t n = targets.size();
    require_enumerable(n, kMaxFitSpins, "fit_maxent_exact");
    if (n == 0) throw DomainError("fit_maxent_exact needs at least one spin");
    if (!(options.tol > 0.0)) throw DomainError("fit tolerance must be positive");
    check_interior(targets);

    const Eigen::Index dim = parameter_count(n);
    const Vector mu_target = target_statistics(targets);

    Vector theta = Vector::Zero(dim);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) theta(i) = std::atanh(targets.q(i));

    const bool newton = options.algorithm == ExactFitAlgorithm::Newton;
    const double ascent_step = 0.1 / static_cast<double>(n);

    FitReport best{IsingModel::zeros(n), FitMethod::Exact, 0, std::numeric_limits<double>::infinity(), {}};
    const auto objective = [&](const Vector& th) {
        return th.dot(mu_target) - log_partition(model_from_parameters(th, n));
    };

    for (std::size_t iter = 0; iter <= options.max_iter; ++iter) {
        IsingModel model = model_from_parameters(theta, n);
        auto fm = feature_moments(model, dim, newton, fill_statistics);
        const Vector grad = mu_target - fm.mean;
        const double residual = grad.cwiseAbs().maxCoeff();
        if (residual < *best.residual) {
            best.model = model;
            best.iterations = iter;
            best.residual = residual;
        }
        if (residual <= options.tol) {
            return FitReport{std::move(model), FitMethod::Exact, iter, residual, {}};
        }
        if (iter == options.max_iter) break;

        if (!newton) {
            theta += ascent_step * grad;
            continue;
        }

        // Fisher information = covariance of the sufficient statistics.
        Matrix fisher = fm.second - fm.mean * fm.mean.transpose();
        Vector step;
        double damping = 0.0;
        for (int attempt = 0; attempt < 20; ++attempt) {
            Matrix a = fisher;
            a.diagonal().array() += damping;
            Eigen::LLT<Matrix> llt(a);
            if (llt.info() == Eigen::Success) {
                step = llt.solve(grad);
                if (step.allFinite()) break;
            }
            damping = damping == 0.0 ? 1e-12 * (1.0 + fisher.diagonal().maxCoeff()) : damping * 10.0;
        }
        if (step.size() == 0 || !step.allFinite()) {
            step = grad;
        }

        const double base = theta.dot(mu_target) - fm.log_z;
        const double slope = grad.dot(step);
        const double slack = 1e-12 * (1.0 + std::abs(base));
        double t = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
            const Vector candidate = theta + t * step;
            if (objective(candidate) >= base + 1e-4 * t * slope - slack) break;
            t *= 0.5;
        }
        theta += t * step;
    }

    throw ConvergenceError("exact fit did not reach tolerance " + std::to_string(options.tol) + " in " +
                               std::to_string(options.max_iter) + " iterations (best residual " +
                               std::to_string(*best.residual) + ")",
                           std::move(best));
}

EntropyReport multi_information_ratio(const SpinMatrix& m, double tol, const ExactFitOptions& fit) {
    require_enumerable(m.cols(), kMaxFitSpins, "multi_information_ratio");
    const auto moments = empirical_moments(m);

    EntropyReport r;
    r.n = m.cols();
    r.t = m.rows();
    r.s1 = entropy_independent(moments.q);
    r.sn = entropy_empirical(m);
    r.in = r.s1 - r.sn;
    if (!(r.in > tol)) {
        throw DegenerateRatioError("multi-information I_N = " + std::to_string(r.in) + " is not above tolerance " +
                                   std::to_string(tol) + "; the ratio I2/IN is undefined");
    }

    const auto report = fit_maxent_exact(moments, fit);
    r.s2 = entropy_exact(report.model);
    r.fit_iterations = report.iterations;
    r.fit_residual = report.residual.value_or(0.0);
    r.i2 = r.s1 - r.s2;
    r.ratio = r.i2 / r.in;

    const double configurations = std::ldexp(1.0, static_cast<int>(r.n));
    r.small_sample = static_cast<double>(r.t) < 10.0 * configurations;
    if (r.small_sample) {
        r.warnings.push_back("T < 10 * 2^N: plug-in entropy S_N is biased low");
    }
    // Plug-in bias of S_N is roughly (occupied states - 1) / (2T).
    const auto counts = configuration_counts(m);
    const auto occupied = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    const double bias = (static_cast<double>(occupied) - 1.0) / (2.0 * static_cast<double>(r.t));
    if (r.in < 2.0 * bias) {
        r.warnings.push_back("I_N is within twice the plug-in bias estimate (" + std::to_string(bias) +
                             " nats); the ratio is unreliable");
    }
    return r;
}

}  // namespace isingfin
