#include "isingfin/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isingfin/errors.hpp"

namespace isingfin {

namespace {

void check_magnetizations(const MomentSet& m) {
    for (Eigen::Index i = 0; i < m.q.size(); ++i) {
        if (!(std::abs(m.q(i)) < 1.0)) {
            throw BoundaryError("|q_" + std::to_string(i) + "| = 1: spin is frozen and its field diverges");
        }
    }
}

Matrix inverse_covariance(const MomentSet& m, const InversionOptions& options) {
    if (options.ridge_epsilon < 0.0) {
        throw DomainError("ridge epsilon must be non-negative");
    }
    Matrix c = m.C;
    c.diagonal().array() += options.ridge_epsilon;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
    if (solver.info() != Eigen::Success) {
        throw SingularMatrixError("eigendecomposition of the correlation matrix failed");
    }
    const Vector& ev = solver.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (!(lo > 0.0) || hi / lo >= options.max_condition) {
        throw SingularMatrixError("connected-correlation matrix is singular or ill-conditioned (eigenvalues " +
                                  std::to_string(lo) + " .. " + std::to_string(hi) +
                                  "); add a ridge epsilon to its diagonal");
    }
    const Matrix& v = solver.eigenvectors();
    Matrix inv = v * ev.cwiseInverse().asDiagonal() * v.transpose();
    return 0.5 * (inv + inv.transpose());
}

Vector nmf_fields(const MomentSet& m, const Matrix& j) {
    Vector h = m.q.array().atanh().matrix() - j * m.q;
    return h;
}

double log_sigmoid(double u) { return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u)); }

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

}  // namespace

FitReport nmf_invert(const MomentSet& moments, const InversionOptions& options) {
    check_magnetizations(moments);
    const Matrix inv = inverse_covariance(moments, options);
    Matrix j = -inv;
    j.diagonal().setZero();
    Vector h = nmf_fields(moments, j);
    FitReport report{IsingModel(std::move(j), std::move(h)), FitMethod::NaiveMeanField, 1, std::nullopt, {}};
    if (options.ridge_epsilon > 0.0) {
        report.warnings.push_back("ridge epsilon " + std::to_string(options.ridge_epsilon) + " added to C");
    }
    return report;
}

double tap_pair_coupling(double c, double a, bool* clamped) {
    // Root of a J^2 + J + c = 0 continuous with J = -c at a = 0. The
    // rationalized form avoids the 0/0 of (-1 + sqrt(D)) / (2a).
    const double disc = 1.0 - 4.0 * a * c;
    const bool negative = disc < 0.0;
    if (clamped) *clamped = negative;
    // Real part of the complex root.
    if (negative) return -1.0 / (2.0 * a);
    return -2.0 * c / (1.0 + std::sqrt(disc));
}

FitReport tap_invert(const MomentSet& moments, const InversionOptions& options) {
    check_magnetizations(moments);
    const Matrix inv = inverse_covariance(moments, options);
    const auto n = inv.rows();
    const Vector& q = moments.q;

    Matrix j = Matrix::Zero(n, n);
    std::size_t clamped = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            bool hit = false;
            const double value = tap_pair_coupling(inv(a, b), q(a) * q(b), &hit);
            j(a, b) = value;
            j(b, a) = value;
            clamped += hit ? 1 : 0;
        }
    }

    // h_i = atanh(q_i) - sum_j J_ij q_j + q_i sum_j J_ij^2 (1 - q_j^2)
    const Vector one_minus_q2 = (1.0 - q.array().square()).matrix();
    Vector h = q.array().atanh().matrix() - j * q + q.cwiseProduct(j.cwiseAbs2() * one_minus_q2);

    FitReport report{IsingModel(std::move(j), std::move(h)), FitMethod::TapInversion, 1, std::nullopt, {}};
    const double pairs = static_cast<double>(n * (n - 1) / 2);
    if (clamped > 0) {
        const double fraction = static_cast<double>(clamped) / pairs;
        report.warnings.push_back("clamped negative discriminant on " + std::to_string(clamped) + " of " +
                                  std::to_string(static_cast<long long>(pairs)) + " pairs");
        if (fraction > options.clamp_warning_fraction) {
            const std::string msg = "clamped fraction " + std::to_string(fraction) + " exceeds " +
                                    std::to_string(options.clamp_warning_fraction) + "; TAP inversion is unreliable";
            if (options.strict) throw ReliabilityError(msg);
            report.warnings.push_back(msg);
        }
    }
    if (options.ridge_epsilon > 0.0) {
        report.warnings.push_back("ridge epsilon " + std::to_string(options.ridge_epsilon) + " added to C");
    }
    return report;
}

SpinRegression plm_fit_spin(const SpinMatrix& m, std::size_t spin, const PlmOptions& options) {
    const std::size_t n = m.cols();
    const std::size_t t_count = m.rows();
    if (t_count < 2) throw InsufficientSampleError("pseudo-likelihood needs at least 2 rows");
    if (spin >= n) throw DomainError("spin index out of range");
    if (!(options.ridge >= 0.0)) throw DomainError("ridge must be non-negative");

    const auto rows = static_cast<Eigen::Index>(t_count);
    const auto dim = static_cast<Eigen::Index>(n);
    // Column 0 carries the field, the rest the other spins, each multiplied
    // by 2 s_i so that the margin is simply X theta.
    Matrix x(rows, dim);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const double yi = 2.0 * m(static_cast<std::size_t>(t), spin);
        x(t, 0) = yi;
        Eigen::Index k = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == spin) continue;
            x(t, k++) = yi * m(static_cast<std::size_t>(t), j);
        }
    }

    const double inv_t = 1.0 / static_cast<double>(t_count);
    const double ridge = options.ridge;
    const auto objective = [&](const Vector& theta) {
        const Vector u = x * theta;
        double sum = 0.0;
        for (Eigen::Index t = 0; t < rows; ++t) sum += log_sigmoid(u(t));
        return sum * inv_t - ridge * theta.squaredNorm();
    };

    SpinRegression out;
    out.theta = Vector::Zero(dim);
    double f = objective(out.theta);
    out.objective_trace.push_back(f);

    const auto separable = [&] {
        return DivergenceError("spin " + std::to_string(spin) + " (" + m.tickers()[spin] +
                               ") is perfectly predictable from the others and its parameters diverge; "
                               "use ridge > 0");
    };

    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        const Vector u = x * out.theta;
        Vector resid(rows);
        Vector curv(rows);
        for (Eigen::Index t = 0; t < rows; ++t) {
            const double sneg = sigmoid(-u(t));
            resid(t) = sneg;
            curv(t) = sneg * (1.0 - sneg);
        }
        const Vector grad = inv_t * (x.transpose() * resid) - 2.0 * ridge * out.theta;
        out.gradient_norm = grad.cwiseAbs().maxCoeff();
        out.iterations = iter;
        if (out.gradient_norm < options.gradient_tol) return out;

        Matrix hess = Matrix::Zero(dim, dim);
        hess.selfadjointView<Eigen::Lower>().rankUpdate((x.array().colwise() * curv.array().sqrt()).matrix().transpose(),
                                                        inv_t);
        hess = Matrix(hess.selfadjointView<Eigen::Lower>());
        hess.diagonal().array() += 2.0 * ridge;
        Eigen::LLT<Matrix> llt(hess);
        Vector step = llt.info() == Eigen::Success ? Vector(llt.solve(grad)) : Vector();
        if (step.size() == 0 || !step.allFinite()) {
            if (ridge == 0.0) throw separable();
            step = grad;
        }

        double s = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 50; ++halving) {
            const Vector candidate = out.theta + s * step;
            const double fc = objective(candidate);
            if (fc >= f) {
                out.theta = candidate;
                f = fc;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // No ascent direction survives rounding: stationary to machine precision.
            out.iterations = iter + 1;
            return out;
        }
        out.objective_trace.push_back(f);
        if (ridge == 0.0 && out.theta.cwiseAbs().maxCoeff() > options.divergence_bound) {
            throw separable();
        }
    }
    if (ridge == 0.0) throw separable();
    throw DivergenceError("pseudo-likelihood for spin " + std::to_string(spin) + " did not converge in " +
                          std::to_string(options.max_iter) + " Newton steps (gradient " +
                          std::to_string(out.gradient_norm) + ")");
}

FitReport plm_fit(const SpinMatrix& m, const PlmOptions& options) {
    const std::size_t n = m.cols();
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix raw = Matrix::Zero(nn, nn);
    Vector h(nn);
    std::size_t iterations = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto fit = plm_fit_spin(m, i, options);
        const auto row = static_cast<Eigen::Index>(i);
        h(row) = fit.theta(0);
        Eigen::Index k = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            raw(row, static_cast<Eigen::Index>(j)) = fit.theta(k++);
        }
        iterations = std::max(iterations, fit.iterations);
    }
    return FitReport{IsingModel(symmetrized_couplings(raw), std::move(h)), FitMethod::PseudoLikelihood, iterations,
                     std::nullopt, {}};
}

}  // namespace isingfin
