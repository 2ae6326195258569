#include "isingfin/moments.hpp"

#include <algorithm>
#include <cmath>

#include "isingfin/errors.hpp"

namespace isingfin {

MomentSet MomentSet::from_pair_moments(Vector q, Matrix Q, std::optional<std::size_t> sample_size) {
    if (Q.rows() != q.size() || Q.cols() != q.size()) {
        throw DomainError("pair-moment matrix shape does not match mean vector");
    }
    Q.diagonal().setOnes();
    Matrix C = Q - q * q.transpose();
    return MomentSet{std::move(q), std::move(Q), std::move(C), sample_size};
}

MomentSet empirical_moments(const SpinMatrix& m) {
    if (m.rows() < 2) {
        throw InsufficientSampleError("moments need at least 2 rows, got " + std::to_string(m.rows()));
    }
    const Matrix x = m.as_double();
    const auto n = x.cols();
    const double t = static_cast<double>(m.rows());

    // Entries are +-1, so every sum below is an exactly representable integer
    // and the result does not depend on row order.
    Matrix sums = Matrix::Zero(n, n);
    sums.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    Matrix Q = sums.selfadjointView<Eigen::Lower>();
    Q /= t;
    Vector q = x.colwise().sum().transpose() / t;
    return MomentSet::from_pair_moments(std::move(q), std::move(Q), m.rows());
}

std::pair<double, double> marchenko_pastur_bounds(std::size_t n, std::size_t t) {
    const double r = std::sqrt(static_cast<double>(n) / static_cast<double>(t));
    return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

std::size_t Spectrum::outside_band() const {
    return static_cast<std::size_t>(
        std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double e) { return e < mp_lower || e > mp_upper; }));
}

Matrix correlation_matrix(const MomentSet& moments, const std::vector<std::string>& tickers) {
    const auto n = static_cast<Eigen::Index>(moments.size());
    Vector scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double var = moments.C(i, i);
        if (!(var > 0.0)) {
            const std::string name = static_cast<std::size_t>(i) < tickers.size()
                                         ? tickers[static_cast<std::size_t>(i)]
                                         : "column " + std::to_string(i);
            throw DegenerateColumnError(name, "column '" + name + "' is constant (zero variance); drop the ticker");
        }
        scale(i) = 1.0 / std::sqrt(var);
    }
    Matrix corr = scale.asDiagonal() * moments.C * scale.asDiagonal();
    corr = 0.5 * (corr + corr.transpose());
    corr.diagonal().setOnes();
    return corr;
}

namespace {

Spectrum spectrum_of(const Matrix& a, MatrixKind kind, std::size_t n, std::size_t t) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw DomainError("eigendecomposition failed");
    }
    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    s.kind = kind;
    s.n = n;
    s.t = t;
    std::tie(s.mp_lower, s.mp_upper) = marchenko_pastur_bounds(n, t);
    if (t <= n) {
        s.warnings.push_back("T = " + std::to_string(t) + " does not exceed N = " + std::to_string(n) +
                             "; the matrix is rank deficient");
    }
    return s;
}

}  // namespace

Spectrum correlation_spectrum(const SpinMatrix& m) {
    const auto moments = empirical_moments(m);
    return spectrum_of(correlation_matrix(moments, m.tickers()), MatrixKind::Correlation, m.cols(), m.rows());
}

Spectrum covariance_spectrum(const MomentSet& moments) {
    if (!moments.sample_size) {
        throw DomainError("covariance spectrum needs sampled moments (sample size unknown)");
    }
    return spectrum_of(moments.C, MatrixKind::Covariance, moments.size(), *moments.sample_size);
}

std::vector<HistogramBin> eigenvalue_histogram(const Spectrum& spectrum, std::size_t bins) {
    if (bins == 0) {
        throw DomainError("histogram needs at least one bin");
    }
    const auto& ev = spectrum.eigenvalues;
    double lo = ev.minCoeff();
    double hi = ev.maxCoeff();
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double e : ev) {
        auto k = static_cast<std::size_t>((e - lo) / width);
        counts[std::min(k, bins - 1)]++;
    }
    std::vector<HistogramBin> out(bins);
    const double total = static_cast<double>(ev.size());
    for (std::size_t k = 0; k < bins; ++k) {
        out[k].left = lo + width * static_cast<double>(k);
        out[k].right = k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1);
        out[k].density = static_cast<double>(counts[k]) / (total * width);
    }
    return out;
}

}  // namespace isingfin
