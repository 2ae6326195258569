#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/ising_model.hpp"

namespace isingfin {

/// First and second moments of +-1 variables.
struct MomentSet {
    Vector q;  ///< mean orientations
    Matrix Q;  ///< pair moments, unit diagonal
    Matrix C;  ///< connected correlations Q - q q^T
    /// Number of rows averaged; empty for exact (model) moments.
    std::optional<std::size_t> sample_size;

    std::size_t size() const noexcept { return static_cast<std::size_t>(q.size()); }
    bool exact() const noexcept { return !sample_size.has_value(); }

    /// Build from q and Q; C is derived and the diagonal of Q forced to 1.
    static MomentSet from_pair_moments(Vector q, Matrix Q, std::optional<std::size_t> sample_size);
};

/// @throws InsufficientSampleError when T < 2
MomentSet empirical_moments(const SpinMatrix& m);

enum class MatrixKind { Correlation, Covariance };

struct Spectrum {
    Vector eigenvalues;  ///< ascending
    MatrixKind kind = MatrixKind::Correlation;
    std::size_t n = 0;
    std::size_t t = 0;
    double mp_lower = 0.0;
    double mp_upper = 0.0;
    std::vector<std::string> warnings;

    /// Largest eigenvalue, the market-mode candidate.
    double top() const { return eigenvalues(eigenvalues.size() - 1); }
    /// Count of eigenvalues outside [mp_lower, mp_upper].
    std::size_t outside_band() const;
};

/// Marchenko-Pastur support (1 -+ sqrt(n/t))^2 for unit-variance noise.
std::pair<double, double> marchenko_pastur_bounds(std::size_t n, std::size_t t);

/// Pearson correlation C_ij / sqrt(C_ii C_jj).
/// @throws DegenerateColumnError naming the first constant column
Matrix correlation_matrix(const MomentSet& moments, const std::vector<std::string>& tickers);

/// Spectrum of the Pearson correlation matrix of the columns. Warns (in
/// Spectrum::warnings) when T <= N.
Spectrum correlation_spectrum(const SpinMatrix& m);
/// Spectrum of the connected-correlation (covariance) matrix.
Spectrum covariance_spectrum(const MomentSet& moments);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    double density = 0.0;
};

/// Density-normalized histogram over [min, max] of the eigenvalues.
std::vector<HistogramBin> eigenvalue_histogram(const Spectrum& spectrum, std::size_t bins = 50);

}  // namespace isingfin
