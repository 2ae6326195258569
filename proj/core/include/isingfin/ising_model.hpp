#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "isingfin/errors.hpp"

namespace isingfin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * @brief Pairwise maximum-entropy model over N binary spins.
 *
 * The Gibbs weight of a configuration s is
 *
 *     exp( (1/2) sum_{i,j} J_ij s_i s_j + sum_i h_i s_i )
 *
 * where the double sum runs over both orderings, so each unordered pair
 * (i, j) contributes J_ij s_i s_j once. Every module in the library uses
 * this convention through log_weight()/energy().
 *
 * Invariants, enforced on construction: J is square, exactly symmetric, has
 * an exactly zero diagonal, and every entry of J and h is finite.
 */
class IsingModel {
public:
    IsingModel(Matrix couplings, Vector fields);

    /// Independent spins with the given fields.
    static IsingModel independent(Vector fields);
    /// All-zero model on n spins.
    static IsingModel zeros(std::size_t n);

    std::size_t size() const noexcept { return static_cast<std::size_t>(h_.size()); }
    const Matrix& couplings() const noexcept { return j_; }
    const Vector& fields() const noexcept { return h_; }

    /// (1/2) s^T J s + h^T s for a +-1 configuration.
    double log_weight(std::span<const std::int8_t> spins) const;
    /// H(s) = -log_weight(s). Its negation is the utility U(s).
    double energy(std::span<const std::int8_t> spins) const { return -log_weight(spins); }

    /// Couplings of the upper triangle (i < j), row by row.
    std::vector<double> upper_couplings() const;

    /// Relabel spins: new spin k is old spin perm[k].
    IsingModel permuted(std::span<const std::size_t> perm) const;

private:
    Matrix j_;
    Vector h_;
};

enum class FitMethod { Exact, NaiveMeanField, TapInversion, PseudoLikelihood };

std::string_view to_string(FitMethod method);
/// Accepts the CLI tags exact | nmf | tap-inv | plm.
FitMethod parse_fit_method(std::string_view tag);

/// A fitted model plus convergence metadata.
struct FitReport {
    IsingModel model;
    FitMethod method = FitMethod::Exact;
    std::size_t iterations = 0;
    /// Max-abs moment mismatch; empty when the method cannot compute it.
    std::optional<double> residual;
    std::vector<std::string> warnings;
};

/// Iterative fit stopped at max_iter. Carries the best iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, FitReport best)
        : Error(what), best_(std::move(best)) {}
    const FitReport& best() const noexcept { return best_; }

private:
    FitReport best_;
};

/// Symmetrize (A + A^T)/2 and zero the diagonal.
Matrix symmetrized_couplings(const Matrix& a);

}  // namespace isingfin
