#pragma once

#include <cstddef>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/ising_model.hpp"
#include "isingfin/moments.hpp"

namespace isingfin {

struct InversionOptions {
    /// Added to the diagonal of C before inverting.
    double ridge_epsilon = 0.0;
    /// Condition numbers at or above this count as singular.
    double max_condition = 1e12;
    /// Escalate the negative-discriminant warning to an error (TAP only).
    bool strict = false;
    /// Fraction of clamped pairs that triggers the reliability warning.
    double clamp_warning_fraction = 0.2;
};

/// Naive mean-field inversion: J_ij = -(C^-1)_ij, h_i = atanh(q_i) - sum_j J_ij q_j.
/// @throws SingularMatrixError, BoundaryError
FitReport nmf_invert(const MomentSet& moments, const InversionOptions& options = {});

/**
 * @brief Second-order (TAP) inversion.
 *
 * Each pair solves  (C^-1)_ij = -J_ij - J_ij^2 q_i q_j  on the root that
 * tends to the naive value -(C^-1)_ij as q_i q_j -> 0, written in the
 * cancellation-free form  J = -2 c / (1 + sqrt(1 - 4 q_i q_j c)). A negative
 * discriminant is clamped to zero and counted. Fields come from the TAP
 * self-consistency equation solved for h.
 *
 * @throws SingularMatrixError, BoundaryError, ReliabilityError (strict only)
 */
FitReport tap_invert(const MomentSet& moments, const InversionOptions& options = {});

/// The TAP pair root for one entry c = (C^-1)_ij and product a = q_i q_j.
/// Sets *clamped when the discriminant was negative.
double tap_pair_coupling(double c, double a, bool* clamped = nullptr);

struct PlmOptions {
    double ridge = 1e-3;
    double gradient_tol = 1e-6;
    std::size_t max_iter = 200;
    /// With ridge = 0, parameters beyond this magnitude signal separability.
    double divergence_bound = 50.0;
};

/// One spin's regularized logistic regression.
struct SpinRegression {
    Vector theta;  ///< (h_i, J_i0, ..., J_i(N-1)) with J_ii omitted
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
};

/**
 * @brief Maximize the conditional log-likelihood of spin i.
 *
 * Objective: (1/T) sum_t ln sigma(2 s_i(t) (h_i + sum_j J_ij s_j(t)))
 *            - ridge (h_i^2 + sum_j J_ij^2).
 * Newton steps with backtracking, so objective_trace is non-decreasing.
 *
 * @throws DivergenceError when ridge = 0 and the spin is separable
 */
SpinRegression plm_fit_spin(const SpinMatrix& m, std::size_t spin, const PlmOptions& options = {});

/// Pseudo-likelihood fit; J_ij and J_ji estimates are averaged.
FitReport plm_fit(const SpinMatrix& m, const PlmOptions& options = {});

}  // namespace isingfin
