#pragma once

#include <cstddef>
#include <optional>

#include "isingfin/ising_model.hpp"

namespace isingfin {

struct TapSolution {
    Vector m;
    std::size_t iterations = 0;
    bool converged = false;
    /// Final max-abs update.
    double last_update = 0.0;
    double x_stability = 0.0;
    Vector variances;        ///< 1 - m_i^2
    Vector third_cumulants;  ///< 2 (m_i^3 - m_i)
};

struct TapOptions {
    std::optional<Vector> init;  ///< defaults to tanh(h)
    double damping = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
};

/**
 * Damped iteration of
 *
 *   m_i = tanh(h_i + sum_j J_ij m_j - m_i sum_j J_ij^2 (1 - m_j^2)).
 *
 * Non-convergence is reported through TapSolution::converged and the
 * iterate with the smallest residual is returned.
 *
 * @throws DomainError for damping outside (0, 1]
 * @throws DivergenceError if an iterate becomes non-finite
 */
TapSolution tap_fixed_point(const IsingModel& model, const TapOptions& options = {});

/// x = 1 - (1 - 2 Q2 + Q4), Q_v = mean of q_i^v. Valid domain is x > 0.
double stability_x(const Vector& q);

}  // namespace isingfin
