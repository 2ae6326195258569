#include "isingfin/tap.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "isingfin/errors.hpp"

namespace isingfin {

namespace {

// tanh of the TAP local field, including the Onsager reaction term.
Vector tap_map(const Matrix& j, const Matrix& j2, const Vector& h, const Vector& m) {
    const Vector one_minus_m2 = (1.0 - m.array().square()).matrix();
    const Vector field = h + j * m - m.cwiseProduct(j2 * one_minus_m2);
    return field.array().tanh().matrix();
}

}  // namespace

TapSolution tap_fixed_point(const IsingModel& model, const TapOptions& options) {
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw DomainError("damping must lie in (0, 1], got " + std::to_string(options.damping));
    }
    const Matrix& j = model.couplings();
    const Vector& h = model.fields();
    const Matrix j2 = j.cwiseAbs2();

    Vector m = options.init ? *options.init : Vector(h.array().tanh().matrix());
    if (m.size() != h.size()) {
        throw DomainError("initial magnetization has the wrong length");
    }

    Vector best = m;
    double best_residual = std::numeric_limits<double>::infinity();
    TapSolution sol;
    const double d = options.damping;

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        const Vector target = tap_map(j, j2, h, m);
        if (!target.allFinite()) {
            throw DivergenceError("TAP iteration produced a non-finite value at iteration " + std::to_string(iter));
        }
        const double residual = (target - m).cwiseAbs().maxCoeff();
        if (residual < best_residual) {
            best_residual = residual;
            best = m;
        }
        const Vector next = (1.0 - d) * m + d * target;
        const double update = (next - m).cwiseAbs().maxCoeff();
        m = next;
        sol.iterations = iter;
        sol.last_update = update;
        if (update < options.tol) {
            sol.converged = true;
            break;
        }
    }
    if (!sol.converged) {
        const double final_residual = (tap_map(j, j2, h, m) - m).cwiseAbs().maxCoeff();
        if (final_residual > best_residual) m = best;
    }

    sol.m = std::move(m);
    sol.x_stability = stability_x(sol.m);
    sol.variances = (1.0 - sol.m.array().square()).matrix();
    sol.third_cumulants = (2.0 * (sol.m.array().cube() - sol.m.array())).matrix();
    return sol;
}

double stability_x(const Vector& q) {
    const double n = static_cast<double>(q.size());
    const double q2 = q.array().square().sum() / n;
    const double q4 = q.array().square().square().sum() / n;
    return 1.0 - (1.0 - 2.0 * q2 + q4);
}

}  // namespace isingfin
