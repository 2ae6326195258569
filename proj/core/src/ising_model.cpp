#include "isingfin/ising_model.hpp"

#include <cmath>
#include <string>

namespace isingfin {

IsingModel::IsingModel(Matrix couplings, Vector fields) : j_(std::move(couplings)), h_(std::move(fields)) {
    if (j_.rows() != j_.cols() || j_.rows() != h_.size()) {
        throw DomainError("coupling matrix is " + std::to_string(j_.rows()) + "x" +
                          std::to_string(j_.cols()) + " but there are " + std::to_string(h_.size()) +
                          " fields");
    }
    if (h_.size() == 0) {
        throw DomainError("model needs at least one spin");
    }
    if (!j_.allFinite() || !h_.allFinite()) {
        throw DomainError("model parameters must be finite");
    }
    for (Eigen::Index i = 0; i < j_.rows(); ++i) {
        if (j_(i, i) != 0.0) {
            throw DomainError("coupling diagonal must be zero (J_" + std::to_string(i) + std::to_string(i) +
                              " = " + std::to_string(j_(i, i)) + ")");
        }
        for (Eigen::Index k = i + 1; k < j_.cols(); ++k) {
            if (j_(i, k) != j_(k, i)) {
                throw DomainError("coupling matrix must be symmetric");
            }
        }
    }
}

IsingModel IsingModel::independent(Vector fields) {
    const auto n = fields.size();
    return IsingModel(Matrix::Zero(n, n), std::move(fields));
}

IsingModel IsingModel::zeros(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return IsingModel(Matrix::Zero(k, k), Vector::Zero(k));
}

double IsingModel::log_weight(std::span<const std::int8_t> spins) const {
    if (spins.size() != size()) {
        throw DomainError("configuration length does not match model size");
    }
    const auto n = static_cast<Eigen::Index>(size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double si = spins[static_cast<std::size_t>(i)];
        double pair = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            pair += j_(i, j) * spins[static_cast<std::size_t>(j)];
        }
        total += si * (pair + h_(i));
    }
    return total;
}

std::vector<double> IsingModel::upper_couplings() const {
    std::vector<double> out;
    const auto n = j_.rows();
    out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out.push_back(j_(i, j));
        }
    }
    return out;
}

IsingModel IsingModel::permuted(std::span<const std::size_t> perm) const {
    const auto n = static_cast<Eigen::Index>(size());
    if (perm.size() != size()) {
        throw DomainError("permutation length does not match model size");
    }
    Matrix j(n, n);
    Vector h(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto pa = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(a)]);
        h(a) = h_(pa);
        for (Eigen::Index b = 0; b < n; ++b) {
            j(a, b) = j_(pa, static_cast<Eigen::Index>(perm[static_cast<std::size_t>(b)]));
        }
    }
    return IsingModel(std::move(j), std::move(h));
}

std::string_view to_string(FitMethod method) {
    switch (method) {
        case FitMethod::Exact: return "exact";
        case FitMethod::NaiveMeanField: return "nmf";
        case FitMethod::TapInversion: return "tap-inv";
        case FitMethod::PseudoLikelihood: return "plm";
    }
    return "unknown";
}

FitMethod parse_fit_method(std::string_view tag) {
    if (tag == "exact") return FitMethod::Exact;
    if (tag == "nmf") return FitMethod::NaiveMeanField;
    if (tag == "tap-inv") return FitMethod::TapInversion;
    if (tag == "plm") return FitMethod::PseudoLikelihood;
    throw ConfigError("unknown inversion method '" + std::string(tag) + "' (expected exact, nmf, tap-inv or plm)");
}

Matrix symmetrized_couplings(const Matrix& a) {
    Matrix out = 0.5 * (a + a.transpose());
    out.diagonal().setZero();
    return out;
}

}  // namespace isingfin
