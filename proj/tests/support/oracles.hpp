#pragma once

// Reference implementations used only by tests. They share no code with the
// library: enumeration here is a plain loop over bit patterns with the energy
// written out pair by pair.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "isingfin/ingest.hpp"
#include "isingfin/ising_model.hpp"

namespace isingfin::oracle {

struct BruteForce {
    double log_z = 0.0;
    Vector mean;
    Matrix pair;  ///< <s_i s_j>, unit diagonal
    std::vector<double> probs;  ///< index bit i set <=> s_i = +1
    double entropy = 0.0;
};

BruteForce brute_force(const Matrix& j, const Vector& h);
inline BruteForce brute_force(const IsingModel& m) { return brute_force(m.couplings(), m.fields()); }

/// Symmetric zero-diagonal couplings with entries N(mean, sd^2).
Matrix gaussian_couplings(std::size_t n, double mean, double sd, std::mt19937_64& rng);
/// Fields uniform on [lo, hi].
Vector uniform_fields(std::size_t n, double lo, double hi, std::mt19937_64& rng);

/// Couplings N(mean, sd^2), fields U(lo, hi), all drawn from one seed.
IsingModel planted_model(std::size_t n, double j_mean, double j_sd, double h_lo, double h_hi, std::uint64_t seed);

double pearson(std::span<const double> a, std::span<const double> b);
double rms_difference(std::span<const double> a, std::span<const double> b);
double max_abs(const Matrix& a);

SpinMatrix spins(const std::vector<std::vector<int>>& rows);

/// Independent fair coins, T x N.
SpinMatrix fair_coins(std::size_t t, std::size_t n, std::uint64_t seed);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace isingfin::oracle
