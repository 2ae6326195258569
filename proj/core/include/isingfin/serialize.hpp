#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isingfin/exact.hpp"
#include "isingfin/ising_model.hpp"
#include "isingfin/moments.hpp"
#include "isingfin/sampler.hpp"
#include "isingfin/stats.hpp"
#include "isingfin/tap.hpp"

// JSON and CSV renderings of the report types. JSON output is pretty-printed
// with two-space indent and shortest round-trip doubles, so identical values
// always produce identical bytes.

namespace isingfin {

inline constexpr int kFormatVersion = 1;

std::string to_json(const IsingModel& model);
std::string to_json(const MomentSet& moments);
std::string to_json(const Spectrum& spectrum);
std::string to_json(const FitReport& report);
std::string to_json(const EntropyReport& report);
std::string to_json(const TapSolution& solution);
std::string to_json(const NoiseReport& report);
std::string to_json(const NormalityReport& report);
std::string to_json(const ScalingFit& fit);
std::string to_json(const BiasTable& table);

/// Accepts a bare model document or any document with a "model" member
/// (e.g. a FitReport). @throws FormatError
IsingModel model_from_json(std::string_view text);
/// @throws FormatError
MomentSet moments_from_json(std::string_view text);
/// @throws FormatError
FitReport fit_report_from_json(std::string_view text);

std::string matrix_csv(const Matrix& matrix);
std::string histogram_csv(const std::vector<HistogramBin>& bins);
std::string qq_csv(const QqResult& qq);
std::string bias_csv(const BiasTable& table);
std::string scaling_csv(const ScalingFit& fit, std::string_view mean_label);
/// ticker,empirical,tap columns.
std::string magnetization_csv(const std::vector<std::string>& tickers, const Vector& empirical,
                              const Vector& tap);

/// Two-column "N,mean" file (header required). @throws FormatError
std::pair<std::vector<double>, std::vector<double>> read_scaling_points(std::string_view text);
/// Single column of numbers, optional header. @throws FormatError
std::vector<double> read_values(std::string_view text);

}  // namespace isingfin
