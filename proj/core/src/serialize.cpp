#include "isingfin/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "isingfin/errors.hpp"

namespace isingfin {

namespace {

using nlohmann::json;

json vec(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json mat(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Vector vec_from(const json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw FormatError(std::string(what) + " holds a non-number");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix mat_from(const json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw FormatError(std::string(what) + " must be square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            const json& x = row[static_cast<std::size_t>(c)];
            if (!x.is_number()) throw FormatError(std::string(what) + " holds a non-number");
            m(r, c) = x.get<double>();
        }
    }
    return m;
}

json model_json(const IsingModel& model) {
    return json{{"N", model.size()}, {"h", vec(model.fields())}, {"J", mat(model.couplings())}};
}

std::string dump(json j) {
    j["format_version"] = kFormatVersion;
    return j.dump(2) + "\n";
}

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

void check_version(const json& doc) {
    if (doc.contains("format_version") && doc["format_version"] != kFormatVersion) {
        throw FormatError("unsupported format_version " + doc["format_version"].dump());
    }
}

std::string num(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string_view kind_name(MatrixKind k) { return k == MatrixKind::Correlation ? "correlation" : "covariance"; }

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

bool parse_number(std::string s, double& out) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) return false;
    s = s.substr(first, last - first + 1);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string to_json(const IsingModel& model) { return dump(model_json(model)); }

std::string to_json(const MomentSet& m) {
    json j{{"N", m.size()}, {"q", vec(m.q)}, {"Q", mat(m.Q)}, {"C", mat(m.C)}};
    j["sample_size"] = m.sample_size ? json(*m.sample_size) : json(nullptr);
    return dump(std::move(j));
}

std::string to_json(const Spectrum& s) {
    return dump(json{{"kind", kind_name(s.kind)},
                     {"N", s.n},
                     {"T", s.t},
                     {"eigenvalues", vec(s.eigenvalues)},
                     {"mp_lower", s.mp_lower},
                     {"mp_upper", s.mp_upper},
                     {"top", s.top()},
                     {"outside_band", s.outside_band()},
                     {"warnings", s.warnings}});
}

std::string to_json(const FitReport& r) {
    json j{{"method", to_string(r.method)}, {"iterations", r.iterations}, {"model", model_json(r.model)}};
    j["residual"] = r.residual ? json(*r.residual) : json(nullptr);
    j["warnings"] = r.warnings;
    return dump(std::move(j));
}

std::string to_json(const EntropyReport& r) {
    return dump(json{{"N", r.n},
                     {"T", r.t},
                     {"S1", r.s1},
                     {"S2", r.s2},
                     {"SN", r.sn},
                     {"I2", r.i2},
                     {"IN", r.in},
                     {"ratio", r.ratio},
                     {"small_sample", r.small_sample},
                     {"fit_iterations", r.fit_iterations},
                     {"fit_residual", r.fit_residual},
                     {"warnings", r.warnings}});
}

std::string to_json(const TapSolution& s) {
    return dump(json{{"m", vec(s.m)},
                     {"iterations", s.iterations},
                     {"converged", s.converged},
                     {"last_update", s.last_update},
                     {"x_stability", s.x_stability},
                     {"variances", vec(s.variances)},
                     {"third_cumulants", vec(s.third_cumulants)}});
}

std::string to_json(const NoiseReport& r) {
    return dump(json{{"N", r.n},
                     {"T", r.t},
                     {"method", to_string(r.method)},
                     {"sigma_noise", r.sigma_noise},
                     {"sigma_J", r.sigma_j},
                     {"ratio", r.ratio},
                     {"mean_J", r.mean_j},
                     {"sampler", {{"burn_in", r.config.burn_in}, {"thin", r.config.thin}, {"seed", r.config.seed}}}});
}

std::string to_json(const NormalityReport& r) {
    return dump(json{{"n", r.n},
                     {"trimmed", r.trimmed},
                     {"bins", r.bins},
                     {"chi2_stat", r.chi2_stat},
                     {"chi2_p", r.chi2_p},
                     {"jb_stat", r.jb_stat},
                     {"jb_p", r.jb_p},
                     {"mean", r.mean},
                     {"std", r.std},
                     {"skewness", r.skewness},
                     {"excess_kurtosis", r.excess_kurtosis}});
}

std::string to_json(const ScalingFit& f) {
    return dump(json{{"sizes", f.sizes},
                     {"means", f.means},
                     {"alpha_hat", f.alpha_hat},
                     {"alpha_se", f.alpha_se},
                     {"a_hat", f.a_hat},
                     {"r2", f.r2}});
}

std::string to_json(const BiasTable& table) {
    json rows = json::array();
    for (const auto& r : table) {
        rows.push_back({{"ticker", r.ticker}, {"h", r.h}, {"h_int_mean", r.h_int_mean}, {"h_int_std", r.h_int_std}});
    }
    return dump(json{{"rows", std::move(rows)}});
}

IsingModel model_from_json(std::string_view text) {
    const json doc = parse(text);
    check_version(doc);
    const json& m = doc.contains("model") ? doc["model"] : doc;
    if (!m.is_object() || !m.contains("h") || !m.contains("J")) {
        throw FormatError("model document needs 'h' and 'J' members");
    }
    try {
        return IsingModel(mat_from(m["J"], "J"), vec_from(m["h"], "h"));
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(std::string("invalid model: ") + e.what());
    }
}

MomentSet moments_from_json(std::string_view text) {
    const json doc = parse(text);
    check_version(doc);
    if (!doc.is_object() || !doc.contains("q") || !doc.contains("Q")) {
        throw FormatError("moments document needs 'q' and 'Q' members");
    }
    Vector q = vec_from(doc["q"], "q");
    Matrix big_q = mat_from(doc["Q"], "Q");
    if (big_q.rows() != q.size()) throw FormatError("'Q' does not match the length of 'q'");
    std::optional<std::size_t> t;
    if (doc.contains("sample_size") && !doc["sample_size"].is_null()) {
        if (!doc["sample_size"].is_number_unsigned()) throw FormatError("'sample_size' must be a positive integer");
        t = doc["sample_size"].get<std::size_t>();
    }
    return MomentSet::from_pair_moments(std::move(q), std::move(big_q), t);
}

FitReport fit_report_from_json(std::string_view text) {
    const json doc = parse(text);
    check_version(doc);
    if (!doc.contains("method") || !doc["method"].is_string()) throw FormatError("fit report needs a 'method'");
    FitReport r{model_from_json(text), FitMethod::Exact, 0, std::nullopt, {}};
    try {
        r.method = parse_fit_method(doc["method"].get<std::string>());
    } catch (const ConfigError& e) {
        throw FormatError(e.what());
    }
    if (doc.contains("iterations") && doc["iterations"].is_number_unsigned()) {
        r.iterations = doc["iterations"].get<std::size_t>();
    }
    if (doc.contains("residual") && doc["residual"].is_number()) r.residual = doc["residual"].get<double>();
    if (doc.contains("warnings") && doc["warnings"].is_array()) {
        for (const auto& w : doc["warnings"]) {
            if (w.is_string()) r.warnings.push_back(w.get<std::string>());
        }
    }
    return r;
}

std::string matrix_csv(const Matrix& matrix) {
    std::string out;
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            if (c) out += ',';
            out += num(matrix(r, c));
        }
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::string out = "left,right,density\n";
    for (const auto& b : bins) out += num(b.left) + ',' + num(b.right) + ',' + num(b.density) + '\n';
    return out;
}

std::string qq_csv(const QqResult& qq) {
    std::string out = "empirical,theoretical\n";
    for (const auto& [e, t] : qq.pairs) out += num(e) + ',' + num(t) + '\n';
    return out;
}

std::string bias_csv(const BiasTable& table) {
    std::string out = "ticker,h,h_int_mean,h_int_std\n";
    for (const auto& r : table) {
        out += r.ticker + ',' + num(r.h) + ',' + num(r.h_int_mean) + ',' + num(r.h_int_std) + '\n';
    }
    return out;
}

std::string scaling_csv(const ScalingFit& fit, std::string_view mean_label) {
    std::string out = "N," + std::string(mean_label) + ",fitted\n";
    for (std::size_t k = 0; k < fit.sizes.size(); ++k) {
        const double fitted = fit.a_hat * std::pow(fit.sizes[k], -fit.alpha_hat);
        out += num(fit.sizes[k]) + ',' + num(fit.means[k]) + ',' + num(fitted) + '\n';
    }
    return out;
}

std::string magnetization_csv(const std::vector<std::string>& tickers, const Vector& empirical, const Vector& tap) {
    std::string out = "ticker,empirical,tap\n";
    for (Eigen::Index i = 0; i < tap.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        out += (k < tickers.size() ? tickers[k] : "s" + std::to_string(k)) + ',' +
               (i < empirical.size() ? num(empirical(i)) : std::string()) + ',' + num(tap(i)) + '\n';
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> read_scaling_points(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw FormatError("scaling file is empty");
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto comma = lines[k].find(',');
        double n = 0.0;
        double mean = 0.0;
        if (comma == std::string::npos || !parse_number(lines[k].substr(0, comma), n) ||
            !parse_number(lines[k].substr(comma + 1), mean)) {
            throw FormatError("scaling file line " + std::to_string(k + 1) + " is not 'N,mean': " + lines[k]);
        }
        out.first.push_back(n);
        out.second.push_back(mean);
    }
    return out;
}

std::vector<double> read_values(std::string_view text) {
    const auto lines = split_lines(text);
    std::vector<double> out;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        double v = 0.0;
        if (parse_number(lines[k], v)) {
            out.push_back(v);
        } else if (k != 0) {
            throw FormatError("line " + std::to_string(k + 1) + " is not a number: " + lines[k]);
        }
    }
    return out;
}

}  // namespace isingfin
