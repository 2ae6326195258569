#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "artifacts.hpp"
#include "isingfin/errors.hpp"
#include "isingfin/exact.hpp"
#include "isingfin/ingest.hpp"
#include "isingfin/inverse.hpp"
#include "isingfin/moments.hpp"
#include "isingfin/sampler.hpp"
#include "isingfin/serialize.hpp"
#include "isingfin/stats.hpp"
#include "isingfin/tap.hpp"
#include "isingfin/version.hpp"

namespace isingfin::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kFileType = "FILE";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputRecord {
    std::string file;
    std::string sha256;
};

struct Run {
    ArtifactSet artifacts;
    json summary = json::object();
    std::vector<InputRecord> inputs;
    std::optional<std::uint64_t> seed;

    std::string read_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot read '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        inputs.push_back({fs::path(path).filename().string(), sha256_hex(text)});
        return text;
    }

    SpinMatrix read_spins(const std::string& path) {
        std::istringstream in(read_input(path));
        return read_spin_csv(in);
    }

    void add_json(std::string name, std::string body) { artifacts.add(std::move(name), std::move(body)); }
};

std::string show(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

class Checks {
public:
    void require(bool ok, std::string message) {
        if (!ok) problems_.push_back(std::move(message));
    }
    void file(const std::string& path, const std::string& flag) {
        if (!path.empty() && !fs::is_regular_file(path)) problems_.push_back(flag + ": no such file '" + path + "'");
    }
    void positive(double v, const std::string& flag) {
        require(v > 0.0 && std::isfinite(v), flag + " must be positive, got " + show(v));
    }
    void non_negative(double v, const std::string& flag) {
        require(v >= 0.0 && std::isfinite(v), flag + " must be non-negative, got " + show(v));
    }
    void at_least(std::size_t v, std::size_t lo, const std::string& flag) {
        require(v >= lo, flag + " must be at least " + std::to_string(lo) + ", got " + std::to_string(v));
    }
    void method(const std::string& tag, const std::string& flag) {
        try {
            parse_fit_method(tag);
        } catch (const ConfigError&) {
            problems_.push_back(flag + " must be one of exact|nmf|tap-inv|plm, got '" + tag + "'");
        }
    }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

std::string dump(json j) {
    j["format_version"] = kFormatVersion;
    return j.dump(2) + "\n";
}

class Command {
public:
    virtual ~Command() = default;
    virtual const char* name() const = 0;
    virtual const char* description() const = 0;
    virtual void add_options(CLI::App& app) = 0;
    virtual void validate(Checks& checks) const = 0;
    virtual void execute(Run& run) const = 0;
};

CLI::Option* file_option(CLI::App& app, const std::string& flag, std::string& target, const std::string& help) {
    return app.add_option(flag, target, help)->type_name(kFileType);
}

struct InversionFlags {
    double ridge_epsilon = 0.0;
    double max_condition = 1e12;
    bool strict = false;
    double clamp_fraction = 0.2;
    double plm_ridge = 1e-3;
    double plm_tol = 1e-6;
    std::size_t plm_max_iter = 200;

    void add(CLI::App& app) {
        app.add_option("--ridge-epsilon", ridge_epsilon, "Added to the diagonal of C before inversion (nmf, tap-inv)");
        app.add_option("--max-condition", max_condition, "Condition number treated as singular");
        app.add_flag("--strict", strict, "Fail instead of warning when TAP clamps too many pairs");
        app.add_option("--clamp-fraction", clamp_fraction, "Clamped-pair fraction that triggers the TAP warning");
        app.add_option("--plm-ridge", plm_ridge, "L2 penalty for pseudo-likelihood");
        app.add_option("--plm-tol", plm_tol, "Gradient tolerance for pseudo-likelihood");
        app.add_option("--plm-max-iter", plm_max_iter, "Newton steps per spin for pseudo-likelihood");
    }
    void validate(Checks& c) const {
        c.non_negative(ridge_epsilon, "--ridge-epsilon");
        c.positive(max_condition, "--max-condition");
        c.require(clamp_fraction >= 0.0 && clamp_fraction <= 1.0, "--clamp-fraction must lie in [0, 1]");
        c.non_negative(plm_ridge, "--plm-ridge");
        c.positive(plm_tol, "--plm-tol");
        c.at_least(plm_max_iter, 1, "--plm-max-iter");
    }
    InversionOptions inversion() const {
        InversionOptions o;
        o.ridge_epsilon = ridge_epsilon;
        o.max_condition = max_condition;
        o.strict = strict;
        o.clamp_warning_fraction = clamp_fraction;
        return o;
    }
    PlmOptions plm() const {
        PlmOptions o;
        o.ridge = plm_ridge;
        o.gradient_tol = plm_tol;
        o.max_iter = plm_max_iter;
        return o;
    }
};

struct SamplerFlags {
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 0;

    void add(CLI::App& app) {
        app.add_option("--burn-in", burn_in, "Sweeps discarded before recording");
        app.add_option("--thin", thin, "Sweeps between recorded rows");
        app.add_option("--seed", seed, "Random seed");
    }
    void validate(Checks& c) const { c.at_least(thin, 1, "--thin"); }
    SamplerConfig config(std::size_t rows) const { return SamplerConfig{burn_in, thin, seed, rows}; }
};

std::string parse_delimiter(const std::string& d) {
    if (d == "tab" || d == "\\t") return "\t";
    return d;
}

class IngestCommand final : public Command {
public:
    const char* name() const override { return "ingest"; }
    const char* description() const override { return "Align OHLC files and binarize open-to-close moves"; }
    void add_options(CLI::App& app) override {
        app.add_option("--input", inputs_, "OHLC file, one per ticker")->type_name(kFileType)->required();
        app.add_option("--tickers", tickers_, "Ticker names (default: file stems)");
        app.add_option("--date-col", map_.date, "Date column header");
        app.add_option("--open-col", map_.open, "Open column header");
        app.add_option("--close-col", map_.close, "Close column header");
        app.add_option("--delimiter", delimiter_, "Field delimiter (one character or 'tab')");
        app.add_option("--date-format", map_.date_format, "strptime-style date format");
    }
    void validate(Checks& c) const override {
        for (const auto& f : inputs_) c.file(f, "--input");
        c.require(tickers_.empty() || tickers_.size() == inputs_.size(),
                  "--tickers must name every --input file (" + std::to_string(inputs_.size()) + ")");
        c.require(parse_delimiter(delimiter_).size() == 1, "--delimiter must be a single character");
    }
    void execute(Run& run) const override {
        ColumnMapping map = map_;
        map.delimiter = parse_delimiter(delimiter_)[0];
        std::vector<PriceSeries> series;
        json per = json::array();
        for (std::size_t k = 0; k < inputs_.size(); ++k) {
            const std::string ticker = tickers_.empty() ? fs::path(inputs_[k]).stem().string() : tickers_[k];
            series.push_back(parse_ohlc(std::string_view(run.read_input(inputs_[k])), map, ticker));
            const auto& s = series.back();
            per.push_back({{"ticker", s.ticker}, {"rows", s.rows.size()}, {"dropped", s.dropped},
                           {"duplicates", s.duplicates}});
        }
        const SpinMatrix m = binarize(series);
        run.artifacts.add("spins.csv", spin_csv(m));
        json report{{"N", m.cols()},
                     {"T", m.rows()},
                     {"tickers", m.tickers()},
                     {"first_date", format_date(m.dates().front())},
                     {"last_date", format_date(m.dates().back())},
                     {"series", per}};
        run.add_json("ingest.json", dump(report));
        run.summary = {{"N", m.cols()}, {"T", m.rows()}};
    }

private:
    std::vector<std::string> inputs_;
    std::vector<std::string> tickers_;
    ColumnMapping map_;
    std::string delimiter_ = ",";
};

class MomentsCommand final : public Command {
public:
    const char* name() const override { return "moments"; }
    const char* description() const override { return "Empirical magnetizations and correlations"; }
    void add_options(CLI::App& app) override { file_option(app, "--spins", spins_, "Spin CSV")->required(); }
    void validate(Checks& c) const override { c.file(spins_, "--spins"); }
    void execute(Run& run) const override {
        const SpinMatrix m = run.read_spins(spins_);
        const MomentSet mo = empirical_moments(m);
        run.add_json("moments.json", to_json(mo));
        run.artifacts.add("correlations.csv", matrix_csv(mo.C));
        run.summary = {{"N", m.cols()}, {"T", m.rows()}};
    }

private:
    std::string spins_;
};

class SpectrumCommand final : public Command {
public:
    const char* name() const override { return "spectrum"; }
    const char* description() const override { return "Eigenvalues with Marchenko-Pastur bounds"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--spins", spins_, "Spin CSV")->required();
        app.add_option("--kind", kind_, "correlation or covariance");
        app.add_option("--bins", bins_, "Histogram bins");
    }
    void validate(Checks& c) const override {
        c.file(spins_, "--spins");
        c.require(kind_ == "correlation" || kind_ == "covariance", "--kind must be correlation or covariance");
        c.at_least(bins_, 1, "--bins");
    }
    void execute(Run& run) const override {
        const SpinMatrix m = run.read_spins(spins_);
        const Spectrum s =
            kind_ == "correlation" ? correlation_spectrum(m) : covariance_spectrum(empirical_moments(m));
        run.add_json("spectrum.json", to_json(s));
        run.artifacts.add("histogram.csv", histogram_csv(eigenvalue_histogram(s, bins_)));
        run.summary = {{"top", s.top()}, {"mp_upper", s.mp_upper}, {"outside_band", s.outside_band()}};
    }

private:
    std::string spins_;
    std::string kind_ = "correlation";
    std::size_t bins_ = 50;
};

class FitCommand final : public Command {
public:
    const char* name() const override { return "fit"; }
    const char* description() const override { return "Infer J and h (exact|nmf|tap-inv|plm)"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--moments", moments_, "Moments JSON");
        file_option(app, "--spins", spins_, "Spin CSV");
        app.add_option("--method", method_, "exact|nmf|tap-inv|plm");
        app.add_option("--tol", tol_, "Moment-matching tolerance (exact)");
        app.add_option("--max-iter", max_iter_, "Iteration cap (exact)");
        app.add_option("--algorithm", algorithm_, "newton or gradient (exact)");
        flags_.add(app);
    }
    void validate(Checks& c) const override {
        c.require(moments_.empty() != spins_.empty(), "give exactly one of --moments and --spins");
        c.file(moments_, "--moments");
        c.file(spins_, "--spins");
        c.method(method_, "--method");
        c.require(method_ != "plm" || !spins_.empty(), "--method plm needs --spins");
        c.positive(tol_, "--tol");
        c.at_least(max_iter_, 1, "--max-iter");
        c.require(algorithm_ == "newton" || algorithm_ == "gradient", "--algorithm must be newton or gradient");
        flags_.validate(c);
    }
    void execute(Run& run) const override {
        const FitMethod method = parse_fit_method(method_);
        std::optional<SpinMatrix> spins;
        MomentSet mo;
        if (!spins_.empty()) {
            spins = run.read_spins(spins_);
            mo = empirical_moments(*spins);
        } else {
            mo = moments_from_json(run.read_input(moments_));
        }
        ExactFitOptions exact;
        exact.tol = tol_;
        exact.max_iter = max_iter_;
        exact.algorithm = algorithm_ == "newton" ? ExactFitAlgorithm::Newton : ExactFitAlgorithm::GradientAscent;

        FitReport report = [&] {
            switch (method) {
                case FitMethod::Exact: return fit_maxent_exact(mo, exact);
                case FitMethod::NaiveMeanField: return nmf_invert(mo, flags_.inversion());
                case FitMethod::TapInversion: return tap_invert(mo, flags_.inversion());
                case FitMethod::PseudoLikelihood: return plm_fit(*spins, flags_.plm());
            }
            throw ConfigError("unknown method");
        }();
        run.add_json("fit.json", to_json(report));
        run.artifacts.add("couplings.csv", matrix_csv(report.model.couplings()));
        run.summary = {{"method", to_string(method)},
                       {"N", report.model.size()},
                       {"iterations", report.iterations},
                       {"residual", report.residual ? json(*report.residual) : json(nullptr)},
                       {"tol", tol_},
                       {"negative_fraction", negative_fraction(report.model.couplings())},
                       {"warnings", report.warnings}};
    }

private:
    std::string moments_;
    std::string spins_;
    std::string method_ = "exact";
    double tol_ = 1e-8;
    std::size_t max_iter_ = 500;
    std::string algorithm_ = "newton";
    InversionFlags flags_;
};

class TapCommand final : public Command {
public:
    const char* name() const override { return "tap"; }
    const char* description() const override { return "Solve the TAP equations and report stability"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--model", model_, "Model or fit JSON")->required();
        file_option(app, "--spins", spins_, "Spin CSV to compare magnetizations against");
        app.add_option("--damping", damping_, "Damping in (0, 1]");
        app.add_option("--tol", tol_, "Convergence tolerance on the update");
        app.add_option("--max-iter", max_iter_, "Iteration cap");
    }
    void validate(Checks& c) const override {
        c.file(model_, "--model");
        c.file(spins_, "--spins");
        c.require(damping_ > 0.0 && damping_ <= 1.0, "--damping must lie in (0, 1], got " + show(damping_));
        c.positive(tol_, "--tol");
        c.at_least(max_iter_, 1, "--max-iter");
    }
    void execute(Run& run) const override {
        const IsingModel model = model_from_json(run.read_input(model_));
        TapOptions opts;
        opts.damping = damping_;
        opts.tol = tol_;
        opts.max_iter = max_iter_;
        const TapSolution sol = tap_fixed_point(model, opts);
        run.add_json("tap.json", to_json(sol));
        run.summary = {{"converged", sol.converged}, {"iterations", sol.iterations}, {"x_stability", sol.x_stability}};

        std::vector<std::string> tickers;
        Vector empirical;
        if (!spins_.empty()) {
            const SpinMatrix m = run.read_spins(spins_);
            if (m.cols() != model.size()) {
                throw DomainError("--spins has " + std::to_string(m.cols()) + " columns but the model has N = " +
                                  std::to_string(model.size()));
            }
            tickers = m.tickers();
            empirical = empirical_moments(m).q;
            run.summary["max_abs_deviation"] = (empirical - sol.m).cwiseAbs().maxCoeff();
        }
        run.artifacts.add("magnetizations.csv", magnetization_csv(tickers, empirical, sol.m));
    }

private:
    std::string model_;
    std::string spins_;
    double damping_ = 0.5;
    double tol_ = 1e-10;
    std::size_t max_iter_ = 10000;
};

class MultiInfoCommand final : public Command {
public:
    const char* name() const override { return "multiinfo"; }
    const char* description() const override { return "Share of multi-information captured by pairs"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--spins", spins_, "Spin CSV")->required();
        app.add_option("--tol", tol_, "IN at or below this is degenerate");
        app.add_option("--fit-tol", fit_tol_, "Exact-fit tolerance");
        app.add_option("--max-iter", max_iter_, "Exact-fit iteration cap");
    }
    void validate(Checks& c) const override {
        c.file(spins_, "--spins");
        c.non_negative(tol_, "--tol");
        c.positive(fit_tol_, "--fit-tol");
        c.at_least(max_iter_, 1, "--max-iter");
    }
    void execute(Run& run) const override {
        ExactFitOptions fit;
        fit.tol = fit_tol_;
        fit.max_iter = max_iter_;
        const EntropyReport r = multi_information_ratio(run.read_spins(spins_), tol_, fit);
        run.add_json("multiinfo.json", to_json(r));
        run.summary = {{"ratio", r.ratio}, {"small_sample", r.small_sample}, {"warnings", r.warnings}};
    }

private:
    std::string spins_;
    double tol_ = 1e-6;
    double fit_tol_ = 1e-8;
    std::size_t max_iter_ = 500;
};

class SampleCommand final : public Command {
public:
    const char* name() const override { return "sample"; }
    const char* description() const override { return "Glauber samples from a model"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--model", model_, "Model or fit JSON")->required();
        app.add_option("--rows", rows_, "Rows to record")->required();
        sampler_.add(app);
    }
    void validate(Checks& c) const override {
        c.file(model_, "--model");
        c.at_least(rows_, 1, "--rows");
        sampler_.validate(c);
    }
    void execute(Run& run) const override {
        const IsingModel model = model_from_json(run.read_input(model_));
        const SpinMatrix m = glauber_sample(model, sampler_.config(rows_));
        run.artifacts.add("spins.csv", spin_csv(m));
        run.seed = sampler_.seed;
        run.summary = {{"N", m.cols()}, {"T", m.rows()}};
    }

private:
    std::string model_;
    std::size_t rows_ = 0;
    SamplerFlags sampler_;
};

class NoiseCommand final : public Command {
public:
    const char* name() const override { return "noise"; }
    const char* description() const override { return "Inference noise floor from a homogeneous model"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--fit", fit_, "Fit report JSON from real data")->required();
        app.add_option("--rows", rows_, "Synthetic sample length T")->required();
        app.add_option("--method", method_, "Re-inference method (default: the fit's)");
        sampler_.add(app);
        flags_.add(app);
    }
    void validate(Checks& c) const override {
        c.file(fit_, "--fit");
        c.at_least(rows_, 2, "--rows");
        if (!method_.empty()) c.method(method_, "--method");
        sampler_.validate(c);
        flags_.validate(c);
    }
    void execute(Run& run) const override {
        const FitReport real = fit_report_from_json(run.read_input(fit_));
        const FitMethod method = method_.empty() ? real.method : parse_fit_method(method_);
        NoiseOptions opts{flags_.inversion(), flags_.plm()};
        const NoiseReport r = noise_ratio(real, real.model.size(), rows_, sampler_.config(rows_), method, opts);
        run.add_json("noise.json", to_json(r));
        run.seed = sampler_.seed;
        run.summary = {{"ratio", r.ratio}, {"sigma_noise", r.sigma_noise}, {"sigma_J", r.sigma_j}};
    }

private:
    std::string fit_;
    std::size_t rows_ = 0;
    std::string method_;
    SamplerFlags sampler_;
    InversionFlags flags_;
};

class NormalityCommand final : public Command {
public:
    const char* name() const override { return "normality"; }
    const char* description() const override { return "Normality tests and QQ data for couplings"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--values", values_, "Single-column numeric file");
        file_option(app, "--fit", fit_, "Model or fit JSON (upper-triangle couplings)");
        app.add_option("--bins", bins_, "Chi-square bins");
        app.add_option("--trim", trim_, "Upper-tail fraction removed before testing");
        app.add_option("--quantiles", quantiles_, "QQ quantile count");
    }
    void validate(Checks& c) const override {
        c.require(values_.empty() != fit_.empty(), "give exactly one of --values and --fit");
        c.file(values_, "--values");
        c.file(fit_, "--fit");
        c.at_least(bins_, 4, "--bins");
        c.require(trim_ >= 0.0 && trim_ < 0.5, "--trim must lie in [0, 0.5), got " + show(trim_));
        c.at_least(quantiles_, 2, "--quantiles");
    }
    void execute(Run& run) const override {
        std::vector<double> values;
        run.summary = json::object();
        if (!fit_.empty()) {
            const IsingModel model = model_from_json(run.read_input(fit_));
            values = model.upper_couplings();
            run.summary["negative_fraction"] = negative_fraction(model.couplings());
        } else {
            values = read_values(run.read_input(values_));
        }
        const NormalityReport r = normality_tests_trimmed(values, trim_, bins_);
        run.add_json("normality.json", to_json(r));
        run.summary["chi2_p"] = r.chi2_p;
        run.summary["jb_p"] = r.jb_p;
        run.summary["trimmed"] = r.trimmed;

        const auto kept = trim_upper_tail(values, trim_);
        if (values.size() >= quantiles_) {
            run.artifacts.add("qq.csv", qq_csv(qq_compare(values, quantiles_)));
        } else {
            run.summary["qq_skipped"] = "fewer values than --quantiles";
        }
        if (kept.size() >= quantiles_) run.artifacts.add("qq_trimmed.csv", qq_csv(qq_compare(kept, quantiles_)));
    }

private:
    std::string values_;
    std::string fit_;
    std::size_t bins_ = 20;
    double trim_ = 0.04;
    std::size_t quantiles_ = 1000;
};

class ScalingCommand final : public Command {
public:
    const char* name() const override { return "scaling"; }
    const char* description() const override { return "Power-law fit of mean coupling against N"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--points", points_, "CSV with header and N,mean rows");
        app.add_option("--fits", fits_, "Fit or model JSON files, one per dataset")->type_name(kFileType);
        app.add_flag("--abs", use_abs_, "Use the mean of |J| per dataset");
    }
    void validate(Checks& c) const override {
        c.require(points_.empty() != fits_.empty(), "give exactly one of --points and --fits");
        c.file(points_, "--points");
        for (const auto& f : fits_) c.file(f, "--fits");
        c.require(!use_abs_ || !fits_.empty(), "--abs needs --fits");
    }
    void execute(Run& run) const override {
        std::vector<double> sizes;
        std::vector<double> means;
        if (!points_.empty()) {
            std::tie(sizes, means) = read_scaling_points(run.read_input(points_));
        } else {
            for (const auto& f : fits_) {
                const IsingModel model = model_from_json(run.read_input(f));
                auto js = model.upper_couplings();
                if (js.empty()) throw DomainError("'" + f + "' has fewer than two spins");
                double sum = 0.0;
                for (double j : js) sum += use_abs_ ? std::abs(j) : j;
                sizes.push_back(static_cast<double>(model.size()));
                means.push_back(sum / static_cast<double>(js.size()));
            }
            if (!use_abs_) {
                for (std::size_t k = 0; k < means.size(); ++k) {
                    if (!(means[k] > 0.0)) {
                        throw DomainError("mean coupling " + std::to_string(means[k]) + " of '" + fits_[k] +
                                          "' is not positive; rerun with --abs to fit mean |J| (label mean_abs_J)");
                    }
                }
            }
        }
        const ScalingFit fit = powerlaw_fit(sizes, means);
        const std::string label = use_abs_ ? "mean_abs_J" : "mean_J";
        json doc = json::parse(to_json(fit));
        doc["mean_label"] = label;
        run.add_json("scaling.json", dump(doc));
        run.artifacts.add("scaling.csv", scaling_csv(fit, label));
        run.summary = {{"alpha_hat", fit.alpha_hat}, {"alpha_se", fit.alpha_se}, {"r2", fit.r2}, {"label", label}};
    }

private:
    std::string points_;
    std::vector<std::string> fits_;
    bool use_abs_ = false;
};

class BiasCommand final : public Command {
public:
    const char* name() const override { return "bias"; }
    const char* description() const override { return "Individual field against internal bias per ticker"; }
    void add_options(CLI::App& app) override {
        file_option(app, "--model", model_, "Model or fit JSON")->required();
        file_option(app, "--spins", spins_, "Spin CSV")->required();
    }
    void validate(Checks& c) const override {
        c.file(model_, "--model");
        c.file(spins_, "--spins");
    }
    void execute(Run& run) const override {
        const IsingModel model = model_from_json(run.read_input(model_));
        const BiasTable table = bias_decomposition(model, run.read_spins(spins_));
        run.add_json("bias.json", to_json(table));
        run.artifacts.add("bias.csv", bias_csv(table));
        run.summary = {{"N", table.size()}};
    }

private:
    std::string model_;
    std::string spins_;
};

class CriticalDemoCommand final : public Command {
public:
    const char* name() const override { return "critical-demo"; }
    const char* description() const override { return "Covariance spectrum of a Gaussian-coupling model"; }
    void add_options(CLI::App& app) override {
        app.add_option("--n", n_, "Number of spins (>= 20)");
        app.add_option("--scale", scale_, "Coupling scale J; 1 is the SK transition");
        app.add_option("--rows", rows_, "Sample length T (>= 10 N)");
        app.add_option("--bins", bins_, "Histogram bins");
        sampler_.add(app);
    }
    void validate(Checks& c) const override {
        c.at_least(n_, 20, "--n");
        c.at_least(rows_, 10 * n_, "--rows");
        c.non_negative(scale_, "--scale");
        c.at_least(bins_, 1, "--bins");
        sampler_.validate(c);
    }
    void execute(Run& run) const override {
        CriticalDemoOptions opts{sampler_.burn_in, sampler_.thin};
        const Spectrum s = critical_spectrum_demo(n_, scale_, rows_, sampler_.seed, opts);
        run.add_json("spectrum.json", to_json(s));
        run.artifacts.add("histogram.csv", histogram_csv(eigenvalue_histogram(s, bins_)));
        run.seed = sampler_.seed;
        run.summary = {{"top", s.top()}, {"mp_upper", s.mp_upper}, {"escaped", s.top() > s.mp_upper}};
    }

private:
    std::size_t n_ = 100;
    double scale_ = 1.0;
    std::size_t rows_ = 5000;
    std::size_t bins_ = 50;
    SamplerFlags sampler_;
};

std::vector<std::unique_ptr<Command>> make_commands() {
    std::vector<std::unique_ptr<Command>> c;
    c.push_back(std::make_unique<IngestCommand>());
    c.push_back(std::make_unique<MomentsCommand>());
    c.push_back(std::make_unique<SpectrumCommand>());
    c.push_back(std::make_unique<FitCommand>());
    c.push_back(std::make_unique<TapCommand>());
    c.push_back(std::make_unique<MultiInfoCommand>());
    c.push_back(std::make_unique<SampleCommand>());
    c.push_back(std::make_unique<NoiseCommand>());
    c.push_back(std::make_unique<NormalityCommand>());
    c.push_back(std::make_unique<ScalingCommand>());
    c.push_back(std::make_unique<BiasCommand>());
    c.push_back(std::make_unique<CriticalDemoCommand>());
    return c;
}

// Config files hold key=value lines or a flat JSON object; keys are long
// option names without the dashes.
std::vector<std::pair<std::string, std::vector<std::string>>> load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("--config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw UsageError(std::string("--config: invalid JSON: ") + e.what());
        }
        for (const auto& [key, value] : doc.items()) {
            std::vector<std::string> vals;
            const auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
            if (value.is_array()) {
                for (const auto& v : value) vals.push_back(scalar(v));
            } else {
                vals.push_back(scalar(value));
            }
            out.emplace_back(key, std::move(vals));
        }
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t number = 0;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(lines, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--config line " + std::to_string(number) + ": expected key=value");
        }
        out.emplace_back(trim(line.substr(0, eq)), std::vector<std::string>{trim(line.substr(eq + 1))});
    }
    return out;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

// Config entries are spliced in right after the subcommand name; keys also
// given on the command line are skipped so the command line wins.
std::vector<std::string> apply_config(std::vector<std::string> args, const std::vector<std::string>& names) {
    const auto path = find_config_path(args);
    if (!path) return args;
    const auto entries = load_config(*path);
    const auto sub = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) {
        return std::find(names.begin(), names.end(), a) != names.end();
    });
    if (sub == args.end()) return args;
    const auto explicit_flag = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> injected;
    for (const auto& [key, values] : entries) {
        if (key == "config" || explicit_flag(key)) continue;
        if (values.size() == 1) {
            injected.push_back("--" + key + "=" + values[0]);
        } else {
            injected.push_back("--" + key);
            injected.insert(injected.end(), values.begin(), values.end());
        }
    }
    args.insert(sub + 1, injected.begin(), injected.end());
    return args;
}

json option_value(const CLI::Option& opt) {
    if (opt.get_expected_max() == 0) return opt.count() > 0 && opt.as<bool>();
    std::vector<std::string> raw = opt.results();
    if (opt.count() == 0) {
        raw.clear();
        if (!opt.get_default_str().empty()) raw.push_back(opt.get_default_str());
    }
    const bool is_file = opt.get_type_name() == kFileType;
    for (auto& r : raw) {
        if (is_file) r = fs::path(r).filename().string();
    }
    if (opt.get_items_expected_max() > 1) return raw;
    if (raw.empty()) return nullptr;
    return raw.front();
}

json recorded_config(const CLI::App& sub, int format_version) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string key = opt->get_single_name();
        if (key == "help" || key.empty()) continue;
        cfg[key] = option_value(*opt);
    }
    cfg["format-version"] = format_version;
    return cfg;
}

json versions() {
    return {{"isingfin", std::string(kVersion)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                          std::to_string(BOOST_VERSION % 100)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION}};
}

std::string manifest(const std::string& command, const json& config, const Run& run) {
    json inputs = json::array();
    for (const auto& in : run.inputs) inputs.push_back({{"file", in.file}, {"sha256", in.sha256}});
    json artifacts = json::array();
    for (const auto& [name, body] : run.artifacts.files()) {
        artifacts.push_back({{"file", name}, {"sha256", sha256_hex(body)}});
    }
    json doc{{"command", command},
             {"versions", versions()},
             {"config", config},
             {"seed", run.seed ? json(*run.seed) : json(nullptr)},
             {"inputs", inputs},
             {"artifacts", artifacts},
             {"summary", run.summary}};
    return dump(doc);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    auto commands = make_commands();
    CLI::App app{"isingfin: pairwise maximum-entropy models of binarized market data", "isingfin"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir;
    std::string config_path;
    int format_version = kFormatVersion;
    app.add_option("--out", out_dir, std::string("Output directory (default: $") + kOutDirEnv + " or .)");
    app.add_option("--config", config_path, "key=value or JSON file of option defaults")->type_name(kFileType);
    app.add_option("--format-version", format_version, "Artifact format version");

    std::vector<std::pair<Command*, CLI::App*>> subs;
    std::vector<std::string> names;
    for (auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c->name(), c->description());
        sub->option_defaults()->always_capture_default();
        c->add_options(*sub);
        subs.emplace_back(c.get(), sub);
        names.emplace_back(c->name());
    }

    std::vector<std::string> args;
    try {
        args = apply_config(raw_args, names);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const auto chosen = std::find_if(subs.begin(), subs.end(), [](const auto& s) { return s.second->parsed(); });
    Command& command = *chosen->first;
    const CLI::App& sub = *chosen->second;

    if (out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        out_dir = env && *env ? env : ".";
    }
    Checks checks;
    checks.require(format_version == kFormatVersion,
                   "--format-version " + std::to_string(format_version) + " is not supported (expected " +
                       std::to_string(kFormatVersion) + ")");
    checks.require(!fs::exists(out_dir) || fs::is_directory(out_dir),
                   "output path '" + out_dir + "' exists and is not a directory");
    command.validate(checks);
    if (!checks.problems().empty()) {
        err << "usage error in '" << command.name() << "':\n";
        for (const auto& p : checks.problems()) err << "  - " << p << "\n";
        return kExitUsage;
    }

    Run run;
    try {
        command.execute(run);
        run.artifacts.add("manifest.json", manifest(command.name(), recorded_config(sub, format_version), run));
        run.artifacts.commit(out_dir);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    out << run.summary.dump() << "\n";
    return kExitOk;
}

}  // namespace isingfin::cli
