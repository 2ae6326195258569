#include "isingfin/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "isingfin/errors.hpp"

namespace isingfin {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header, const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    return std::nullopt;
}

}  // namespace

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<Date> parse_date(std::string_view text, const std::string& format) {
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) return std::nullopt;
    in >> std::ws;
    if (!in.eof()) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{tm.tm_year + 1900},
                                          std::chrono::month{static_cast<unsigned>(tm.tm_mon + 1)},
                                          std::chrono::day{static_cast<unsigned>(tm.tm_mday)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

PriceSeries parse_ohlc(std::istream& text, const ColumnMapping& format, std::string ticker) {
    std::string line;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(text, header_line)) {
        if (!blank(header_line)) {
            header = split(header_line, format.delimiter);
            break;
        }
    }
    if (header.empty()) {
        throw EmptyInputError(ticker + ": input has no header row");
    }

    const auto date_col = find_column(header, format.date);
    const auto open_col = find_column(header, format.open);
    const auto close_col = find_column(header, format.close);
    std::string missing;
    if (!date_col) missing += " '" + format.date + "'";
    if (!open_col) missing += " '" + format.open + "'";
    if (!close_col) missing += " '" + format.close + "'";
    if (!missing.empty()) {
        throw FormatError(ticker + ": header lacks mapped column(s)" + missing);
    }
    const auto high_col = find_column(header, format.high);
    const auto low_col = find_column(header, format.low);
    const auto volume_col = find_column(header, format.volume);

    PriceSeries series;
    series.ticker = std::move(ticker);
    const auto optional_field = [](const std::vector<std::string_view>& f, std::optional<std::size_t> col) {
        return (col && *col < f.size()) ? parse_number(f[*col]) : std::nullopt;
    };

    while (std::getline(text, line)) {
        if (blank(line)) continue;
        const auto fields = split(line, format.delimiter);
        const auto needed = std::max({*date_col, *open_col, *close_col});
        if (fields.size() <= needed) {
            ++series.dropped;
            continue;
        }
        const auto date = parse_date(fields[*date_col], format.date_format);
        const auto open = parse_number(fields[*open_col]);
        const auto close = parse_number(fields[*close_col]);
        if (!date || !open || !close || *open <= 0.0 || *close <= 0.0) {
            ++series.dropped;
            continue;
        }
        series.rows.push_back(PriceRow{*date, *open, *close, optional_field(fields, high_col),
                                       optional_field(fields, low_col), optional_field(fields, volume_col)});
    }

    std::stable_sort(series.rows.begin(), series.rows.end(),
                     [](const PriceRow& a, const PriceRow& b) { return a.date < b.date; });
    const auto last = std::unique(series.rows.begin(), series.rows.end(),
                                  [](const PriceRow& a, const PriceRow& b) { return a.date == b.date; });
    series.duplicates = static_cast<std::size_t>(series.rows.end() - last);
    series.rows.erase(last, series.rows.end());

    if (series.rows.empty()) {
        throw EmptyInputError(series.ticker + ": no valid rows (" + std::to_string(series.dropped) + " dropped)");
    }
    return series;
}

PriceSeries parse_ohlc(std::string_view text, const ColumnMapping& format, std::string ticker) {
    std::istringstream in{std::string(text)};
    return parse_ohlc(in, format, std::move(ticker));
}

SpinMatrix::SpinMatrix(std::vector<std::string> tickers, std::vector<Date> dates, SpinValues values)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw DomainError("spin matrix needs at least one row and one column");
    }
    if (static_cast<std::size_t>(values_.cols()) != tickers_.size()) {
        throw DomainError("spin matrix has " + std::to_string(values_.cols()) + " columns but " +
                          std::to_string(tickers_.size()) + " tickers");
    }
    if (static_cast<std::size_t>(values_.rows()) != dates_.size()) {
        throw DomainError("spin matrix has " + std::to_string(values_.rows()) + " rows but " +
                          std::to_string(dates_.size()) + " dates");
    }
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
        const auto v = values_.data()[k];
        if (v != 1 && v != -1) {
            throw DomainError("spin matrix entries must be -1 or +1");
        }
    }
}

SpinMatrix SpinMatrix::with_default_labels(SpinValues values) {
    std::vector<std::string> tickers;
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
        tickers.push_back("s" + std::to_string(i));
    }
    std::vector<Date> dates;
    dates.reserve(static_cast<std::size_t>(values.rows()));
    const Date epoch{std::chrono::year{1970} / 1 / 1};
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        dates.push_back(epoch + std::chrono::days{t});
    }
    return SpinMatrix(std::move(tickers), std::move(dates), std::move(values));
}

SpinMatrix SpinMatrix::permuted_columns(std::span<const std::size_t> perm) const {
    if (perm.size() != cols()) {
        throw DomainError("permutation length does not match column count");
    }
    SpinValues values(values_.rows(), values_.cols());
    std::vector<std::string> tickers;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        values.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(perm[k]));
        tickers.push_back(tickers_.at(perm[k]));
    }
    return SpinMatrix(std::move(tickers), dates_, std::move(values));
}

bool SpinMatrix::operator==(const SpinMatrix& other) const {
    return tickers_ == other.tickers_ && dates_ == other.dates_ && values_.rows() == other.values_.rows() &&
           values_.cols() == other.values_.cols() && values_ == other.values_;
}

SpinMatrix binarize(std::span<const PriceSeries> series) {
    if (series.empty()) {
        throw DomainError("binarize needs at least one price series");
    }
    std::vector<Date> common;
    for (const auto& row : series.front().rows) common.push_back(row.date);
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> dates;
        for (const auto& row : series[k].rows) dates.push_back(row.date);
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), dates.begin(), dates.end(), std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) {
        std::string ranges;
        for (const auto& s : series) {
            ranges += "\n  " + s.ticker + ": ";
            ranges += s.rows.empty() ? std::string("no rows")
                                     : format_date(s.rows.front().date) + " .. " + format_date(s.rows.back().date);
        }
        throw AlignmentError("price series share no common date; per-ticker ranges:" + ranges);
    }

    SpinValues values(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(series.size()));
    std::vector<std::string> tickers;
    for (std::size_t k = 0; k < series.size(); ++k) {
        tickers.push_back(series[k].ticker);
        auto it = series[k].rows.begin();
        for (std::size_t t = 0; t < common.size(); ++t) {
            it = std::lower_bound(it, series[k].rows.end(), common[t],
                                  [](const PriceRow& row, Date d) { return row.date < d; });
            values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = it->close >= it->open ? 1 : -1;
        }
    }
    return SpinMatrix(std::move(tickers), std::move(common), std::move(values));
}

void write_spin_csv(std::ostream& out, const SpinMatrix& m) {
    out << "date";
    for (const auto& ticker : m.tickers()) out << ',' << ticker;
    out << '\n';
    for (std::size_t t = 0; t < m.rows(); ++t) {
        out << format_date(m.dates()[t]);
        for (std::size_t i = 0; i < m.cols(); ++i) {
            out << (m(t, i) > 0 ? ",1" : ",-1");
        }
        out << '\n';
    }
}

std::string spin_csv(const SpinMatrix& m) {
    std::ostringstream out;
    write_spin_csv(out, m);
    return out.str();
}

SpinMatrix read_spin_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> tickers;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        const auto header = split(line, ',');
        if (header.size() < 2) {
            throw FormatError("spin CSV header needs a date column and at least one ticker");
        }
        for (std::size_t k = 1; k < header.size(); ++k) tickers.emplace_back(header[k]);
        break;
    }
    if (tickers.empty()) {
        throw FormatError("spin CSV is empty");
    }

    std::vector<Date> dates;
    std::vector<std::int8_t> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split(line, ',');
        if (fields.size() != tickers.size() + 1) {
            throw FormatError("spin CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(tickers.size() + 1) + " fields, got " + std::to_string(fields.size()));
        }
        const auto date = parse_date(fields[0]);
        if (!date) {
            throw FormatError("spin CSV line " + std::to_string(line_no) + ": bad date '" + std::string(fields[0]) +
                              "'");
        }
        dates.push_back(*date);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            if (fields[k] == "1" || fields[k] == "+1") {
                cells.push_back(1);
            } else if (fields[k] == "-1") {
                cells.push_back(-1);
            } else {
                throw FormatError("spin CSV line " + std::to_string(line_no) + ": entry '" + std::string(fields[k]) +
                                  "' is not +-1");
            }
        }
    }
    if (dates.empty()) {
        throw FormatError("spin CSV has no data rows");
    }
    SpinValues values(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(tickers.size()));
    std::copy(cells.begin(), cells.end(), values.data());
    return SpinMatrix(std::move(tickers), std::move(dates), std::move(values));
}

}  // namespace isingfin
