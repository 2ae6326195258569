#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace isingfin {

using Date = std::chrono::sys_days;

/// Formats as YYYY-MM-DD.
std::string format_date(Date date);
/// Parses with a strptime-style format; ISO-8601 by default. Empty on failure.
std::optional<Date> parse_date(std::string_view text, const std::string& format = "%Y-%m-%d");

struct PriceRow {
    Date date;
    double open = 0.0;
    double close = 0.0;
    std::optional<double> high;
    std::optional<double> low;
    std::optional<double> volume;
};

/// One ticker's daily bars, sorted by strictly increasing date.
struct PriceSeries {
    std::string ticker;
    std::vector<PriceRow> rows;
    /// Rows discarded while parsing (bad prices, unparseable fields).
    std::size_t dropped = 0;
    /// Rows discarded because their date repeated an earlier row.
    std::size_t duplicates = 0;
};

/// Which header names hold which field.
struct ColumnMapping {
    std::string date = "Date";
    std::string open = "Open";
    std::string close = "Close";
    std::string high = "High";
    std::string low = "Low";
    std::string volume = "Volume";
    char delimiter = ',';
    std::string date_format = "%Y-%m-%d";
};

/**
 * @brief Parse one delimiter-separated OHLC file.
 *
 * The header row must contain the mapped date/open/close columns; high, low
 * and volume are optional. Rows with a non-positive or unparseable open or
 * close, or an unparseable date, are dropped and counted. When a date
 * repeats, the first occurrence wins.
 *
 * @throws FormatError if a required column is missing
 * @throws EmptyInputError if no valid row remains
 */
PriceSeries parse_ohlc(std::istream& text, const ColumnMapping& format, std::string ticker);
PriceSeries parse_ohlc(std::string_view text, const ColumnMapping& format, std::string ticker);

using SpinValues = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * @brief T x N matrix of +-1 orientations, one column per ticker.
 *
 * Construction validates that every entry is exactly -1 or +1, that the
 * shape matches the label vectors, and that T, N >= 1.
 */
class SpinMatrix {
public:
    SpinMatrix(std::vector<std::string> tickers, std::vector<Date> dates, SpinValues values);

    /// Synthetic labels: tickers s0..s{N-1}, consecutive days from 1970-01-01.
    static SpinMatrix with_default_labels(SpinValues values);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const std::vector<std::string>& tickers() const noexcept { return tickers_; }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const SpinValues& values() const noexcept { return values_; }
    std::int8_t operator()(std::size_t t, std::size_t i) const {
        return values_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
    }
    std::span<const std::int8_t> row(std::size_t t) const {
        return {values_.data() + t * cols(), cols()};
    }
    Eigen::MatrixXd as_double() const { return values_.cast<double>(); }

    /// Column k of the result is column perm[k] of this matrix.
    SpinMatrix permuted_columns(std::span<const std::size_t> perm) const;

    bool operator==(const SpinMatrix& other) const;

private:
    std::vector<std::string> tickers_;
    std::vector<Date> dates_;
    SpinValues values_;
};

/**
 * @brief Align series on their common dates and binarize open-to-close moves.
 *
 * Entry is +1 when close >= open and -1 otherwise. The date axis is the
 * sorted intersection of every series' dates; columns follow input order.
 *
 * @throws AlignmentError when the intersection is empty (message lists each
 *         ticker's date range)
 */
SpinMatrix binarize(std::span<const PriceSeries> series);

/// CSV interchange: header "date,<ticker>...", then one row per day of +-1.
void write_spin_csv(std::ostream& out, const SpinMatrix& m);
std::string spin_csv(const SpinMatrix& m);
/// @throws FormatError on malformed content
SpinMatrix read_spin_csv(std::istream& in);

}  // namespace isingfin
