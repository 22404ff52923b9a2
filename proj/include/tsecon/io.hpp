#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsecon/dates.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon::ingest {

struct RawRow {
    Date date;
    std::optional<double> value;
};

/// Parsed quote file: one (date, value) row per line, in file order, with
/// missing cells preserved. Missing handling happens at alignment time.
struct RawSeries {
    std::string source_path;
    std::string column_used;
    std::string name;
    std::vector<RawRow> rows;

    std::size_t missing_count() const {
        std::size_t n = 0;
        for (const auto& r : rows)
            if (!r.value) ++n;
        return n;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

inline bool is_missing_cell(const std::string& cell) {
    if (cell.empty()) return true;
    std::string lowered;
    for (char c : cell) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lowered == "null" || lowered == "na" || lowered == "nan";
}

}  // namespace detail

/// Reads a quote-provider CSV (header `Date,Open,High,Low,Close,Adj Close,
/// Volume` or any header containing `Date` and the requested column).
/// Dates must be strictly increasing YYYY-MM-DD; empty or `null` cells
/// become missing values.
inline RawSeries parse_quote_csv(const std::string& path,
                                 const std::string& value_column = "Adj Close") {
    std::ifstream in(path);
    if (!in) throw IoError("parse_quote_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("parse_quote_csv: '" + path + "' is empty");
    const auto header = detail::split_csv_line(line);

    long date_idx = -1, value_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "Date") date_idx = static_cast<long>(i);
        if (header[i] == value_column) value_idx = static_cast<long>(i);
    }
    if (date_idx < 0) throw SchemaError("parse_quote_csv: no 'Date' column in '" + path + "'");
    if (value_idx < 0)
        throw SchemaError("parse_quote_csv: no '" + value_column + "' column in '" + path + "'");

    RawSeries out;
    out.source_path = path;
    out.column_used = value_column;
    out.name = std::filesystem::path(path).stem().string();

    std::size_t row_no = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() <= static_cast<std::size_t>(std::max(date_idx, value_idx)))
            throw ParseError("parse_quote_csv: short row in '" + path + "'", row_no);

        const auto date = Date::parse(cells[static_cast<std::size_t>(date_idx)]);
        if (!date)
            throw ParseError("parse_quote_csv: bad date '" + cells[static_cast<std::size_t>(date_idx)] +
                                 "' in '" + path + "'",
                             row_no);
        if (!out.rows.empty()) {
            if (*date == out.rows.back().date)
                throw DuplicateDate("parse_quote_csv: duplicate date " + date->to_string(), row_no);
            if (*date < out.rows.back().date)
                throw UnsortedDates("parse_quote_csv: dates not increasing at " + date->to_string(),
                                    row_no);
        }

        const std::string& cell = cells[static_cast<std::size_t>(value_idx)];
        std::optional<double> value;
        if (!detail::is_missing_cell(cell)) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size())
                throw ParseError("parse_quote_csv: bad number '" + cell + "' in '" + path + "'",
                                 row_no);
            value = v;
        }
        out.rows.push_back({*date, value});
    }
    return out;
}

struct CleaningLog {
    std::size_t rows_in_a = 0;
    std::size_t rows_in_b = 0;
    std::size_t unmatched_a = 0;
    std::size_t unmatched_b = 0;
    std::size_t missing_dropped_a = 0;  // matched dates dropped because a was missing
    std::size_t missing_dropped_b = 0;
    std::size_t rows_out = 0;

    std::size_t dropped_a() const { return unmatched_a + missing_dropped_a + missing_dropped_b; }
    std::size_t dropped_b() const { return unmatched_b + missing_dropped_a + missing_dropped_b; }
};

struct AlignedPair {
    TimeSeries a;
    TimeSeries b;
    CleaningLog log;
};

/// Inner join on dates, dropping every date where either side is missing.
inline AlignedPair align_and_clean(const RawSeries& a, const RawSeries& b) {
    CleaningLog log;
    log.rows_in_a = a.rows.size();
    log.rows_in_b = b.rows.size();

    std::vector<Date> dates;
    std::vector<double> va, vb;
    std::size_t i = 0, j = 0;
    while (i < a.rows.size() && j < b.rows.size()) {
        if (a.rows[i].date < b.rows[j].date) {
            ++log.unmatched_a;
            ++i;
        } else if (b.rows[j].date < a.rows[i].date) {
            ++log.unmatched_b;
            ++j;
        } else {
            if (!a.rows[i].value) {
                ++log.missing_dropped_a;
            } else if (!b.rows[j].value) {
                ++log.missing_dropped_b;
            } else {
                dates.push_back(a.rows[i].date);
                va.push_back(*a.rows[i].value);
                vb.push_back(*b.rows[j].value);
            }
            ++i;
            ++j;
        }
    }
    log.unmatched_a += a.rows.size() - i;
    log.unmatched_b += b.rows.size() - j;
    log.rows_out = dates.size();

    if (dates.empty()) throw NoOverlap("align_and_clean: no overlapping dates with values");
    TimeSeries sa(a.name, dates, std::move(va));
    TimeSeries sb(b.name, std::move(dates), std::move(vb));
    return {std::move(sa), std::move(sb), log};
}

}  // namespace tsecon::ingest
