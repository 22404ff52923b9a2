#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace tsecon {

/// Calendar date. Stored as a serial day number (days since 1970-01-01,
/// proleptic Gregorian) so ordering and arithmetic are cheap.
class Date {
  public:
    Date() = default;

    static Date from_ymd(int year, unsigned month, unsigned day) {
        return Date(days_from_civil(year, month, day));
    }

    static Date from_serial(long serial) { return Date(serial); }

    /// Parses "YYYY-MM-DD". Returns nullopt on malformed input or an
    /// impossible calendar date.
    static std::optional<Date> parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        int y = 0;
        unsigned m = 0, d = 0;
        auto num = [](std::string_view s, auto& out) {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc() && p == s.data() + s.size();
        };
        if (!num(text.substr(0, 4), y) || !num(text.substr(5, 2), m) || !num(text.substr(8, 2), d))
            return std::nullopt;
        if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
        return from_ymd(y, m, d);
    }

    long serial() const { return serial_; }

    struct Ymd {
        int year;
        unsigned month;
        unsigned day;
    };

    Ymd ymd() const { return civil_from_days(serial_); }

    std::string to_string() const {
        auto [y, m, d] = ymd();
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
        return buf;
    }

    Date operator+(long days) const { return Date(serial_ + days); }
    long operator-(Date other) const { return serial_ - other.serial_; }
    auto operator<=>(const Date&) const = default;

  private:
    explicit Date(long serial) : serial_(serial) {}

    // Howard Hinnant's civil-day algorithms.
    static long days_from_civil(int y, unsigned m, unsigned d) {
        y -= m <= 2;
        const long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    }

    static Ymd civil_from_days(long z) {
        z += 719468;
        const long era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long y = static_cast<long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return {static_cast<int>(y + (m <= 2)), m, d};
    }

    static unsigned days_in_month(int y, unsigned m) {
        static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) return 29;
        return lengths[m - 1];
    }

    long serial_ = 0;
};

}  // namespace tsecon
