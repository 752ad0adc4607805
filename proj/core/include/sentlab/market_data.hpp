#pragma once

#include "sentlab/io.hpp"

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sentlab {

struct OhlcvBar {
    Date date{};
    double open = 0;
    double high = 0;
    double low = 0;
    double close = 0;
    double adj_close = 0;
    double volume = 0;
};

struct PriceSeries {
    std::string ticker;
    std::vector<OhlcvBar> bars;

    std::vector<double> closes() const;
};

/// Weekday calendar minus an explicit set of exchange holidays. The calendar
/// is unbounded; holiday days are excluded from the business days but stay
/// queryable through `is_holiday`.
class BusinessCalendar {
public:
    BusinessCalendar() = default;
    explicit BusinessCalendar(std::set<Date> holidays) : holidays_(std::move(holidays)) {}

    static BusinessCalendar from_holiday_file(const std::filesystem::path& path);

    bool is_weekend(Date d) const;
    bool is_holiday(Date d) const { return holidays_.count(d) > 0; }
    bool is_business_day(Date d) const { return !is_weekend(d) && !is_holiday(d); }

    /// `d` itself if it is a business day, otherwise the next one.
    Date roll_forward(Date d) const;
    Date next_business_day(Date d) const { return roll_forward(d + std::chrono::days{1}); }
    Date previous_business_day(Date d) const;

    /// True when the market was closed on a weekday between the previous
    /// business day and `d`.
    bool follows_holiday(Date d) const;

    /// Business days in the closed range [first, last].
    std::vector<Date> days(Date first, Date last) const;

    const std::set<Date>& holidays() const { return holidays_; }

private:
    std::set<Date> holidays_;
};

/// Monday = 0 ... Sunday = 6.
int day_of_week(Date d);

void validate_bar(const OhlcvBar& bar);

/// Reads `date,open,high,low,close,adj_close,volume`. Rows are returned sorted
/// by date; a row dated on a non-business day raises CalendarError.
PriceSeries parse_ohlcv_csv(const std::filesystem::path& path, const BusinessCalendar& calendar,
                            std::string ticker = {});
PriceSeries parse_ohlcv_text(std::string_view text, const BusinessCalendar& calendar,
                             std::string ticker = {});
std::string format_ohlcv_csv(const PriceSeries& series);

enum class SmoothingMethod { ewma, rolling_mean };

/// Result of smoothing. `first_index` is the input position of values[0]; it
/// is span-1 for rolling means (incomplete windows are skipped) and 0 for EWMA.
struct Smoothed {
    std::size_t first_index = 0;
    std::vector<double> values;
};

Smoothed smooth(std::span<const double> series, SmoothingMethod method, std::size_t span);

/// Convenience for the common EWMA case, aligned 1:1 with the input.
std::vector<double> ewma(std::span<const double> series, std::size_t span);

/// Wilder recursion over true ranges, seeded with ATR_1 = H_1 - L_1.
std::vector<double> atr(std::span<const OhlcvBar> bars, std::size_t n);

struct ReturnStats {
    std::vector<double> returns;
    double sum_squares = 0;
    double sigma = 0;
};

/// Simple daily returns and their dispersion around zero.
ReturnStats daily_returns_sigma(std::span<const double> close);

/// Maps to [0,1]; a constant series maps to zeros.
std::vector<double> min_max_scale(std::span<const double> series);

} // namespace sentlab
