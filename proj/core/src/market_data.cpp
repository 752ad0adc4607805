#include "sentlab/market_data.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace sentlab {

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(b.close);
    return out;
}

BusinessCalendar BusinessCalendar::from_holiday_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    std::set<Date> holidays;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto d = parse_date(t);
        if (!d) throw ParseError(line_no, "invalid holiday date '" + std::string(t) + "'");
        holidays.insert(*d);
    }
    return BusinessCalendar(std::move(holidays));
}

int day_of_week(Date d) {
    // encoding(): Sunday = 0.
    const unsigned wd = std::chrono::weekday{d}.c_encoding();
    return int((wd + 6) % 7);
}

bool BusinessCalendar::is_weekend(Date d) const { return day_of_week(d) >= 5; }

Date BusinessCalendar::roll_forward(Date d) const {
    while (!is_business_day(d)) d += std::chrono::days{1};
    return d;
}

Date BusinessCalendar::previous_business_day(Date d) const {
    d -= std::chrono::days{1};
    while (!is_business_day(d)) d -= std::chrono::days{1};
    return d;
}

bool BusinessCalendar::follows_holiday(Date d) const {
    const Date prev = previous_business_day(d);
    for (Date x = prev + std::chrono::days{1}; x < d; x += std::chrono::days{1})
        if (!is_weekend(x) && is_holiday(x)) return true;
    return false;
}

std::vector<Date> BusinessCalendar::days(Date first, Date last) const {
    std::vector<Date> out;
    for (Date d = first; d <= last; d += std::chrono::days{1})
        if (is_business_day(d)) out.push_back(d);
    return out;
}

void validate_bar(const OhlcvBar& bar) {
    const auto name = format_date(bar.date);
    const std::pair<const char*, double> prices[] = {{"open", bar.open},
                                                     {"high", bar.high},
                                                     {"low", bar.low},
                                                     {"close", bar.close},
                                                     {"adj_close", bar.adj_close}};
    for (const auto& [field, v] : prices)
        if (!std::isfinite(v) || v <= 0)
            throw ValidationError(name + ": " + field + " must be a positive finite price");
    if (!std::isfinite(bar.volume) || bar.volume < 0)
        throw ValidationError(name + ": volume must be non-negative");
    if (bar.low > std::min(bar.open, bar.close))
        throw ValidationError(name + ": low exceeds min(open, close)");
    if (bar.high < std::max(bar.open, bar.close))
        throw ValidationError(name + ": high below max(open, close)");
}

PriceSeries parse_ohlcv_text(std::string_view text, const BusinessCalendar& calendar,
                             std::string ticker) {
    const auto records = parse_csv(text);
    static const std::vector<std::string> header = {"date", "open", "high", "low",
                                                    "close", "adj_close", "volume"};
    if (records.empty()) throw ParseError(1, "missing header");
    {
        std::vector<std::string> got;
        for (const auto& f : records.front().fields) got.emplace_back(trim(f));
        if (got != header)
            throw ParseError(records.front().line,
                             "header must be date,open,high,low,close,adj_close,volume");
    }

    PriceSeries series;
    series.ticker = std::move(ticker);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size())
            throw ParseError(rec.line, "expected 7 fields, got " + std::to_string(rec.fields.size()));
        OhlcvBar bar;
        const auto date = parse_date(rec.fields[0]);
        if (!date) throw ParseError(rec.line, "invalid date '" + rec.fields[0] + "'");
        bar.date = *date;
        double* slots[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.adj_close, &bar.volume};
        for (std::size_t k = 0; k < 6; ++k) {
            const auto v = parse_double(rec.fields[k + 1]);
            if (!v) throw ParseError(rec.line, "invalid number in column '" + header[k + 1] + "'");
            *slots[k] = *v;
        }
        if (!calendar.is_business_day(bar.date))
            throw CalendarError("line " + std::to_string(rec.line) + ": " + format_date(bar.date) +
                                " is not a business day");
        validate_bar(bar);
        series.bars.push_back(bar);
    }
    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i)
        if (series.bars[i].date == series.bars[i - 1].date)
            throw ValidationError("duplicate date " + format_date(series.bars[i].date));
    return series;
}

PriceSeries parse_ohlcv_csv(const std::filesystem::path& path, const BusinessCalendar& calendar,
                            std::string ticker) {
    if (ticker.empty()) ticker = path.stem().string();
    return parse_ohlcv_text(read_text_file(path), calendar, std::move(ticker));
}

std::string format_ohlcv_csv(const PriceSeries& series) {
    std::string out = "date,open,high,low,close,adj_close,volume\n";
    for (const auto& b : series.bars)
        out += csv_row({format_date(b.date), format_double(b.open), format_double(b.high),
                        format_double(b.low), format_double(b.close), format_double(b.adj_close),
                        format_double(b.volume)});
    return out;
}

Smoothed smooth(std::span<const double> series, SmoothingMethod method, std::size_t span) {
    if (span == 0) throw ParameterError("smoothing span must be >= 1");
    if (series.empty()) throw ParameterError("cannot smooth an empty series");
    Smoothed out;
    if (method == SmoothingMethod::ewma) {
        const double alpha = 2.0 / (double(span) + 1.0);
        out.values.reserve(series.size());
        double s = series[0];
        out.values.push_back(s);
        for (std::size_t t = 1; t < series.size(); ++t) {
            s = alpha * series[t] + (1.0 - alpha) * s;
            out.values.push_back(s);
        }
        return out;
    }
    out.first_index = span - 1;
    if (series.size() < span) return out;
    // Each window summed afresh: no drift from a running subtraction.
    for (std::size_t end = span; end <= series.size(); ++end) {
        double sum = 0;
        for (std::size_t k = end - span; k < end; ++k) sum += series[k];
        out.values.push_back(sum / double(span));
    }
    return out;
}

std::vector<double> ewma(std::span<const double> series, std::size_t span) {
    return smooth(series, SmoothingMethod::ewma, span).values;
}

std::vector<double> atr(std::span<const OhlcvBar> bars, std::size_t n) {
    if (n == 0) throw ParameterError("ATR period must be >= 1");
    if (bars.empty()) throw ParameterError("ATR needs at least one bar");
    const double keep = double(n - 1) / double(n);
    const double take = 1.0 / double(n);
    std::vector<double> out(bars.size());
    out[0] = bars[0].high - bars[0].low;
    for (std::size_t t = 1; t < bars.size(); ++t) {
        const double prev_close = bars[t - 1].close;
        const double tr =
            std::max(bars[t].high, prev_close) - std::min(bars[t].low, prev_close);
        out[t] = keep * out[t - 1] + take * tr;
    }
    return out;
}

ReturnStats daily_returns_sigma(std::span<const double> close) {
    if (close.size() < 2) throw ParameterError("need at least two closes");
    for (const double c : close)
        if (!(c > 0)) throw DomainError("close prices must be positive");
    ReturnStats out;
    out.returns.reserve(close.size() - 1);
    for (std::size_t t = 1; t < close.size(); ++t) {
        const double r = (close[t] - close[t - 1]) / close[t - 1];
        out.returns.push_back(r);
        out.sum_squares += r * r;
    }
    out.sigma = std::sqrt(out.sum_squares);
    return out;
}

std::vector<double> min_max_scale(std::span<const double> series) {
    if (series.empty()) throw ParameterError("cannot scale an empty series");
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double min = *lo, range = *hi - *lo;
    std::vector<double> out(series.size(), 0.0);
    if (range == 0) return out;
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - min) / range;
    return out;
}

} // namespace sentlab
