#pragma once

#include "sentlab/market_data.hpp"
#include "sentlab/text_features.hpp"

#include <functional>
#include <string>

namespace panels {

/// Business-day panel whose close follows `close(t)`; other columns are
/// simple functions of the close.
inline sentlab::AlignedPanel from_closes(const std::string& ticker, std::size_t rows,
                                         const std::function<double(std::size_t)>& close,
                                         std::size_t embedding_dim = 0) {
    sentlab::BusinessCalendar cal;
    sentlab::AlignedPanel p;
    p.ticker = ticker;
    p.embedding_dim = embedding_dim;
    sentlab::Date d = cal.roll_forward(sentlab::Date{std::chrono::year{2021} / 1 / 4});
    for (std::size_t t = 0; t < rows; ++t, d = cal.next_business_day(d)) {
        sentlab::PanelRow r;
        r.date = d;
        r.close = close(t);
        r.open = r.close * 0.999;
        r.high = r.close * 1.01;
        r.low = r.close * 0.99;
        r.volume = 1000 + double(t % 7);
        r.score_raw = double(t % 3);
        r.score = r.score_raw;
        for (std::size_t j = 0; j < embedding_dim; ++j) r.embedding.push_back(double((t + j) % 5));
        r.dow = sentlab::day_of_week(d);
        p.rows.push_back(std::move(r));
    }
    return p;
}

} // namespace panels
