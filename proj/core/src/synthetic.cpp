#include "sentlab/synthetic.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sentlab {

namespace {

struct LatentPaths {
    BusinessCalendar calendar;
    std::vector<Date> days;
    std::vector<std::vector<double>> latent;
    std::vector<PriceSeries> prices;
    std::vector<double> loading; // embedding loading vector, unit norm
};

BusinessCalendar make_calendar(Date start, std::size_t business_days) {
    // One weekday closure roughly every twelve weeks.
    std::set<Date> holidays;
    std::size_t weekdays = 0;
    for (Date d = start; weekdays < business_days + business_days / 60 + 1; d += std::chrono::days{1}) {
        if (day_of_week(d) >= 5) continue;
        if (weekdays % 60 == 37) holidays.insert(d);
        ++weekdays;
    }
    return BusinessCalendar(std::move(holidays));
}

LatentPaths make_paths(const SyntheticConfig& c, std::mt19937_64& rng) {
    if (c.tickers.empty()) throw ParameterError("synthetic market needs at least one ticker");
    if (c.business_days < 2) throw ParameterError("synthetic market needs at least two business days");
    if (!(std::abs(c.phi) < 1)) throw ParameterError("latent AR coefficient must satisfy |phi| < 1");
    std::normal_distribution<double> normal(0.0, 1.0);

    LatentPaths out;
    out.calendar = make_calendar(c.start, c.business_days);
    for (Date d = out.calendar.roll_forward(c.start); out.days.size() < c.business_days;
         d = out.calendar.next_business_day(d))
        out.days.push_back(d);

    out.loading.resize(c.embedding_dim);
    double norm = 0;
    for (auto& v : out.loading) {
        v = normal(rng);
        norm += v * v;
    }
    for (auto& v : out.loading) v /= std::sqrt(norm > 0 ? norm : 1.0);

    const double innovation = std::sqrt(1.0 - c.phi * c.phi);
    for (const auto& ticker : c.tickers) {
        std::vector<double> s(c.business_days);
        s[0] = normal(rng);
        for (std::size_t t = 1; t < s.size(); ++t) s[t] = c.phi * s[t - 1] + innovation * normal(rng);

        PriceSeries series;
        series.ticker = ticker;
        double close = c.start_price;
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (t > 0) close *= std::exp(c.beta * s[t - 1] + c.return_noise * normal(rng));
            OhlcvBar bar;
            bar.date = out.days[t];
            const double prev = series.bars.empty() ? close : series.bars.back().close;
            bar.open = prev * std::exp(0.002 * normal(rng));
            bar.close = close;
            bar.adj_close = close;
            bar.high = std::max(bar.open, bar.close) * std::exp(std::abs(0.003 * normal(rng)));
            bar.low = std::min(bar.open, bar.close) * std::exp(-std::abs(0.003 * normal(rng)));
            bar.volume = std::round(1e6 * std::exp(0.3 * normal(rng)));
            series.bars.push_back(bar);
        }
        out.latent.push_back(std::move(s));
        out.prices.push_back(std::move(series));
    }
    return out;
}

std::vector<double> embed(double s, const std::vector<double>& loading, double noise, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> e(loading.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = s * loading[j] + noise * normal(rng);
    return e;
}

} // namespace

SyntheticMarket make_synthetic_market(const SyntheticConfig& config) {
    std::mt19937_64 rng(config.seed);
    auto paths = make_paths(config, rng);
    std::normal_distribution<double> normal(0.0, 1.0);

    SyntheticMarket market;
    market.calendar = paths.calendar;
    for (std::size_t k = 0; k < config.tickers.size(); ++k) {
        AlignedPanel panel;
        panel.ticker = config.tickers[k];
        panel.embedding_dim = config.embedding_dim;
        for (std::size_t t = 0; t < paths.days.size(); ++t) {
            const auto& bar = paths.prices[k].bars[t];
            const double s = paths.latent[k][t];
            PanelRow row;
            row.date = bar.date;
            row.high = bar.high;
            row.low = bar.low;
            row.open = bar.open;
            row.volume = bar.volume;
            row.close = bar.close;
            row.score_raw = s + config.score_noise * normal(rng);
            row.score = row.score_raw;
            row.embedding = embed(s, paths.loading, config.embed_noise, rng);
            row.holiday = paths.calendar.follows_holiday(bar.date);
            row.dow = day_of_week(bar.date);
            panel.rows.push_back(std::move(row));
        }
        panel.rows.shrink_to_fit();
        market.panels.push_back(std::move(panel));
    }
    market.latent = std::move(paths.latent);
    return market;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config) {
    std::mt19937_64 rng(config.seed);
    auto paths = make_paths(config, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> seconds(9 * 3600, 20 * 3600);

    static const char* const kPositive[] = {"rally", "strong buy", "breakout", "beat estimates", "moon"};
    static const char* const kNegative[] = {"selloff", "downgrade", "weak guidance", "missed estimates", "dump"};

    SyntheticCorpus corpus;
    corpus.calendar = paths.calendar;
    corpus.prices = paths.prices;
    std::size_t next_id = 1;
    const Date last = paths.days.back();
    for (std::size_t k = 0; k < config.tickers.size(); ++k) {
        const auto& ticker = config.tickers[k];
        std::size_t t = 0;
        for (Date d = paths.days.front(); d <= last; d += std::chrono::days{1}) {
            while (paths.days[t] < d) ++t;
            const double s = paths.latent[k][t];
            const bool trading = paths.calendar.is_business_day(d);
            const int n = trading ? 4 + int(unit(rng) * 5) : 1 + int(unit(rng) * 2);
            const double p_negative = 1.0 / (1.0 + std::exp(-1.5 * s));
            for (int i = 0; i < n; ++i) {
                TweetRecord tw;
                tw.tweet_id = "t" + std::to_string(next_id++);
                const double roll = unit(rng);
                tw.writer = roll < 0.03 ? "" : "user" + std::to_string(1 + int(unit(rng) * 40));
                tw.post_date = std::chrono::sys_seconds{d} + std::chrono::seconds{seconds(rng)};
                tw.ticker = ticker;
                const bool negative = unit(rng) < p_negative;
                const auto& words = negative ? kNegative : kPositive;
                tw.body = "$" + ticker + " " + words[std::size_t(unit(rng) * 5)] + " " +
                          std::to_string(int(unit(rng) * 1000));
                if (unit(rng) < 0.1) tw.body += " https://example.com/" + std::to_string(next_id);
                if (config.tickers.size() > 1 && unit(rng) < 0.03)
                    tw.body += " vs $" + config.tickers[(k + 1) % config.tickers.size()];
                tw.sentiment = negative ? 0 : 1;
                corpus.embeddings[tw.tweet_id] = embed(s, paths.loading, config.embed_noise, rng);
                corpus.tweets.push_back(tw);
                if (unit(rng) < 0.03) {
                    TweetRecord dup = tw;
                    dup.tweet_id = "t" + std::to_string(next_id++);
                    corpus.embeddings[dup.tweet_id] = corpus.embeddings[tw.tweet_id];
                    corpus.tweets.push_back(std::move(dup));
                }
            }
        }
    }
    return corpus;
}

std::string format_holidays(const BusinessCalendar& calendar) {
    std::string out;
    for (const auto d : calendar.holidays()) out += format_date(d) + "\n";
    return out;
}

std::string format_embeddings_csv(const std::map<std::string, std::vector<double>>& embeddings) {
    if (embeddings.empty()) return "tweet_id\n";
    const std::size_t d = embeddings.begin()->second.size();
    std::string out = "tweet_id";
    for (std::size_t j = 0; j < d; ++j) out += ",v" + std::to_string(j);
    out += "\n";
    for (const auto& [id, e] : embeddings) {
        if (e.size() != d) throw ShapeError("embedding '" + id + "' has inconsistent dimension");
        out += csv_escape(id);
        for (const double v : e) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

} // namespace sentlab
