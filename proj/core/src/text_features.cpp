#include "sentlab/text_features.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <tuple>

namespace sentlab {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
    return true;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = char(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string clean_tweet(std::string_view body) {
    // Pass 1: drop URLs, mentions and cashtags.
    std::string stripped;
    stripped.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        const bool token_start = i == 0 || is_space(body[i - 1]);
        if (token_start && (starts_with_ci(body, i, "http://") || starts_with_ci(body, i, "https://") ||
                            starts_with_ci(body, i, "www."))) {
            while (i < body.size() && !is_space(body[i])) ++i;
            continue;
        }
        if (body[i] == '@' && i + 1 < body.size() && (is_alnum(body[i + 1]) || body[i + 1] == '_')) {
            ++i;
            while (i < body.size() && (is_alnum(body[i]) || body[i] == '_')) ++i;
            continue;
        }
        if (body[i] == '$' && i + 1 < body.size() && is_alpha(body[i + 1])) {
            ++i;
            while (i < body.size() && (is_alnum(body[i]) || body[i] == '.')) ++i;
            continue;
        }
        stripped.push_back(body[i]);
        ++i;
    }

    // Pass 2: keep ASCII letters/digits, fold whitespace, lowercase.
    std::string out;
    out.reserve(stripped.size());
    bool pending_space = false;
    for (const char c : stripped) {
        if (is_space(c)) {
            pending_space = true;
        } else if (is_alnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

std::set<std::string> mentioned_tickers(std::string_view body, const std::set<std::string>& known) {
    std::set<std::string> found;
    std::size_t i = 0;
    while (i < body.size()) {
        if (!is_alnum(body[i])) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < body.size() && is_alnum(body[i])) ++i;
        auto word = upper(body.substr(start, i - start));
        if (known.count(word)) found.insert(std::move(word));
    }
    return found;
}

FilterResult filter_corpus(const std::vector<TweetRecord>& tweets,
                           const std::set<std::string>& known_tickers) {
    if (known_tickers.empty()) throw ParameterError("known ticker set is empty");
    std::set<std::string> known;
    for (const auto& t : known_tickers) known.insert(upper(t));

    FilterResult result;
    result.stats.input = tweets.size();

    std::vector<std::size_t> order(tweets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tweets[a].post_date < tweets[b].post_date;
    });

    std::vector<std::size_t> stage;
    for (const auto idx : order) {
        const auto& t = tweets[idx];
        if (trim(t.writer).empty()) {
            ++result.stats.missing_writer;
            continue;
        }
        stage.push_back(idx);
    }

    std::vector<std::size_t> next;
    for (const auto idx : stage) {
        if (mentioned_tickers(tweets[idx].body, known).size() >= 2) {
            ++result.stats.multi_ticker;
            continue;
        }
        next.push_back(idx);
    }
    stage.swap(next);
    next.clear();

    using Key = std::tuple<std::string, Date, std::string>;
    std::set<Key> seen;
    for (const auto idx : stage) {
        const auto& t = tweets[idx];
        if (!seen.emplace(upper(t.ticker), t.day(), t.body).second) {
            ++result.stats.raw_duplicates;
            continue;
        }
        next.push_back(idx);
    }
    stage.swap(next);
    next.clear();

    seen.clear();
    for (const auto idx : stage) {
        const auto& t = tweets[idx];
        if (!seen.emplace(upper(t.ticker), t.day(), clean_tweet(t.body)).second) {
            ++result.stats.clean_duplicates;
            continue;
        }
        next.push_back(idx);
    }

    result.kept.reserve(next.size());
    for (const auto idx : next) result.kept.push_back(tweets[idx]);
    result.stats.kept = result.kept.size();
    return result;
}

std::optional<SentimentScores> sentiment_scores(std::size_t n_neg, std::size_t n_pos) {
    if (n_neg + n_pos == 0) return std::nullopt;
    SentimentScores s;
    s.score1 = double(n_neg) / double(n_neg + n_pos);
    s.score2 = double(n_neg) / double(std::max<std::size_t>(n_pos, 1));
    return s;
}

std::vector<DailyTextFeatures> aggregate_daily_text(const std::vector<TweetRecord>& tweets,
                                                    const BusinessCalendar& calendar) {
    struct Acc {
        std::size_t n_pos = 0, n_neg = 0, n_emb = 0;
        std::vector<double> emb_mean; // running mean: exact for identical vectors
    };
    std::map<std::pair<std::string, Date>, Acc> groups;
    std::optional<std::size_t> dim;

    for (const auto& t : tweets) {
        if (!t.sentiment) throw ValidationError("tweet " + t.tweet_id + " has no sentiment label");
        if (*t.sentiment != 0 && *t.sentiment != 1)
            throw ValidationError("tweet " + t.tweet_id + " has a sentiment label outside {0,1}");
        auto& acc = groups[{t.ticker, calendar.roll_forward(t.day())}];
        (*t.sentiment == 1 ? acc.n_pos : acc.n_neg) += 1;
        if (t.embedding) {
            const auto& e = *t.embedding;
            if (!dim) dim = e.size();
            if (e.size() != *dim)
                throw ValidationError("tweet " + t.tweet_id + " has embedding dimension " +
                                      std::to_string(e.size()) + ", expected " +
                                      std::to_string(*dim));
            ++acc.n_emb;
            if (acc.n_emb == 1) {
                acc.emb_mean = e;
            } else {
                for (std::size_t k = 0; k < e.size(); ++k)
                    acc.emb_mean[k] += (e[k] - acc.emb_mean[k]) / double(acc.n_emb);
            }
        }
    }

    std::vector<DailyTextFeatures> out;
    out.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        DailyTextFeatures f;
        f.ticker = key.first;
        f.business_day = key.second;
        f.n_pos = acc.n_pos;
        f.n_neg = acc.n_neg;
        const auto scores = sentiment_scores(acc.n_neg, acc.n_pos);
        f.score1 = scores->score1;
        f.score2 = scores->score2;
        if (acc.n_emb > 0) f.mean_embedding = std::move(acc.emb_mean);
        out.push_back(std::move(f));
    }
    return out;
}

AlignedPanel align_panel(const PriceSeries& prices, const std::vector<DailyTextFeatures>& text,
                         const BusinessCalendar& calendar, std::size_t smoothing_span) {
    if (smoothing_span == 0) throw ParameterError("smoothing span must be >= 1");
    std::vector<const DailyTextFeatures*> mine;
    for (const auto& f : text)
        if (f.ticker == prices.ticker) mine.push_back(&f);
    if (prices.bars.empty() || mine.empty())
        throw AlignmentError(prices.ticker + ": no overlap between prices and text features");
    std::sort(mine.begin(), mine.end(), [](auto* a, auto* b) { return a->business_day < b->business_day; });

    const Date first = std::max(prices.bars.front().date, mine.front()->business_day);
    const Date last = std::min(prices.bars.back().date, mine.back()->business_day);
    if (first > last)
        throw AlignmentError(prices.ticker + ": price and text date ranges do not intersect");

    std::map<Date, const OhlcvBar*> bar_by_day;
    for (const auto& b : prices.bars) bar_by_day[b.date] = &b;
    std::map<Date, const DailyTextFeatures*> text_by_day;
    std::size_t dim = 0;
    for (const auto* f : mine) {
        text_by_day[f->business_day] = f;
        if (f->mean_embedding) dim = f->mean_embedding->size();
    }

    AlignedPanel panel;
    panel.ticker = prices.ticker;
    panel.embedding_dim = dim;

    std::optional<double> score;
    std::optional<std::vector<double>> emb;
    std::size_t missing_score_prefix = 0, missing_emb_prefix = 0;
    for (const Date d : calendar.days(first, last)) {
        const auto bar = bar_by_day.find(d);
        if (bar == bar_by_day.end())
            throw AlignmentError(prices.ticker + ": no price bar on business day " + format_date(d));
        PanelRow row;
        row.date = d;
        row.high = bar->second->high;
        row.low = bar->second->low;
        row.open = bar->second->open;
        row.volume = bar->second->volume;
        row.close = bar->second->close;
        row.holiday = calendar.follows_holiday(d);
        row.dow = day_of_week(d);
        if (const auto t = text_by_day.find(d); t != text_by_day.end()) {
            score = t->second->score2;
            if (t->second->mean_embedding) emb = *t->second->mean_embedding;
        }
        if (score) row.score_raw = *score;
        else ++missing_score_prefix;
        if (dim > 0) {
            if (emb) row.embedding = *emb;
            else ++missing_emb_prefix;
        }
        panel.rows.push_back(std::move(row));
    }

    // Backfill leading rows from the first available observation.
    for (std::size_t i = 0; i < missing_score_prefix; ++i)
        panel.rows[i].score_raw = panel.rows[missing_score_prefix].score_raw;
    if (dim > 0) {
        if (missing_emb_prefix == panel.rows.size())
            throw AlignmentError(prices.ticker + ": no embeddings inside the aligned range");
        for (std::size_t i = 0; i < missing_emb_prefix; ++i)
            panel.rows[i].embedding = panel.rows[missing_emb_prefix].embedding;
    }

    std::vector<double> raw;
    raw.reserve(panel.rows.size());
    for (const auto& r : panel.rows) raw.push_back(r.score_raw);
    const auto smoothed = ewma(raw, smoothing_span);
    for (std::size_t i = 0; i < panel.rows.size(); ++i) panel.rows[i].score = smoothed[i];
    return panel;
}

std::vector<TweetRecord> parse_tweets_csv(std::string_view text) {
    const auto records = parse_csv(text);
    static const std::vector<std::string> header = {"tweet_id", "writer", "post_date",
                                                    "ticker", "body", "sentiment"};
    if (records.empty()) throw ParseError(1, "missing header");
    {
        std::vector<std::string> got;
        for (const auto& f : records.front().fields) got.emplace_back(trim(f));
        if (got != header)
            throw ParseError(records.front().line,
                             "header must be tweet_id,writer,post_date,ticker,body,sentiment");
    }
    std::vector<TweetRecord> out;
    out.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size())
            throw ParseError(rec.line, "expected 6 fields, got " + std::to_string(rec.fields.size()));
        TweetRecord t;
        t.tweet_id = std::string(trim(rec.fields[0]));
        t.writer = rec.fields[1];
        const auto ts = parse_timestamp(rec.fields[2]);
        if (!ts) throw ParseError(rec.line, "invalid post_date '" + rec.fields[2] + "'");
        t.post_date = *ts;
        t.ticker = upper(trim(rec.fields[3]));
        t.body = rec.fields[4];
        const auto s = trim(rec.fields[5]);
        if (!s.empty()) {
            if (s == "0") t.sentiment = 0;
            else if (s == "1") t.sentiment = 1;
            else throw ParseError(rec.line, "sentiment must be blank, 0 or 1");
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TweetRecord> read_tweets_csv(const std::filesystem::path& path) {
    return parse_tweets_csv(read_text_file(path));
}

std::string format_tweets_csv(const std::vector<TweetRecord>& tweets) {
    std::string out = "tweet_id,writer,post_date,ticker,body,sentiment\n";
    for (const auto& t : tweets)
        out += csv_row({t.tweet_id, t.writer, format_timestamp(t.post_date), t.ticker, t.body,
                        t.sentiment ? std::to_string(*t.sentiment) : std::string{}});
    return out;
}

std::map<std::string, std::vector<double>> parse_embeddings_csv(std::string_view text) {
    const auto records = parse_csv(text);
    if (records.empty()) throw ParseError(1, "missing header");
    const auto& head = records.front().fields;
    if (head.size() < 2 || trim(head[0]) != "tweet_id")
        throw ParseError(records.front().line, "header must be tweet_id,v0,...");
    const std::size_t dim = head.size() - 1;
    for (std::size_t k = 0; k < dim; ++k)
        if (trim(head[k + 1]) != "v" + std::to_string(k))
            throw ParseError(records.front().line, "embedding columns must be v0..v{d-1}");

    std::map<std::string, std::vector<double>> out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != dim + 1)
            throw ParseError(rec.line, "expected " + std::to_string(dim + 1) + " fields");
        std::vector<double> v(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            const auto x = parse_double(rec.fields[k + 1]);
            if (!x || !std::isfinite(*x)) throw ParseError(rec.line, "invalid embedding value");
            v[k] = *x;
        }
        if (!out.emplace(std::string(trim(rec.fields[0])), std::move(v)).second)
            throw ParseError(rec.line, "duplicate tweet_id");
    }
    return out;
}

std::map<std::string, std::vector<double>> read_embeddings_csv(const std::filesystem::path& path) {
    return parse_embeddings_csv(read_text_file(path));
}

void attach_embeddings(std::vector<TweetRecord>& tweets,
                       const std::map<std::string, std::vector<double>>& embeddings) {
    for (auto& t : tweets)
        if (const auto it = embeddings.find(t.tweet_id); it != embeddings.end()) t.embedding = it->second;
}

std::string format_panel_csv(const AlignedPanel& panel) {
    std::vector<std::string> head = {"date", "ticker", "high",  "low",     "open", "volume",
                                     "close", "score_raw", "score", "holiday", "dow"};
    for (std::size_t k = 0; k < panel.embedding_dim; ++k) head.push_back("e" + std::to_string(k));
    std::string out = csv_row(head);
    for (const auto& r : panel.rows) {
        std::vector<std::string> f = {format_date(r.date),     panel.ticker,
                                      format_double(r.high),   format_double(r.low),
                                      format_double(r.open),   format_double(r.volume),
                                      format_double(r.close),  format_double(r.score_raw),
                                      format_double(r.score),  r.holiday ? "1" : "0",
                                      std::to_string(r.dow)};
        for (const double e : r.embedding) f.push_back(format_double(e));
        out += csv_row(f);
    }
    return out;
}

AlignedPanel parse_panel_csv(std::string_view text) {
    const auto records = parse_csv(text);
    if (records.empty()) throw ParseError(1, "missing header");
    const auto& head = records.front().fields;
    constexpr std::size_t fixed = 11;
    if (head.size() < fixed || head[0] != "date" || head[10] != "dow")
        throw ParseError(records.front().line, "not an aligned panel file");
    AlignedPanel panel;
    panel.embedding_dim = head.size() - fixed;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != head.size()) throw ParseError(rec.line, "wrong field count");
        PanelRow row;
        const auto d = parse_date(rec.fields[0]);
        if (!d) throw ParseError(rec.line, "invalid date");
        row.date = *d;
        if (panel.ticker.empty()) panel.ticker = rec.fields[1];
        double* slots[] = {&row.high, &row.low, &row.open, &row.volume, &row.close, &row.score_raw, &row.score};
        for (std::size_t k = 0; k < 7; ++k) {
            const auto v = parse_double(rec.fields[k + 2]);
            if (!v) throw ParseError(rec.line, "invalid number in column '" + head[k + 2] + "'");
            *slots[k] = *v;
        }
        row.holiday = rec.fields[9] == "1";
        const auto dow = parse_int(rec.fields[10]);
        if (!dow || *dow < 0 || *dow > 6) throw ParseError(rec.line, "invalid dow");
        row.dow = int(*dow);
        row.embedding.resize(panel.embedding_dim);
        for (std::size_t k = 0; k < panel.embedding_dim; ++k) {
            const auto v = parse_double(rec.fields[fixed + k]);
            if (!v) throw ParseError(rec.line, "invalid embedding value");
            row.embedding[k] = *v;
        }
        if (!(row.close > 0)) throw ValidationError("line " + std::to_string(rec.line) + ": close must be positive");
        panel.rows.push_back(std::move(row));
    }
    return panel;
}

AlignedPanel read_panel_csv(const std::filesystem::path& path) {
    return parse_panel_csv(read_text_file(path));
}

} // namespace sentlab
