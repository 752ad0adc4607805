#pragma once

#include "sentlab/io.hpp"
#include "sentlab/market_data.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sentlab {

struct TweetRecord {
    std::string tweet_id;
    std::string writer;
    Timestamp post_date{};
    std::string ticker;
    std::string body;
    std::optional<int> sentiment; // 1 positive, 0 negative
    std::optional<std::vector<double>> embedding;

    Date day() const { return std::chrono::floor<std::chrono::days>(post_date); }
};

struct DailyTextFeatures {
    Date business_day{};
    std::string ticker;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    double score1 = 0;
    double score2 = 0;
    std::optional<std::vector<double>> mean_embedding;
};

struct PanelRow {
    Date date{};
    double high = 0;
    double low = 0;
    double open = 0;
    double volume = 0;
    double close = 0;
    double score_raw = 0; // forward-filled score2 before smoothing
    double score = 0;     // EWMA-smoothed score2
    std::vector<double> embedding;
    bool holiday = false;
    int dow = 0;
};

struct AlignedPanel {
    std::string ticker;
    std::size_t embedding_dim = 0;
    std::vector<PanelRow> rows;
};

/// Strips URLs, @-mentions, $-tickers and punctuation; lowercases and
/// collapses whitespace.
std::string clean_tweet(std::string_view body);

/// Distinct known tickers mentioned in a raw body, as `$TICKER` or a bare
/// word, case-insensitive. `known` holds upper-case symbols.
std::set<std::string> mentioned_tickers(std::string_view body, const std::set<std::string>& known);

struct FilterStats {
    std::size_t input = 0;
    std::size_t missing_writer = 0;
    std::size_t multi_ticker = 0;
    std::size_t raw_duplicates = 0;
    std::size_t clean_duplicates = 0;
    std::size_t kept = 0;
};

struct FilterResult {
    std::vector<TweetRecord> kept;
    FilterStats stats;
};

/// Kept records come back ordered by (post_date, input position).
FilterResult filter_corpus(const std::vector<TweetRecord>& tweets,
                           const std::set<std::string>& known_tickers);

struct SentimentScores {
    double score1 = 0;
    double score2 = 0;
};

/// nullopt when there are no observations; callers treat the day as missing.
std::optional<SentimentScores> sentiment_scores(std::size_t n_neg, std::size_t n_pos);

/// Ordered by (ticker, business_day).
std::vector<DailyTextFeatures> aggregate_daily_text(const std::vector<TweetRecord>& tweets,
                                                    const BusinessCalendar& calendar);

AlignedPanel align_panel(const PriceSeries& prices, const std::vector<DailyTextFeatures>& text,
                         const BusinessCalendar& calendar, std::size_t smoothing_span);

// File formats.

std::vector<TweetRecord> parse_tweets_csv(std::string_view text);
std::vector<TweetRecord> read_tweets_csv(const std::filesystem::path& path);
std::string format_tweets_csv(const std::vector<TweetRecord>& tweets);

/// `tweet_id,v0,...,v{d-1}`; d is fixed by the header.
std::map<std::string, std::vector<double>> parse_embeddings_csv(std::string_view text);
std::map<std::string, std::vector<double>> read_embeddings_csv(const std::filesystem::path& path);

/// Attaches embeddings by tweet id; tweets without an entry stay without one.
void attach_embeddings(std::vector<TweetRecord>& tweets,
                       const std::map<std::string, std::vector<double>>& embeddings);

std::string format_panel_csv(const AlignedPanel& panel);
AlignedPanel parse_panel_csv(std::string_view text);
AlignedPanel read_panel_csv(const std::filesystem::path& path);

} // namespace sentlab
