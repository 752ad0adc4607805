#pragma once

#include "sentlab/market_data.hpp"
#include "sentlab/text_features.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sentlab {

/// Synthetic market whose returns are driven by a latent AR(1) sentiment:
///   s_t = phi * s_{t-1} + sqrt(1 - phi^2) * N(0,1)
///   log(close_{t+1} / close_t) = beta * s_t + return_noise * N(0,1)
struct SyntheticConfig {
    std::vector<std::string> tickers{"AAA", "BBB"};
    Date start = Date{std::chrono::year{2020} / 1 / 6};
    std::size_t business_days = 400;
    std::size_t embedding_dim = 16;
    double phi = 0.7;
    double beta = 0.01;
    double return_noise = 0.006;
    double score_noise = 0.5; // std of the score's observation noise
    double embed_noise = 2.0; // per-dimension noise std of the embedding
    double start_price = 100;
    std::uint64_t seed = 1;
};

struct SyntheticMarket {
    BusinessCalendar calendar;
    std::vector<std::vector<double>> latent; // per ticker, per business day
    std::vector<AlignedPanel> panels;        // score = noisy latent, embedding = mixed latent
};

/// Panels built directly from the latent process.
SyntheticMarket make_synthetic_market(const SyntheticConfig& config);

/// Raw inputs for the full pipeline: bars, a tweet corpus whose daily
/// negative share tracks the latent, per-tweet embeddings and a holiday list.
struct SyntheticCorpus {
    BusinessCalendar calendar;
    std::vector<PriceSeries> prices;
    std::vector<TweetRecord> tweets;
    std::map<std::string, std::vector<double>> embeddings;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config);

std::string format_holidays(const BusinessCalendar& calendar);
std::string format_embeddings_csv(const std::map<std::string, std::vector<double>>& embeddings);

} // namespace sentlab
