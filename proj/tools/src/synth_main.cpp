// Writes a synthetic raw-input corpus (bars, tweets, embeddings, holidays)
// plus a matching run configuration.

#include "sentlab/io.hpp"
#include "sentlab/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace sentlab;
    CLI::App app{"sentlab-synth: synthetic fixture generator"};
    std::filesystem::path out = "fixture";
    std::string tickers = "AAA,BBB";
    SyntheticConfig cfg;
    cfg.business_days = 220;
    cfg.embedding_dim = 8;
    app.add_option("--out", out, "output directory");
    app.add_option("--tickers", tickers, "comma-separated tickers");
    app.add_option("--days", cfg.business_days, "business days per ticker");
    app.add_option("--dim", cfg.embedding_dim, "embedding dimension");
    app.add_option("--seed", cfg.seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        cfg.tickers.clear();
        for (const auto& t : split(tickers, ','))
            if (!trim(t).empty()) cfg.tickers.emplace_back(trim(t));
        const auto corpus = make_synthetic_corpus(cfg);
        for (const auto& p : corpus.prices) write_file_atomic(out / "ohlcv" / (p.ticker + ".csv"), format_ohlcv_csv(p));
        write_file_atomic(out / "tweets.csv", format_tweets_csv(corpus.tweets));
        write_file_atomic(out / "embeddings.csv", format_embeddings_csv(corpus.embeddings));
        write_file_atomic(out / "holidays.txt", format_holidays(corpus.calendar));
        std::cout << "wrote " << corpus.tweets.size() << " tweets for " << corpus.prices.size() << " tickers to "
                  << out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
