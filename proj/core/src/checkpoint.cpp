#include "sentlab/checkpoint.hpp"

#include "sentlab/error.hpp"
#include "sentlab/io.hpp"

#include <nlohmann/json.hpp>

#include <map>

namespace sentlab {

using nlohmann::json;

namespace {

json tensor_json(const std::string& name, const nn::Tensor& t) {
    return json{{"name", name}, {"shape", t.shape()}, {"values", std::vector<double>(t.values().begin(), t.values().end())}};
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw CorruptionError(std::string("checkpoint is missing '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("checkpoint field '") + key + "': " + e.what());
    }
}

} // namespace

ModelCheckpoint make_checkpoint(const forecast::Forecaster& model, const forecast::FeatureSetSpec& feature_set,
                                const forecast::Normalizer& normalizer, std::vector<std::string> tickers) {
    ModelCheckpoint c;
    c.config = model.config();
    c.shape = model.shape();
    c.feature_set = feature_set;
    c.tickers = std::move(tickers);
    c.normalizer = normalizer;
    for (const auto& p : model.params()) c.tensors.emplace_back(p.name, p.value);
    return c;
}

std::string serialize_checkpoint(const ModelCheckpoint& c) {
    json config = json::object();
    for (const auto& [k, v] : forecast::describe(c.config)) config[k] = v;
    json companies = json::array();
    for (const auto& s : c.normalizer.companies)
        companies.push_back({{"ticker", s.ticker}, {"fit_rows", s.fit_rows}, {"mean", s.mean}, {"stdev", s.stdev}});
    json tensors = json::array();
    for (const auto& [name, t] : c.tensors) tensors.push_back(tensor_json(name, t));
    const json j = {
        {"format_version", c.format_version},
        {"model_type", forecast::to_string(c.config.model)},
        {"config", config},
        {"shape", {{"n_features", c.shape.n_features}, {"n_companies", c.shape.n_companies}}},
        {"feature_set", {{"kind", forecast::to_string(c.feature_set.kind)}, {"embedding_dim", c.feature_set.embedding_dim}}},
        {"tickers", c.tickers},
        {"normalizer", {{"columns", c.normalizer.columns}, {"companies", companies}}},
        {"tensors", tensors},
    };
    return j.dump(1) + "\n";
}

ModelCheckpoint parse_checkpoint(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CorruptionError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    ModelCheckpoint c;
    c.format_version = field<int>(j, "format_version");
    if (c.format_version != kCheckpointVersion) throw UnsupportedVersionError(c.format_version);

    try {
        for (const auto& [k, v] : field<std::map<std::string, std::string>>(j, "config"))
            forecast::apply_setting(c.config, k, v);
        c.config.validate();
        if (forecast::parse_model(field<std::string>(j, "model_type")) != c.config.model)
            throw CorruptionError("model_type disagrees with the stored config");
        const json shape = field<json>(j, "shape");
        c.shape.n_features = field<std::size_t>(shape, "n_features");
        c.shape.n_companies = field<std::size_t>(shape, "n_companies");
        const json fs = field<json>(j, "feature_set");
        c.feature_set.kind = forecast::parse_feature_set(field<std::string>(fs, "kind"));
        c.feature_set.embedding_dim = field<std::size_t>(fs, "embedding_dim");
    } catch (const CorruptionError&) {
        throw;
    } catch (const Error& e) {
        throw CorruptionError(std::string("checkpoint config: ") + e.what());
    }
    if (c.feature_set.feature_count() != c.shape.n_features)
        throw CorruptionError("feature set and model shape disagree on the feature count");

    c.tickers = field<std::vector<std::string>>(j, "tickers");
    const json norm = field<json>(j, "normalizer");
    c.normalizer.columns = field<std::vector<std::string>>(norm, "columns");
    for (const auto& s : field<json>(norm, "companies")) {
        forecast::CompanyScaler sc;
        sc.ticker = field<std::string>(s, "ticker");
        sc.fit_rows = field<std::size_t>(s, "fit_rows");
        sc.mean = field<std::vector<double>>(s, "mean");
        sc.stdev = field<std::vector<double>>(s, "stdev");
        if (sc.mean.size() != c.shape.n_features || sc.stdev.size() != c.shape.n_features)
            throw CorruptionError("normalizer for '" + sc.ticker + "' has the wrong width");
        c.normalizer.companies.push_back(std::move(sc));
    }
    if (c.tickers.size() != c.shape.n_companies)
        throw CorruptionError("ticker list and model shape disagree on the company count");

    for (const auto& t : field<json>(j, "tensors")) {
        const auto name = field<std::string>(t, "name");
        auto shape = field<std::vector<std::size_t>>(t, "shape");
        auto values = field<std::vector<double>>(t, "values");
        try {
            c.tensors.emplace_back(name, nn::Tensor(std::move(shape), std::move(values)));
        } catch (const ShapeError& e) {
            throw CorruptionError("tensor '" + name + "': " + e.what());
        }
    }
    return c;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_checkpoint(checkpoint));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_text_file(path)); }

std::unique_ptr<forecast::Forecaster> restore_model(const ModelCheckpoint& c) {
    auto model = forecast::make_model(c.config, c.shape);
    auto& params = model->params();
    if (c.tensors.size() != params.size())
        throw CorruptionError("checkpoint holds " + std::to_string(c.tensors.size()) + " tensors, model expects " +
                              std::to_string(params.size()));
    for (const auto& [name, t] : c.tensors) {
        std::size_t idx = 0;
        try {
            idx = params.index_of(name);
        } catch (const Error&) {
            throw CorruptionError("unexpected tensor '" + name + "'");
        }
        auto& p = params[idx];
        if (p.value.shape() != t.shape())
            throw CorruptionError("tensor '" + name + "' has shape " + t.shape_string() + ", config implies " +
                                  p.value.shape_string());
        if (!t.all_finite()) throw CorruptionError("tensor '" + name + "' holds non-finite values");
        p.value = t;
    }
    return model;
}

} // namespace sentlab
