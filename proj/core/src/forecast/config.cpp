#include "sentlab/forecast/config.hpp"

#include "sentlab/error.hpp"
#include "sentlab/io.hpp"

#include <algorithm>
#include <cctype>

namespace sentlab::forecast {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::size_t as_count(const std::string& key, const std::string& value, bool allow_zero = false) {
    const auto v = parse_int(value);
    if (!v || *v < 0 || (*v == 0 && !allow_zero))
        throw ConfigError(key + ": expected a positive integer, got '" + value + "'");
    return std::size_t(*v);
}

double as_real(const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError(key + ": expected a number, got '" + value + "'");
    return *v;
}

bool as_bool(const std::string& key, const std::string& value) {
    const auto v = lower(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

} // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::nlinear ? "nlinear" : "tft_lite"; }

ModelKind parse_model(const std::string& name) {
    const auto n = lower(name);
    if (n == "nlinear") return ModelKind::nlinear;
    if (n == "tft_lite" || n == "tft-lite" || n == "tft") return ModelKind::tft_lite;
    throw ConfigError("unknown model '" + name + "' (expected nlinear or tft_lite)");
}

nn::OptimizerConfig TrainConfig::optimizer_config() const {
    nn::OptimizerConfig c;
    c.kind = optimizer;
    c.lr = learning_rate;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.eps = adam_eps;
    return c;
}

void TrainConfig::validate() const {
    if (lookback == 0 || horizon == 0) throw ConfigError("lookback and horizon must be positive");
    if (hidden_size == 0 || hidden_continuous_size == 0) throw ConfigError("hidden sizes must be positive");
    if (lstm_layers == 0) throw ConfigError("lstm_layers must be positive");
    if (n_heads == 0 || hidden_size % n_heads != 0)
        throw ConfigError("hidden_size " + std::to_string(hidden_size) + " is not divisible by n_heads " +
                          std::to_string(n_heads));
    if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must lie in [0,1)");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (!(alpha >= 1)) throw ConfigError("alpha must be >= 1");
}

void apply_setting(TrainConfig& c, const std::string& raw_key, const std::string& raw_value) {
    std::string key = lower(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value(trim(raw_value));
    if (key == "model") c.model = parse_model(value);
    else if (key == "lookback") c.lookback = as_count(key, value);
    else if (key == "horizon") c.horizon = as_count(key, value);
    else if (key == "hidden_size") c.hidden_size = as_count(key, value);
    else if (key == "lstm_layers") c.lstm_layers = as_count(key, value);
    else if (key == "n_heads" || key == "num_attention_heads") c.n_heads = as_count(key, value);
    else if (key == "feed_forward") {
        const auto v = lower(value);
        if (v == "swiglu") c.feed_forward = nn::FeedForward::swiglu;
        else if (v == "relu") c.feed_forward = nn::FeedForward::relu;
        else throw ConfigError("feed_forward: expected swiglu or relu");
    } else if (key == "dropout") c.dropout = as_real(key, value);
    else if (key == "hidden_continuous_size") c.hidden_continuous_size = as_count(key, value);
    else if (key == "norm_type") {
        const auto v = lower(value);
        if (v == "rmsnorm") c.norm_type = nn::NormType::rmsnorm;
        else if (v == "layernorm" || v == "linearnorm") c.norm_type = nn::NormType::layernorm;
        else throw ConfigError("norm_type: expected rmsnorm or layernorm");
    } else if (key == "optimizer") {
        const auto v = lower(value);
        if (v == "adam") c.optimizer = nn::OptimizerKind::adam;
        else if (v == "adamw") c.optimizer = nn::OptimizerKind::adamw;
        else if (v == "adagrad") c.optimizer = nn::OptimizerKind::adagrad;
        else throw ConfigError("optimizer: expected adam, adamw or adagrad");
    } else if (key == "batch_size") c.batch_size = as_count(key, value);
    else if (key == "learning_rate" || key == "lr") c.learning_rate = as_real(key, value);
    else if (key == "beta1") c.beta1 = as_real(key, value);
    else if (key == "beta2") c.beta2 = as_real(key, value);
    else if (key == "adam_eps") c.adam_eps = as_real(key, value);
    else if (key == "epochs") c.epochs = as_count(key, value, true);
    else if (key == "seed") {
        const auto v = parse_int(value);
        if (!v || *v < 0) throw ConfigError("seed: expected a non-negative integer");
        c.seed = std::uint64_t(*v);
    } else if (key == "alpha") c.alpha = as_real(key, value);
    else if (key == "loss") c.loss = parse_loss(lower(value));
    else if (key == "const_init") c.const_init = as_bool(key, value);
    else throw ConfigError("unknown training setting '" + raw_key + "'");
}

std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& c) {
    const auto ff = c.feed_forward == nn::FeedForward::swiglu ? "swiglu" : "relu";
    const auto norm = c.norm_type == nn::NormType::rmsnorm ? "rmsnorm" : "layernorm";
    const auto opt = c.optimizer == nn::OptimizerKind::adam    ? "adam"
                     : c.optimizer == nn::OptimizerKind::adamw ? "adamw"
                                                               : "adagrad";
    return {{"model", to_string(c.model)},
            {"lookback", std::to_string(c.lookback)},
            {"horizon", std::to_string(c.horizon)},
            {"hidden_size", std::to_string(c.hidden_size)},
            {"lstm_layers", std::to_string(c.lstm_layers)},
            {"n_heads", std::to_string(c.n_heads)},
            {"feed_forward", ff},
            {"dropout", format_double(c.dropout)},
            {"hidden_continuous_size", std::to_string(c.hidden_continuous_size)},
            {"norm_type", norm},
            {"optimizer", opt},
            {"batch_size", std::to_string(c.batch_size)},
            {"learning_rate", format_double(c.learning_rate)},
            {"beta1", format_double(c.beta1)},
            {"beta2", format_double(c.beta2)},
            {"adam_eps", format_double(c.adam_eps)},
            {"epochs", std::to_string(c.epochs)},
            {"seed", std::to_string(c.seed)},
            {"alpha", format_double(c.alpha)},
            {"loss", to_string(c.loss)},
            {"const_init", c.const_init ? "true" : "false"}};
}

} // namespace sentlab::forecast
