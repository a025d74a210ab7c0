#include "kgpipe/backend.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

bool is_seq2seq(const BackendConfig& c) { return c.effective_kind() == BackendKind::seq2seq_tokens; }

std::optional<std::string> api_key(const BackendConfig& c) {
    if (c.api_key_env.empty()) return std::nullopt;
    const char* value = std::getenv(c.api_key_env.c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
}

http::RequestOptions request_options(const BackendConfig& c) {
    http::RequestOptions options;
    options.timeout = c.request_timeout;
    options.max_retries = c.max_retries;
    options.initial_backoff = c.initial_backoff;
    if (auto key = api_key(c)) options.headers.emplace_back("Authorization", "Bearer " + *key);
    return options;
}

class TokenCheckedBackend : public Backend {
protected:
    TokenCheckedBackend(BackendConfig config, std::shared_ptr<const Tokenizer> tokenizer)
        : Backend(std::move(config)), tokenizer_(std::move(tokenizer)) {}

    void check_limit(std::string_view input) const {
        if (!is_seq2seq(config_)) return;
        auto n = tokenizer_->tokenize(input).size();
        if (n > config_.input_limit()) throw TokenLimitExceeded(n, config_.input_limit());
    }

    std::shared_ptr<const Tokenizer> tokenizer_;
};

class ReplayBackend final : public TokenCheckedBackend {
public:
    ReplayBackend(BackendConfig config, std::shared_ptr<const Tokenizer> tokenizer)
        : TokenCheckedBackend(std::move(config), std::move(tokenizer)) {}

    std::string generate(std::string_view input) const override {
        check_limit(input);
        auto hash = request_hash(config_, input);
        auto path = std::filesystem::path(config_.fixture_dir) / (hash + ".txt");
        if (!std::filesystem::is_regular_file(path)) throw MissingFixture(hash);
        return text::read_file(path.string());
    }
};

class HttpBackend final : public TokenCheckedBackend {
public:
    HttpBackend(BackendConfig config, std::shared_ptr<const Tokenizer> tokenizer,
                std::shared_ptr<http::RateLimiter> limiter)
        : TokenCheckedBackend(std::move(config), std::move(tokenizer)), limiter_(std::move(limiter)) {
        if (limiter_ && config_.rate_limit_rps > 0.0) limiter_->set_rate(config_.endpoint, config_.rate_limit_rps);
    }

    std::string generate(std::string_view input) const override {
        check_limit(input);
        if (limiter_) limiter_->acquire(config_.endpoint);
        std::string output = is_seq2seq(config_) ? call_seq2seq(input) : call_chat(input);
        if (!config_.record_dir.empty()) {
            auto path = std::filesystem::path(config_.record_dir) / (request_hash(config_, input) + ".txt");
            text::write_file(path.string(), output);
        }
        return output;
    }

private:
    std::string call_chat(std::string_view prompt) const {
        json body = {{"model", config_.model_name},
                     {"temperature", config_.temperature},
                     {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
        auto response = http::post_json(config_.endpoint, body.dump(), request_options(config_));
        try {
            auto doc = json::parse(response.body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw HttpError(response.status, "unexpected chat response shape: " + text::excerpt(response.body, 200));
        }
    }

    std::string call_seq2seq(std::string_view input) const {
        json body = {{"inputs", std::string(input)}};
        auto response = http::post_json(config_.endpoint, body.dump(), request_options(config_));
        try {
            auto doc = json::parse(response.body);
            if (doc.is_array()) doc = doc.at(0);
            return doc.at("generated_text").get<std::string>();
        } catch (const json::exception&) {
            throw HttpError(response.status,
                            "unexpected seq2seq response shape: " + text::excerpt(response.body, 200));
        }
    }

    std::shared_ptr<http::RateLimiter> limiter_;
};

}  // namespace

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::seq2seq_tokens: return "seq2seq_tokens";
        case BackendKind::chat_triples: return "chat_triples";
        case BackendKind::chat_ontology: return "chat_ontology";
        case BackendKind::replay: return "replay";
    }
    return "unknown";
}

BackendKind backend_kind_from_string(std::string_view name) {
    for (auto kind : {BackendKind::seq2seq_tokens, BackendKind::chat_triples, BackendKind::chat_ontology,
                      BackendKind::replay}) {
        if (to_string(kind) == name) return kind;
    }
    throw PreconditionViolation("unknown backend kind '" + std::string(name) + "'");
}

std::size_t BackendConfig::input_limit() const noexcept {
    if (max_input_tokens) return *max_input_tokens;
    return effective_kind() == BackendKind::seq2seq_tokens ? 512 : kChatInputLimit;
}

void BackendConfig::validate(const std::string& key_path) const {
    if (backend_id.empty()) throw ConfigError(key_path + ".id", "must be non-empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError(key_path + ".temperature", "must be in [0, 2]");
    if (max_input_tokens && *max_input_tokens == 0) throw ConfigError(key_path + ".max_input_tokens", "must be positive");
    if (max_retries < 0) throw ConfigError(key_path + ".max_retries", "must be >= 0");
    if (request_timeout.count() <= 0) throw ConfigError(key_path + ".request_timeout_ms", "must be positive");
    if (kind == BackendKind::replay) {
        if (fixture_dir.empty()) throw ConfigError(key_path + ".fixture_dir", "replay backend needs a fixture directory");
        if (replay_of == BackendKind::replay) throw ConfigError(key_path + ".replay_of", "cannot replay a replay backend");
    } else if (endpoint.empty()) {
        throw ConfigError(key_path + ".endpoint", "live backend needs an endpoint URL");
    }
}

BackendConfig backend_config_from_json(const json& j, const std::string& key_path) {
    static const std::set<std::string> kKnown = {
        "id",          "kind",        "endpoint",       "model",           "temperature",
        "max_input_tokens", "request_timeout_ms", "max_retries", "initial_backoff_ms", "rate_limit_rps",
        "api_key_env", "fixture_dir", "replay_of",      "record_dir"};
    if (!j.is_object()) throw ConfigError(key_path, "must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!kKnown.count(key)) throw ConfigError(key_path + "." + key, "unknown key");
    }

    BackendConfig c;
    auto field = [&](const char* key) -> const json* {
        auto it = j.find(key);
        return it == j.end() ? nullptr : &*it;
    };
    auto as_string = [&](const char* key, std::string& out) {
        if (const json* v = field(key)) {
            if (!v->is_string()) throw ConfigError(key_path + "." + key, "must be a string");
            out = v->get<std::string>();
        }
    };
    auto as_kind = [&](const char* key, BackendKind& out) {
        std::string name;
        as_string(key, name);
        if (name.empty()) return;
        try {
            out = backend_kind_from_string(name);
        } catch (const PreconditionViolation& e) {
            throw ConfigError(key_path + "." + key, e.what());
        }
    };
    auto as_number = [&](const char* key) -> std::optional<double> {
        const json* v = field(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number()) throw ConfigError(key_path + "." + key, "must be a number");
        return v->get<double>();
    };
    auto as_count = [&](const char* key) -> std::optional<long long> {
        const json* v = field(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number_integer()) throw ConfigError(key_path + "." + key, "must be an integer");
        return v->get<long long>();
    };

    as_string("id", c.backend_id);
    if (!field("kind")) throw ConfigError(key_path + ".kind", "missing");
    as_kind("kind", c.kind);
    as_string("endpoint", c.endpoint);
    as_string("model", c.model_name);
    if (auto t = as_number("temperature")) c.temperature = *t;
    if (auto n = as_count("max_input_tokens")) {
        if (*n <= 0) throw ConfigError(key_path + ".max_input_tokens", "must be positive");
        c.max_input_tokens = static_cast<std::size_t>(*n);
    }
    if (auto n = as_count("request_timeout_ms")) c.request_timeout = std::chrono::milliseconds(*n);
    if (auto n = as_count("max_retries")) c.max_retries = static_cast<int>(*n);
    if (auto n = as_count("initial_backoff_ms")) c.initial_backoff = std::chrono::milliseconds(*n);
    if (auto r = as_number("rate_limit_rps")) c.rate_limit_rps = *r;
    as_string("api_key_env", c.api_key_env);
    as_string("fixture_dir", c.fixture_dir);
    as_kind("replay_of", c.replay_of);
    as_string("record_dir", c.record_dir);
    if (c.api_key_env.empty() && (c.kind == BackendKind::chat_triples || c.kind == BackendKind::chat_ontology)) {
        c.api_key_env = "OPENAI_API_KEY";
    }
    c.validate(key_path);
    return c;
}

json backend_config_to_json(const BackendConfig& c) {
    json j = {{"id", c.backend_id},
              {"kind", to_string(c.kind)},
              {"model", c.model_name},
              {"temperature", c.temperature},
              {"request_timeout_ms", c.request_timeout.count()},
              {"max_retries", c.max_retries},
              {"initial_backoff_ms", c.initial_backoff.count()},
              {"rate_limit_rps", c.rate_limit_rps}};
    if (!c.endpoint.empty()) j["endpoint"] = c.endpoint;
    if (c.max_input_tokens) j["max_input_tokens"] = *c.max_input_tokens;
    if (!c.api_key_env.empty()) j["api_key_env"] = c.api_key_env;
    if (c.kind == BackendKind::replay) {
        j["fixture_dir"] = c.fixture_dir;
        j["replay_of"] = to_string(c.replay_of);
    }
    if (!c.record_dir.empty()) j["record_dir"] = c.record_dir;
    return j;
}

std::string request_hash(const BackendConfig& config, std::string_view input) {
    json request = {{"model", config.model_name}, {"prompt", std::string(input)}, {"temperature", config.temperature}};
    return text::sha256_hex(request.dump());
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, std::shared_ptr<const Tokenizer> tokenizer,
                                      std::shared_ptr<http::RateLimiter> limiter) {
    config.validate();
    if (!tokenizer) tokenizer = std::make_shared<WhitespaceTokenizer>();
    if (config.kind == BackendKind::replay) return std::make_unique<ReplayBackend>(config, std::move(tokenizer));
    return std::make_unique<HttpBackend>(config, std::move(tokenizer), std::move(limiter));
}

std::string generate(const BackendConfig& config, std::string_view input) {
    return make_backend(config)->generate(input);
}

void BackendRegistry::add(BackendConfig config) {
    config.validate();
    auto id = config.backend_id;
    if (!configs_.emplace(id, std::move(config)).second) throw ConfigError("backends", "duplicate backend id '" + id + "'");
}

const BackendConfig& BackendRegistry::at(const std::string& id) const {
    auto it = configs_.find(id);
    if (it == configs_.end()) throw ConfigError("backend", "unknown backend id '" + id + "'");
    return it->second;
}

std::vector<std::string> BackendRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : configs_) out.push_back(id);
    return out;
}

}  // namespace kgpipe
