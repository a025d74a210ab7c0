#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgpipe/http.hpp"
#include "kgpipe/tokenizer.hpp"

namespace kgpipe {

enum class BackendKind { seq2seq_tokens, chat_triples, chat_ontology, replay };

std::string to_string(BackendKind kind);
// Throws PreconditionViolation for an unknown name.
BackendKind backend_kind_from_string(std::string_view name);

struct BackendConfig {
    std::string backend_id;
    BackendKind kind = BackendKind::seq2seq_tokens;
    std::string endpoint;
    std::string model_name;
    double temperature = 0.0;
    // Unset means the kind's default (512 for seq2seq, 4096 for chat).
    std::optional<std::size_t> max_input_tokens;
    std::chrono::milliseconds request_timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double rate_limit_rps = 0.0;
    // Name of the environment variable holding the API key. Keys never live
    // in config files or flags.
    std::string api_key_env;

    // Replay kind: fixture directory and the live kind being replayed, which
    // decides input handling and output parsing.
    std::string fixture_dir;
    BackendKind replay_of = BackendKind::seq2seq_tokens;

    // Live kinds: when set, every response is also written as a replay fixture.
    std::string record_dir;

    // Kind whose behavior this backend exhibits (replay_of for replay).
    BackendKind effective_kind() const noexcept { return kind == BackendKind::replay ? replay_of : kind; }
    std::size_t input_limit() const noexcept;

    // Throws ConfigError naming the offending field.
    void validate(const std::string& key_path = "backend") const;
};

inline constexpr std::size_t kChatInputLimit = 4096;

BackendConfig backend_config_from_json(const nlohmann::json& j, const std::string& key_path = "backend");
nlohmann::json backend_config_to_json(const BackendConfig& config);

// Stable content hash of a request: SHA-256 over the canonical JSON of
// {model, prompt, temperature}. Names replay fixtures `<hash>.txt`.
std::string request_hash(const BackendConfig& config, std::string_view input);

class Backend {
public:
    virtual ~Backend() = default;

    const BackendConfig& config() const noexcept { return config_; }

    // Raw completion text for `input`. Throws TokenLimitExceeded, TimeoutError,
    // HttpError or MissingFixture.
    virtual std::string generate(std::string_view input) const = 0;

protected:
    explicit Backend(BackendConfig config) : config_(std::move(config)) {}

    BackendConfig config_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config,
                                      std::shared_ptr<const Tokenizer> tokenizer = nullptr,
                                      std::shared_ptr<http::RateLimiter> limiter = nullptr);

// One-shot convenience over make_backend with the whitespace tokenizer.
std::string generate(const BackendConfig& config, std::string_view input);

// Backend table keyed by backend_id.
class BackendRegistry {
public:
    void add(BackendConfig config);
    bool contains(const std::string& id) const { return configs_.count(id) > 0; }
    // Throws ConfigError for an unknown id.
    const BackendConfig& at(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, BackendConfig> configs_;
};

}  // namespace kgpipe
