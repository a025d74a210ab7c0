#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgpipe {

// Tokenization contract used for batching and input-limit checks.
//
// detokenize(tokenize(t)) may differ from t, but re-tokenizing the detokenized
// text must reproduce the same token list. Implementations here are stateless
// and safe to share across threads.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::string name() const = 0;
    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
    virtual std::string detokenize(std::span<const std::string> tokens) const = 0;
};

// Splits on ASCII whitespace and joins with single spaces.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "whitespace"; }
    std::vector<std::string> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const std::string> tokens) const override;
};

// Runs of ASCII alphanumerics (plus any non-ASCII bytes) form one token; every
// other non-space character is a token on its own.
class WordPunctTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "wordpunct"; }
    std::vector<std::string> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const std::string> tokens) const override;
};

std::vector<std::string> tokenizer_names();

// Throws PreconditionViolation for an unknown name.
std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& name);

}  // namespace kgpipe
