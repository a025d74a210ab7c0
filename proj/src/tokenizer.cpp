#include "kgpipe/tokenizer.hpp"

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

namespace {

std::string join_spaces(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

}  // namespace

std::vector<std::string> WhitespaceTokenizer::tokenize(std::string_view text) const {
    return text::split_whitespace(text);
}

std::string WhitespaceTokenizer::detokenize(std::span<const std::string> tokens) const { return join_spaces(tokens); }

std::vector<std::string> WordPunctTokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        if (text::is_space(text[i])) {
            ++i;
        } else if (is_word_byte(c)) {
            std::size_t start = i;
            while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
            out.emplace_back(text.substr(start, i - start));
        } else {
            out.emplace_back(1, text[i]);
            ++i;
        }
    }
    return out;
}

std::string WordPunctTokenizer::detokenize(std::span<const std::string> tokens) const { return join_spaces(tokens); }

std::vector<std::string> tokenizer_names() { return {"whitespace", "wordpunct"}; }

std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& name) {
    if (name == "whitespace") return std::make_shared<WhitespaceTokenizer>();
    if (name == "wordpunct") return std::make_shared<WordPunctTokenizer>();
    throw PreconditionViolation("unknown tokenizer '" + name + "'");
}

}  // namespace kgpipe
