#include "kgpipe/chunking.hpp"

#include <algorithm>
#include <span>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

std::vector<TokenBatch> chunk_tokens(const std::string& article_id, const std::vector<std::string>& tokens,
                                     const Tokenizer& tokenizer, std::size_t batch_size) {
    if (batch_size == 0) throw PreconditionViolation("batch_size must be positive");
    std::vector<TokenBatch> batches;
    batches.reserve((tokens.size() + batch_size - 1) / batch_size);
    std::span<const std::string> all(tokens);
    for (std::size_t start = 0; start < tokens.size(); start += batch_size) {
        std::size_t end = std::min(tokens.size(), start + batch_size);
        TokenBatch b;
        b.article_id = article_id;
        b.batch_index = batches.size();
        b.token_start = start;
        b.token_end = end;
        b.text = tokenizer.detokenize(all.subspan(start, end - start));
        batches.push_back(std::move(b));
    }
    return batches;
}

std::vector<TokenBatch> chunk(const Article& article, const Tokenizer& tokenizer, std::size_t batch_size,
                              std::optional<std::size_t> input_limit) {
    if (batch_size == 0) throw PreconditionViolation("batch_size must be positive");
    if (input_limit && batch_size > *input_limit) {
        throw PreconditionViolation("batch_size " + std::to_string(batch_size) + " exceeds model input limit " +
                                    std::to_string(*input_limit));
    }
    return chunk_tokens(article.id, tokenizer.tokenize(article.body), tokenizer, batch_size);
}

std::string serialize_batches(const std::vector<TokenBatch>& batches) {
    std::ostringstream out;
    for (const auto& b : batches) {
        json record = {{"article_id", b.article_id},
                       {"batch_index", b.batch_index},
                       {"token_start", b.token_start},
                       {"token_end", b.token_end},
                       {"text", b.text}};
        out << record.dump() << '\n';
    }
    return out.str();
}

std::vector<TokenBatch> parse_batches(std::string_view jsonl) {
    std::vector<TokenBatch> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        auto line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            auto record = json::parse(line);
            TokenBatch b;
            b.article_id = record.at("article_id").get<std::string>();
            b.batch_index = record.at("batch_index").get<std::size_t>();
            b.token_start = record.at("token_start").get<std::size_t>();
            b.token_end = record.at("token_end").get<std::size_t>();
            b.text = record.at("text").get<std::string>();
            out.push_back(std::move(b));
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return out;
}

}  // namespace kgpipe
