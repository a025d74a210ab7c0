#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/corpus.hpp"
#include "kgpipe/tokenizer.hpp"

namespace kgpipe {

inline constexpr std::size_t kDefaultBatchSize = 256;
inline constexpr std::size_t kSeq2SeqInputLimit = 512;

// A contiguous token slice [token_start, token_end) of one article.
struct TokenBatch {
    std::string article_id;
    std::size_t batch_index = 0;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    std::string text;

    std::size_t size() const noexcept { return token_end - token_start; }

    friend bool operator==(const TokenBatch&, const TokenBatch&) = default;
};

// Splits at exact token boundaries; every batch but the last holds exactly
// batch_size tokens. `input_limit`, when set, must be >= batch_size.
std::vector<TokenBatch> chunk(const Article& article, const Tokenizer& tokenizer,
                              std::size_t batch_size = kDefaultBatchSize,
                              std::optional<std::size_t> input_limit = std::nullopt);

// Same slicing over an already tokenized sequence.
std::vector<TokenBatch> chunk_tokens(const std::string& article_id, const std::vector<std::string>& tokens,
                                     const Tokenizer& tokenizer, std::size_t batch_size);

std::string serialize_batches(const std::vector<TokenBatch>& batches);
std::vector<TokenBatch> parse_batches(std::string_view jsonl);

}  // namespace kgpipe
