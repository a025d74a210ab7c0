#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kgpipe/backend.hpp"
#include "kgpipe/chunking.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/parsing.hpp"
#include "kgpipe/tokenizer.hpp"
#include "kgpipe/triplet.hpp"

namespace kgpipe {

enum class BatchErrorPolicy { fail_fast, skip_and_record };

struct ExtractionOptions {
    std::size_t batch_size = kDefaultBatchSize;
    BatchErrorPolicy on_batch_error = BatchErrorPolicy::fail_fast;
    MarkerOrder marker_order = MarkerOrder::subject_predicate_object;
};

// One backend call, as written to the raw-generations log.
struct Generation {
    std::string article_id;
    std::size_t batch_index = 0;
    std::string backend_id;
    std::string request_hash;
    std::string output;

    friend bool operator==(const Generation&, const Generation&) = default;
};

struct FailedBatch {
    std::size_t batch_index = 0;
    std::string reason;

    friend bool operator==(const FailedBatch&, const FailedBatch&) = default;
};

struct ExtractionResult {
    std::vector<Triplet> triplets;
    ParseReport report;
    std::vector<FailedBatch> failed_batches;
    std::vector<Generation> generations;
    std::size_t batch_count = 0;

    friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;
};

// The batches an article is sent as. Seq2seq backends always use fixed-size
// batches (rejecting batch_size above the input limit); chat backends send
// the whole article as batch 0 when it fits the input limit.
std::vector<TokenBatch> plan_batches(const Article& article, const BackendConfig& config, const Tokenizer& tokenizer,
                                     std::size_t batch_size);

// Chunk, generate per batch, parse, and concatenate in batch order. Every
// triplet carries (article id, batch index, backend id). Under fail_fast the
// first generation error is rethrown as BatchFailure.
ExtractionResult extract_article(const Article& article, const Backend& backend, const Tokenizer& tokenizer,
                                 const ExtractionOptions& options = {});

ExtractionResult extract_article(const Article& article, const BackendConfig& config, const Tokenizer& tokenizer,
                                 const ExtractionOptions& options = {});

// Runs `task(i)` for i in [0, count) on up to `workers` threads. The first
// exception stops further scheduling and is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

// extract_article over many articles; results are in article order.
std::vector<ExtractionResult> extract_corpus(const std::vector<Article>& articles, const Backend& backend,
                                             const Tokenizer& tokenizer, const ExtractionOptions& options,
                                             std::size_t workers = 1);

}  // namespace kgpipe
