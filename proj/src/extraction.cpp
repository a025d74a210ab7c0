#include "kgpipe/extraction.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "kgpipe/error.hpp"
#include "kgpipe/prompts.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

std::vector<TokenBatch> plan_batches(const Article& article, const BackendConfig& config, const Tokenizer& tokenizer,
                                     std::size_t batch_size) {
    auto tokens = tokenizer.tokenize(article.body);
    if (tokens.empty()) return {};
    switch (config.effective_kind()) {
        case BackendKind::seq2seq_tokens:
            if (batch_size > config.input_limit()) {
                throw PreconditionViolation("batch_size " + std::to_string(batch_size) +
                                            " exceeds the seq2seq input limit " +
                                            std::to_string(config.input_limit()));
            }
            return chunk_tokens(article.id, tokens, tokenizer, batch_size);
        case BackendKind::chat_triples:
        case BackendKind::chat_ontology:
            if (tokens.size() <= config.input_limit()) {
                return {TokenBatch{article.id, 0, 0, tokens.size(), std::string(text::trim(article.body))}};
            }
            return chunk_tokens(article.id, tokens, tokenizer, batch_size);
        case BackendKind::replay: break;
    }
    throw PreconditionViolation("replay backend without a replayed kind");
}

ExtractionResult extract_article(const Article& article, const Backend& backend, const Tokenizer& tokenizer,
                                 const ExtractionOptions& options) {
    const auto& config = backend.config();
    auto kind = config.effective_kind();
    if (kind == BackendKind::chat_ontology) {
        throw PreconditionViolation("backend '" + config.backend_id + "' produces ontologies, not triples");
    }

    ExtractionResult result;
    auto batches = plan_batches(article, config, tokenizer, options.batch_size);
    result.batch_count = batches.size();
    for (const auto& batch : batches) {
        std::string input =
            kind == BackendKind::seq2seq_tokens ? batch.text : build_prompt(batch.text, PromptMode::triples, {});
        std::string output;
        try {
            output = backend.generate(input);
        } catch (const Error& e) {
            if (options.on_batch_error == BatchErrorPolicy::fail_fast) {
                throw BatchFailure(article.id, batch.batch_index, e.what());
            }
            result.failed_batches.push_back({batch.batch_index, e.what()});
            continue;
        }
        result.generations.push_back(
            {article.id, batch.batch_index, config.backend_id, request_hash(config, input), output});

        auto parsed = kind == BackendKind::seq2seq_tokens ? parse_seq2seq_output(output, options.marker_order)
                                                          : parse_chat_triples(output);
        result.report.absorb(parsed.report, batch.batch_index);
        for (auto& t : parsed.triplets) {
            t.provenance = Provenance{article.id, batch.batch_index, config.backend_id};
            result.triplets.push_back(std::move(t));
        }
    }
    return result;
}

ExtractionResult extract_article(const Article& article, const BackendConfig& config, const Tokenizer& tokenizer,
                                 const ExtractionOptions& options) {
    auto backend = make_backend(config);
    return extract_article(article, *backend, tokenizer, options);
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (!stop.load()) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        stop = true;
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<ExtractionResult> extract_corpus(const std::vector<Article>& articles, const Backend& backend,
                                             const Tokenizer& tokenizer, const ExtractionOptions& options,
                                             std::size_t workers) {
    std::vector<ExtractionResult> results(articles.size());
    parallel_for(articles.size(), workers,
                 [&](std::size_t i) { results[i] = extract_article(articles[i], backend, tokenizer, options); });
    return results;
}

}  // namespace kgpipe
