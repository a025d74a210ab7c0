#include "kgpipe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "kgpipe/chunking.hpp"
#include "kgpipe/http.hpp"
#include "kgpipe/kgstore.hpp"
#include "kgpipe/ontology.hpp"
#include "kgpipe/text.hpp"
#include "kgpipe/tokenizer.hpp"
#include "kgpipe/turtle.hpp"

namespace kgpipe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

std::size_t as_positive(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) throw ConfigError(path, "expected a positive integer");
    return v.get<std::size_t>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    return v.get<bool>();
}

std::vector<std::string> as_strings(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Date as_date(const json& v, const std::string& path) {
    auto d = parse_date(as_string(v, path));
    if (!d) throw ConfigError(path, "expected a YYYY-MM-DD date");
    return *d;
}

LinkingConfig linking_from_json(const json& j, const std::string& base_dir) {
    const std::string path = "linking";
    require_object(j, path);
    LinkingConfig c;
    c.enabled = true;
    for (const auto& [key, v] : j.items()) {
        auto kp = path + "." + key;
        if (key == "enabled") {
            c.enabled = as_bool(v, kp);
        } else if (key == "endpoint") {
            c.endpoint = as_string(v, kp);
        } else if (key == "fixture_file") {
            c.fixture_file = resolve(base_dir, as_string(v, kp));
        } else if (key == "cache_path") {
            c.cache_path = resolve(base_dir, as_string(v, kp));
        } else if (key == "match") {
            auto m = as_string(v, kp);
            if (m == "exact") {
                c.match = MatchRule::exact;
            } else if (m == "prefix") {
                c.match = MatchRule::prefix;
            } else {
                throw ConfigError(kp, "expected \"exact\" or \"prefix\"");
            }
        } else if (key == "negative_ttl_hours") {
            c.negative_ttl_hours = as_positive(v, kp);
        } else if (key == "on_unavailable") {
            auto m = as_string(v, kp);
            if (m != "fallback" && m != "fail") throw ConfigError(kp, "expected \"fallback\" or \"fail\"");
            c.fallback_on_unavailable = m == "fallback";
        } else {
            throw ConfigError(kp, "unknown key");
        }
    }
    if (c.enabled && c.endpoint.empty() == c.fixture_file.empty()) {
        throw ConfigError(path, "exactly one of endpoint and fixture_file is required when linking is enabled");
    }
    return c;
}

ExportConfig export_from_json(const json& j) {
    const std::string path = "export";
    require_object(j, path);
    ExportConfig c;
    for (const auto& [key, v] : j.items()) {
        auto kp = path + "." + key;
        if (key == "formats") {
            c.formats.clear();
            for (const auto& name : as_strings(v, kp)) {
                try {
                    auto f = export_format_from_string(name);
                    if (std::find(c.formats.begin(), c.formats.end(), f) == c.formats.end()) c.formats.push_back(f);
                } catch (const UnsupportedFormat&) {
                    throw ConfigError(kp, "unsupported format '" + name + "'");
                }
            }
        } else if (key == "max_nodes") {
            c.options.max_nodes = as_positive(v, kp);
        } else if (key == "seed") {
            c.options.seed_entity = as_string(v, kp);
        } else if (key == "radius") {
            if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(kp, "expected a non-negative integer");
            c.options.radius = v.get<std::size_t>();
        } else {
            throw ConfigError(kp, "unknown key");
        }
    }
    return c;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j, const std::string& base_dir) {
    require_object(j, "$");
    PipelineConfig c;
    bool have_backends = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "corpus") {
            c.corpus = resolve(base_dir, as_string(v, key));
        } else if (key == "output_dir") {
            c.output_dir = resolve(base_dir, as_string(v, key));
        } else if (key == "date_range") {
            require_object(v, key);
            for (const auto& [k, d] : v.items()) {
                if (k == "from") {
                    c.date_from = as_date(d, "date_range.from");
                } else if (k == "to") {
                    c.date_to = as_date(d, "date_range.to");
                } else {
                    throw ConfigError("date_range." + k, "unknown key");
                }
            }
            if (!c.date_from || !c.date_to) throw ConfigError(key, "both from and to are required");
            if (*c.date_from > *c.date_to) throw ConfigError(key, "from is after to");
        } else if (key == "mode") {
            auto m = as_string(v, key);
            if (m == "triples") {
                c.mode = PromptMode::triples;
            } else if (m == "ontology") {
                c.mode = PromptMode::ontology;
            } else {
                throw ConfigError(key, "expected \"triples\" or \"ontology\"");
            }
        } else if (key == "backend") {
            c.backend = as_string(v, key);
        } else if (key == "backends") {
            if (!v.is_array()) throw ConfigError(key, "expected an array");
            have_backends = true;
            for (std::size_t i = 0; i < v.size(); ++i) {
                auto kp = key + "[" + std::to_string(i) + "]";
                auto b = backend_config_from_json(v[i], kp);
                b.fixture_dir = resolve(base_dir, b.fixture_dir);
                b.record_dir = resolve(base_dir, b.record_dir);
                if (c.backends.contains(b.backend_id)) throw ConfigError(kp + ".id", "duplicate backend id");
                c.backends.add(std::move(b));
            }
        } else if (key == "tokenizer") {
            c.tokenizer = as_string(v, key);
            auto names = tokenizer_names();
            if (std::find(names.begin(), names.end(), c.tokenizer) == names.end()) {
                throw ConfigError(key, "unknown tokenizer '" + c.tokenizer + "'");
            }
        } else if (key == "batch_size") {
            c.extraction.batch_size = as_positive(v, key);
        } else if (key == "marker_order") {
            auto m = as_string(v, key);
            if (m == "subject_predicate_object") {
                c.extraction.marker_order = MarkerOrder::subject_predicate_object;
            } else if (m == "head_tail_relation") {
                c.extraction.marker_order = MarkerOrder::head_tail_relation;
            } else {
                throw ConfigError(key, "expected \"subject_predicate_object\" or \"head_tail_relation\"");
            }
        } else if (key == "on_batch_error") {
            auto m = as_string(v, key);
            if (m == "fail_fast") {
                c.extraction.on_batch_error = BatchErrorPolicy::fail_fast;
            } else if (m == "skip_and_record") {
                c.extraction.on_batch_error = BatchErrorPolicy::skip_and_record;
            } else {
                throw ConfigError(key, "expected \"fail_fast\" or \"skip_and_record\"");
            }
        } else if (key == "workers") {
            c.workers = as_positive(v, key);
        } else if (key == "repair_max_attempts") {
            c.repair_max_attempts = as_positive(v, key);
        } else if (key == "seed_concepts") {
            c.seed_concepts = as_strings(v, key);
            if (c.seed_concepts.empty()) throw ConfigError(key, "must not be empty");
        } else if (key == "linking") {
            c.linking = linking_from_json(v, base_dir);
        } else if (key == "quality") {
            c.quality = v.is_string() ? load_quality_config(resolve(base_dir, v.get<std::string>()))
                                      : quality_config_from_json(v, key);
        } else if (key == "export") {
            c.export_options = export_from_json(v);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (c.corpus.empty()) throw ConfigError("corpus", "required");
    if (c.output_dir.empty()) throw ConfigError("output_dir", "required");
    if (!have_backends) throw ConfigError("backends", "required");
    if (c.backend.empty()) {
        auto ids = c.backends.ids();
        if (ids.size() != 1) throw ConfigError("backend", "required when more than one backend is configured");
        c.backend = ids.front();
    }
    if (!c.backends.contains(c.backend)) throw ConfigError("backend", "no backend with id '" + c.backend + "'");
    return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::string content;
    try {
        content = text::read_file(path);
    } catch (const FileNotFound& e) {
        throw ConfigError("$", e.what());
    }
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    auto base = fs::path(path).parent_path().string();
    return pipeline_config_from_json(j, base.empty() ? "." : base);
}

namespace {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void check_mode(const PipelineConfig& c, const BackendConfig& b) {
    auto kind = b.effective_kind();
    if (c.mode == PromptMode::ontology && kind != BackendKind::chat_ontology) {
        throw ConfigError("backend", "ontology mode needs a chat_ontology backend, '" + b.backend_id + "' is " +
                                         to_string(kind));
    }
    if (c.mode == PromptMode::triples && kind == BackendKind::chat_ontology) {
        throw ConfigError("backend", "triples mode cannot use the chat_ontology backend '" + b.backend_id + "'");
    }
}

class Run {
public:
    Run(const PipelineConfig& config, std::string config_sha256)
        : config_(config), out_(config.output_dir), config_sha256_(std::move(config_sha256)) {}

    PipelineResult execute() {
        manifest_["config_sha256"] = config_sha256_;
        manifest_["mode"] = config_.mode == PromptMode::triples ? "triples" : "ontology";
        manifest_["backend"] = config_.backend;
        manifest_["started_at"] = utc_timestamp();
        manifest_["stages"] = json::array();
        fs::create_directories(out_);

        const auto& backend_config = config_.backends.at(config_.backend);
        check_mode(config_, backend_config);
        tokenizer_ = make_tokenizer(config_.tokenizer);
        limiter_ = std::make_shared<http::RateLimiter>();

        stage("corpus", [&] { load(); });
        stage("chunk", [&] { plan(backend_config); });
        backend_ = make_backend(backend_config, tokenizer_, limiter_);
        if (config_.mode == PromptMode::triples) {
            stage("extract", [&] { extract(); });
            stage("link", [&] { link(); });
            stage("merge", [&] { merge_triples(); });
        } else {
            stage("extract", [&] { extract_ontologies(); });
            stage("merge", [&] { merge_ontologies(); });
        }
        stage("evaluate", [&] { evaluate_kb(); });
        stage("export", [&] { export_kb(); });

        finish();
        return {out_.string(), counts_};
    }

private:
    template <typename F>
    void stage(const std::string& name, F&& body) {
        try {
            body();
            manifest_["stages"].push_back({{"name", name}, {"status", "ok"}});
        } catch (const ConfigError&) {
            manifest_["stages"].push_back({{"name", name}, {"status", "config_error"}});
            finish();
            throw;
        } catch (const std::exception& e) {
            manifest_["stages"].push_back({{"name", name}, {"status", "failed"}, {"error", e.what()}});
            finish();
            throw StageFailure(name, e.what());
        }
    }

    void write(const std::string& name, std::string_view content) {
        text::write_file((out_ / name).string(), content);
        artifacts_.insert(name);
    }

    void finish() {
        manifest_["finished_at"] = utc_timestamp();
        manifest_["counts"] = counts_;
        manifest_["artifacts"] = artifacts_;
        text::write_file((out_ / "manifest.json").string(), manifest_.dump(2) + "\n");
    }

    void load() {
        CorpusLoadReport report;
        auto all = load_corpus(config_.corpus, &report);
        counts_["articles_loaded"] = all.size();
        if (config_.date_from) all = filter_by_date(all, *config_.date_from, *config_.date_to);
        counts_["articles_in_range"] = all.size();
        for (auto& a : all) {
            if (!text::trim(a.body).empty()) articles_.push_back(std::move(a));
        }
        corpus_meta_ = articles_;
        counts_["articles_skipped_empty"] = counts_["articles_in_range"] - articles_.size();
    }

    void plan(const BackendConfig& backend_config) {
        std::vector<TokenBatch> all;
        for (const auto& a : articles_) {
            auto batches = plan_batches(a, backend_config, *tokenizer_, config_.extraction.batch_size);
            all.insert(all.end(), batches.begin(), batches.end());
        }
        counts_["batches"] = all.size();
        write("batches.jsonl", serialize_batches(all));
    }

    void extract() {
        auto results = extract_corpus(articles_, *backend_, *tokenizer_, config_.extraction, config_.workers);
        std::string log;
        ParseReport parse;
        std::size_t failed = 0, generations = 0;
        json failures = json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            auto& r = results[i];
            for (const auto& g : r.generations) {
                log += json{{"article_id", g.article_id},
                            {"batch_index", g.batch_index},
                            {"backend_id", g.backend_id},
                            {"request_hash", g.request_hash},
                            {"output", g.output}}
                           .dump() +
                       "\n";
                ++generations;
            }
            parse.triplets_emitted += r.report.triplets_emitted;
            parse.segments_skipped += r.report.segments_skipped;
            for (const auto& f : r.failed_batches) {
                failures.push_back({{"article_id", articles_[i].id}, {"batch_index", f.batch_index}, {"reason", f.reason}});
            }
            failed += r.failed_batches.size();
            triplets_.insert(triplets_.end(), r.triplets.begin(), r.triplets.end());
        }
        counts_["generations"] = generations;
        counts_["triplets_parsed"] = triplets_.size();
        counts_["segments_skipped"] = parse.segments_skipped;
        counts_["failed_batches"] = failed;
        if (!failures.empty()) manifest_["failed_batches"] = failures;
        write("generations.jsonl", log);
        write("triples.jsonl", serialize_triplets(triplets_));
    }

    void link() {
        std::unique_ptr<LookupClient> client;
        const auto& lc = config_.linking;
        if (!lc.enabled) {
            client = std::make_unique<OfflineLookupClient>();
        } else if (!lc.fixture_file.empty()) {
            client = std::make_unique<StubLookupClient>(StubLookupClient::from_file(lc.fixture_file));
        } else {
            client = std::make_unique<HttpLookupClient>(lc.endpoint);
        }
        LinkingOptions options;
        options.match = lc.match;
        options.fallback_on_unavailable = lc.fallback_on_unavailable;
        options.negative_ttl = std::chrono::hours(lc.negative_ttl_hours);

        LinkCache cache;
        if (!lc.cache_path.empty()) cache.load(lc.cache_path);
        auto canonical = canonicalize(triplets_, *client, cache, options);
        if (!lc.cache_path.empty()) cache.save(lc.cache_path);

        kb_ = KnowledgeBase(linking_signature(*client, options));
        kb_.add_triples(canonical.triplets);
        std::size_t linked = 0;
        for (const auto& [label, entity] : canonical.entities) {
            if (entity.canonical_iri) {
                kb_.set_entity_iri(label, *entity.canonical_iri);
                ++linked;
            }
        }
        counts_["linked_entities"] = linked;
    }

    void merge_triples() { save_merged(); }

    void extract_ontologies() {
        struct PerArticle {
            OntologyExtraction extraction;
        };
        std::vector<PerArticle> results(articles_.size());
        parallel_for(articles_.size(), config_.workers, [&](std::size_t i) {
            results[i].extraction = extract_article_ontology(articles_[i], *backend_, *tokenizer_, config_.extraction,
                                                             config_.repair_max_attempts, config_.seed_concepts);
        });

        std::string log;
        std::size_t documents = 0, accepted = 0, repairs = 0, generations = 0, failed = 0;
        json failures = json::array();
        kb_ = KnowledgeBase(std::string(kOntologySignature));
        fs::create_directories(out_ / "ontologies");
        for (std::size_t i = 0; i < articles_.size(); ++i) {
            const auto& article = articles_[i];
            auto& ex = results[i].extraction;
            for (const auto& f : ex.failed_batches) {
                failures.push_back({{"article_id", article.id}, {"batch_index", f.batch_index}, {"reason", f.reason}});
            }
            failed += ex.failed_batches.size();
            for (const auto& b : ex.batches) {
                ++documents;
                repairs += b.outcome.repair_attempts();
                for (std::size_t a = 0; a < b.outcome.attempts.size(); ++a) {
                    json row = {{"article_id", article.id},
                                {"batch_index", b.batch_index},
                                {"backend_id", backend_->config().backend_id},
                                {"attempt", a},
                                {"output", b.outcome.attempts[a].output}};
                    if (a == 0) row["request_hash"] = b.prompt_hash;
                    log += row.dump() + "\n";
                    ++generations;
                }
                auto stem = "ontologies/" + text::safe_filename(article.id) + "_" + std::to_string(b.batch_index);
                write(stem + ".report.json", report_to_json(b.outcome.attempts.back().report));
                if (b.outcome.accepted()) {
                    ++accepted;
                    write(stem + ".ttl", serialize_turtle(*b.outcome.doc));
                    auto piece = ontology_to_kb(*b.outcome.doc, article.id, b.batch_index, backend_->config().backend_id);
                    kb_ = merge(kb_, piece);
                } else {
                    write(stem + ".rejected.ttl", extract_turtle_block(b.outcome.attempts.back().output));
                }
            }
        }
        // Raw triplet stream, one line per extraction.
        for (const auto& [key, provenance] : kb_.triples()) {
            for (const auto& [source, n] : provenance) {
                for (std::size_t k = 0; k < n; ++k) triplets_.push_back({key.subject, key.predicate, key.object, source});
            }
        }
        counts_["generations"] = generations;
        counts_["ontology_documents"] = documents;
        counts_["ontologies_accepted"] = accepted;
        counts_["ontologies_rejected"] = documents - accepted;
        counts_["repair_attempts"] = repairs;
        counts_["failed_batches"] = failed;
        counts_["triplets_parsed"] = triplets_.size();
        if (!failures.empty()) manifest_["failed_batches"] = failures;
        write("generations.jsonl", log);
        write("triples.jsonl", serialize_triplets(triplets_));
    }

    void merge_ontologies() { save_merged(); }

    void save_merged() {
        auto s = stats(kb_);
        counts_["entities"] = s.entity_count;
        counts_["predicates"] = s.predicate_count;
        counts_["triples"] = s.triple_count;
        counts_["isolated_entities"] = s.isolated_entity_count;
        write("kb.json", serialize_kb(kb_));
    }

    void evaluate_kb() {
        auto report = evaluate(kb_, corpus_meta_, config_.quality);
        write("quality.json", quality_report_to_json(report).dump(2) + "\n");
        write("quality.txt", quality_report_to_text(report));
    }

    void export_kb() {
        auto options = config_.export_options.options;
        // An empty KB has no seed to start from; export an empty graph instead of failing.
        if (options.seed_entity && kb_.entities().empty()) options.seed_entity.reset();
        for (auto format : config_.export_options.formats) {
            write("graph." + to_string(format), export_graph(kb_, format, options));
        }
    }

    const PipelineConfig& config_;
    fs::path out_;
    std::string config_sha256_;
    json manifest_ = json::object();
    std::map<std::string, std::size_t> counts_;
    std::set<std::string> artifacts_;

    std::shared_ptr<const Tokenizer> tokenizer_;
    std::shared_ptr<http::RateLimiter> limiter_;
    std::unique_ptr<Backend> backend_;
    std::vector<Article> articles_;
    std::vector<Article> corpus_meta_;
    std::vector<Triplet> triplets_;
    KnowledgeBase kb_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& config_sha256) {
    return Run(config, config_sha256).execute();
}

PipelineResult run_pipeline(const std::string& config_path, const PipelineOverrides& overrides) {
    auto config = load_pipeline_config(config_path);
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;
    if (overrides.backend) {
        if (!config.backends.contains(*overrides.backend)) {
            throw ConfigError("backend", "no backend with id '" + *overrides.backend + "'");
        }
        config.backend = *overrides.backend;
    }
    if (overrides.workers) config.workers = *overrides.workers;
    if (overrides.batch_size) config.extraction.batch_size = *overrides.batch_size;
    return run_pipeline(config, text::sha256_hex(text::read_file(config_path)));
}

}  // namespace kgpipe
