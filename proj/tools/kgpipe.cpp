// kgpipe command-line front end. Exit codes: 0 success, 1 stage failure,
// 2 configuration or usage error.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgpipe/backend.hpp"
#include "kgpipe/chunking.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/export.hpp"
#include "kgpipe/extraction.hpp"
#include "kgpipe/fetch.hpp"
#include "kgpipe/kgstore.hpp"
#include "kgpipe/linking.hpp"
#include "kgpipe/ontology.hpp"
#include "kgpipe/pipeline.hpp"
#include "kgpipe/quality.hpp"
#include "kgpipe/text.hpp"
#include "kgpipe/tokenizer.hpp"
#include "kgpipe/turtle.hpp"

namespace fs = std::filesystem;
using namespace kgpipe;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        text::write_file(path, content);
    }
}

Date date_arg(const std::string& s, const std::string& flag) {
    auto d = parse_date(s);
    if (!d) throw ConfigError(flag, "expected a YYYY-MM-DD date, got '" + s + "'");
    return *d;
}

BatchErrorPolicy policy_arg(const std::string& s) {
    return s == "skip" ? BatchErrorPolicy::skip_and_record : BatchErrorPolicy::fail_fast;
}

std::string source_id_of(const std::string& path) { return fs::path(path).stem().string(); }

// Backend table lookup shared by extract and repair.
BackendConfig backend_from(const std::string& config_path, const std::string& id) {
    auto config = load_pipeline_config(config_path);
    if (!config.backends.contains(id)) throw ConfigError("backend", "no backend with id '" + id + "'");
    return config.backends.at(id);
}

struct FetchArgs {
    std::string endpoint, query, from, to, language = "en", api_key_env = "NEWS_API_KEY", out;
    int page_size = 100;
};

int run_fetch(const FetchArgs& a) {
    FetchOptions options;
    options.endpoint = a.endpoint;
    options.query = a.query;
    options.from = date_arg(a.from, "--from");
    options.to = date_arg(a.to, "--to");
    options.language = a.language;
    options.page_size = a.page_size;
    options.api_key_env = a.api_key_env;
    auto articles = fetch_articles(options);
    emit(a.out, serialize_corpus(articles));
    std::cerr << "fetched " << articles.size() << " article(s)\n";
    return 0;
}

struct ChunkArgs {
    std::string corpus, tokenizer = "whitespace", out;
    std::size_t batch_size = kDefaultBatchSize;
};

int run_chunk(const ChunkArgs& a) {
    auto tokenizer = make_tokenizer(a.tokenizer);
    std::vector<TokenBatch> all;
    for (const auto& article : load_corpus(a.corpus)) {
        auto batches = chunk(article, *tokenizer, a.batch_size);
        all.insert(all.end(), batches.begin(), batches.end());
    }
    emit(a.out, serialize_batches(all));
    std::cerr << all.size() << " batch(es)\n";
    return 0;
}

struct ExtractArgs {
    std::string config, backend, mode = "triples", on_batch_error = "fail", corpus, tokenizer, out;
    std::size_t batch_size = 0, workers = 0, max_attempts = kDefaultRepairAttempts;
};

int run_extract(const ExtractArgs& a) {
    auto config = load_pipeline_config(a.config);
    auto id = a.backend.empty() ? config.backend : a.backend;
    if (!config.backends.contains(id)) throw ConfigError("backend", "no backend with id '" + id + "'");
    const auto& backend_config = config.backends.at(id);
    bool ontology = a.mode == "ontology";
    if (ontology != (backend_config.effective_kind() == BackendKind::chat_ontology)) {
        throw ConfigError("mode", "backend '" + id + "' (" + to_string(backend_config.effective_kind()) +
                                      ") does not match mode " + a.mode);
    }

    auto tokenizer = make_tokenizer(a.tokenizer.empty() ? config.tokenizer : a.tokenizer);
    auto options = config.extraction;
    options.on_batch_error = policy_arg(a.on_batch_error);
    if (a.batch_size) options.batch_size = a.batch_size;
    auto workers = a.workers ? a.workers : config.workers;
    auto articles = load_corpus(a.corpus.empty() ? config.corpus : a.corpus);
    std::erase_if(articles, [](const Article& x) { return text::trim(x.body).empty(); });
    auto backend = make_backend(backend_config, tokenizer);
    fs::path out(a.out);

    if (!ontology) {
        auto results = extract_corpus(articles, *backend, *tokenizer, options, workers);
        std::vector<Triplet> triplets;
        std::string log;
        std::size_t skipped = 0, failed = 0;
        for (const auto& r : results) {
            triplets.insert(triplets.end(), r.triplets.begin(), r.triplets.end());
            skipped += r.report.segments_skipped;
            failed += r.failed_batches.size();
            for (const auto& g : r.generations) {
                log += json{{"article_id", g.article_id}, {"batch_index", g.batch_index}, {"backend_id", g.backend_id},
                            {"request_hash", g.request_hash}, {"output", g.output}}
                           .dump() +
                       "\n";
            }
        }
        text::write_file((out / "triples.jsonl").string(), serialize_triplets(triplets));
        text::write_file((out / "generations.jsonl").string(), log);
        std::cerr << triplets.size() << " triplet(s), " << skipped << " skipped segment(s), " << failed
                  << " failed batch(es)\n";
        return 0;
    }

    std::size_t accepted = 0, rejected = 0;
    for (const auto& article : articles) {
        auto ex = extract_article_ontology(article, *backend, *tokenizer, options, a.max_attempts, config.seed_concepts);
        for (const auto& b : ex.batches) {
            auto stem = (out / (text::safe_filename(article.id) + "_" + std::to_string(b.batch_index))).string();
            text::write_file(stem + ".report.json", report_to_json(b.outcome.attempts.back().report));
            if (b.outcome.accepted()) {
                ++accepted;
                text::write_file(stem + ".ttl", serialize_turtle(*b.outcome.doc));
            } else {
                ++rejected;
                text::write_file(stem + ".rejected.ttl", extract_turtle_block(b.outcome.attempts.back().output));
            }
        }
    }
    std::cerr << accepted << " ontology document(s) accepted, " << rejected << " rejected\n";
    return 0;
}

struct LinkArgs {
    std::string triples, lookup_url, fixture, cache, match = "exact", out;
    bool offline = false;
    bool fail_on_unavailable = false;
    std::size_t negative_ttl_hours = 24 * 7;
};

int run_link(const LinkArgs& a) {
    std::unique_ptr<LookupClient> client;
    if (!a.fixture.empty()) {
        client = std::make_unique<StubLookupClient>(StubLookupClient::from_file(a.fixture));
    } else if (!a.lookup_url.empty()) {
        client = std::make_unique<HttpLookupClient>(a.lookup_url);
    } else {
        client = std::make_unique<OfflineLookupClient>();
    }
    LinkingOptions options;
    options.match = a.match == "prefix" ? MatchRule::prefix : MatchRule::exact;
    options.fallback_on_unavailable = !a.fail_on_unavailable;
    options.negative_ttl = std::chrono::hours(a.negative_ttl_hours);

    LinkCache cache;
    if (!a.cache.empty()) cache.load(a.cache);
    auto triplets = parse_triplets(text::read_file(a.triples));
    auto canonical = canonicalize(triplets, *client, cache, options);
    if (!a.cache.empty()) cache.save(a.cache);

    KnowledgeBase kb(linking_signature(*client, options));
    kb.add_triples(canonical.triplets);
    std::size_t linked = 0;
    for (const auto& [label, entity] : canonical.entities) {
        if (entity.canonical_iri) {
            kb.set_entity_iri(label, *entity.canonical_iri);
            ++linked;
        }
    }
    emit(a.out, serialize_kb(kb));
    std::cerr << canonical.entities.size() << " entit(ies), " << linked << " linked\n";
    return 0;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& out) {
    KnowledgeBase kb;
    for (const auto& path : inputs) kb = merge(kb, load_kb(path));
    emit(out, serialize_kb(kb));
    return 0;
}

int run_validate(const std::string& path, bool as_json) {
    auto result = check_turtle(text::read_file(path));
    std::cout << (as_json ? report_to_json(result.report) : report_to_text(result.report));
    return result.ok() ? 0 : kExitFailure;
}

int run_ttl2kb(const std::vector<std::string>& inputs, const std::string& out) {
    KnowledgeBase kb(std::string{kOntologySignature});
    for (const auto& path : inputs) {
        auto result = check_turtle(text::read_file(path));
        if (!result.ok()) {
            std::cerr << path << ": " << report_to_text(result.report);
            throw InvalidDoc(path + " does not validate");
        }
        kb = merge(kb, ontology_to_kb(*result.doc, source_id_of(path)));
    }
    emit(out, serialize_kb(kb));
    return 0;
}

int run_repair(const std::string& path, const std::string& config, const std::string& backend_id,
               std::size_t max_attempts, const std::string& out) {
    auto backend_config = backend_from(config, backend_id);
    auto backend = make_backend(backend_config);
    auto outcome = repair_document(*backend, text::read_file(path), max_attempts);
    std::cerr << report_to_text(outcome.attempts.back().report) << outcome.repair_attempts()
              << " repair attempt(s)\n";
    if (!outcome.accepted()) return kExitFailure;
    emit(out, serialize_turtle(*outcome.doc));
    return 0;
}

struct EvalArgs {
    std::string kb, corpus, config, against, json_out;
};

int run_eval(const EvalArgs& a) {
    auto config = a.config.empty() ? QualityConfig{} : load_quality_config(a.config);
    auto corpus = a.corpus.empty() ? std::vector<Article>{} : load_corpus(a.corpus);
    auto report = evaluate(load_kb(a.kb), corpus, config);
    if (!a.json_out.empty()) emit(a.json_out, quality_report_to_json(report).dump(2) + "\n");
    if (a.against.empty()) {
        if (a.json_out != "-") std::cout << quality_report_to_text(report);
        return 0;
    }
    auto other = evaluate(load_kb(a.against), corpus, config);
    std::cout << comparison_to_text(compare(report, other), source_id_of(a.kb), source_id_of(a.against));
    return 0;
}

int run_stats(const std::vector<std::string>& inputs, std::vector<std::string> names, bool as_json) {
    if (!names.empty() && names.size() != inputs.size()) {
        throw ConfigError("--name", "give one name per knowledge base");
    }
    std::vector<std::pair<std::string, KBStats>> rows;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        rows.emplace_back(names.empty() ? source_id_of(inputs[i]) : names[i], stats(load_kb(inputs[i])));
    }
    if (as_json) {
        json out = json::object();
        for (const auto& [name, s] : rows) out[name] = stats_to_json(s);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << render_stats_table(rows);
    }
    return 0;
}

int run_top_relations(const std::string& path, std::size_t k) {
    for (const auto& [predicate, count] : top_relations(load_kb(path), k)) {
        std::cout << count << "\t" << predicate << "\n";
    }
    return 0;
}

struct ExportArgs {
    std::string kb, format = "dot", seed, out;
    std::optional<std::size_t> radius, max_nodes;
};

int run_export(const ExportArgs& a) {
    ExportOptions options;
    if (!a.seed.empty()) options.seed_entity = a.seed;
    options.radius = a.radius;
    if (a.max_nodes) options.max_nodes = *a.max_nodes;
    emit(a.out, export_graph(load_kb(a.kb), a.format, options));
    return 0;
}

int run_pipeline_cmd(const std::string& config, const PipelineOverrides& overrides) {
    auto result = run_pipeline(config, overrides);
    std::cerr << "artifacts in " << result.output_dir << "\n";
    for (const auto& [name, n] : result.counts) std::cerr << "  " << name << ": " << n << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build knowledge graphs from article text"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    int status = 0;

    FetchArgs fa;
    auto* fetch = app.add_subcommand("fetch", "Download articles from a news search endpoint");
    fetch->add_option("--endpoint", fa.endpoint, "Search endpoint URL")->required();
    fetch->add_option("--query", fa.query, "Keyword query")->required();
    fetch->add_option("--from", fa.from, "First date, YYYY-MM-DD")->required();
    fetch->add_option("--to", fa.to, "Last date, YYYY-MM-DD")->required();
    fetch->add_option("--language", fa.language);
    fetch->add_option("--page-size", fa.page_size)->check(CLI::PositiveNumber);
    fetch->add_option("--api-key-env", fa.api_key_env, "Environment variable holding the API key");
    fetch->add_option("-o,--output", fa.out, "Corpus file (default stdout)");
    fetch->callback([&] { status = run_fetch(fa); });

    ChunkArgs ca;
    auto* chunk_cmd = app.add_subcommand("chunk", "Split corpus articles into token batches");
    chunk_cmd->add_option("corpus", ca.corpus)->required();
    chunk_cmd->add_option("--batch-size", ca.batch_size)->check(CLI::PositiveNumber);
    chunk_cmd->add_option("--tokenizer", ca.tokenizer)->check(CLI::IsMember(tokenizer_names()));
    chunk_cmd->add_option("-o,--output", ca.out, "Batches file (default stdout)");
    chunk_cmd->callback([&] { status = run_chunk(ca); });

    ExtractArgs ea;
    auto* extract = app.add_subcommand("extract", "Run a backend over a corpus");
    extract->add_option("--config", ea.config, "Pipeline config holding the backend table")->required();
    extract->add_option("--backend", ea.backend, "Backend id (default: config's backend)");
    extract->add_option("--mode", ea.mode)->check(CLI::IsMember({"triples", "ontology"}));
    extract->add_option("--on-batch-error", ea.on_batch_error)->check(CLI::IsMember({"fail", "skip"}));
    extract->add_option("--corpus", ea.corpus, "Corpus file (default: config's corpus)");
    extract->add_option("--tokenizer", ea.tokenizer)->check(CLI::IsMember(tokenizer_names()));
    extract->add_option("--batch-size", ea.batch_size)->check(CLI::PositiveNumber);
    extract->add_option("--workers", ea.workers)->check(CLI::PositiveNumber);
    extract->add_option("--max-attempts", ea.max_attempts, "Ontology mode: generations per batch")
        ->check(CLI::PositiveNumber);
    extract->add_option("-o,--output-dir", ea.out, "Output directory")->required();
    extract->callback([&] { status = run_extract(ea); });

    LinkArgs la;
    auto* link = app.add_subcommand("link", "Link entity mentions and build a knowledge base");
    link->add_option("triples", la.triples, "Triples file")->required();
    auto* url = link->add_option("--lookup-url", la.lookup_url, "Lookup service URL");
    auto* fixture = link->add_option("--lookup-fixture", la.fixture, "JSON stub table instead of a service");
    auto* offline = link->add_flag("--offline", la.offline, "Normalize only");
    url->excludes(fixture)->excludes(offline);
    fixture->excludes(offline);
    link->add_option("--cache", la.cache, "Cache file");
    link->add_option("--match", la.match)->check(CLI::IsMember({"exact", "prefix"}));
    link->add_option("--negative-ttl-hours", la.negative_ttl_hours)->check(CLI::PositiveNumber);
    link->add_flag("--fail-on-unavailable", la.fail_on_unavailable);
    link->add_option("-o,--output", la.out, "Knowledge base file (default stdout)");
    link->callback([&] { status = run_link(la); });

    std::vector<std::string> merge_inputs;
    std::string merge_out;
    auto* merge_cmd = app.add_subcommand("merge", "Merge knowledge bases");
    merge_cmd->add_option("inputs", merge_inputs, "Knowledge base files")->required();
    merge_cmd->add_option("-o,--output", merge_out);
    merge_cmd->callback([&] { status = run_merge(merge_inputs, merge_out); });

    std::string validate_file;
    bool validate_json = false;
    auto* validate = app.add_subcommand("validate", "Parse and check a Turtle ontology");
    validate->add_option("file", validate_file)->required();
    validate->add_flag("--json", validate_json);
    validate->callback([&] { status = run_validate(validate_file, validate_json); });

    std::vector<std::string> ttl_inputs;
    std::string ttl_out;
    auto* ttl2kb = app.add_subcommand("ttl2kb", "Convert validated ontologies to a knowledge base");
    ttl2kb->add_option("files", ttl_inputs)->required();
    ttl2kb->add_option("-o,--output", ttl_out);
    ttl2kb->callback([&] { status = run_ttl2kb(ttl_inputs, ttl_out); });

    std::string repair_file, repair_config, repair_backend, repair_out;
    std::size_t repair_attempts = kDefaultRepairAttempts;
    auto* repair = app.add_subcommand("repair", "Ask a backend to fix an invalid ontology");
    repair->add_option("file", repair_file)->required();
    repair->add_option("--config", repair_config, "Pipeline config holding the backend table")->required();
    repair->add_option("--backend", repair_backend)->required();
    repair->add_option("--max-attempts", repair_attempts)->check(CLI::PositiveNumber);
    repair->add_option("-o,--output", repair_out);
    repair->callback([&] { status = run_repair(repair_file, repair_config, repair_backend, repair_attempts, repair_out); });

    EvalArgs va;
    auto* eval = app.add_subcommand("eval", "Score a knowledge base");
    eval->add_option("kb", va.kb)->required();
    eval->add_option("--corpus", va.corpus, "Corpus with article metadata");
    eval->add_option("--config", va.config, "Quality config");
    eval->add_option("--against", va.against, "Second knowledge base to compare with");
    eval->add_option("--json", va.json_out, "Write the JSON report here ('-' for stdout)");
    eval->callback([&] { status = run_eval(va); });

    std::vector<std::string> stats_inputs, stats_names;
    bool stats_json = false;
    auto* stats_cmd = app.add_subcommand("stats", "Entity, relation and triple counts");
    stats_cmd->add_option("kbs", stats_inputs)->required();
    stats_cmd->add_option("--name", stats_names, "Row name per knowledge base");
    stats_cmd->add_flag("--json", stats_json);
    stats_cmd->callback([&] { status = run_stats(stats_inputs, stats_names, stats_json); });

    std::string top_kb;
    std::size_t top_k = 10;
    auto* top = app.add_subcommand("top-relations", "Most frequent predicates");
    top->add_option("kb", top_kb)->required();
    top->add_option("-k", top_k)->check(CLI::PositiveNumber);
    top->callback([&] { status = run_top_relations(top_kb, top_k); });

    ExportArgs xa;
    auto* exp = app.add_subcommand("export", "Render a knowledge base as a graph file");
    exp->add_option("kb", xa.kb)->required();
    exp->add_option("--format", xa.format)->check(CLI::IsMember({"dot", "graphml", "json"}));
    auto* seed = exp->add_option("--seed", xa.seed, "Start breadth-first selection here");
    exp->add_option("--radius", xa.radius)->needs(seed);
    exp->add_option("--max-nodes", xa.max_nodes)->check(CLI::PositiveNumber)->excludes(seed);
    exp->add_option("-o,--output", xa.out);
    exp->callback([&] { status = run_export(xa); });

    std::string pipeline_config;
    PipelineOverrides po;
    auto* pipe = app.add_subcommand("pipeline", "Run every stage from one config file");
    pipe->add_option("config", pipeline_config)->required();
    pipe->add_option("--output-dir", po.output_dir);
    pipe->add_option("--backend", po.backend);
    pipe->add_option("--workers", po.workers)->check(CLI::PositiveNumber);
    pipe->add_option("--batch-size", po.batch_size)->check(CLI::PositiveNumber);
    pipe->callback([&] { status = run_pipeline_cmd(pipeline_config, po); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "kgpipe: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigMismatch& e) {
        std::cerr << "kgpipe: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StageFailure& e) {
        std::cerr << "kgpipe: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "kgpipe: " << e.what() << "\n";
        return kExitFailure;
    }
    return status;
}
