#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgpipe/backend.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/export.hpp"
#include "kgpipe/extraction.hpp"
#include "kgpipe/linking.hpp"
#include "kgpipe/prompts.hpp"
#include "kgpipe/quality.hpp"

namespace kgpipe {

class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& cause)
        : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct LinkingConfig {
    bool enabled = false;
    std::string endpoint;      // lookup service URL
    std::string fixture_file;  // JSON stub table, used instead of an endpoint
    std::string cache_path;
    MatchRule match = MatchRule::exact;
    std::size_t negative_ttl_hours = 24 * 7;
    bool fallback_on_unavailable = true;
};

struct ExportConfig {
    std::vector<ExportFormat> formats{ExportFormat::dot, ExportFormat::graphml, ExportFormat::json};
    ExportOptions options;
};

// One JSON file drives every stage. Relative paths are resolved against the
// directory holding the config file.
struct PipelineConfig {
    std::string corpus;
    std::string output_dir;
    std::optional<Date> date_from;
    std::optional<Date> date_to;
    PromptMode mode = PromptMode::triples;
    std::string backend;  // id into `backends`
    BackendRegistry backends;
    std::string tokenizer = "whitespace";
    ExtractionOptions extraction;
    std::size_t workers = 1;
    std::size_t repair_max_attempts = 3;
    std::vector<std::string> seed_concepts = default_seed_concepts();
    LinkingConfig linking;
    QualityConfig quality;
    ExportConfig export_options;
};

// Throws ConfigError carrying the offending key path.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
PipelineConfig load_pipeline_config(const std::string& path);

// Command-line values that take precedence over the file.
struct PipelineOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::string> backend;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> batch_size;
};

struct PipelineResult {
    std::string output_dir;
    std::map<std::string, std::size_t> counts;
};

// Runs corpus -> chunk -> extract -> link -> merge (-> validate for ontology
// mode) -> evaluate -> export and writes into output_dir:
//   batches.jsonl, generations.jsonl, triples.jsonl, kb.json,
//   ontologies/*.ttl + *.report.json (ontology mode), quality.json,
//   quality.txt, graph.{dot,graphml,json}, manifest.json.
// Everything except the manifest timestamps is byte-stable for identical
// inputs. A failing stage is recorded in the manifest, earlier artifacts are
// kept, and StageFailure is thrown.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& config_sha256 = "");
PipelineResult run_pipeline(const std::string& config_path, const PipelineOverrides& overrides = {});

}  // namespace kgpipe
