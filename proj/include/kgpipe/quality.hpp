#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgpipe/corpus.hpp"
#include "kgpipe/kgstore.hpp"

namespace kgpipe {

inline constexpr std::string_view kQualityFormulaVersion = "kgq-1";

const std::vector<std::string>& default_sustainability_lexicon();

struct QualityConfig {
    // A triple field with more whitespace tokens than this is phrase-like.
    std::size_t conciseness_max_tokens = 4;
    // Predicates allowing one object per subject; compared after normalization.
    std::vector<std::string> functional_predicates;
    bool relevance_enabled = true;
    std::vector<std::string> domain_lexicon = default_sustainability_lexicon();

    // Throws ConfigError.
    void validate() const;
    // Stable hash of the canonical JSON form; reports carry it.
    std::string fingerprint() const;
};

QualityConfig quality_config_from_json(const nlohmann::json& j, const std::string& key_path = "quality");
nlohmann::json quality_config_to_json(const QualityConfig& config);
QualityConfig load_quality_config(const std::string& path);

// numerator / denominator, with 0/0 defined as 0.
struct Ratio {
    std::size_t numerator = 0;
    std::size_t denominator = 0;

    double value() const noexcept {
        return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
    }

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct QualityMetrics {
    Ratio conciseness_violation_ratio;  // phrase-like fields / all fields, counted per extraction
    Ratio duplicate_ratio;              // repeated extractions / all extractions
    Ratio isolated_entity_ratio;
    double mean_degree = 0.0;           // undirected, one edge per stored triple
    Ratio largest_component_fraction;
    std::size_t distinct_predicates = 0;
    std::size_t distinct_source_domains = 0;
    Ratio linked_entity_ratio;
    std::size_t contradiction_count = 0;  // (subject, functional predicate) groups with >1 object
    Ratio domain_relevance_ratio;         // entities + predicates containing a lexicon term
    std::optional<std::pair<Date, Date>> date_range;

    friend bool operator==(const QualityMetrics&, const QualityMetrics&) = default;
};

enum class PrincipleStatus { computed, metadata, manual };

std::string to_string(PrincipleStatus status);

struct PrincipleEntry {
    int number = 0;
    std::string name;
    std::string metric;  // empty for manual/metadata entries
    PrincipleStatus status = PrincipleStatus::manual;
    std::optional<double> value;
    std::string note;

    friend bool operator==(const PrincipleEntry&, const PrincipleEntry&) = default;
};

struct QualityReport {
    std::string formula_version{kQualityFormulaVersion};
    std::string config_fingerprint;
    QualityMetrics metrics;
    std::vector<PrincipleEntry> principles;  // numbers 1..18, in order
    std::vector<std::string> warnings;

    friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

// Pure and deterministic. Provenance article ids missing from `corpus` only
// produce a warning.
QualityReport evaluate(const KnowledgeBase& kb, const std::vector<Article>& corpus, const QualityConfig& config);

struct ComparisonRow {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
    double delta = 0.0;  // b - a

    friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

// Side-by-side computed metrics. Throws ConfigMismatch when the reports were
// produced under different configurations.
std::vector<ComparisonRow> compare(const QualityReport& a, const QualityReport& b);

nlohmann::json quality_report_to_json(const QualityReport& report);
std::string quality_report_to_text(const QualityReport& report);
QualityReport quality_report_from_json(const nlohmann::json& j);
std::string comparison_to_text(const std::vector<ComparisonRow>& rows, const std::string& name_a,
                               const std::string& name_b);

}  // namespace kgpipe
