#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/backend.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/extraction.hpp"
#include "kgpipe/kgstore.hpp"
#include "kgpipe/prompts.hpp"
#include "kgpipe/tokenizer.hpp"
#include "kgpipe/turtle.hpp"

namespace kgpipe {

inline constexpr std::size_t kDefaultRepairAttempts = 3;
inline constexpr std::string_view kInstanceOf = "instanceOf";
inline constexpr std::string_view kOntologySignature = "ontology:local-names";

// Declaration hygiene, not reasoning:
//  - UndeclaredProperty (error): property used in an assertion but never
//    declared as an object, datatype or annotation property;
//  - UndeclaredClass (error): class used in a typing but never declared;
//  - UntypedIndividual (warning): individual with no class assertion;
//  - PropertyKindMismatch (warning): literal on an object property or IRI on
//    a datatype property.
// One diagnostic per distinct IRI, located at its first use. A property whose
// local name is "instanceOf" is read as a typing.
ValidationReport validate_owl(const OntologyDoc& doc);

// Parse + validate. `doc` is set only when both produced no errors.
TurtleParseResult check_turtle(std::string_view text);

// Model output often wraps Turtle in a Markdown fence; returns the first
// fenced block's body, or the text unchanged when there is no fence.
std::string extract_turtle_block(std::string_view text);

// Prompt quoting the previous output and listing every error with its
// location. Throws NoErrors for a clean report.
std::string build_repair_prompt(std::string_view previous_output, const ValidationReport& report);

struct OntologyAttempt {
    std::string output;
    ValidationReport report;
};

struct OntologyOutcome {
    std::optional<OntologyDoc> doc;
    std::vector<OntologyAttempt> attempts;

    bool accepted() const noexcept { return doc.has_value(); }
    std::size_t repair_attempts() const noexcept { return attempts.empty() ? 0 : attempts.size() - 1; }
};

// Sends `prompt`, then keeps asking for repairs while the answer does not
// check out, for at most `max_attempts` generations in total.
OntologyOutcome generate_with_repair(const Backend& backend, const std::string& prompt,
                                     std::size_t max_attempts = kDefaultRepairAttempts);

// Repairs an existing document: the file content is checked first and does
// not count as an attempt; up to `max_attempts` repair generations follow.
OntologyOutcome repair_document(const Backend& backend, const std::string& text,
                                std::size_t max_attempts = kDefaultRepairAttempts);

struct BatchOntology {
    std::size_t batch_index = 0;
    std::string prompt_hash;
    OntologyOutcome outcome;
};

struct OntologyExtraction {
    std::vector<BatchOntology> batches;
    std::vector<FailedBatch> failed_batches;
};

// Ontology-mode counterpart of extract_article: one ontology per planned
// batch (normally the whole article), each run through the repair loop.
OntologyExtraction extract_article_ontology(const Article& article, const Backend& backend,
                                            const Tokenizer& tokenizer, const ExtractionOptions& options = {},
                                            std::size_t max_attempts = kDefaultRepairAttempts,
                                            const std::vector<std::string>& seed_concepts = default_seed_concepts());

// Class assertions become (individual, instanceOf, class); property
// assertions become (subject, property local name, object local name or
// literal text). Classes and individuals become entities, classes marked as
// such. Labels are local names. Throws InvalidDoc when validation fails.
KnowledgeBase ontology_to_kb(const OntologyDoc& doc, const std::string& source_id,
                             std::optional<std::size_t> batch_index = std::nullopt,
                             const std::string& backend_id = "turtle");

// Report as JSON: {"accepted", "errors": [{code, message, location}], "warnings": [...]}.
std::string report_to_json(const ValidationReport& report);
std::string report_to_text(const ValidationReport& report);

}  // namespace kgpipe
