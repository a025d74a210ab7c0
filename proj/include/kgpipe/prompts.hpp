#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgpipe {

enum class PromptMode { triples, ontology };

const std::vector<std::string>& default_seed_concepts();

// Deterministic prompt for the chat backends. Triples mode asks for one
// `subject | predicate | object` line per triple; ontology mode asks for an
// OWL ontology in RDF Turtle seeded with `seed_concepts`.
//
// Throws EmptyArticle for blank text and PreconditionViolation for ontology
// mode with no seed concepts.
std::string build_prompt(std::string_view article_text, PromptMode mode,
                         const std::vector<std::string>& seed_concepts = default_seed_concepts());

}  // namespace kgpipe
