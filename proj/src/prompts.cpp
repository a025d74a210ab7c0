#include "kgpipe/prompts.hpp"

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

namespace {

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    return out;
}

std::string article_block(std::string_view article_text) {
    return "Article:\n<<<\n" + std::string(text::trim(article_text)) + "\n>>>\n";
}

}  // namespace

const std::vector<std::string>& default_seed_concepts() {
    static const std::vector<std::string> kSeeds = {"organizations", "actions", "practices", "policies"};
    return kSeeds;
}

std::string build_prompt(std::string_view article_text, PromptMode mode, const std::vector<std::string>& seed_concepts) {
    if (text::trim(article_text).empty()) throw EmptyArticle();

    std::string prompt;
    if (mode == PromptMode::triples) {
        prompt += "Extract relations connected to sustainability from the news article below.\n";
        if (!seed_concepts.empty()) prompt += "Pay particular attention to: " + join_list(seed_concepts) + ".\n";
        prompt +=
            "Return the results in a triple format: one triple per line, written as\n"
            "subject | predicate | object\n"
            "Use the pipe character '|' only as the separator between the three fields. "
            "Prefer short entity names and short relation names over whole phrases. "
            "Do not add explanations, headings or numbering.\n\n";
    } else {
        if (seed_concepts.empty()) throw PreconditionViolation("ontology prompt needs at least one seed concept");
        prompt +=
            "Generate an OWL ontology on sustainability from the news article below. "
            "The ontology must include concepts like " +
            join_list(seed_concepts) +
            ", and related terms. You may create additional classes and properties if necessary.\n"
            "Declare every class with owl:Class, every object property with owl:ObjectProperty, every "
            "datatype property with owl:DatatypeProperty and every individual with owl:NamedIndividual. "
            "Create instances of the classes for the organizations, actions, practices and policies "
            "mentioned in the article, type each instance with its class, and link instances through the "
            "declared properties.\n"
            "Return the result in RDF Turtle format only, with an @prefix declaration for every prefix "
            "you use. Do not use blank nodes or collections.\n\n";
    }
    prompt += article_block(article_text);
    return prompt;
}

}  // namespace kgpipe
