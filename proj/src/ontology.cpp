#include "kgpipe/ontology.hpp"

#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/prompts.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

bool is_instance_of(const OntologyDoc& doc, const std::string& property) {
    return text::casefold(doc.local_name(property)) == text::casefold(kInstanceOf);
}

std::string location_of(const OntologyDoc& doc, const std::string& iri) {
    auto it = doc.first_use.find(iri);
    return it == doc.first_use.end() ? std::string() : it->second.to_string();
}

std::string object_label(const OntologyDoc& doc, const Term& term) {
    if (const auto* iri = std::get_if<std::string>(&term)) return doc.local_name(*iri);
    const auto& lexical = std::get<Literal>(term).lexical;
    return lexical.empty() ? std::string("\"\"") : lexical;
}

}  // namespace

ValidationReport validate_owl(const OntologyDoc& doc) {
    ValidationReport report;

    std::set<std::string> used_classes;
    std::set<std::string> typed;
    for (const auto& [ind, cls] : doc.class_assertions) {
        used_classes.insert(cls);
        typed.insert(ind);
    }

    std::set<std::string> undeclared_properties;
    std::set<std::string> individuals_in_use(doc.individuals.begin(), doc.individuals.end());
    std::set<std::pair<std::string, std::string>> mismatches;
    for (const auto& st : doc.property_assertions) {
        const auto* object_iri = std::get_if<std::string>(&st.object);
        if (is_instance_of(doc, st.predicate)) {
            typed.insert(st.subject);
            individuals_in_use.insert(st.subject);
            if (object_iri != nullptr) used_classes.insert(*object_iri);
            continue;
        }
        if (!doc.has_property(st.predicate) && !vocab::is_builtin(st.predicate)) {
            undeclared_properties.insert(st.predicate);
        }
        individuals_in_use.insert(st.subject);
        if (object_iri != nullptr && !doc.data_properties.count(st.predicate) &&
            !doc.annotation_properties.count(st.predicate)) {
            individuals_in_use.insert(*object_iri);
        }
        if (object_iri != nullptr && doc.data_properties.count(st.predicate)) {
            mismatches.emplace(st.predicate, "datatype property '" + doc.local_name(st.predicate) + "' has an IRI value");
        } else if (object_iri == nullptr && doc.object_properties.count(st.predicate)) {
            mismatches.emplace(st.predicate, "object property '" + doc.local_name(st.predicate) + "' has a literal value");
        }
    }
    for (const auto& [ind, _] : doc.class_assertions) individuals_in_use.insert(ind);

    for (const auto& p : undeclared_properties) {
        report.errors.push_back({std::string(diag::kUndeclaredProperty),
                                 "property '" + doc.local_name(p) + "' (" + p + ") is used but never declared",
                                 location_of(doc, p)});
    }
    for (const auto& c : used_classes) {
        if (doc.classes.count(c) || vocab::is_builtin(c)) continue;
        report.errors.push_back({std::string(diag::kUndeclaredClass),
                                 "class '" + doc.local_name(c) + "' (" + c + ") is used but never declared",
                                 location_of(doc, c)});
    }
    for (const auto& ind : individuals_in_use) {
        if (typed.count(ind) || doc.classes.count(ind) || doc.has_property(ind) || vocab::is_builtin(ind)) continue;
        report.warnings.push_back({std::string(diag::kUntypedIndividual),
                                   "individual '" + doc.local_name(ind) + "' has no class assertion",
                                   location_of(doc, ind)});
    }
    for (const auto& [p, message] : mismatches) {
        report.warnings.push_back({std::string(diag::kPropertyKindMismatch), message, location_of(doc, p)});
    }
    return report;
}

TurtleParseResult check_turtle(std::string_view text) {
    auto result = parse_turtle(text);
    if (!result.doc) return result;
    auto validation = validate_owl(*result.doc);
    result.report.errors.insert(result.report.errors.end(), validation.errors.begin(), validation.errors.end());
    result.report.warnings.insert(result.report.warnings.end(), validation.warnings.begin(), validation.warnings.end());
    if (!result.report.errors.empty()) result.doc.reset();
    return result;
}

std::string extract_turtle_block(std::string_view text) {
    auto open = text.find("```");
    if (open == std::string_view::npos) return std::string(text);
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return std::string(text);
    ++body_start;
    auto close = text.find("```", body_start);
    if (close == std::string_view::npos) close = text.size();
    return std::string(text.substr(body_start, close - body_start));
}

std::string build_repair_prompt(std::string_view previous_output, const ValidationReport& report) {
    if (report.errors.empty()) throw NoErrors();
    std::ostringstream out;
    out << "Your previous output is not a valid OWL ontology in RDF Turtle format. "
           "Fix the previous output so that it parses and every class and property it uses is declared.\n\n"
        << "Errors:\n";
    for (std::size_t i = 0; i < report.errors.size(); ++i) {
        const auto& e = report.errors[i];
        out << (i + 1) << ". [" << e.code << "] ";
        if (!e.location.empty()) out << "at line:column " << e.location << ": ";
        out << e.message << "\n";
    }
    out << "\nPrevious output:\n<<<\n" << previous_output;
    if (!previous_output.empty() && previous_output.back() != '\n') out << "\n";
    out << ">>>\n\nReturn the corrected document in RDF Turtle format only, without explanations.\n";
    return out.str();
}

namespace {

OntologyAttempt check_attempt(std::string output, std::optional<OntologyDoc>& doc) {
    auto result = check_turtle(extract_turtle_block(output));
    doc = std::move(result.doc);
    return {std::move(output), std::move(result.report)};
}

void repair_until_valid(const Backend& backend, OntologyOutcome& outcome, std::size_t generations_left) {
    while (!outcome.doc && generations_left > 0) {
        const auto& last = outcome.attempts.back();
        auto prompt = build_repair_prompt(extract_turtle_block(last.output), last.report);
        outcome.attempts.push_back(check_attempt(backend.generate(prompt), outcome.doc));
        --generations_left;
    }
}

}  // namespace

OntologyOutcome generate_with_repair(const Backend& backend, const std::string& prompt, std::size_t max_attempts) {
    if (max_attempts == 0) throw PreconditionViolation("max_attempts must be at least 1");
    OntologyOutcome outcome;
    outcome.attempts.push_back(check_attempt(backend.generate(prompt), outcome.doc));
    repair_until_valid(backend, outcome, max_attempts - 1);
    return outcome;
}

OntologyOutcome repair_document(const Backend& backend, const std::string& text, std::size_t max_attempts) {
    OntologyOutcome outcome;
    outcome.attempts.push_back(check_attempt(text, outcome.doc));
    repair_until_valid(backend, outcome, max_attempts);
    return outcome;
}

OntologyExtraction extract_article_ontology(const Article& article, const Backend& backend,
                                            const Tokenizer& tokenizer, const ExtractionOptions& options,
                                            std::size_t max_attempts, const std::vector<std::string>& seed_concepts) {
    const auto& config = backend.config();
    if (config.effective_kind() != BackendKind::chat_ontology) {
        throw PreconditionViolation("backend '" + config.backend_id + "' does not produce ontologies");
    }
    OntologyExtraction result;
    for (const auto& batch : plan_batches(article, config, tokenizer, options.batch_size)) {
        auto prompt = build_prompt(batch.text, PromptMode::ontology, seed_concepts);
        try {
            result.batches.push_back(
                {batch.batch_index, request_hash(config, prompt), generate_with_repair(backend, prompt, max_attempts)});
        } catch (const NoErrors&) {
            throw;
        } catch (const Error& e) {
            if (options.on_batch_error == BatchErrorPolicy::fail_fast) {
                throw BatchFailure(article.id, batch.batch_index, e.what());
            }
            result.failed_batches.push_back({batch.batch_index, e.what()});
        }
    }
    return result;
}

KnowledgeBase ontology_to_kb(const OntologyDoc& doc, const std::string& source_id,
                             std::optional<std::size_t> batch_index, const std::string& backend_id) {
    auto report = validate_owl(doc);
    if (!report.accepted()) {
        throw InvalidDoc("ontology '" + source_id + "' has " + std::to_string(report.errors.size()) +
                         " validation error(s); first: " + report.errors.front().message);
    }
    KnowledgeBase kb{std::string(kOntologySignature)};
    Provenance source{source_id, batch_index, backend_id};
    const std::string instance_of(kInstanceOf);

    for (const auto& c : doc.classes) kb.mark_class(doc.local_name(c));
    for (const auto& i : doc.individuals) kb.add_entity(doc.local_name(i));
    for (const auto& [ind, cls] : doc.class_assertions) {
        kb.mark_class(doc.local_name(cls));
        kb.add_triple(doc.local_name(ind), instance_of, doc.local_name(cls), source);
    }
    for (const auto& st : doc.property_assertions) {
        auto object = object_label(doc, st.object);
        if (is_instance_of(doc, st.predicate)) {
            kb.mark_class(object);
            kb.add_triple(doc.local_name(st.subject), instance_of, object, source);
        } else {
            kb.add_triple(doc.local_name(st.subject), doc.local_name(st.predicate), object, source);
        }
    }
    return kb;
}

std::string report_to_json(const ValidationReport& report) {
    auto list = [](const std::vector<Diagnostic>& items) {
        json out = json::array();
        for (const auto& d : items) out.push_back({{"code", d.code}, {"message", d.message}, {"location", d.location}});
        return out;
    };
    json j = {{"accepted", report.accepted()}, {"errors", list(report.errors)}, {"warnings", list(report.warnings)}};
    return j.dump(2) + "\n";
}

std::string report_to_text(const ValidationReport& report) {
    std::ostringstream out;
    out << (report.accepted() ? "accepted" : "rejected") << ": " << report.errors.size() << " error(s), "
        << report.warnings.size() << " warning(s)\n";
    auto emit = [&](const char* level, const std::vector<Diagnostic>& items) {
        for (const auto& d : items) {
            out << level << " [" << d.code << "]";
            if (!d.location.empty()) out << " " << d.location;
            out << ": " << d.message << "\n";
        }
    };
    emit("error", report.errors);
    emit("warning", report.warnings);
    return out.str();
}

}  // namespace kgpipe
