#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace kgpipe {

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

std::string rdf(std::string_view local);
std::string rdfs(std::string_view local);
std::string owl(std::string_view local);
std::string xsd(std::string_view local);

// True for IRIs in the rdf, rdfs, owl or xsd namespaces.
bool is_builtin(std::string_view iri);
}  // namespace vocab

struct Literal {
    std::string lexical;
    std::string language;  // empty when absent
    std::string datatype;  // full IRI, empty when absent

    friend auto operator<=>(const Literal&, const Literal&) = default;
    friend bool operator==(const Literal&, const Literal&) = default;
};

// Object position: an IRI or a literal.
using Term = std::variant<std::string, Literal>;

struct Statement {
    std::string subject;
    std::string predicate;
    Term object;

    friend auto operator<=>(const Statement&, const Statement&) = default;
    friend bool operator==(const Statement&, const Statement&) = default;
};

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
};

// Flat OWL document: declarations, typings, and assertions between
// individuals. All IRIs are stored expanded.
struct OntologyDoc {
    std::map<std::string, std::string> prefixes;  // prefix name -> namespace IRI
    std::set<std::string> ontologies;             // subjects typed owl:Ontology
    std::set<std::string> classes;
    std::set<std::string> object_properties;
    std::set<std::string> data_properties;
    std::set<std::string> annotation_properties;
    std::set<std::string> individuals;  // declared owl:NamedIndividual
    std::set<std::pair<std::string, std::string>> class_assertions;  // (individual, class)
    std::set<Statement> property_assertions;
    // Remaining statements whose predicate is rdf/rdfs/owl vocabulary
    // (subClassOf, domain, range, label, ...).
    std::set<Statement> axioms;

    // Where each IRI was first mentioned; filled by the parser, ignored by
    // equality.
    std::map<std::string, SourcePos> first_use;

    // Fragment after the longest matching declared namespace, else after the
    // last '#' or '/'.
    std::string local_name(const std::string& iri) const;

    bool has_property(const std::string& iri) const;

    friend bool operator==(const OntologyDoc& a, const OntologyDoc& b);
};

struct Diagnostic {
    std::string code;
    std::string message;
    std::string location;  // "line:column", or empty

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

namespace diag {
inline constexpr std::string_view kParseError = "ParseError";
inline constexpr std::string_view kUndefinedPrefix = "UndefinedPrefix";
inline constexpr std::string_view kUndeclaredProperty = "UndeclaredProperty";
inline constexpr std::string_view kUndeclaredClass = "UndeclaredClass";
inline constexpr std::string_view kUntypedIndividual = "UntypedIndividual";
inline constexpr std::string_view kPropertyKindMismatch = "PropertyKindMismatch";
}  // namespace diag

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool accepted() const noexcept { return errors.empty(); }
    std::size_t count(std::string_view code) const;
};

struct TurtleParseResult {
    std::optional<OntologyDoc> doc;  // set iff report.errors is empty
    ValidationReport report;

    bool ok() const noexcept { return doc.has_value(); }
};

// Accepts the flat Turtle subset: @prefix, <IRI>, prefixed names, `a`, `;`
// predicate lists, `,` object lists, `.` terminators, single-line string
// literals with language tag or datatype, numbers, booleans, # comments.
// Blank nodes, collections, multi-line literals, and other directives are
// reported as located ParseErrors. Never throws on any input.
TurtleParseResult parse_turtle(std::string_view text);

// Deterministic: prefixes (the document's plus rdf/rdfs/owl/xsd), then
// ontology headers, classes, properties, individuals, class assertions,
// property assertions, and axioms, each sorted.
std::string serialize_turtle(const OntologyDoc& doc);

}  // namespace kgpipe
