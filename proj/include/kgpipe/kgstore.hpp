#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgpipe/triplet.hpp"

namespace kgpipe {

struct TripleKey {
    std::string subject;
    std::string predicate;
    std::string object;

    friend auto operator<=>(const TripleKey&, const TripleKey&) = default;
    friend bool operator==(const TripleKey&, const TripleKey&) = default;
};

// Provenance multiset of one stored triple: source -> number of times that
// source produced the triple.
using ProvenanceCounts = std::map<Provenance, std::size_t>;

struct KBStats {
    std::size_t entity_count = 0;
    std::size_t predicate_count = 0;
    std::size_t triple_count = 0;
    std::size_t isolated_entity_count = 0;
    // Every predicate with its triple count, by descending frequency then name.
    std::vector<std::pair<std::string, std::size_t>> top_relations;

    friend bool operator==(const KBStats&, const KBStats&) = default;
};

// Deduplicated triple store. Entities may exist without any triple. Exact
// duplicate triples are stored once with their provenance multiset.
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(std::string linking_signature) : linking_signature_(std::move(linking_signature)) {}

    void add_entity(const std::string& label);
    void add_predicate(const std::string& label);
    // Records the knowledge-base IRI an entity label was linked to.
    void set_entity_iri(const std::string& label, const std::string& iri);
    // Marks an entity as an ontology class (a concept, as opposed to an instance).
    void mark_class(const std::string& label);
    // Throws PreconditionViolation on an empty field.
    void add_triple(const std::string& subject, const std::string& predicate, const std::string& object,
                    const Provenance& provenance, std::size_t count = 1);
    void add_triples(const std::vector<Triplet>& triplets);

    const std::set<std::string>& entities() const noexcept { return entities_; }
    const std::set<std::string>& predicates() const noexcept { return predicates_; }
    const std::set<std::string>& classes() const noexcept { return classes_; }
    const std::map<std::string, std::string>& entity_iris() const noexcept { return entity_iris_; }
    const std::map<TripleKey, ProvenanceCounts>& triples() const noexcept { return triples_; }
    const std::string& linking_signature() const noexcept { return linking_signature_; }
    void set_linking_signature(std::string signature) { linking_signature_ = std::move(signature); }

    bool empty() const noexcept { return entities_.empty() && triples_.empty(); }
    bool contains(const TripleKey& key) const { return triples_.count(key) > 0; }
    // Number of times `key` was added (sum of provenance counts); 0 if absent.
    std::size_t multiplicity(const TripleKey& key) const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

private:
    friend KnowledgeBase merge(const KnowledgeBase&, const KnowledgeBase&);

    std::string linking_signature_;
    std::set<std::string> entities_;
    std::set<std::string> predicates_;
    std::set<std::string> classes_;
    std::map<std::string, std::string> entity_iris_;
    std::map<TripleKey, ProvenanceCounts> triples_;
};

// Value-returning form of KnowledgeBase::add_triples.
KnowledgeBase add_triples(KnowledgeBase kb, const std::vector<Triplet>& triplets);

KBStats stats(const KnowledgeBase& kb);

// Throws PreconditionViolation when k == 0.
std::vector<std::pair<std::string, std::size_t>> top_relations(const KnowledgeBase& kb, std::size_t k);

// Set union; shared triples take the per-source maximum of provenance
// counts, which keeps merge commutative, associative and idempotent. Throws
// ConfigMismatch when both sides are non-empty and were linked differently.
KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b);

// JSON file format with sorted arrays:
// {"linking", "entities", "predicates", "classes", "entity_iris",
//  "triples": [{"s", "p", "o", "provenance": [...]}]}
nlohmann::json kb_to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const nlohmann::json& j);
std::string serialize_kb(const KnowledgeBase& kb);
KnowledgeBase parse_kb(std::string_view text);
void save_kb(const std::string& path, const KnowledgeBase& kb);
KnowledgeBase load_kb(const std::string& path);

nlohmann::json stats_to_json(const KBStats& s);

// Plain-text table with columns Algorithm / Entities / Relations / Triples.
std::string render_stats_table(const std::vector<std::pair<std::string, KBStats>>& rows);

}  // namespace kgpipe
