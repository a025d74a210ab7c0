#include "kgpipe/kgstore.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

void KnowledgeBase::add_entity(const std::string& label) {
    if (text::trim(label).empty()) throw PreconditionViolation("entity label is empty");
    entities_.insert(label);
}

void KnowledgeBase::add_predicate(const std::string& label) {
    if (text::trim(label).empty()) throw PreconditionViolation("predicate label is empty");
    predicates_.insert(label);
}

void KnowledgeBase::set_entity_iri(const std::string& label, const std::string& iri) {
    add_entity(label);
    entity_iris_[label] = iri;
}

void KnowledgeBase::mark_class(const std::string& label) {
    add_entity(label);
    classes_.insert(label);
}

void KnowledgeBase::add_triple(const std::string& subject, const std::string& predicate, const std::string& object,
                               const Provenance& provenance, std::size_t count) {
    if (text::trim(subject).empty() || text::trim(predicate).empty() || text::trim(object).empty()) {
        throw PreconditionViolation("triple with an empty field: (" + subject + ", " + predicate + ", " + object + ")");
    }
    if (count == 0) return;
    entities_.insert(subject);
    entities_.insert(object);
    predicates_.insert(predicate);
    triples_[TripleKey{subject, predicate, object}][provenance] += count;
}

void KnowledgeBase::add_triples(const std::vector<Triplet>& triplets) {
    for (const auto& t : triplets) add_triple(t.subject, t.predicate, t.object, t.provenance);
}

std::size_t KnowledgeBase::multiplicity(const TripleKey& key) const {
    auto it = triples_.find(key);
    if (it == triples_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [_, count] : it->second) n += count;
    return n;
}

KnowledgeBase add_triples(KnowledgeBase kb, const std::vector<Triplet>& triplets) {
    kb.add_triples(triplets);
    return kb;
}

KBStats stats(const KnowledgeBase& kb) {
    KBStats s;
    s.entity_count = kb.entities().size();
    s.predicate_count = kb.predicates().size();
    s.triple_count = kb.triples().size();

    std::set<std::string> connected;
    std::map<std::string, std::size_t> freq;
    for (const auto& [key, _] : kb.triples()) {
        connected.insert(key.subject);
        connected.insert(key.object);
        ++freq[key.predicate];
    }
    for (const auto& e : kb.entities()) {
        if (!connected.count(e)) ++s.isolated_entity_count;
    }
    s.top_relations.assign(freq.begin(), freq.end());
    std::stable_sort(s.top_relations.begin(), s.top_relations.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return s;
}

std::vector<std::pair<std::string, std::size_t>> top_relations(const KnowledgeBase& kb, std::size_t k) {
    if (k == 0) throw PreconditionViolation("k must be at least 1");
    auto all = stats(kb).top_relations;
    if (all.size() > k) all.resize(k);
    return all;
}

KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b) {
    if (!a.empty() && !b.empty() && a.linking_signature_ != b.linking_signature_) {
        throw ConfigMismatch("cannot merge knowledge bases linked under '" + a.linking_signature_ + "' and '" +
                             b.linking_signature_ + "'");
    }
    KnowledgeBase out = a;
    if (a.empty()) out.linking_signature_ = b.linking_signature_;
    out.entities_.insert(b.entities_.begin(), b.entities_.end());
    out.predicates_.insert(b.predicates_.begin(), b.predicates_.end());
    out.classes_.insert(b.classes_.begin(), b.classes_.end());
    for (const auto& [label, iri] : b.entity_iris_) {
        auto [it, inserted] = out.entity_iris_.try_emplace(label, iri);
        if (!inserted) it->second = std::min(it->second, iri);
    }
    for (const auto& [key, provenance] : b.triples_) {
        auto& target = out.triples_[key];
        for (const auto& [source, count] : provenance) {
            auto& slot = target[source];
            slot = std::max(slot, count);
        }
    }
    return out;
}

json kb_to_json(const KnowledgeBase& kb) {
    json triples = json::array();
    for (const auto& [key, provenance] : kb.triples()) {
        json sources = json::array();
        for (const auto& [source, count] : provenance) {
            for (std::size_t i = 0; i < count; ++i) sources.push_back(provenance_to_json(source));
        }
        triples.push_back({{"s", key.subject}, {"p", key.predicate}, {"o", key.object}, {"provenance", sources}});
    }
    return {{"linking", kb.linking_signature()},
            {"entities", kb.entities()},
            {"predicates", kb.predicates()},
            {"classes", kb.classes()},
            {"entity_iris", kb.entity_iris()},
            {"triples", triples}};
}

KnowledgeBase kb_from_json(const json& j) {
    try {
        KnowledgeBase kb(j.value("linking", std::string()));
        for (const auto& e : j.at("entities")) kb.add_entity(e.get<std::string>());
        if (j.contains("classes")) {
            for (const auto& c : j.at("classes")) kb.mark_class(c.get<std::string>());
        }
        if (j.contains("entity_iris")) {
            for (const auto& [label, iri] : j.at("entity_iris").items()) kb.set_entity_iri(label, iri.get<std::string>());
        }
        for (const auto& t : j.at("triples")) {
            auto s = t.at("s").get<std::string>();
            auto p = t.at("p").get<std::string>();
            auto o = t.at("o").get<std::string>();
            const auto& sources = t.at("provenance");
            if (!sources.is_array() || sources.empty()) throw Error("triple (" + s + ", " + p + ", " + o + ") has no provenance");
            for (const auto& source : sources) kb.add_triple(s, p, o, provenance_from_json(source));
        }
        for (const auto& p : j.at("predicates")) kb.add_predicate(p.get<std::string>());
        return kb;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed knowledge base JSON: ") + e.what());
    }
}

std::string serialize_kb(const KnowledgeBase& kb) { return kb_to_json(kb).dump(2) + "\n"; }

KnowledgeBase parse_kb(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("knowledge base is not valid JSON: ") + e.what());
    }
    return kb_from_json(j);
}

void save_kb(const std::string& path, const KnowledgeBase& kb) { text::write_file(path, serialize_kb(kb)); }

KnowledgeBase load_kb(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
    return parse_kb(text::read_file(path));
}

json stats_to_json(const KBStats& s) {
    json relations = json::array();
    for (const auto& [p, n] : s.top_relations) relations.push_back({{"predicate", p}, {"frequency", n}});
    return {{"entities", s.entity_count},
            {"relations", s.predicate_count},
            {"triples", s.triple_count},
            {"isolated_entities", s.isolated_entity_count},
            {"top_relations", relations}};
}

std::string render_stats_table(const std::vector<std::pair<std::string, KBStats>>& rows) {
    std::vector<std::vector<std::string>> cells = {{"Algorithm", "Entities", "Relations", "Triples"}};
    for (const auto& [name, s] : rows) {
        cells.push_back({name, std::to_string(s.entity_count), std::to_string(s.predicate_count),
                         std::to_string(s.triple_count)});
    }
    std::vector<std::size_t> width(4, 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
    }
    auto rule = [&] {
        std::string line = "+";
        for (auto w : width) line += std::string(w + 2, '-') + "+";
        return line + "\n";
    };
    std::ostringstream out;
    out << rule();
    for (std::size_t r = 0; r < cells.size(); ++r) {
        out << "|";
        for (std::size_t c = 0; c < 4; ++c) {
            out << ' ' << cells[r][c] << std::string(width[c] - cells[r][c].size(), ' ') << " |";
        }
        out << "\n" << rule();
    }
    return out.str();
}

}  // namespace kgpipe
