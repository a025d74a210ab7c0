#include "generators.hpp"

#include <algorithm>
#include <iterator>

namespace gen {

using namespace kgpipe;

namespace {

const std::vector<std::string> kWords = {"solar",  "Samsung", "recycling", "policy", "wind",  "Starbucks",
                                         "energy", "waste",   "has",       "uses",   "plant", "EU",
                                         "cup",    "deposit", "Texas",     "grid",   "café",  "carbon"};

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

std::string phrase(Rng& rng, std::size_t vocabulary) {
    vocabulary = std::min(vocabulary, kWords.size());
    std::size_t words = 1 + pick(rng, 3);
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) out += ' ';
        out += kWords[pick(rng, vocabulary)];
    }
    return out;
}

std::vector<Triplet> triplets(Rng& rng, std::size_t count, std::size_t vocabulary) {
    std::vector<Triplet> out;
    for (std::size_t i = 0; i < count; ++i) {
        Provenance p{"art" + std::to_string(pick(rng, 4)), std::nullopt, "b" + std::to_string(pick(rng, 2))};
        if (coin(rng, 0.7)) p.batch_index = pick(rng, 3);
        out.push_back({phrase(rng, vocabulary), phrase(rng, vocabulary / 2 + 1), phrase(rng, vocabulary), p});
    }
    return out;
}

KnowledgeBase knowledge_base(Rng& rng, const std::string& signature) {
    KnowledgeBase kb(signature);
    kb.add_triples(triplets(rng, pick(rng, 12), 8));
    for (std::size_t i = 0, n = pick(rng, 3); i < n; ++i) kb.add_entity("lonely " + std::to_string(pick(rng, 5)));
    for (const auto& e : kb.entities()) {
        if (coin(rng, 0.2)) kb.set_entity_iri(e, "http://dbpedia.org/resource/" + e);
        if (coin(rng, 0.1)) kb.mark_class(e);
    }
    return kb;
}

std::string marker_noise(Rng& rng, std::size_t max_len) {
    static const std::vector<std::string> kParts = {"<triplet>", "<subj>", "<obj>", "<s>",  "</s>", "<pad>", "<",
                                                    ">",         "trip",   " ",     "\n",   "\t",   "A",     "bc",
                                                    "|",         "<sub",   "j>",    "é",    "\x01", "<obj"};
    std::string out;
    std::size_t target = pick(rng, max_len + 1);
    while (out.size() < target) {
        if (coin(rng, 0.2)) {
            out += static_cast<char>(pick(rng, 256));
        } else {
            out += kParts[pick(rng, kParts.size())];
        }
    }
    return out;
}

std::string turtle_noise(Rng& rng, std::size_t max_len) {
    static const std::string kPunct = "@<>:;,.\"'#^_[](){}\\ \n\tabcxyz019-";
    std::string out;
    std::size_t target = pick(rng, max_len + 1);
    for (std::size_t i = 0; i < target; ++i) {
        if (coin(rng, 0.15)) {
            out += static_cast<char>(pick(rng, 256));
        } else if (coin(rng, 0.1)) {
            out += "@prefix ex: <http://e/> .";
        } else {
            out += kPunct[pick(rng, kPunct.size())];
        }
    }
    return out;
}

OntologyDoc ontology(Rng& rng) {
    const std::string ns = "http://example.org/g#";
    OntologyDoc doc;
    doc.prefixes = {{"rdf", std::string(vocab::kRdf)},
                    {"rdfs", std::string(vocab::kRdfs)},
                    {"owl", std::string(vocab::kOwl)},
                    {"xsd", std::string(vocab::kXsd)},
                    {"ex", ns}};
    if (coin(rng, 0.3)) doc.prefixes["dbr"] = "http://dbpedia.org/resource/";
    if (coin(rng, 0.2)) doc.ontologies.insert("http://example.org/g");

    std::vector<std::string> classes, objprops, dataprops, inds;
    for (std::size_t i = 0, n = 1 + pick(rng, 4); i < n; ++i) classes.push_back(ns + "Class" + std::to_string(i));
    for (std::size_t i = 0, n = 1 + pick(rng, 3); i < n; ++i) objprops.push_back(ns + "rel" + std::to_string(i));
    for (std::size_t i = 0, n = pick(rng, 3); i < n; ++i) dataprops.push_back(ns + "attr" + std::to_string(i));
    for (std::size_t i = 0, n = 1 + pick(rng, 6); i < n; ++i) inds.push_back(ns + "ind-" + std::to_string(i));
    if (coin(rng, 0.4)) inds.push_back("http://dbpedia.org/resource/Amazon_(company)");

    doc.classes.insert(classes.begin(), classes.end());
    doc.object_properties.insert(objprops.begin(), objprops.end());
    doc.data_properties.insert(dataprops.begin(), dataprops.end());
    if (coin(rng, 0.3)) doc.annotation_properties.insert(ns + "note");

    for (const auto& ind : inds) {
        if (coin(rng, 0.3)) doc.individuals.insert(ind);
        doc.class_assertions.emplace(ind, classes[pick(rng, classes.size())]);
    }
    for (std::size_t i = 0, n = pick(rng, 8); i < n; ++i) {
        doc.property_assertions.insert(
            {inds[pick(rng, inds.size())], objprops[pick(rng, objprops.size())], inds[pick(rng, inds.size())]});
    }
    static const std::vector<Literal> kLiterals = {
        {"2040", "", std::string(vocab::kXsd) + "integer"},
        {"Excess Energy", "en", ""},
        {"say \"hi\" \\ back", "", ""},
        {"café crème", "fr", ""},
        {"tab\there", "", ""},
        {"", "", ""},
    };
    for (const auto& d : dataprops) {
        doc.property_assertions.insert({inds[pick(rng, inds.size())], d, kLiterals[pick(rng, kLiterals.size())]});
    }
    if (classes.size() > 1) doc.axioms.insert({classes[1], vocab::rdfs("subClassOf"), classes[0]});
    if (coin(rng)) doc.axioms.insert({inds[0], vocab::rdfs("label"), Literal{"first one", "en", ""}});
    return doc;
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string term(const Term& t) {
    if (const auto* iri = std::get_if<std::string>(&t)) return "<" + *iri + ">";
    const auto& lit = std::get<Literal>(t);
    std::string out = "\"" + escape(lit.lexical) + "\"";
    if (!lit.language.empty()) out += "@" + lit.language;
    if (!lit.datatype.empty()) out += "^^<" + lit.datatype + ">";
    return out;
}

}  // namespace

std::string write_turtle(const OntologyDoc& doc) {
    std::string out;
    for (const auto& [name, iri] : doc.prefixes) out += "@prefix " + name + ": <" + iri + "> .\n";
    const std::string type = "<" + vocab::rdf("type") + ">";
    auto typed = [&](const std::string& s, const std::string& cls) { out += "<" + s + "> " + type + " <" + cls + "> .\n"; };
    for (const auto& o : doc.ontologies) typed(o, vocab::owl("Ontology"));
    for (const auto& c : doc.classes) typed(c, vocab::owl("Class"));
    for (const auto& p : doc.object_properties) typed(p, vocab::owl("ObjectProperty"));
    for (const auto& p : doc.data_properties) typed(p, vocab::owl("DatatypeProperty"));
    for (const auto& p : doc.annotation_properties) typed(p, vocab::owl("AnnotationProperty"));
    for (const auto& i : doc.individuals) typed(i, vocab::owl("NamedIndividual"));
    for (const auto& [i, c] : doc.class_assertions) typed(i, c);
    for (const auto* set : {&doc.property_assertions, &doc.axioms}) {
        for (const auto& st : *set) out += "<" + st.subject + "> <" + st.predicate + "> " + term(st.object) + " .\n";
    }
    return out;
}

InjectedDefects with_defects(Rng& rng, std::size_t k) {
    const std::string ns = "http://example.org/d#";
    InjectedDefects out;
    auto& doc = out.doc;
    doc.prefixes = {{"rdf", std::string(vocab::kRdf)},
                    {"rdfs", std::string(vocab::kRdfs)},
                    {"owl", std::string(vocab::kOwl)},
                    {"xsd", std::string(vocab::kXsd)},
                    {"d", ns}};
    // Five classes and five properties, all in use.
    std::vector<std::string> classes, props;
    for (int i = 0; i < 5; ++i) {
        classes.push_back(ns + "Concept" + std::to_string(i));
        props.push_back(ns + "relatesTo" + std::to_string(i));
    }
    for (int i = 0; i < 5; ++i) {
        auto ind = ns + "thing" + std::to_string(i);
        doc.class_assertions.emplace(ind, classes[i]);
        doc.class_assertions.emplace(ns + "other" + std::to_string(i), classes[i]);
        doc.property_assertions.insert({ind, props[i], ns + "other" + std::to_string(i)});
        doc.property_assertions.insert({ns + "other" + std::to_string(i), props[i], ind});
    }

    std::vector<std::pair<bool, std::size_t>> slots;  // (is_property, index)
    for (std::size_t i = 0; i < 5; ++i) {
        slots.emplace_back(true, i);
        slots.emplace_back(false, i);
    }
    std::shuffle(slots.begin(), slots.end(), rng);
    std::set<std::pair<bool, std::size_t>> removed(slots.begin(), slots.begin() + static_cast<long>(k));
    for (std::size_t i = 0; i < 5; ++i) {
        if (removed.count({true, i})) {
            ++out.undeclared_properties;
        } else {
            doc.object_properties.insert(props[i]);
        }
        if (removed.count({false, i})) {
            ++out.undeclared_classes;
        } else {
            doc.classes.insert(classes[i]);
        }
    }
    return out;
}

}  // namespace gen
