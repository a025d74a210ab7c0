#include "kgpipe/quality.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

void QualityConfig::validate() const {
    if (conciseness_max_tokens == 0) {
        throw ConfigError("quality.conciseness_max_tokens", "must be positive");
    }
    if (relevance_enabled) {
        bool any = std::any_of(domain_lexicon.begin(), domain_lexicon.end(),
                               [](const std::string& t) { return !text::trim(t).empty(); });
        if (!any) throw ConfigError("quality.domain_lexicon", "must not be empty while relevance is enabled");
    }
}

namespace {

std::vector<std::string> canonical_terms(const std::vector<std::string>& terms) {
    std::set<std::string> out;
    for (const auto& t : terms) {
        auto n = text::normalize_surface(t);
        if (!n.empty()) out.insert(n);
    }
    return {out.begin(), out.end()};
}

}  // namespace

std::string QualityConfig::fingerprint() const {
    json j = {{"conciseness_max_tokens", conciseness_max_tokens},
              {"functional_predicates", canonical_terms(functional_predicates)},
              {"relevance_enabled", relevance_enabled},
              {"domain_lexicon", relevance_enabled ? canonical_terms(domain_lexicon) : std::vector<std::string>{}},
              {"formula_version", kQualityFormulaVersion}};
    return text::sha256_hex(j.dump());
}

QualityConfig quality_config_from_json(const json& j, const std::string& key_path) {
    if (!j.is_object()) throw ConfigError(key_path, "expected an object");
    QualityConfig config;
    auto string_list = [&](const json& v, const std::string& key) {
        if (!v.is_array()) throw ConfigError(key_path + "." + key, "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& item : v) {
            if (!item.is_string()) throw ConfigError(key_path + "." + key, "expected an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "conciseness_max_tokens") {
            if (!value.is_number_integer() || value.get<long long>() <= 0) {
                throw ConfigError(key_path + "." + key, "expected a positive integer");
            }
            config.conciseness_max_tokens = value.get<std::size_t>();
        } else if (key == "functional_predicates") {
            config.functional_predicates = string_list(value, key);
        } else if (key == "relevance_enabled") {
            if (!value.is_boolean()) throw ConfigError(key_path + "." + key, "expected a boolean");
            config.relevance_enabled = value.get<bool>();
        } else if (key == "domain_lexicon") {
            config.domain_lexicon = string_list(value, key);
        } else {
            throw ConfigError(key_path + "." + key, "unknown key");
        }
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        auto field = e.key_path().substr(e.key_path().find('.') + 1);
        throw ConfigError(key_path + "." + field, e.what());
    }
    return config;
}

json quality_config_to_json(const QualityConfig& config) {
    return {{"conciseness_max_tokens", config.conciseness_max_tokens},
            {"functional_predicates", config.functional_predicates},
            {"relevance_enabled", config.relevance_enabled},
            {"domain_lexicon", config.domain_lexicon}};
}

QualityConfig load_quality_config(const std::string& path) {
    json j;
    try {
        j = json::parse(text::read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("quality", path + ": " + e.what());
    }
    return quality_config_from_json(j);
}

std::string to_string(PrincipleStatus status) {
    switch (status) {
        case PrincipleStatus::computed: return "computed";
        case PrincipleStatus::metadata: return "metadata";
        case PrincipleStatus::manual: return "manual";
    }
    return "manual";
}

namespace {

PrincipleStatus status_from_string(const std::string& s) {
    if (s == "computed") return PrincipleStatus::computed;
    if (s == "metadata") return PrincipleStatus::metadata;
    if (s == "manual") return PrincipleStatus::manual;
    throw InvalidDoc("unknown principle status '" + s + "'");
}

struct UnionFind {
    std::vector<std::size_t> parent;
    std::vector<std::size_t> size;

    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

bool phrase_like(const std::string& field, std::size_t max_tokens) {
    return text::count_words(field) > max_tokens;
}

void graph_metrics(const KnowledgeBase& kb, QualityMetrics& m) {
    const auto& entities = kb.entities();
    std::map<std::string, std::size_t> index;
    for (const auto& e : entities) index.emplace(e, index.size());

    std::vector<std::size_t> degree(index.size(), 0);
    UnionFind components(index.size());
    for (const auto& [key, _] : kb.triples()) {
        auto s = index.at(key.subject);
        auto o = index.at(key.object);
        ++degree[s];
        ++degree[o];
        components.unite(s, o);
    }

    std::size_t isolated = std::count(degree.begin(), degree.end(), std::size_t{0});
    std::size_t largest = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (components.find(i) == i) largest = std::max(largest, components.size[i]);
    }
    m.isolated_entity_ratio = {isolated, entities.size()};
    m.largest_component_fraction = {largest, entities.size()};
    m.mean_degree = entities.empty() ? 0.0
                                     : 2.0 * static_cast<double>(kb.triples().size()) /
                                           static_cast<double>(entities.size());
}

std::string fixed(double v, int precision = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

}  // namespace

QualityReport evaluate(const KnowledgeBase& kb, const std::vector<Article>& corpus, const QualityConfig& config) {
    config.validate();
    QualityReport report;
    report.config_fingerprint = config.fingerprint();
    auto& m = report.metrics;

    std::size_t extractions = 0;
    std::size_t phrase_fields = 0;
    std::set<std::string> article_ids;
    for (const auto& [key, provenance] : kb.triples()) {
        std::size_t count = 0;
        for (const auto& [source, n] : provenance) {
            count += n;
            article_ids.insert(source.article_id);
        }
        extractions += count;
        for (const auto* field : {&key.subject, &key.predicate, &key.object}) {
            if (phrase_like(*field, config.conciseness_max_tokens)) phrase_fields += count;
        }
    }
    m.conciseness_violation_ratio = {phrase_fields, 3 * extractions};
    m.duplicate_ratio = {extractions - kb.triples().size(), extractions};

    graph_metrics(kb, m);
    m.distinct_predicates = kb.predicates().size();

    std::size_t linked = 0;
    for (const auto& e : kb.entities()) {
        if (kb.entity_iris().count(e)) ++linked;
    }
    m.linked_entity_ratio = {linked, kb.entities().size()};

    std::set<std::string> functional;
    for (const auto& p : config.functional_predicates) functional.insert(text::normalize_surface(p));
    std::map<std::pair<std::string, std::string>, std::set<std::string>> objects;
    for (const auto& [key, _] : kb.triples()) {
        auto p = text::normalize_surface(key.predicate);
        if (functional.count(p)) objects[{key.subject, p}].insert(key.object);
    }
    for (const auto& [_, values] : objects) {
        if (values.size() > 1) ++m.contradiction_count;
    }

    if (config.relevance_enabled) {
        auto relevant = [&](const std::string& label) {
            return std::any_of(config.domain_lexicon.begin(), config.domain_lexicon.end(), [&](const std::string& t) {
                auto term = text::trim(t);
                return !term.empty() && text::contains_icase(label, term);
            });
        };
        std::size_t hits = 0;
        for (const auto& e : kb.entities()) hits += relevant(e) ? 1 : 0;
        for (const auto& p : kb.predicates()) hits += relevant(p) ? 1 : 0;
        m.domain_relevance_ratio = {hits, kb.entities().size() + kb.predicates().size()};
    }

    std::map<std::string, const Article*> by_id;
    for (const auto& a : corpus) by_id.emplace(a.id, &a);
    std::set<std::string> domains;
    std::vector<std::string> missing;
    for (const auto& id : article_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            missing.push_back(id);
        } else if (!it->second->source_domain.empty()) {
            domains.insert(it->second->source_domain);
        }
    }
    m.distinct_source_domains = domains.size();
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 5; ++i) list += (i ? ", " : "") + missing[i];
        if (missing.size() > 5) list += ", ...";
        report.warnings.push_back(std::to_string(missing.size()) +
                                  " provenance article id(s) missing from corpus metadata: " + list);
    }

    for (const auto& a : corpus) {
        if (!a.published_at.ok()) continue;
        if (!m.date_range) {
            m.date_range = std::make_pair(a.published_at, a.published_at);
        } else {
            m.date_range->first = std::min(m.date_range->first, a.published_at);
            m.date_range->second = std::max(m.date_range->second, a.published_at);
        }
    }

    using S = PrincipleStatus;
    auto& p = report.principles;
    p.push_back({1, "concise triples", "conciseness_violation_ratio", S::computed,
                 m.conciseness_violation_ratio.value(),
                 "share of fields longer than " + std::to_string(config.conciseness_max_tokens) + " tokens"});
    p.push_back({2, "entity context", "", S::manual, std::nullopt,
                 "whether surrounding context is captured needs a human reader"});
    p.push_back({3, "no redundant triples", "duplicate_ratio", S::computed, m.duplicate_ratio.value(),
                 "repeated extractions collapsed by the store"});
    p.push_back({4, "dynamic updates", "", S::metadata, std::nullopt,
                 "knowledge bases are files that merge incrementally"});
    p.push_back({5, "dense connectivity", "largest_component_fraction", S::computed,
                 m.largest_component_fraction.value(), "see also mean_degree and isolated_entity_ratio"});
    p.push_back({6, "relation diversity", "distinct_predicates", S::computed,
                 static_cast<double>(m.distinct_predicates), "number of distinct predicates"});
    p.push_back({7, "multi-field sources", "distinct_source_domains", S::computed,
                 static_cast<double>(m.distinct_source_domains), "source domains reached through provenance"});
    p.push_back({8, "varied sources", "distinct_source_domains", S::computed,
                 static_cast<double>(m.distinct_source_domains), "source domains reached through provenance"});
    p.push_back({9, "synonyms and ambiguity", "linked_entity_ratio", S::computed, m.linked_entity_ratio.value(),
                 "entities resolved to a knowledge-base IRI"});
    p.push_back({10, "structured triples", "structured", S::computed, 1.0, "holds by construction"});
    p.push_back({11, "scalability", "", S::metadata, std::nullopt, "size is reported by stats, not scored"});
    p.push_back({12, "attribute completeness", "", S::manual, std::nullopt,
                 "missing attributes cannot be known without ground truth"});
    p.push_back({13, "availability", "", S::metadata, std::nullopt, "depends on where the knowledge base is published"});
    p.push_back({14, "authority", "", S::manual, std::nullopt, "a judgment about trust in the sources"});
    p.push_back({15, "concentration", "", S::manual, std::nullopt, "focus of the graph is judged by a reader"});
    p.push_back({16, "no contradictions", "contradiction_count", S::computed,
                 static_cast<double>(m.contradiction_count),
                 functional.empty() ? "no functional predicates configured" : "subject and functional predicate with differing objects"});
    if (config.relevance_enabled) {
        p.push_back({17, "domain relevance", "domain_relevance_ratio", S::computed, m.domain_relevance_ratio.value(),
                     "labels containing a lexicon term"});
    } else {
        p.push_back({17, "domain relevance", "", S::manual, std::nullopt, "relevance scoring disabled"});
    }
    p.push_back({18, "freshness", "date_range", S::computed, std::nullopt,
                 m.date_range ? format_date(m.date_range->first) + " .. " + format_date(m.date_range->second)
                              : "no dated articles"});
    return report;
}

namespace {

std::vector<std::pair<std::string, double>> computed_values(const QualityMetrics& m) {
    return {
        {"conciseness_violation_ratio", m.conciseness_violation_ratio.value()},
        {"duplicate_ratio", m.duplicate_ratio.value()},
        {"isolated_entity_ratio", m.isolated_entity_ratio.value()},
        {"mean_degree", m.mean_degree},
        {"largest_component_fraction", m.largest_component_fraction.value()},
        {"distinct_predicates", static_cast<double>(m.distinct_predicates)},
        {"distinct_source_domains", static_cast<double>(m.distinct_source_domains)},
        {"linked_entity_ratio", m.linked_entity_ratio.value()},
        {"contradiction_count", static_cast<double>(m.contradiction_count)},
        {"domain_relevance_ratio", m.domain_relevance_ratio.value()},
    };
}

std::vector<std::pair<std::string, const Ratio*>> ratios(const QualityMetrics& m) {
    return {
        {"conciseness_violation_ratio", &m.conciseness_violation_ratio},
        {"duplicate_ratio", &m.duplicate_ratio},
        {"isolated_entity_ratio", &m.isolated_entity_ratio},
        {"largest_component_fraction", &m.largest_component_fraction},
        {"linked_entity_ratio", &m.linked_entity_ratio},
        {"domain_relevance_ratio", &m.domain_relevance_ratio},
    };
}

}  // namespace

std::vector<ComparisonRow> compare(const QualityReport& a, const QualityReport& b) {
    if (a.formula_version != b.formula_version || a.config_fingerprint != b.config_fingerprint) {
        throw ConfigMismatch("quality reports were produced with different configurations");
    }
    auto va = computed_values(a.metrics);
    auto vb = computed_values(b.metrics);
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < va.size(); ++i) {
        rows.push_back({va[i].first, va[i].second, vb[i].second, vb[i].second - va[i].second});
    }
    return rows;
}

json quality_report_to_json(const QualityReport& report) {
    const auto& m = report.metrics;
    json metrics = json::object();
    for (const auto& [name, value] : computed_values(m)) metrics[name] = value;
    metrics["date_range"] = m.date_range ? json{format_date(m.date_range->first), format_date(m.date_range->second)}
                                         : json(nullptr);
    json terms = json::object();
    for (const auto& [name, r] : ratios(m)) terms[name] = {r->numerator, r->denominator};

    json principles = json::array();
    for (const auto& e : report.principles) {
        principles.push_back({{"number", e.number},
                              {"name", e.name},
                              {"metric", e.metric},
                              {"status", to_string(e.status)},
                              {"value", e.value ? json(*e.value) : json(nullptr)},
                              {"note", e.note}});
    }
    return {{"formula_version", report.formula_version},
            {"config_fingerprint", report.config_fingerprint},
            {"metrics", metrics},
            {"ratio_terms", terms},
            {"principles", principles},
            {"warnings", report.warnings}};
}

QualityReport quality_report_from_json(const json& j) {
    try {
        QualityReport report;
        report.formula_version = j.at("formula_version").get<std::string>();
        report.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        auto& m = report.metrics;
        const auto& metrics = j.at("metrics");
        const auto& terms = j.at("ratio_terms");
        auto ratio = [&](const char* name) {
            const auto& t = terms.at(name);
            return Ratio{t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>()};
        };
        m.conciseness_violation_ratio = ratio("conciseness_violation_ratio");
        m.duplicate_ratio = ratio("duplicate_ratio");
        m.isolated_entity_ratio = ratio("isolated_entity_ratio");
        m.largest_component_fraction = ratio("largest_component_fraction");
        m.linked_entity_ratio = ratio("linked_entity_ratio");
        m.domain_relevance_ratio = ratio("domain_relevance_ratio");
        m.mean_degree = metrics.at("mean_degree").get<double>();
        m.distinct_predicates = metrics.at("distinct_predicates").get<std::size_t>();
        m.distinct_source_domains = metrics.at("distinct_source_domains").get<std::size_t>();
        m.contradiction_count = metrics.at("contradiction_count").get<std::size_t>();
        const auto& range = metrics.at("date_range");
        if (!range.is_null()) {
            auto from = parse_date(range.at(0).get<std::string>());
            auto to = parse_date(range.at(1).get<std::string>());
            if (!from || !to) throw InvalidDoc("bad date_range");
            m.date_range = std::make_pair(*from, *to);
        }
        for (const auto& e : j.at("principles")) {
            PrincipleEntry entry;
            entry.number = e.at("number").get<int>();
            entry.name = e.at("name").get<std::string>();
            entry.metric = e.at("metric").get<std::string>();
            entry.status = status_from_string(e.at("status").get<std::string>());
            if (!e.at("value").is_null()) entry.value = e.at("value").get<double>();
            entry.note = e.at("note").get<std::string>();
            report.principles.push_back(std::move(entry));
        }
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const json::exception& e) {
        throw InvalidDoc(std::string("malformed quality report: ") + e.what());
    }
}

std::string quality_report_to_text(const QualityReport& report) {
    std::ostringstream out;
    out << "quality report (formulas " << report.formula_version << ", config " << report.config_fingerprint.substr(0, 12)
        << ")\n\n";
    out << std::left << std::setw(4) << "#" << std::setw(26) << "principle" << std::setw(10) << "status"
        << std::setw(30) << "metric" << std::setw(10) << "value" << "note\n";
    for (const auto& e : report.principles) {
        out << std::setw(4) << e.number << std::setw(26) << e.name << std::setw(10) << to_string(e.status)
            << std::setw(30) << (e.metric.empty() ? "-" : e.metric) << std::setw(10)
            << (e.value ? fixed(*e.value) : "-") << e.note << "\n";
    }
    out << "\n";
    for (const auto& [name, r] : ratios(report.metrics)) {
        out << name << " = " << r->numerator << "/" << r->denominator << " = " << fixed(r->value()) << "\n";
    }
    out << "mean_degree = " << fixed(report.metrics.mean_degree) << "\n";
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string comparison_to_text(const std::vector<ComparisonRow>& rows, const std::string& name_a,
                               const std::string& name_b) {
    std::ostringstream out;
    out << std::left << std::setw(30) << "metric" << std::setw(14) << name_a << std::setw(14) << name_b << "delta\n";
    for (const auto& r : rows) {
        out << std::setw(30) << r.metric << std::setw(14) << fixed(r.a) << std::setw(14) << fixed(r.b)
            << (r.delta > 0 ? "+" : "") << fixed(r.delta) << "\n";
    }
    return out.str();
}

}  // namespace kgpipe
