#include <gtest/gtest.h>

#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/quality.hpp"
#include "oracles.hpp"

using namespace kgpipe;

namespace {

const std::string kJumbo = "small high-value items in jumbo packaging";
const std::string kGoal = "has already surpassed a goal set in 2019";
const std::string kRules = "new rules on packaging waste reduction";

struct Row {
    std::string s, p, o;
    int times;
    std::string article;
};

// 15 distinct triples, 20 extractions, 12 connected entities.
const std::vector<Row> kFixture = {
    {"Amazon", "ships", kJumbo, 2, "a1"},
    {kJumbo, "criticized by", "consumers", 1, "a1"},
    {"Starbucks", kGoal, "heat pumps", 1, "a2"},
    {"EU", "adopts", kRules, 2, "a3"},
    {"Starbucks", "headquarters location", "Seattle", 2, "a2"},
    {"Seattle", "country", "United States", 1, "a2"},
    {"Starbucks", "country", "United States", 1, "a2"},
    {"Samsung", "country", "South Korea", 2, "a1"},
    {"Samsung", "recycles", "cobalt", 2, "a1"},
    {"Amazon", "country", "United States", 1, "a1"},
    {"consumers", "buy from", "Amazon", 1, "a1"},
    {"EU", "regulates", "Amazon", 1, "a3"},
    {"Samsung", "uses", "heat pumps", 1, "a2"},
    {"cobalt", "mined in", "South Korea", 1, "a1"},
    {"EU", "trades with", "South Korea", 1, "a3"},
};

KnowledgeBase fixture_kb() {
    KnowledgeBase kb("lookup=stub;match=exact");
    for (const auto& r : kFixture) {
        for (int i = 0; i < r.times; ++i) kb.add_triple(r.s, r.p, r.o, {r.article, 0, "rebel"});
    }
    for (const auto* e : {"Soluna", "Texas", "Jumbo", "Galaxy S23"}) kb.add_entity(e);
    for (const auto* e : {"Samsung", "South Korea", "Amazon", "Starbucks"}) {
        kb.set_entity_iri(e, std::string("http://www.wikidata.org/entity/") + e);
    }
    return kb;
}

std::vector<Article> fixture_corpus() {
    return {make_article("a1", "t", "body", "reuters.com", *parse_date("2023-02-01"), "en"),
            make_article("a2", "t", "body", "bbc.co.uk", *parse_date("2023-01-17"), "en"),
            make_article("a3", "t", "body", "reuters.com", *parse_date("2023-03-10"), "en"),
            make_article("unused", "t", "body", "example.org", Date{}, "en")};
}

QualityConfig plain_config() {
    QualityConfig c;
    c.relevance_enabled = false;
    return c;
}

// Reference graph figures computed by flood fill over an adjacency list.
struct GraphOracle {
    std::size_t isolated = 0;
    std::size_t largest = 0;
    std::size_t entities = 0;
    std::size_t edges = 0;
};

GraphOracle graph_oracle(const KnowledgeBase& kb) {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& e : kb.entities()) adj[e];
    for (const auto& [k, _] : kb.triples()) {
        adj[k.subject].insert(k.object);
        adj[k.object].insert(k.subject);
    }
    GraphOracle g;
    g.entities = adj.size();
    g.edges = kb.triples().size();
    std::set<std::string> seen;
    for (const auto& [start, nbrs] : adj) {
        if (nbrs.empty()) ++g.isolated;
        if (seen.count(start)) continue;
        std::vector<std::string> stack{start};
        seen.insert(start);
        std::size_t size = 0;
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            ++size;
            for (const auto& n : adj[cur]) {
                if (seen.insert(n).second) stack.push_back(n);
            }
        }
        g.largest = std::max(g.largest, size);
    }
    return g;
}

std::size_t phrase_fields_oracle(const std::vector<Row>& rows, std::size_t max_tokens) {
    std::size_t n = 0;
    for (const auto& r : rows) {
        for (const auto* f : {&r.s, &r.p, &r.o}) {
            if (oracle::whitespace_tokens(*f).size() > max_tokens) n += r.times;
        }
    }
    return n;
}

}  // namespace

TEST(Quality, FixtureMetricsMatchHandCounts) {
    auto report = evaluate(fixture_kb(), fixture_corpus(), plain_config());
    const auto& m = report.metrics;
    EXPECT_EQ(m.duplicate_ratio, (Ratio{5, 20}));
    EXPECT_DOUBLE_EQ(m.duplicate_ratio.value(), 0.25);
    EXPECT_EQ(m.isolated_entity_ratio, (Ratio{4, 16}));
    EXPECT_DOUBLE_EQ(m.isolated_entity_ratio.value(), 0.25);
    EXPECT_EQ(m.conciseness_violation_ratio, (Ratio{6, 60}));
    EXPECT_DOUBLE_EQ(m.conciseness_violation_ratio.value(), 0.10);
    EXPECT_EQ(m.largest_component_fraction, (Ratio{12, 16}));
    EXPECT_DOUBLE_EQ(m.mean_degree, 30.0 / 16.0);
    EXPECT_EQ(m.linked_entity_ratio, (Ratio{4, 16}));
    EXPECT_EQ(m.distinct_predicates, 12u);
    EXPECT_EQ(m.distinct_source_domains, 2u);
    EXPECT_EQ(m.contradiction_count, 0u);
    ASSERT_TRUE(m.date_range);
    EXPECT_EQ(format_date(m.date_range->first), "2023-01-17");
    EXPECT_EQ(format_date(m.date_range->second), "2023-03-10");
    EXPECT_TRUE(report.warnings.empty());
}

TEST(Quality, FixtureMetricsMatchOracle) {
    auto kb = fixture_kb();
    auto g = graph_oracle(kb);
    std::size_t extractions = 0;
    for (const auto& r : kFixture) extractions += r.times;
    for (std::size_t threshold : {1u, 2u, 4u, 6u, 7u, 8u, 20u}) {
        auto c = plain_config();
        c.conciseness_max_tokens = threshold;
        auto m = evaluate(kb, fixture_corpus(), c).metrics;
        ASSERT_EQ(m.conciseness_violation_ratio, (Ratio{phrase_fields_oracle(kFixture, threshold), 3 * extractions}))
            << threshold;
        ASSERT_EQ(m.duplicate_ratio, (Ratio{extractions - kFixture.size(), extractions}));
        ASSERT_EQ(m.isolated_entity_ratio, (Ratio{g.isolated, g.entities}));
        ASSERT_EQ(m.largest_component_fraction, (Ratio{g.largest, g.entities}));
    }
}

TEST(Quality, RandomStoresAgreeWithGraphOracle) {
    gen::Rng rng(11);
    for (int round = 0; round < 100; ++round) {
        auto kb = gen::knowledge_base(rng);
        auto g = graph_oracle(kb);
        auto m = evaluate(kb, {}, plain_config()).metrics;
        ASSERT_EQ(m.isolated_entity_ratio, (Ratio{g.isolated, g.entities}));
        ASSERT_EQ(m.largest_component_fraction, (Ratio{g.largest, g.entities}));
        if (g.entities) {
            ASSERT_DOUBLE_EQ(m.mean_degree, 2.0 * g.edges / g.entities);
        }
        ASSERT_EQ(m.distinct_predicates, kb.predicates().size());
        ASSERT_LE(m.duplicate_ratio.numerator, m.duplicate_ratio.denominator);
    }
}

TEST(Quality, ConnectedStoreHasFullLargestComponent) {
    gen::Rng rng(12);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 2 + rng() % 30;
        KnowledgeBase kb;
        // Random tree plus a few extra edges.
        for (std::size_t i = 1; i < n; ++i) {
            kb.add_triple("n" + std::to_string(rng() % i), "r" + std::to_string(rng() % 3), "n" + std::to_string(i),
                          {"a", 0, "x"});
        }
        for (int extra = 0; extra < 5; ++extra) {
            kb.add_triple("n" + std::to_string(rng() % n), "link", "n" + std::to_string(rng() % n), {"a", 0, "x"});
        }
        auto m = evaluate(kb, {}, plain_config()).metrics;
        ASSERT_DOUBLE_EQ(m.largest_component_fraction.value(), 1.0);
        ASSERT_EQ(m.isolated_entity_ratio.numerator, 0u);
    }
}

TEST(Quality, EighteenPrinciplesInOrder) {
    gen::Rng rng(13);
    for (int round = 0; round < 50; ++round) {
        auto kb = gen::knowledge_base(rng);
        QualityConfig c;
        c.relevance_enabled = round % 2 == 0;
        auto report = evaluate(kb, {}, c);
        ASSERT_EQ(report.principles.size(), 18u);
        for (std::size_t i = 0; i < 18; ++i) {
            const auto& p = report.principles[i];
            ASSERT_EQ(p.number, static_cast<int>(i + 1));
            ASSERT_FALSE(p.name.empty());
            if (p.status == PrincipleStatus::computed) {
                ASSERT_FALSE(p.metric.empty()) << p.number;
            } else {
                ASSERT_TRUE(p.metric.empty()) << p.number;
                ASSERT_FALSE(p.value) << p.number;
                ASSERT_FALSE(p.note.empty()) << p.number;
            }
        }
        ASSERT_EQ(report.principles[16].status,
                  c.relevance_enabled ? PrincipleStatus::computed : PrincipleStatus::manual);
    }
}

TEST(Quality, EmptyStore) {
    auto report = evaluate(KnowledgeBase{}, {}, QualityConfig{});
    const auto& m = report.metrics;
    EXPECT_EQ(m.duplicate_ratio.value(), 0.0);
    EXPECT_EQ(m.isolated_entity_ratio.value(), 0.0);
    EXPECT_EQ(m.largest_component_fraction.value(), 0.0);
    EXPECT_EQ(m.mean_degree, 0.0);
    EXPECT_EQ(m.domain_relevance_ratio.value(), 0.0);
    EXPECT_FALSE(m.date_range);
    EXPECT_EQ(report.principles.size(), 18u);
}

TEST(Quality, ContradictionsOnFunctionalPredicates) {
    auto kb = fixture_kb();
    kb.add_triple("Samsung", "Country", "United States", {"a1", 0, "rebel"});
    kb.add_triple("Starbucks", "headquarters location", "Kent", {"a2", 0, "rebel"});
    auto c = plain_config();
    EXPECT_EQ(evaluate(kb, fixture_corpus(), c).metrics.contradiction_count, 0u);
    c.functional_predicates = {"country "};
    EXPECT_EQ(evaluate(kb, fixture_corpus(), c).metrics.contradiction_count, 1u);
    c.functional_predicates = {"country", "headquarters location"};
    EXPECT_EQ(evaluate(kb, fixture_corpus(), c).metrics.contradiction_count, 2u);
}

TEST(Quality, DomainRelevanceWithCustomLexicon) {
    QualityConfig c;
    c.domain_lexicon = {"packaging", "Heat Pump", "  "};
    auto m = evaluate(fixture_kb(), fixture_corpus(), c).metrics;
    // Entities: the jumbo phrase, the rules phrase, heat pumps. No predicate matches.
    EXPECT_EQ(m.domain_relevance_ratio, (Ratio{3, 16 + 12}));

    c.domain_lexicon = {" ", ""};
    EXPECT_THROW(evaluate(fixture_kb(), {}, c), ConfigError);
    c.relevance_enabled = false;
    EXPECT_NO_THROW(evaluate(fixture_kb(), {}, c));
    EXPECT_FALSE(default_sustainability_lexicon().empty());
}

TEST(Quality, MissingArticleIdsWarnOnly) {
    auto corpus = fixture_corpus();
    corpus.erase(corpus.begin());  // drops a1
    auto report = evaluate(fixture_kb(), corpus, plain_config());
    ASSERT_EQ(report.warnings.size(), 1u);
    EXPECT_NE(report.warnings[0].find("1 provenance article id"), std::string::npos);
    EXPECT_NE(report.warnings[0].find("a1"), std::string::npos);
    EXPECT_EQ(report.metrics.distinct_source_domains, 2u);
    EXPECT_EQ(report.metrics.duplicate_ratio, (Ratio{5, 20}));
}

TEST(Quality, CompareReportsDeltas) {
    auto a = evaluate(fixture_kb(), fixture_corpus(), plain_config());
    auto kb = fixture_kb();
    kb.add_entity("Lonely");
    auto b = evaluate(kb, fixture_corpus(), plain_config());
    auto rows = compare(a, b);
    ASSERT_FALSE(rows.empty());
    bool saw_isolated = false;
    for (const auto& r : rows) {
        ASSERT_DOUBLE_EQ(r.delta, r.b - r.a) << r.metric;
        if (r.metric == "isolated_entity_ratio") {
            saw_isolated = true;
            EXPECT_DOUBLE_EQ(r.a, 4.0 / 16.0);
            EXPECT_DOUBLE_EQ(r.b, 5.0 / 17.0);
        }
    }
    EXPECT_TRUE(saw_isolated);
    for (const auto& r : compare(a, a)) EXPECT_EQ(r.delta, 0.0);
    EXPECT_FALSE(comparison_to_text(rows, "a", "b").empty());

    auto other = plain_config();
    other.conciseness_max_tokens = 5;
    EXPECT_THROW(compare(a, evaluate(kb, {}, other)), ConfigMismatch);
    auto reordered = plain_config();
    reordered.functional_predicates = {"b", "A"};
    auto same = plain_config();
    same.functional_predicates = {"a", "b"};
    EXPECT_EQ(reordered.fingerprint(), same.fingerprint());
}

TEST(Quality, ReportJsonRoundTrip) {
    gen::Rng rng(14);
    for (int round = 0; round < 30; ++round) {
        auto kb = gen::knowledge_base(rng);
        auto report = evaluate(kb, fixture_corpus(), QualityConfig{});
        auto j = quality_report_to_json(report);
        ASSERT_EQ(quality_report_from_json(j), report);
        ASSERT_EQ(quality_report_from_json(nlohmann::json::parse(j.dump())), report);
    }
    auto report = evaluate(fixture_kb(), fixture_corpus(), plain_config());
    auto j = quality_report_to_json(report);
    EXPECT_EQ(j.at("ratio_terms").at("duplicate_ratio"), nlohmann::json({5, 20}));
    EXPECT_EQ(j.at("principles").size(), 18u);
    auto text = quality_report_to_text(report);
    EXPECT_NE(text.find("duplicate_ratio"), std::string::npos);
}

TEST(Quality, ConfigKeyPaths) {
    auto path_of = [](const nlohmann::json& j) -> std::string {
        try {
            quality_config_from_json(j);
        } catch (const ConfigError& e) {
            return e.key_path();
        }
        return "";
    };
    EXPECT_EQ(path_of({{"conciseness_max_tokens", 0}}), "quality.conciseness_max_tokens");
    EXPECT_EQ(path_of({{"bogus", 1}}), "quality.bogus");
    EXPECT_EQ(path_of({{"functional_predicates", {1}}}), "quality.functional_predicates");
    EXPECT_EQ(path_of({{"domain_lexicon", nlohmann::json::array()}}), "quality.domain_lexicon");
    EXPECT_EQ(path_of({{"relevance_enabled", false}, {"domain_lexicon", nlohmann::json::array()}}), "");
    auto c = quality_config_from_json(quality_config_to_json(QualityConfig{}));
    EXPECT_EQ(c.fingerprint(), QualityConfig{}.fingerprint());
}
