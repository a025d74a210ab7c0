#include <gtest/gtest.h>

#include <filesystem>

#include "generators.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/ontology.hpp"
#include "kgpipe/text.hpp"
#include "kgpipe/turtle.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace kgpipe;

namespace {

const std::string kData = KGPIPE_TEST_DATA;
const std::string kEx = "http://example.org/sustainability#";

OntologyDoc parse_ok(const std::string& text) {
    auto r = parse_turtle(text);
    EXPECT_TRUE(r.ok()) << report_to_text(r.report);
    return r.doc.value_or(OntologyDoc{});
}

bool has_triple(const KnowledgeBase& kb, const std::string& s, const std::string& p, const std::string& o) {
    return kb.contains({s, p, o});
}

BackendConfig ontology_replay(const std::string& dir) {
    BackendConfig c;
    c.backend_id = "onto";
    c.kind = BackendKind::replay;
    c.replay_of = BackendKind::chat_ontology;
    c.model_name = "gpt-3.5-turbo";
    c.fixture_dir = dir;
    return c;
}

void put(const BackendConfig& c, const std::string& prompt, const std::string& output) {
    text::write_file((std::filesystem::path(c.fixture_dir) / (request_hash(c, prompt) + ".txt")).string(), output);
}

const std::string kUndeclared =
    "@prefix : <http://example.org/s#> .\n"
    "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
    ":Organization a owl:Class .\n"
    ":Practice a owl:Class .\n"
    ":Starbucks a :Organization ;\n"
    "    :hasPractice :ResourceSharing .\n"
    ":ResourceSharing a :Practice .\n";

}  // namespace

TEST(Turtle, SolunaFixtureYieldsExampleTriples) {
    auto doc = parse_ok(oracle::read(kData + "/soluna.ttl"));
    EXPECT_TRUE(validate_owl(doc).accepted());
    EXPECT_TRUE(doc.class_assertions.count({kEx + "Soluna", kEx + "Organizations"}));
    EXPECT_TRUE(doc.property_assertions.count({kEx + "Soluna", kEx + "utilizes", kEx + "ExcessEnergy"}));
    EXPECT_TRUE(doc.axioms.count({kEx + "ExcessEnergy", vocab::rdfs("label"), Literal{"Excess Energy", "en", ""}}));
    EXPECT_TRUE(doc.axioms.count({kEx + "utilizes", vocab::rdfs("range"), kEx + "Practices"}));

    auto kb = ontology_to_kb(doc, "soluna");
    EXPECT_TRUE(has_triple(kb, "Soluna", "instanceOf", "Organizations"));
    EXPECT_TRUE(has_triple(kb, "Soluna", "utilizes", "ExcessEnergy"));
    EXPECT_TRUE(has_triple(kb, "ExcessEnergy", "instanceOf", "Practices"));
    EXPECT_TRUE(has_triple(kb, "Soluna", "locatedIn", "Texas"));
    EXPECT_EQ(kb.triples().size(), 6u);
    EXPECT_TRUE(kb.classes().count("Organizations"));
    EXPECT_TRUE(kb.classes().count("Policies"));
    EXPECT_EQ(kb.linking_signature(), kOntologySignature);
    const auto& prov = kb.triples().at({"Soluna", "utilizes", "ExcessEnergy"});
    EXPECT_EQ(prov.begin()->first, (Provenance{"soluna", std::nullopt, "turtle"}));
}

TEST(Turtle, StarbucksFixtureFourTypingsThreeAssertions) {
    auto text = oracle::read(kData + "/starbucks.ttl");
    auto doc = parse_ok(text);
    EXPECT_EQ(doc.class_assertions.size(), 4u);
    EXPECT_EQ(doc.property_assertions.size(), 3u);
    auto kb = ontology_to_kb(doc, "starbucks", 0, "chat");
    EXPECT_EQ(kb.triples().size(), 7u);
    EXPECT_TRUE(has_triple(kb, "Starbucks", "hasPractice", "ResourceSharing"));
    EXPECT_TRUE(has_triple(kb, "Starbucks", "instanceOf", "Organization"));
    EXPECT_EQ(stats(kb).isolated_entity_count, 0u);

    // Fixed point: parse . serialize . parse.
    auto again = parse_ok(serialize_turtle(doc));
    EXPECT_EQ(again, parse_ok(serialize_turtle(again)));
    EXPECT_EQ(serialize_turtle(again), serialize_turtle(doc));
    EXPECT_EQ(again.class_assertions, doc.class_assertions);
    EXPECT_EQ(again.property_assertions, doc.property_assertions);
}

TEST(Turtle, UndeclaredPropertyIsReportedAtFirstUse) {
    auto r = check_turtle(kUndeclared);
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.report.errors.size(), 1u);
    EXPECT_EQ(r.report.errors[0].code, diag::kUndeclaredProperty);
    EXPECT_EQ(r.report.errors[0].location, "6:5");
    EXPECT_NE(r.report.errors[0].message.find("hasPractice"), std::string::npos);
    auto parsed = parse_turtle(kUndeclared);
    ASSERT_TRUE(parsed.ok());
    EXPECT_THROW(ontology_to_kb(*parsed.doc, "x"), InvalidDoc);
}

TEST(Turtle, UndefinedPrefix) {
    auto r = parse_turtle("@prefix owl: <http://www.w3.org/2002/07/owl#> .\nex:Thing a owl:Class .\n");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.report.errors[0].code, diag::kUndefinedPrefix);
    EXPECT_EQ(r.report.errors[0].location, "2:1");
}

TEST(Turtle, UnsupportedConstructsAreLocatedParseErrors) {
    const std::vector<std::string> inputs = {
        "@prefix : <http://e/> .\n:a :p [ :q :b ] .\n",
        "@prefix : <http://e/> .\n:a :p ( :b :c ) .\n",
        "@prefix : <http://e/> .\n:a :p \"\"\"long\"\"\" .\n",
        "@base <http://e/> .\n",
        "@prefix : <http://e/> .\n:a :p :b\n",
        "@prefix : <http://e/> .\n:a :p \"unterminated .\n",
        "<http://e/a> <http://e/p> .",
    };
    for (const auto& in : inputs) {
        auto r = parse_turtle(in);
        EXPECT_FALSE(r.ok()) << in;
        ASSERT_FALSE(r.report.errors.empty()) << in;
        EXPECT_EQ(r.report.errors[0].code, diag::kParseError) << in;
        EXPECT_FALSE(r.report.errors[0].location.empty()) << in;
    }
}

TEST(Turtle, RoundTripOnGeneratedDocuments) {
    gen::Rng rng(100);
    for (int round = 0; round < 120; ++round) {
        auto doc = gen::ontology(rng);
        auto text = serialize_turtle(doc);
        auto parsed = parse_turtle(text);
        ASSERT_TRUE(parsed.ok()) << report_to_text(parsed.report) << text;
        ASSERT_EQ(*parsed.doc, doc) << text;
        ASSERT_EQ(serialize_turtle(*parsed.doc), text);

        // The independent writer's output reads back to the same document.
        auto other = parse_turtle(gen::write_turtle(doc));
        ASSERT_TRUE(other.ok()) << report_to_text(other.report);
        ASSERT_EQ(*other.doc, doc);
        ASSERT_TRUE(validate_owl(doc).accepted()) << report_to_text(validate_owl(doc));
    }
}

TEST(Turtle, OntologyToKbTripleCountLaw) {
    gen::Rng rng(101);
    for (int round = 0; round < 100; ++round) {
        auto doc = gen::ontology(rng);
        auto kb = ontology_to_kb(doc, "doc");
        // Generated local names are distinct, so no two assertions collapse.
        ASSERT_EQ(kb.triples().size(), doc.class_assertions.size() + doc.property_assertions.size());
        std::size_t total = 0;
        for (const auto& [key, _] : kb.triples()) total += kb.multiplicity(key);
        ASSERT_EQ(total, kb.triples().size());
        for (const auto& c : doc.classes) ASSERT_TRUE(kb.classes().count(doc.local_name(c)));
    }
}

TEST(Turtle, DefectInjectionReportsExactlyTheSeededErrors) {
    gen::Rng rng(102);
    for (std::size_t k = 1; k <= 5; ++k) {
        for (int round = 0; round < 20; ++round) {
            auto injected = gen::with_defects(rng, k);
            auto report = validate_owl(injected.doc);
            ASSERT_EQ(report.errors.size(), k);
            ASSERT_EQ(report.count(diag::kUndeclaredProperty), injected.undeclared_properties);
            ASSERT_EQ(report.count(diag::kUndeclaredClass), injected.undeclared_classes);
            ASSERT_TRUE(report.warnings.empty());

            auto checked = check_turtle(gen::write_turtle(injected.doc));
            ASSERT_FALSE(checked.ok());
            ASSERT_EQ(checked.report.errors.size(), k);
            for (const auto& e : checked.report.errors) ASSERT_FALSE(e.location.empty());
        }
    }
    EXPECT_TRUE(validate_owl(gen::with_defects(rng, 0).doc).accepted());
}

TEST(Turtle, WarningsDoNotReject) {
    auto r = check_turtle(
        "@prefix : <http://e/> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
        ":p a owl:ObjectProperty .\n:d a owl:DatatypeProperty .\n"
        ":a :p \"literal\" .\n:a :d :b .\n");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.report.count(diag::kPropertyKindMismatch), 2u);
    // :b only appears as the IRI value of a datatype property, which is
    // already reported as a kind mismatch.
    ASSERT_EQ(r.report.count(diag::kUntypedIndividual), 1u);
    for (const auto& w : r.report.warnings) {
        if (w.code == diag::kUntypedIndividual) {
            EXPECT_NE(w.message.find("'a'"), std::string::npos) << w.message;
        }
    }
}

TEST(Turtle, FuzzNeverThrows) {
    gen::Rng rng(103);
    for (int round = 0; round < 5000; ++round) {
        auto text = gen::turtle_noise(rng);
        TurtleParseResult r;
        ASSERT_NO_THROW(r = parse_turtle(text));
        ASSERT_EQ(r.ok(), r.report.errors.empty());
        ASSERT_NO_THROW(check_turtle(text));
    }
    // Mutations of a valid document.
    auto base = oracle::read(kData + "/soluna.ttl");
    for (int round = 0; round < 2000; ++round) {
        auto text = base;
        for (int m = 0; m < 3; ++m) text[rng() % text.size()] = static_cast<char>(rng() % 256);
        ASSERT_NO_THROW(check_turtle(text));
    }
}

TEST(Turtle, FencedBlocks) {
    EXPECT_EQ(extract_turtle_block("Here you go:\n```turtle\n:a :b :c .\n```\nThanks"), ":a :b :c .\n");
    EXPECT_EQ(extract_turtle_block(":a :b :c ."), ":a :b :c .");
}

TEST(RepairLoop, InvalidThenValid) {
    testing_support::TempDir dir;
    auto c = ontology_replay(dir.str());
    const std::string prompt = build_prompt("Starbucks shares resources.", PromptMode::ontology);
    auto first = "```turtle\n" + kUndeclared + "```\n";
    put(c, prompt, first);
    auto report = check_turtle(extract_turtle_block(first)).report;
    auto fixed = std::string("@prefix : <http://example.org/s#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
                             ":hasPractice a owl:ObjectProperty .\n") +
                 kUndeclared.substr(kUndeclared.find(":Organization"));
    put(c, build_repair_prompt(extract_turtle_block(first), report), fixed);

    auto backend = make_backend(c);
    auto outcome = generate_with_repair(*backend, prompt, 3);
    ASSERT_TRUE(outcome.accepted());
    EXPECT_EQ(outcome.attempts.size(), 2u);
    EXPECT_EQ(outcome.repair_attempts(), 1u);
    EXPECT_FALSE(outcome.attempts[0].report.accepted());
    EXPECT_TRUE(outcome.attempts[1].report.accepted());
    EXPECT_TRUE(outcome.doc->property_assertions.count(
        {"http://example.org/s#Starbucks", "http://example.org/s#hasPractice", "http://example.org/s#ResourceSharing"}));

    auto once = generate_with_repair(*backend, prompt, 1);
    EXPECT_FALSE(once.accepted());
    EXPECT_EQ(once.attempts.size(), 1u);

    // Repairing the same text as a file: the file is checked, one repair follows.
    auto from_file = repair_document(*backend, kUndeclared, 2);
    ASSERT_TRUE(from_file.accepted());
    EXPECT_EQ(from_file.repair_attempts(), 1u);
    EXPECT_THROW(repair_document(*backend, kUndeclared + "\n", 2), MissingFixture);
}

TEST(RepairLoop, GivesUpAfterMaxAttempts) {
    testing_support::TempDir dir;
    auto c = ontology_replay(dir.str());
    std::string prompt = "p";
    std::string out = kUndeclared;
    for (int i = 0; i < 3; ++i) {
        put(c, prompt, out);
        prompt = build_repair_prompt(out, check_turtle(out).report);
    }
    auto backend = make_backend(c);
    auto outcome = generate_with_repair(*backend, "p", 3);
    EXPECT_FALSE(outcome.accepted());
    EXPECT_EQ(outcome.attempts.size(), 3u);
    EXPECT_EQ(outcome.repair_attempts(), 2u);
    EXPECT_THROW(build_repair_prompt("x", ValidationReport{}), NoErrors);
    EXPECT_THROW(generate_with_repair(*backend, "p", 0), PreconditionViolation);
}

TEST(RepairLoop, RepairPromptListsEveryErrorWithLocation) {
    gen::Rng rng(5);
    auto report = check_turtle(gen::write_turtle(gen::with_defects(rng, 3).doc)).report;
    auto prompt = build_repair_prompt("previous", report);
    for (const auto& e : report.errors) {
        EXPECT_NE(prompt.find(e.location), std::string::npos);
        EXPECT_NE(prompt.find(e.message), std::string::npos);
    }
    EXPECT_NE(prompt.find("previous"), std::string::npos);
}
