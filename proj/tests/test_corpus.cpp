#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/error.hpp"
#include "oracles.hpp"

using namespace kgpipe;
using nlohmann::json;

namespace {

const std::string kData = KGPIPE_TEST_DATA;

Date ymd(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}; }

}  // namespace

TEST(Corpus, DuplicateIdNamesTheRepeatedId) {
    // Independent scan: first id seen twice.
    std::set<std::string> seen;
    std::string expected;
    for (const auto& line : oracle::lines_of(oracle::read(kData + "/corpus_small.jsonl"))) {
        auto id = json::parse(line).at("id").get<std::string>();
        if (!seen.insert(id).second && expected.empty()) expected = id;
    }
    ASSERT_EQ(expected, "c2");
    try {
        load_corpus(kData + "/corpus_small.jsonl");
        FAIL() << "expected DuplicateId";
    } catch (const DuplicateId& e) {
        EXPECT_EQ(e.id(), expected);
    }
}

TEST(Corpus, DateWindowKeepsInRangeArticlesInOrder) {
    auto articles = load_corpus(kData + "/dated10.jsonl");
    ASSERT_EQ(articles.size(), 10u);
    // Brute force over the raw records: ISO dates compare as strings.
    std::vector<std::string> expected;
    for (const auto& line : oracle::lines_of(oracle::read(kData + "/dated10.jsonl"))) {
        auto r = json::parse(line);
        auto d = r.at("published_at").get<std::string>();
        if (d >= "2023-01-17" && d <= "2023-03-10") expected.push_back(r.at("id"));
    }
    ASSERT_EQ(expected.size(), 6u);
    auto kept = filter_by_date(articles, ymd(2023, 1, 17), ymd(2023, 3, 10));
    std::vector<std::string> ids;
    for (const auto& a : kept) ids.push_back(a.id);
    EXPECT_EQ(ids, expected);
}

TEST(Corpus, FilterIsIdempotentAndBoundsAreInclusive) {
    auto articles = load_corpus(kData + "/dated10.jsonl");
    auto once = filter_by_date(articles, ymd(2023, 2, 1), ymd(2023, 3, 1));
    EXPECT_EQ(filter_by_date(once, ymd(2023, 2, 1), ymd(2023, 3, 1)), once);
    ASSERT_EQ(once.size(), 4u);
    EXPECT_EQ(once.front().id, "d2");
    EXPECT_EQ(once.back().id, "d5");
    EXPECT_THROW(filter_by_date(articles, ymd(2023, 3, 2), ymd(2023, 3, 1)), InvalidRange);
}

TEST(Corpus, SerializeParseRoundTrip) {
    auto articles = load_corpus(kData + "/dated10.jsonl");
    articles.push_back(make_article("x\"1", "Quote \"and\" slash \\", "café au lait\nsecond line", "ex.org",
                                    ymd(2024, 2, 29), "fr"));
    EXPECT_EQ(parse_corpus(serialize_corpus(articles)), articles);

    auto path = std::filesystem::temp_directory_path() / "kgpipe_corpus_rt.jsonl";
    write_corpus(path.string(), articles);
    EXPECT_EQ(load_corpus(path.string()), articles);
    std::filesystem::remove(path);
}

TEST(Corpus, RandomRoundTripAndFilterProperties) {
    gen::Rng rng(11);
    for (int round = 0; round < 50; ++round) {
        std::vector<Article> articles;
        for (int i = 0; i < 20; ++i) {
            auto day = ymd(2023, 1 + static_cast<unsigned>(rng() % 12), 1 + static_cast<unsigned>(rng() % 28));
            articles.push_back(
                make_article("a" + std::to_string(i), gen::phrase(rng), gen::phrase(rng), "d.example", day, "en"));
        }
        EXPECT_EQ(parse_corpus(serialize_corpus(articles)), articles);
        auto from = ymd(2023, 1 + static_cast<unsigned>(rng() % 6), 1);
        auto to = ymd(2023, 6 + static_cast<unsigned>(rng() % 7), 15);
        auto kept = filter_by_date(articles, from, to);
        EXPECT_EQ(filter_by_date(kept, from, to), kept);
        std::size_t expected = 0;
        for (const auto& a : articles) expected += (from <= a.published_at && a.published_at <= to);
        EXPECT_EQ(kept.size(), expected);
    }
}

TEST(Corpus, WordCountAndEmptyBodies) {
    CorpusLoadReport report;
    auto articles = parse_corpus(
        R"({"id":"e","title":"t","body":"  \n ","source_domain":"s","published_at":"2023-05-05","language":"en"})"
        "\n\n"
        R"({"id":"f","title":"t","body":"one  two\tthree","source_domain":"s","published_at":"2023-05-05","language":"en"})"
        "\n",
        &report);
    ASSERT_EQ(articles.size(), 2u);
    EXPECT_EQ(articles[0].word_count, 0u);
    EXPECT_EQ(articles[1].word_count, 3u);
    EXPECT_EQ(report.records, 2u);
    EXPECT_EQ(report.empty_body_ids, std::vector<std::string>{"e"});
}

TEST(Corpus, MalformedRecordsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_corpus(text);
        } catch (const MalformedRecord& e) {
            return e.line();
        }
        return 0;
    };
    const std::string ok =
        R"({"id":"a","title":"t","body":"b","source_domain":"s","published_at":"2023-05-05","language":"en"})";
    EXPECT_EQ(line_of(ok + "\n{not json\n"), 2u);
    EXPECT_EQ(line_of(ok + "\n\n" + R"({"id":"b","title":"t","body":"b","source_domain":"s","language":"en"})"), 3u);
    EXPECT_EQ(line_of(R"({"id":"b","title":"t","body":"b","source_domain":"s","published_at":"2023-02-30","language":"en"})"),
              1u);
    EXPECT_EQ(line_of(R"({"id":7,"title":"t","body":"b","source_domain":"s","published_at":"2023-02-03","language":"en"})"),
              1u);
    EXPECT_THROW(load_corpus(kData + "/no_such_file.jsonl"), FileNotFound);
}

TEST(Corpus, DateParsing) {
    EXPECT_EQ(parse_date("2023-03-09"), ymd(2023, 3, 9));
    EXPECT_EQ(parse_date("2023-03-09T10:00:00Z"), ymd(2023, 3, 9));
    EXPECT_FALSE(parse_date("2023-3-9"));
    EXPECT_FALSE(parse_date("2023-13-01"));
    EXPECT_FALSE(parse_date("2023-03-09X"));
    EXPECT_EQ(format_date(ymd(2023, 3, 9)), "2023-03-09");
}
