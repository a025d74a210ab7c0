#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgpipe {

using Date = std::chrono::year_month_day;

// Accepts "YYYY-MM-DD", optionally followed by an ISO-8601 time part.
std::optional<Date> parse_date(std::string_view s);
std::string format_date(Date d);

struct Article {
    std::string id;
    std::string title;
    std::string body;
    std::string source_domain;
    Date published_at{};
    std::string language;
    std::size_t word_count = 0;

    friend bool operator==(const Article&, const Article&) = default;
};

// Builds an article and derives word_count from the body.
Article make_article(std::string id, std::string title, std::string body, std::string source_domain,
                     Date published_at, std::string language);

struct CorpusLoadReport {
    std::size_t records = 0;
    std::vector<std::string> empty_body_ids;
};

std::vector<Article> load_corpus(const std::string& path, CorpusLoadReport* report = nullptr);
std::vector<Article> parse_corpus(std::string_view jsonl, CorpusLoadReport* report = nullptr);

std::string serialize_corpus(const std::vector<Article>& articles);
void write_corpus(const std::string& path, const std::vector<Article>& articles);

// Inclusive on both ends. Throws InvalidRange when from > to.
std::vector<Article> filter_by_date(const std::vector<Article>& articles, Date from, Date to);

}  // namespace kgpipe
