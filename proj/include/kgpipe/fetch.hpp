#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/corpus.hpp"

namespace kgpipe {

// Query against a News-API-compatible "everything" endpoint. The query string
// is passed through verbatim.
struct FetchOptions {
    std::string endpoint;
    std::string query;
    Date from{};
    Date to{};
    std::string language = "en";
    int page_size = 100;
    std::string api_key_env = "NEWS_API_KEY";
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
};

// Maps a response body ({"articles": [...]}) onto corpus articles. Articles
// without a usable date are dropped; repeated URLs are kept once.
std::vector<Article> parse_news_response(std::string_view body, const std::string& language);

std::vector<Article> fetch_articles(const FetchOptions& options);

}  // namespace kgpipe
