#include "kgpipe/fetch.hpp"

#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/http.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

std::string string_or_empty(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

std::string host_of(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {};
    auto start = scheme_end + 3;
    auto end = url.find_first_of("/:?#", start);
    std::string host = url.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (host.rfind("www.", 0) == 0) host.erase(0, 4);
    return host;
}

}  // namespace

std::vector<Article> parse_news_response(std::string_view body, const std::string& language) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(std::string("news response is not JSON: ") + e.what());
    }
    auto items = doc.find("articles");
    if (items == doc.end() || !items->is_array()) throw Error("news response has no 'articles' array");

    std::vector<Article> out;
    std::set<std::string> seen;
    for (const auto& item : *items) {
        if (!item.is_object()) continue;
        auto date = parse_date(string_or_empty(item, "publishedAt"));
        if (!date) continue;
        std::string url = string_or_empty(item, "url");
        std::string title = string_or_empty(item, "title");
        std::string id = url.empty() ? text::sha256_hex(title + format_date(*date)).substr(0, 16) : url;
        if (!seen.insert(id).second) continue;

        std::string body_text = string_or_empty(item, "content");
        if (body_text.empty()) body_text = string_or_empty(item, "description");
        std::string domain = host_of(url);
        if (domain.empty() && item.contains("source") && item["source"].is_object()) {
            domain = string_or_empty(item["source"], "name");
        }
        out.push_back(make_article(id, title, body_text, domain, *date, language));
    }
    return out;
}

std::vector<Article> fetch_articles(const FetchOptions& options) {
    http::RequestOptions request;
    request.timeout = options.timeout;
    request.max_retries = options.max_retries;
    if (const char* key = std::getenv(options.api_key_env.c_str()); key != nullptr && *key != '\0') {
        request.headers.emplace_back("X-Api-Key", key);
    }
    auto response = http::get(options.endpoint,
                              {{"q", options.query},
                               {"from", format_date(options.from)},
                               {"to", format_date(options.to)},
                               {"language", options.language},
                               {"pageSize", std::to_string(options.page_size)}},
                              request);
    return parse_news_response(response.body, options.language);
}

}  // namespace kgpipe
