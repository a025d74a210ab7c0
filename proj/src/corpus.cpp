#include "kgpipe/corpus.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string required_string(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end()) throw std::invalid_argument(std::string("missing key '") + key + "'");
    if (!it->is_string()) throw std::invalid_argument(std::string("key '") + key + "' is not a string");
    return it->get<std::string>();
}

Article article_from_json(const json& record) {
    if (!record.is_object()) throw std::invalid_argument("record is not a JSON object");
    std::string date_text = required_string(record, "published_at");
    auto date = parse_date(date_text);
    if (!date) throw std::invalid_argument("invalid published_at '" + date_text + "'");
    return make_article(required_string(record, "id"), required_string(record, "title"),
                        required_string(record, "body"), required_string(record, "source_domain"), *date,
                        required_string(record, "language"));
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_fixed_int(s.substr(0, 4), y) || !parse_fixed_int(s.substr(5, 2), m) ||
        !parse_fixed_int(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

Article make_article(std::string id, std::string title, std::string body, std::string source_domain,
                     Date published_at, std::string language) {
    Article a;
    a.id = std::move(id);
    a.title = std::move(title);
    a.body = std::move(body);
    a.source_domain = std::move(source_domain);
    a.published_at = published_at;
    a.language = std::move(language);
    a.word_count = text::count_words(a.body);
    return a;
}

std::vector<Article> parse_corpus(std::string_view jsonl, CorpusLoadReport* report) {
    std::vector<Article> articles;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        std::string_view line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (text::trim(line).empty()) continue;

        Article article;
        try {
            article = article_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        } catch (const std::invalid_argument& e) {
            throw MalformedRecord(line_no, e.what());
        }
        if (!seen.insert(article.id).second) throw DuplicateId(article.id);
        if (report != nullptr) {
            ++report->records;
            if (article.word_count == 0) report->empty_body_ids.push_back(article.id);
        }
        articles.push_back(std::move(article));
    }
    return articles;
}

std::vector<Article> load_corpus(const std::string& path, CorpusLoadReport* report) {
    if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
    return parse_corpus(text::read_file(path), report);
}

std::string serialize_corpus(const std::vector<Article>& articles) {
    std::ostringstream out;
    for (const auto& a : articles) {
        json record = {{"id", a.id},
                       {"title", a.title},
                       {"body", a.body},
                       {"source_domain", a.source_domain},
                       {"published_at", format_date(a.published_at)},
                       {"language", a.language}};
        out << record.dump() << '\n';
    }
    return out.str();
}

void write_corpus(const std::string& path, const std::vector<Article>& articles) {
    text::write_file(path, serialize_corpus(articles));
}

std::vector<Article> filter_by_date(const std::vector<Article>& articles, Date from, Date to) {
    if (from > to) throw InvalidRange("date range start " + format_date(from) + " is after end " + format_date(to));
    std::vector<Article> out;
    for (const auto& a : articles) {
        if (from <= a.published_at && a.published_at <= to) out.push_back(a);
    }
    return out;
}

}  // namespace kgpipe
