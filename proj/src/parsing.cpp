#include "kgpipe/parsing.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

constexpr std::string_view kTriplet = "<triplet>";
constexpr std::string_view kSubj = "<subj>";
constexpr std::string_view kObj = "<obj>";

std::string strip_control_tokens(std::string_view text) {
    std::string out(text);
    for (std::string_view tok : {std::string_view("</s>"), std::string_view("<s>"), std::string_view("<pad>")}) {
        std::size_t pos = 0;
        while ((pos = out.find(tok, pos)) != std::string::npos) {
            out.replace(pos, tok.size(), " ");
            pos += 1;
        }
    }
    return out;
}

std::vector<std::size_t> find_all(std::string_view haystack, std::string_view needle) {
    std::vector<std::size_t> out;
    for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        out.push_back(pos);
    }
    return out;
}

// Parses the body of one segment (text after `<triplet>`). Returns the
// skip reason on failure.
std::optional<std::string> parse_segment(std::string_view body, MarkerOrder order, Triplet& out) {
    auto subj = find_all(body, kSubj);
    auto obj = find_all(body, kObj);
    if (subj.empty()) return "missing <subj>";
    if (obj.empty()) return "missing <obj>";
    if (subj.size() > 1) return "repeated <subj>";
    if (obj.size() > 1) return "repeated <obj>";
    if (obj[0] < subj[0]) return "<obj> before <subj>";

    auto first = text::trim(body.substr(0, subj[0]));
    auto second = text::trim(body.substr(subj[0] + kSubj.size(), obj[0] - subj[0] - kSubj.size()));
    auto third = text::trim(body.substr(obj[0] + kObj.size()));
    if (first.empty() || second.empty() || third.empty()) return "empty field after trim";

    out.subject = std::string(first);
    if (order == MarkerOrder::subject_predicate_object) {
        out.predicate = std::string(second);
        out.object = std::string(third);
    } else {
        out.object = std::string(second);
        out.predicate = std::string(third);
    }
    return std::nullopt;
}

bool is_table_separator(std::string_view line) {
    bool has_dash = false;
    for (char c : line) {
        if (c == '-') {
            has_dash = true;
        } else if (c != '|' && c != ':' && !text::is_space(c)) {
            return false;
        }
    }
    return has_dash;
}

std::string_view strip_list_marker(std::string_view line) {
    constexpr std::string_view kBullet = "\xE2\x80\xA2";
    if (line.substr(0, kBullet.size()) == kBullet) return text::trim(line.substr(kBullet.size()));
    if (!line.empty() && (line[0] == '-' || line[0] == '*' || line[0] == '+') && line.size() > 1 &&
        text::is_space(line[1])) {
        return text::trim(line.substr(1));
    }
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        if (i + 1 == line.size() || text::is_space(line[i + 1])) return text::trim(line.substr(i + 1));
    }
    return line;
}

}  // namespace

void ParseReport::skip(std::string_view segment, std::string reason, std::optional<std::size_t> batch) {
    ++segments_skipped;
    skip_reasons.push_back({text::excerpt(text::collapse_whitespace(segment)), std::move(reason), batch});
}

void ParseReport::absorb(const ParseReport& other, std::optional<std::size_t> batch) {
    triplets_emitted += other.triplets_emitted;
    segments_skipped += other.segments_skipped;
    for (auto record : other.skip_reasons) {
        if (!record.batch_index) record.batch_index = batch;
        skip_reasons.push_back(std::move(record));
    }
}

ParsedTriplets parse_seq2seq_output(std::string_view raw, MarkerOrder order) {
    ParsedTriplets result;
    std::string cleaned = strip_control_tokens(raw);
    std::string_view text = cleaned;

    auto starts = find_all(text, kTriplet);
    std::size_t lead_end = starts.empty() ? text.size() : starts.front();
    if (!text::trim(text.substr(0, lead_end)).empty()) {
        result.report.skip(text.substr(0, lead_end), "text outside a <triplet> segment");
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
        std::size_t body_start = starts[i] + kTriplet.size();
        std::size_t body_end = i + 1 < starts.size() ? starts[i + 1] : text.size();
        auto body = text.substr(body_start, body_end - body_start);
        Triplet t;
        if (auto reason = parse_segment(body, order, t)) {
            result.report.skip(text.substr(starts[i], body_end - starts[i]), std::move(*reason));
        } else {
            result.triplets.push_back(std::move(t));
            ++result.report.triplets_emitted;
        }
    }
    return result;
}

std::string to_marker_text(const std::vector<Triplet>& triplets) {
    std::string out;
    for (const auto& t : triplets) {
        if (!out.empty()) out.push_back(' ');
        out += "<triplet> " + t.subject + " <subj> " + t.predicate + " <obj> " + t.object;
    }
    return out;
}

ParsedTriplets parse_chat_triples(std::string_view text) {
    ParsedTriplets result;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto raw_line = text.substr(pos, end - pos);
        pos = end + 1;

        auto line = text::trim(raw_line);
        if (line.empty() || line.substr(0, 3) == "```" || is_table_separator(line)) continue;
        bool has_pipe = line.find('|') != std::string_view::npos;
        if (!has_pipe && line.back() == ':') continue;

        auto body = strip_list_marker(line);
        if (!body.empty() && body.front() == '|') body = text::trim(body.substr(1));
        if (!body.empty() && body.back() == '|') body = text::trim(body.substr(0, body.size() - 1));

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (;;) {
            auto bar = body.find('|', start);
            fields.push_back(text::trim(body.substr(start, bar == std::string_view::npos ? bar : bar - start)));
            if (bar == std::string_view::npos) break;
            start = bar + 1;
        }
        if (fields.size() != 3) {
            result.report.skip(line, "expected 3 pipe-delimited fields, found " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            result.report.skip(line, "empty field after trim");
            continue;
        }
        if (text::casefold(fields[0]) == "subject" && text::casefold(fields[1]) == "predicate" &&
            text::casefold(fields[2]) == "object") {
            continue;  // table header
        }
        Triplet t;
        t.subject = std::string(fields[0]);
        t.predicate = std::string(fields[1]);
        t.object = std::string(fields[2]);
        result.triplets.push_back(std::move(t));
        ++result.report.triplets_emitted;
    }
    return result;
}

json provenance_to_json(const Provenance& p) {
    json j = {{"article_id", p.article_id}, {"backend_id", p.backend_id}};
    j["batch_index"] = p.batch_index ? json(*p.batch_index) : json(nullptr);
    return j;
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.article_id = j.at("article_id").get<std::string>();
    p.backend_id = j.at("backend_id").get<std::string>();
    if (auto it = j.find("batch_index"); it != j.end() && !it->is_null()) p.batch_index = it->get<std::size_t>();
    return p;
}

std::string serialize_triplets(const std::vector<Triplet>& triplets) {
    std::ostringstream out;
    for (const auto& t : triplets) {
        json record = {{"subject", t.subject}, {"predicate", t.predicate}, {"object", t.object}};
        record.update(provenance_to_json(t.provenance));
        out << record.dump() << '\n';
    }
    return out.str();
}

std::vector<Triplet> parse_triplets(std::string_view jsonl) {
    std::vector<Triplet> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        auto line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            auto record = json::parse(line);
            Triplet t;
            t.subject = record.at("subject").get<std::string>();
            t.predicate = record.at("predicate").get<std::string>();
            t.object = record.at("object").get<std::string>();
            t.provenance = provenance_from_json(record);
            out.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return out;
}

}  // namespace kgpipe
