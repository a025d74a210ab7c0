#include "kgpipe/linking.hpp"

#include <filesystem>
#include <mutex>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

using nlohmann::json;

namespace {

std::string strip_tags(std::string_view s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') {
            in_tag = true;
        } else if (c == '>' && in_tag) {
            in_tag = false;
        } else if (!in_tag) {
            out.push_back(c);
        }
    }
    return out;
}

std::string first_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && !v.empty() && v[0].is_string()) return v[0].get<std::string>();
    return {};
}

bool label_matches(const std::string& normalized_query, const std::string& label, MatchRule rule) {
    auto normalized_label = text::normalize_surface(strip_tags(label));
    if (rule == MatchRule::exact) return normalized_label == normalized_query;
    return normalized_label.rfind(normalized_query, 0) == 0;
}

LinkedEntity from_entry(std::string_view surface, const LinkCache::Entry& entry) {
    LinkedEntity e;
    e.surface = std::string(surface);
    e.canonical_iri = entry.iri;
    e.label = entry.label;
    e.status = entry.iri ? LinkStatus::linked : LinkStatus::unlinked;
    return e;
}

}  // namespace

HttpLookupClient::HttpLookupClient(std::string base_url) : HttpLookupClient(std::move(base_url), Options{}) {}

HttpLookupClient::HttpLookupClient(std::string base_url, Options options)
    : base_url_(std::move(base_url)), options_(std::move(options)) {
    http::split_url(base_url_);
    options_.request.headers.emplace_back("Accept", "application/json");
}

std::vector<LookupHit> HttpLookupClient::parse_response(std::string_view body) {
    json doc = json::parse(body);
    const json* list = nullptr;
    if (doc.is_array()) {
        list = &doc;
    } else if (doc.contains("docs")) {
        list = &doc["docs"];
    } else if (doc.contains("results")) {
        list = &doc["results"];
    }
    std::vector<LookupHit> hits;
    if (list == nullptr || !list->is_array()) return hits;
    for (const auto& item : *list) {
        if (!item.is_object()) continue;
        std::string uri = item.contains("uri") ? first_string(item["uri"])
                                               : (item.contains("resource") ? first_string(item["resource"]) : "");
        std::string label = item.contains("label") ? strip_tags(first_string(item["label"])) : "";
        if (uri.empty()) continue;
        hits.push_back({uri, label});
    }
    return hits;
}

std::vector<LookupHit> HttpLookupClient::lookup(const std::string& query) const {
    try {
        auto response = http::get(base_url_,
                                  {{options_.query_param, query},
                                   {"format", "json"},
                                   {"maxResults", std::to_string(options_.max_results)}},
                                  options_.request);
        return parse_response(response.body);
    } catch (const json::exception& e) {
        throw LookupUnavailable(std::string("lookup response is not valid JSON: ") + e.what());
    } catch (const TimeoutError& e) {
        throw LookupUnavailable(e.what());
    } catch (const HttpError& e) {
        throw LookupUnavailable(e.what());
    }
}

StubLookupClient::StubLookupClient(std::map<std::string, std::vector<LookupHit>> table, std::string name)
    : name_(std::move(name)) {
    for (auto& [query, hits] : table) table_[text::normalize_surface(query)] = std::move(hits);
}

StubLookupClient StubLookupClient::from_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(text::read_file(path));
    } catch (const json::exception& e) {
        throw Error("lookup stub " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw Error("lookup stub " + path + ": expected a JSON object");
    std::map<std::string, std::vector<LookupHit>> table;
    for (const auto& [query, hits] : doc.items()) {
        auto& out = table[query];
        for (const auto& hit : hits) out.push_back({hit.at("uri").get<std::string>(), hit.at("label").get<std::string>()});
    }
    return StubLookupClient(std::move(table), "stub:" + std::filesystem::path(path).filename().string());
}

std::vector<LookupHit> StubLookupClient::lookup(const std::string& query) const {
    ++calls_;
    auto it = table_.find(text::normalize_surface(query));
    if (it == table_.end()) return {};
    return it->second;
}

std::vector<LookupHit> OfflineLookupClient::lookup(const std::string&) const {
    throw LookupUnavailable("lookup service is offline");
}

UnixSeconds unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::optional<LinkCache::Entry> LinkCache::find(const std::string& key, UnixSeconds now,
                                                std::chrono::seconds negative_ttl,
                                                std::optional<std::chrono::seconds> positive_ttl) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const auto& entry = it->second;
    std::optional<std::chrono::seconds> ttl = entry.iri ? positive_ttl : std::optional(negative_ttl);
    if (ttl && now - entry.fetched_at > ttl->count()) return std::nullopt;
    return entry;
}

void LinkCache::put(const std::string& key, Entry entry) {
    std::unique_lock lock(mutex_);
    entries_[key] = std::move(entry);
}

void LinkCache::put_if_absent(const std::string& key, Entry entry) {
    std::unique_lock lock(mutex_);
    entries_.try_emplace(key, std::move(entry));
}

std::size_t LinkCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::map<std::string, LinkCache::Entry> LinkCache::snapshot() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

void LinkCache::load(const std::string& path) {
    if (!std::filesystem::exists(path)) return;
    json doc;
    try {
        doc = json::parse(text::read_file(path));
    } catch (const json::exception& e) {
        throw Error("link cache " + path + ": " + e.what());
    }
    std::map<std::string, Entry> loaded;
    for (const auto& [key, value] : doc.at("entries").items()) {
        Entry e;
        if (!value.at("iri").is_null()) e.iri = value.at("iri").get<std::string>();
        e.label = value.at("label").get<std::string>();
        e.fetched_at = value.at("fetched_at").get<UnixSeconds>();
        loaded.emplace(key, std::move(e));
    }
    std::unique_lock lock(mutex_);
    for (auto& [key, e] : loaded) entries_[key] = std::move(e);
}

void LinkCache::save(const std::string& path) const {
    json entries = json::object();
    for (const auto& [key, e] : snapshot()) {
        entries[key] = {{"iri", e.iri ? json(*e.iri) : json(nullptr)}, {"label", e.label}, {"fetched_at", e.fetched_at}};
    }
    json doc = {{"version", 1}, {"entries", entries}};
    text::write_file(path, doc.dump(2) + "\n");
}

std::string linking_signature(const LookupClient& client, const LinkingOptions& options) {
    return "lookup=" + client.identity() + ";match=" + (options.match == MatchRule::exact ? "exact" : "prefix");
}

LinkedEntity link_entity(std::string_view surface, const LookupClient& client, LinkCache& cache,
                         const LinkingOptions& options) {
    auto key = text::normalize_surface(surface);
    if (key.empty()) throw PreconditionViolation("entity surface is empty");

    auto now = options.clock();
    if (auto hit = cache.find(key, now, options.negative_ttl, options.positive_ttl)) return from_entry(surface, *hit);

    std::vector<LookupHit> hits;
    try {
        hits = client.lookup(key);
    } catch (const LookupUnavailable&) {
        if (!options.fallback_on_unavailable) throw;
        return from_entry(surface, LinkCache::Entry{std::nullopt, key, now});
    }

    LinkCache::Entry entry{std::nullopt, key, now};
    if (!hits.empty() && label_matches(key, hits.front().label, options.match)) {
        entry.iri = hits.front().uri;
        entry.label = text::collapse_whitespace(strip_tags(hits.front().label));
        if (entry.label.empty()) entry.label = key;
    }
    cache.put(key, entry);
    if (entry.iri) cache.put_if_absent(text::normalize_surface(entry.label), entry);
    return from_entry(surface, entry);
}

CanonicalizedTriplets canonicalize(const std::vector<Triplet>& triplets, const LookupClient& client, LinkCache& cache,
                                   const LinkingOptions& options) {
    CanonicalizedTriplets out;
    std::unordered_map<std::string, std::string> label_of_surface;
    std::map<std::string, std::string> identity_of_label;
    std::map<std::string, std::string> label_of_identity;

    auto resolve = [&](const std::string& surface) -> const std::string& {
        if (auto it = label_of_surface.find(surface); it != label_of_surface.end()) return it->second;
        LinkedEntity entity = link_entity(surface, client, cache, options);
        std::string identity = entity.canonical_iri ? *entity.canonical_iri : "unlinked:" + entity.label;
        if (auto known = label_of_identity.find(identity); known != label_of_identity.end()) {
            // Same IRI reached under another label: keep the first one.
            entity.label = known->second;
            out.entities.try_emplace(entity.label, entity);
            return label_of_surface.emplace(surface, entity.label).first->second;
        }

        auto [slot, inserted] = identity_of_label.try_emplace(entity.label, identity);
        if (!inserted && slot->second != identity) {
            // Two identities share a label; keep them apart with an explicit
            // suffix and remember the suffixed label so re-runs resolve it.
            std::string suffixed = entity.label + " [" + (entity.canonical_iri ? *entity.canonical_iri : "unlinked") + "]";
            entity.label = suffixed;
            identity_of_label.try_emplace(suffixed, identity);
            cache.put_if_absent(text::normalize_surface(suffixed),
                                LinkCache::Entry{entity.canonical_iri, suffixed, options.clock()});
        }
        label_of_identity.emplace(identity, entity.label);
        out.entities.try_emplace(entity.label, entity);
        return label_of_surface.emplace(surface, entity.label).first->second;
    };

    out.triplets.reserve(triplets.size());
    for (const auto& t : triplets) {
        Triplet c = t;
        c.subject = resolve(t.subject);
        c.object = resolve(t.object);
        c.predicate = text::normalize_surface(t.predicate);
        if (c.predicate.empty()) throw PreconditionViolation("triplet with empty predicate");
        out.triplets.push_back(std::move(c));
    }
    return out;
}

}  // namespace kgpipe
