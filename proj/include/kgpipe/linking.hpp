#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/http.hpp"
#include "kgpipe/triplet.hpp"

namespace kgpipe {

enum class LinkStatus { linked, unlinked };

struct LinkedEntity {
    std::string surface;
    std::optional<std::string> canonical_iri;
    std::string label;
    LinkStatus status = LinkStatus::unlinked;

    friend bool operator==(const LinkedEntity&, const LinkedEntity&) = default;
};

struct LookupHit {
    std::string uri;
    std::string label;
};

// Knowledge-base lookup service. Results are ranked best first. Throws
// LookupUnavailable when the service cannot be reached.
class LookupClient {
public:
    virtual ~LookupClient() = default;
    virtual std::vector<LookupHit> lookup(const std::string& query) const = 0;
    // Identifies the service; part of the linking configuration fingerprint.
    virtual std::string identity() const = 0;
};

// DBpedia-Lookup-compatible HTTP client: GET <base>?<query_param>=<q>&format=json.
// Accepts {"docs": [{"resource": [...], "label": [...]}]}, {"results": [{"uri",
// "label"}]} or a bare array of {"uri", "label"}.
class HttpLookupClient final : public LookupClient {
public:
    struct Options {
        std::string query_param = "query";
        int max_results = 5;
        http::RequestOptions request;
    };

    explicit HttpLookupClient(std::string base_url);
    HttpLookupClient(std::string base_url, Options options);

    std::vector<LookupHit> lookup(const std::string& query) const override;
    std::string identity() const override { return base_url_; }

    static std::vector<LookupHit> parse_response(std::string_view body);

private:
    std::string base_url_;
    Options options_;
};

// In-memory or file-backed stub. Keys are normalized surfaces. The file form
// is a JSON object {"<query>": [{"uri": ..., "label": ...}, ...]}.
class StubLookupClient final : public LookupClient {
public:
    explicit StubLookupClient(std::map<std::string, std::vector<LookupHit>> table, std::string name = "stub");
    StubLookupClient(StubLookupClient&& other) noexcept
        : table_(std::move(other.table_)), name_(std::move(other.name_)), calls_(other.calls_.load()) {}
    static StubLookupClient from_file(const std::string& path);

    std::vector<LookupHit> lookup(const std::string& query) const override;
    std::string identity() const override { return name_; }

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::map<std::string, std::vector<LookupHit>> table_;
    std::string name_;
    mutable std::atomic<std::size_t> calls_{0};
};

// Always unavailable.
class OfflineLookupClient final : public LookupClient {
public:
    std::vector<LookupHit> lookup(const std::string& query) const override;
    std::string identity() const override { return "offline"; }
};

using UnixSeconds = std::int64_t;

UnixSeconds unix_now();

// normalized surface -> resolution. Safe for concurrent use.
class LinkCache {
public:
    struct Entry {
        std::optional<std::string> iri;  // nullopt = negative result
        std::string label;
        UnixSeconds fetched_at = 0;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    LinkCache() = default;
    LinkCache(const LinkCache&) = delete;
    LinkCache& operator=(const LinkCache&) = delete;

    // Entry for `key` unless absent or expired at `now`.
    std::optional<Entry> find(const std::string& key, UnixSeconds now, std::chrono::seconds negative_ttl,
                              std::optional<std::chrono::seconds> positive_ttl) const;
    void put(const std::string& key, Entry entry);
    // Inserts only when `key` has no entry yet.
    void put_if_absent(const std::string& key, Entry entry);

    std::size_t size() const;
    std::map<std::string, Entry> snapshot() const;

    void load(const std::string& path);  // missing file = empty cache
    void save(const std::string& path) const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Entry> entries_;
};

enum class MatchRule { exact, prefix };

struct LinkingOptions {
    MatchRule match = MatchRule::exact;
    // On LookupUnavailable: true = treat as unlinked (not cached), false = rethrow.
    bool fallback_on_unavailable = true;
    std::chrono::seconds negative_ttl{std::chrono::hours(24 * 7)};
    std::optional<std::chrono::seconds> positive_ttl;
    std::function<UnixSeconds()> clock = unix_now;
};

// Fingerprint of the linking setup; KBs built under different fingerprints
// refuse to merge.
std::string linking_signature(const LookupClient& client, const LinkingOptions& options);

LinkedEntity link_entity(std::string_view surface, const LookupClient& client, LinkCache& cache,
                         const LinkingOptions& options = {});

struct CanonicalizedTriplets {
    std::vector<Triplet> triplets;
    std::map<std::string, LinkedEntity> entities;  // canonical label -> entity
};

// Mentions sharing an IRI collapse to one label; unlinked mentions collapse
// when their normalized surfaces are equal. Predicates are normalized only.
CanonicalizedTriplets canonicalize(const std::vector<Triplet>& triplets, const LookupClient& client, LinkCache& cache,
                                   const LinkingOptions& options = {});

}  // namespace kgpipe
