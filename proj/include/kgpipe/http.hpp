#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace kgpipe::http {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/', may carry a query string
};

// Throws PreconditionViolation for anything that is not http(s)://host[...]
Url split_url(const std::string& url);

std::string url_encode(const std::string& s);

struct RequestOptions {
    std::chrono::milliseconds timeout{30000};
    int max_retries = 0;
    std::chrono::milliseconds initial_backoff{500};
    std::vector<std::pair<std::string, std::string>> headers;
};

struct Response {
    int status = 0;
    std::string body;
};

// Retries transport failures, 429 and 5xx with exponential backoff
// (initial_backoff, doubling) up to max_retries extra attempts, then raises
// TimeoutError or HttpError. Other non-2xx statuses raise HttpError at once.
Response post_json(const std::string& url, const std::string& body, const RequestOptions& options);
Response get(const std::string& url, const std::vector<std::pair<std::string, std::string>>& query,
             const RequestOptions& options);

// Token bucket per key (usually the endpoint URL). acquire() blocks until a
// request slot is free. A non-positive rate disables limiting for that key.
class RateLimiter {
public:
    void set_rate(const std::string& key, double requests_per_second);
    void acquire(const std::string& key);

private:
    struct Bucket {
        double rate = 0.0;
        double tokens = 1.0;
        std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    };

    std::mutex mutex_;
    std::map<std::string, Bucket> buckets_;
};

}  // namespace kgpipe::http
