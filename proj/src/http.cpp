#include "kgpipe/http.hpp"

#include <thread>

#include "httplib.h"
#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe::http {

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

template <typename Send>
Response with_retries(const RequestOptions& options, Send&& send) {
    auto backoff = options.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        bool last = attempt >= options.max_retries;
        httplib::Result result = send();
        if (!result) {
            auto err = result.error();
            bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
            if (last) {
                if (timed_out) throw TimeoutError("request timed out: " + httplib::to_string(err));
                throw HttpError(0, "transport failure: " + httplib::to_string(err));
            }
        } else {
            Response response{result->status, result->body};
            if (response.status >= 200 && response.status < 300) return response;
            if (last || !retryable_status(response.status)) {
                throw HttpError(response.status, text::excerpt(response.body, 200));
            }
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

httplib::Client make_client(const Url& url, const RequestOptions& options) {
    httplib::Client client(url.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);
    return client;
}

httplib::Headers to_headers(const RequestOptions& options) {
    httplib::Headers headers;
    for (const auto& [k, v] : options.headers) headers.emplace(k, v);
    return headers;
}

}  // namespace

Url split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw PreconditionViolation("URL without scheme: " + url);
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw PreconditionViolation("unsupported URL scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    Url out;
    if (path_start == std::string::npos) {
        out.origin = url;
        out.path = "/";
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    if (out.origin.size() <= scheme_end + 3) throw PreconditionViolation("URL without host: " + url);
    return out;
}

std::string url_encode(const std::string& s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0x0f]);
        }
    }
    return out;
}

Response post_json(const std::string& url, const std::string& body, const RequestOptions& options) {
    Url parts = split_url(url);
    auto headers = to_headers(options);
    return with_retries(options, [&] {
        auto client = make_client(parts, options);
        return client.Post(parts.path, headers, body, "application/json");
    });
}

Response get(const std::string& url, const std::vector<std::pair<std::string, std::string>>& query,
             const RequestOptions& options) {
    Url parts = split_url(url);
    std::string path = parts.path;
    char sep = path.find('?') == std::string::npos ? '?' : '&';
    for (const auto& [k, v] : query) {
        path += sep;
        path += url_encode(k) + "=" + url_encode(v);
        sep = '&';
    }
    auto headers = to_headers(options);
    return with_retries(options, [&] {
        auto client = make_client(parts, options);
        return client.Get(path, headers);
    });
}

void RateLimiter::set_rate(const std::string& key, double requests_per_second) {
    std::lock_guard lock(mutex_);
    auto& bucket = buckets_[key];
    bucket.rate = requests_per_second;
    bucket.tokens = 1.0;
    bucket.last = std::chrono::steady_clock::now();
}

void RateLimiter::acquire(const std::string& key) {
    for (;;) {
        std::chrono::duration<double> wait{0.0};
        {
            std::lock_guard lock(mutex_);
            auto it = buckets_.find(key);
            if (it == buckets_.end() || it->second.rate <= 0.0) return;
            auto& b = it->second;
            auto now = std::chrono::steady_clock::now();
            std::chrono::duration<double> elapsed = now - b.last;
            b.tokens = std::min(1.0, b.tokens + elapsed.count() * b.rate);
            b.last = now;
            if (b.tokens >= 1.0) {
                b.tokens -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - b.tokens) / b.rate);
        }
        std::this_thread::sleep_for(wait);
    }
}

}  // namespace kgpipe::http
