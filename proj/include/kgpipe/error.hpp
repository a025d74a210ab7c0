#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgpipe {

// Base of every error the library raises. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& message)
        : Error("config error at '" + key_path + "': " + message), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

class ConfigMismatch : public Error {
public:
    using Error::Error;
};

// corpus

class FileNotFound : public Error {
public:
    explicit FileNotFound(const std::string& path) : Error("file not found: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line, const std::string& cause)
        : Error("malformed record at line " + std::to_string(line) + ": " + cause), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id) : Error("duplicate article id: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class InvalidRange : public Error {
public:
    using Error::Error;
};

// extraction / backends

class EmptyArticle : public Error {
public:
    EmptyArticle() : Error("article text is empty") {}
};

class TimeoutError : public Error {
public:
    using Error::Error;
};

class HttpError : public Error {
public:
    HttpError(int status, const std::string& body_excerpt)
        : Error("HTTP " + std::to_string(status) + ": " + body_excerpt), status_(status),
          body_excerpt_(body_excerpt) {}
    int status() const noexcept { return status_; }
    const std::string& body_excerpt() const noexcept { return body_excerpt_; }

private:
    int status_;
    std::string body_excerpt_;
};

class TokenLimitExceeded : public Error {
public:
    TokenLimitExceeded(std::size_t tokens, std::size_t limit)
        : Error("input has " + std::to_string(tokens) + " tokens, limit is " + std::to_string(limit)),
          tokens_(tokens), limit_(limit) {}
    std::size_t tokens() const noexcept { return tokens_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t tokens_;
    std::size_t limit_;
};

class MissingFixture : public Error {
public:
    explicit MissingFixture(const std::string& hash) : Error("missing replay fixture " + hash), hash_(hash) {}
    const std::string& hash() const noexcept { return hash_; }

private:
    std::string hash_;
};

// Wraps a per-batch failure with its location inside the article.
class BatchFailure : public Error {
public:
    BatchFailure(const std::string& article_id, std::size_t batch_index, const std::string& cause)
        : Error("article '" + article_id + "' batch " + std::to_string(batch_index) + ": " + cause),
          article_id_(article_id), batch_index_(batch_index) {}
    const std::string& article_id() const noexcept { return article_id_; }
    std::size_t batch_index() const noexcept { return batch_index_; }

private:
    std::string article_id_;
    std::size_t batch_index_;
};

// linking

class LookupUnavailable : public Error {
public:
    using Error::Error;
};

// rdf

class InvalidDoc : public Error {
public:
    using Error::Error;
};

class NoErrors : public Error {
public:
    NoErrors() : Error("validation report has no errors; nothing to repair") {}
};

// export

class UnknownSeedEntity : public Error {
public:
    explicit UnknownSeedEntity(const std::string& label) : Error("unknown seed entity: " + label) {}
};

class UnsupportedFormat : public Error {
public:
    explicit UnsupportedFormat(const std::string& format) : Error("unsupported format: " + format) {}
};

}  // namespace kgpipe
