#pragma once

// Test-side reference implementations. Written independently of the library
// code they check; keep them simple rather than fast.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Triple = std::array<std::string, 3>;

struct MarkerTrace {
    std::vector<Triple> triples;
    std::size_t segments = 0;
    std::size_t skipped = 0;
    std::vector<std::string> reasons;
};

// Walks the output token by token (markers vs. text runs) with a small state
// machine: <triplet> opens a segment, <subj> closes the subject, <obj> closes
// the predicate. <s>, </s> and <pad> act as spaces.
MarkerTrace hand_trace_markers(const std::string& text);

// [start, end) ranges from plain slicing.
std::vector<std::pair<std::size_t, std::size_t>> slice(std::size_t token_count, std::size_t batch_size);

std::vector<std::string> whitespace_tokens(const std::string& text);

std::string trim(const std::string& s);
std::string lower(const std::string& s);

std::string read(const std::string& path);
std::vector<std::string> lines_of(const std::string& text);

}  // namespace oracle
