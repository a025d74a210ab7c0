#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/triplet.hpp"

namespace kgpipe {

struct SkipRecord {
    std::string excerpt;
    std::string reason;
    std::optional<std::size_t> batch_index;

    friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

struct ParseReport {
    std::size_t triplets_emitted = 0;
    std::size_t segments_skipped = 0;
    std::vector<SkipRecord> skip_reasons;

    std::size_t segments_total() const noexcept { return triplets_emitted + segments_skipped; }

    void skip(std::string_view segment, std::string reason, std::optional<std::size_t> batch = std::nullopt);
    // Folds another report in, tagging its skip records with `batch`.
    void absorb(const ParseReport& other, std::optional<std::size_t> batch);

    friend bool operator==(const ParseReport&, const ParseReport&) = default;
};

// Field order inside a marker segment. The default reads
// `<triplet> subject <subj> predicate <obj> object`. The upstream REBEL
// checkpoints emit `<triplet> head <subj> tail <obj> relation`, selectable
// when pointing at such a model.
enum class MarkerOrder { subject_predicate_object, head_tail_relation };

struct ParsedTriplets {
    std::vector<Triplet> triplets;
    ParseReport report;
};

// Marker-grammar parser for seq2seq output. Never throws. A segment runs from
// one `<triplet>` to the next one (or end of text); non-blank text before the
// first `<triplet>` counts as one malformed segment. `<s>`, `</s>` and `<pad>`
// are ignored. Returned triplets carry empty provenance.
ParsedTriplets parse_seq2seq_output(std::string_view text, MarkerOrder order = MarkerOrder::subject_predicate_object);

// Inverse of parse_seq2seq_output for well-formed triplets.
std::string to_marker_text(const std::vector<Triplet>& triplets);

// Line-oriented parser for `S | P | O` chat responses. Blank lines, code
// fences, and preamble lines ending in ':' are not segments. Leading list
// markers ("-", "*", "1.", "2)") and outer table pipes are stripped.
ParsedTriplets parse_chat_triples(std::string_view text);

}  // namespace kgpipe
