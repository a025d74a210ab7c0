#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace kgpipe {

// Where a triple came from: article, token batch (absent for whole-document
// sources such as ontology files) and the backend that generated it.
struct Provenance {
    std::string article_id;
    std::optional<std::size_t> batch_index;
    std::string backend_id;

    friend auto operator<=>(const Provenance&, const Provenance&) = default;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Triplet {
    std::string subject;
    std::string predicate;
    std::string object;
    Provenance provenance;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

nlohmann::json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

// Newline-delimited JSON, one triplet per line:
// {subject, predicate, object, article_id, batch_index, backend_id}
std::string serialize_triplets(const std::vector<Triplet>& triplets);
std::vector<Triplet> parse_triplets(std::string_view jsonl);

}  // namespace kgpipe
