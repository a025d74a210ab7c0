#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kgpipe/kgstore.hpp"

namespace kgpipe {

inline constexpr std::size_t kDefaultMaxNodes = 150;
inline constexpr std::size_t kDefaultRadius = 1;

enum class ExportFormat { dot, graphml, json };

std::string to_string(ExportFormat format);
// Throws UnsupportedFormat.
ExportFormat export_format_from_string(const std::string& name);

enum class NodeKind { concept_node, instance_node, plain_node };

std::string to_string(NodeKind kind);

struct ExportOptions {
    // Ignored when a seed is given.
    std::optional<std::size_t> max_nodes = kDefaultMaxNodes;
    std::optional<std::string> seed_entity;
    std::optional<std::size_t> radius;  // seed mode only; defaults to kDefaultRadius
};

struct GraphNode {
    std::string id;  // n0, n1, ... in label order
    std::string label;
    NodeKind kind = NodeKind::plain_node;
};

struct GraphEdge {
    std::string source;
    std::string target;
    std::string label;
    std::size_t weight = 1;  // provenance multiplicity
};

struct Graph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
};

// Concept: class, object of a typing triple, or either end of a subclass
// triple. Instance: subject of a typing triple. Plain otherwise.
NodeKind node_kind(const KnowledgeBase& kb, const std::string& entity);

// Seed mode: undirected breadth-first search up to the radius. Otherwise the
// max_nodes entities of highest degree (ties by label). Edges are the triples
// with both ends selected. Throws UnknownSeedEntity.
Graph select_subgraph(const KnowledgeBase& kb, const ExportOptions& options = {});

std::string render_graph(const Graph& graph, ExportFormat format);

std::string export_graph(const KnowledgeBase& kb, ExportFormat format, const ExportOptions& options = {});
std::string export_graph(const KnowledgeBase& kb, const std::string& format, const ExportOptions& options = {});

}  // namespace kgpipe
