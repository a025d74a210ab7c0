#include "kgpipe/export.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgpipe/error.hpp"
#include "kgpipe/text.hpp"

namespace kgpipe {

std::string to_string(ExportFormat format) {
    switch (format) {
        case ExportFormat::dot: return "dot";
        case ExportFormat::graphml: return "graphml";
        case ExportFormat::json: return "json";
    }
    return "dot";
}

ExportFormat export_format_from_string(const std::string& name) {
    auto n = text::casefold(text::trim(name));
    if (n == "dot") return ExportFormat::dot;
    if (n == "graphml") return ExportFormat::graphml;
    if (n == "json") return ExportFormat::json;
    throw UnsupportedFormat(name);
}

std::string to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::concept_node: return "concept";
        case NodeKind::instance_node: return "instance";
        case NodeKind::plain_node: return "plain";
    }
    return "plain";
}

namespace {

// "instanceOf", "instance of", "instance_of" all compare equal.
std::string squash(const std::string& predicate) {
    std::string out;
    for (char c : text::casefold(predicate)) {
        if (!text::is_space(c) && c != '_' && c != '-') out += c;
    }
    return out;
}

bool is_typing(const std::string& p) { return squash(p) == "instanceof"; }
bool is_subclass(const std::string& p) { return squash(p) == "subclassof"; }

std::map<std::string, NodeKind> all_kinds(const KnowledgeBase& kb) {
    std::map<std::string, NodeKind> kinds;
    for (const auto& c : kb.classes()) kinds[c] = NodeKind::concept_node;
    for (const auto& [key, _] : kb.triples()) {
        if (is_typing(key.predicate)) {
            kinds[key.object] = NodeKind::concept_node;
        } else if (is_subclass(key.predicate)) {
            kinds[key.subject] = NodeKind::concept_node;
            kinds[key.object] = NodeKind::concept_node;
        }
    }
    for (const auto& [key, _] : kb.triples()) {
        if (is_typing(key.predicate) && !kinds.count(key.subject)) kinds[key.subject] = NodeKind::instance_node;
    }
    return kinds;
}

std::map<std::string, std::set<std::string>> neighbours(const KnowledgeBase& kb) {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& [key, _] : kb.triples()) {
        adj[key.subject].insert(key.object);
        adj[key.object].insert(key.subject);
    }
    return adj;
}

std::set<std::string> seed_selection(const KnowledgeBase& kb, const std::string& seed, std::size_t radius) {
    std::string start = seed;
    if (!kb.entities().count(start)) {
        auto key = text::normalize_surface(seed);
        auto it = std::find_if(kb.entities().begin(), kb.entities().end(),
                               [&](const std::string& e) { return text::normalize_surface(e) == key; });
        if (it == kb.entities().end()) throw UnknownSeedEntity(seed);
        start = *it;
    }
    auto adj = neighbours(kb);
    std::set<std::string> seen{start};
    std::deque<std::pair<std::string, std::size_t>> queue{{start, 0}};
    while (!queue.empty()) {
        auto [node, depth] = queue.front();
        queue.pop_front();
        if (depth == radius) continue;
        for (const auto& next : adj[node]) {
            if (seen.insert(next).second) queue.emplace_back(next, depth + 1);
        }
    }
    return seen;
}

std::set<std::string> ranked_selection(const KnowledgeBase& kb, std::optional<std::size_t> max_nodes) {
    if (!max_nodes || *max_nodes >= kb.entities().size()) return kb.entities();
    std::map<std::string, std::size_t> degree;
    for (const auto& e : kb.entities()) degree[e] = 0;
    for (const auto& [key, _] : kb.triples()) {
        ++degree[key.subject];
        ++degree[key.object];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(degree.begin(), degree.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::set<std::string> out;
    for (std::size_t i = 0; i < *max_nodes; ++i) out.insert(ranked[i].first);
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            continue;
        } else {
            out += c;
        }
    }
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default:
                // Control characters other than tab/newline are not legal XML 1.0.
                if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') {
                    out += ' ';
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string render_dot(const Graph& g) {
    std::ostringstream out;
    out << "digraph kg {\n";
    out << "  node [shape=ellipse];\n";
    for (const auto& n : g.nodes) {
        out << "  " << n.id << " [label=\"" << dot_escape(n.label) << "\", kind=\"" << to_string(n.kind) << "\"";
        if (n.kind == NodeKind::concept_node) out << ", shape=box, style=filled, fillcolor=yellow";
        if (n.kind == NodeKind::instance_node) out << ", style=filled, fillcolor=palegreen";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        out << "  " << e.source << " -> " << e.target << " [label=\"" << dot_escape(e.label) << "\", weight=" << e.weight
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string render_graphml(const Graph& g) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"d0\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"d1\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
        << "  <key id=\"d2\" for=\"edge\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"d3\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
        << "  <graph id=\"kg\" edgedefault=\"directed\">\n";
    for (const auto& n : g.nodes) {
        out << "    <node id=\"" << n.id << "\">\n"
            << "      <data key=\"d0\">" << xml_escape(n.label) << "</data>\n"
            << "      <data key=\"d1\">" << to_string(n.kind) << "</data>\n"
            << "    </node>\n";
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        out << "    <edge id=\"e" << i << "\" source=\"" << e.source << "\" target=\"" << e.target << "\">\n"
            << "      <data key=\"d2\">" << xml_escape(e.label) << "</data>\n"
            << "      <data key=\"d3\">" << e.weight << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

std::string render_json(const Graph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : g.nodes) nodes.push_back({{"id", n.id}, {"label", n.label}, {"kind", to_string(n.kind)}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"source", e.source}, {"target", e.target}, {"label", e.label}, {"weight", e.weight}});
    }
    return nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

}  // namespace

NodeKind node_kind(const KnowledgeBase& kb, const std::string& entity) {
    auto kinds = all_kinds(kb);
    auto it = kinds.find(entity);
    return it == kinds.end() ? NodeKind::plain_node : it->second;
}

Graph select_subgraph(const KnowledgeBase& kb, const ExportOptions& options) {
    auto selected = options.seed_entity
                        ? seed_selection(kb, *options.seed_entity, options.radius.value_or(kDefaultRadius))
                        : ranked_selection(kb, options.max_nodes);
    auto kinds = all_kinds(kb);

    Graph g;
    std::map<std::string, std::string> ids;
    for (const auto& label : selected) {
        auto id = "n" + std::to_string(ids.size());
        ids.emplace(label, id);
        auto kind = kinds.find(label);
        g.nodes.push_back({id, label, kind == kinds.end() ? NodeKind::plain_node : kind->second});
    }
    for (const auto& [key, provenance] : kb.triples()) {
        auto s = ids.find(key.subject);
        auto o = ids.find(key.object);
        if (s == ids.end() || o == ids.end()) continue;
        std::size_t weight = 0;
        for (const auto& [_, n] : provenance) weight += n;
        g.edges.push_back({s->second, o->second, key.predicate, weight});
    }
    return g;
}

std::string render_graph(const Graph& graph, ExportFormat format) {
    switch (format) {
        case ExportFormat::dot: return render_dot(graph);
        case ExportFormat::graphml: return render_graphml(graph);
        case ExportFormat::json: return render_json(graph);
    }
    throw UnsupportedFormat(to_string(format));
}

std::string export_graph(const KnowledgeBase& kb, ExportFormat format, const ExportOptions& options) {
    return render_graph(select_subgraph(kb, options), format);
}

std::string export_graph(const KnowledgeBase& kb, const std::string& format, const ExportOptions& options) {
    return export_graph(kb, export_format_from_string(format), options);
}

}  // namespace kgpipe
