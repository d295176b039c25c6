#include "trace_graph.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace sift {

NodeId TraceGraph::add_node() { return static_cast<NodeId>(node_count_++); }

ObjectId TraceGraph::intern_object(std::string_view name) {
    if (name.empty()) throw StructuralError("empty object name");
    auto [it, inserted] = object_index_.emplace(std::string(name), static_cast<ObjectId>(objects_.size()));
    if (inserted) objects_.emplace_back(name);
    return it->second;
}

LabelId TraceGraph::intern(const GroundAction& action) {
    if (action.name.empty()) throw StructuralError("empty action name");
    std::string key = action.name;
    for (const auto& a : action.args) key += ' ' + a;
    auto found = label_index_.find(key);
    if (found != label_index_.end()) return found->second;
    Label label;
    auto [nit, ninserted] =
        action_name_index_.emplace(action.name, static_cast<ActionName>(action_names_.size()));
    if (ninserted) action_names_.push_back(action.name);
    label.name = nit->second;
    for (const auto& a : action.args) label.args.push_back(intern_object(a));
    auto id = static_cast<LabelId>(labels_.size());
    labels_.push_back(std::move(label));
    label_index_.emplace(std::move(key), id);
    return id;
}

EdgeId TraceGraph::add_edge(NodeId src, NodeId dst, LabelId label) {
    if (src >= node_count_ || dst >= node_count_) throw StructuralError("edge endpoint out of range");
    if (label >= labels_.size()) throw StructuralError("unknown edge label");
    edges_.push_back({src, dst, label});
    return static_cast<EdgeId>(edges_.size() - 1);
}

EdgeId TraceGraph::add_edge(NodeId src, NodeId dst, const GroundAction& action) {
    return add_edge(src, dst, intern(action));
}

std::uint32_t TraceGraph::add_trace(std::vector<EdgeId> edges, bool truncated) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] >= edges_.size()) throw StructuralError("trace references unknown edge");
        if (i > 0 && edges_[edges[i - 1]].dst != edges_[edges[i]].src)
            throw StructuralError("trace edges do not form a path");
    }
    traces_.push_back(std::move(edges));
    truncated_.push_back(truncated);
    return static_cast<std::uint32_t>(traces_.size() - 1);
}

void TraceGraph::mark_initial(NodeId node) {
    if (node >= node_count_) throw StructuralError("initial node out of range");
    auto it = std::lower_bound(initial_.begin(), initial_.end(), node);
    if (it == initial_.end() || *it != node) initial_.insert(it, node);
}

GroundAction TraceGraph::ground_action(LabelId id) const {
    const auto& l = labels_.at(id);
    GroundAction g{action_names_[l.name], {}};
    for (auto o : l.args) g.args.push_back(objects_[o]);
    return g;
}

std::optional<ObjectId> TraceGraph::find_object(std::string_view name) const {
    auto it = object_index_.find(std::string(name));
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<ActionName> TraceGraph::find_action_name(std::string_view name) const {
    auto it = action_name_index_.find(std::string(name));
    if (it == action_name_index_.end()) return std::nullopt;
    return it->second;
}

TraceGraph from_traces(std::span<const std::vector<GroundAction>> traces, bool first_is_initial) {
    TraceGraph g;
    for (std::size_t t = 0; t < traces.size(); ++t) {
        NodeId cur = g.add_node();
        if (t == 0 && first_is_initial) g.mark_initial(cur);
        std::vector<EdgeId> ids;
        for (const auto& a : traces[t]) {
            NodeId next = g.add_node();
            ids.push_back(g.add_edge(cur, next, a));
            cur = next;
        }
        g.add_trace(std::move(ids));
    }
    return g;
}

TraceGraph merge_states(const TraceGraph& graph, std::span<const std::pair<NodeId, NodeId>> pairs) {
    UnionFind uf(graph.node_count());
    for (auto [a, b] : pairs) {
        if (a >= graph.node_count() || b >= graph.node_count()) throw StructuralError("unknown node id in merge");
        uf.unite(a, b);
    }
    // Roots are minimal members, so a scan in id order numbers classes by smallest member.
    std::vector<NodeId> renumber(graph.node_count());
    TraceGraph out;
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        auto r = uf.find(n);
        renumber[n] = r == n ? out.add_node() : renumber[r];
    }
    for (LabelId l = 0; l < graph.labels().size(); ++l) out.intern(graph.ground_action(l));
    for (const auto& o : graph.objects()) out.intern_object(o);
    for (const auto& e : graph.edges()) out.add_edge(renumber[e.src], renumber[e.dst], e.label);
    for (std::size_t t = 0; t < graph.traces().size(); ++t) out.add_trace(graph.traces()[t], graph.truncated()[t]);
    for (auto n : graph.initial_nodes()) out.mark_initial(renumber[n]);
    return out;
}

std::vector<std::uint32_t> component_map(const TraceGraph& graph) {
    UnionFind uf(graph.node_count());
    for (const auto& e : graph.edges()) uf.unite(e.src, e.dst);
    std::vector<std::uint32_t> comp(graph.node_count());
    std::uint32_t next = 0;
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        auto r = uf.find(n);
        comp[n] = r == n ? next++ : comp[r];
    }
    return comp;
}

std::vector<std::vector<NodeId>> connected_components(const TraceGraph& graph) {
    auto comp = component_map(graph);
    std::vector<std::vector<NodeId>> out;
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        if (comp[n] == out.size()) out.emplace_back();
        out[comp[n]].push_back(n);
    }
    return out;
}

std::string write_tracegraph(const TraceGraph& graph) {
    nlohmann::ordered_json doc;
    doc["format"] = "tracegraph";
    doc["version"] = 1;
    doc["objects"] = graph.objects();
    doc["nodes"] = graph.node_count();
    doc["initial"] = graph.initial_nodes();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges()) {
        auto a = graph.ground_action(e.label);
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"action", a.name}, {"args", a.args}});
    }
    doc["edges"] = std::move(edges);
    doc["traces"] = graph.traces();
    std::vector<std::size_t> truncated;
    for (std::size_t t = 0; t < graph.truncated().size(); ++t)
        if (graph.truncated()[t]) truncated.push_back(t);
    if (!truncated.empty()) doc["truncated"] = truncated;
    return doc.dump(1) + "\n";
}

TraceGraph read_tracegraph(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("tracegraph: invalid JSON: ") + e.what());
    }
    try {
        TraceGraph g;
        if (doc.contains("version") && doc["version"].get<int>() != 1)
            throw StructuralError("tracegraph: unsupported version");
        if (doc.contains("objects"))
            for (const auto& o : doc["objects"]) g.intern_object(o.get<std::string>());
        auto nodes = doc.at("nodes").get<std::size_t>();
        for (std::size_t i = 0; i < nodes; ++i) g.add_node();
        for (const auto& e : doc.at("edges")) {
            GroundAction a{e.at("action").get<std::string>(), e.value("args", std::vector<std::string>{})};
            g.add_edge(e.at("src").get<NodeId>(), e.at("dst").get<NodeId>(), a);
        }
        std::vector<bool> truncated;
        if (doc.contains("traces")) {
            std::vector<std::size_t> flagged;
            if (doc.contains("truncated")) flagged = doc["truncated"].get<std::vector<std::size_t>>();
            auto traces = doc["traces"].get<std::vector<std::vector<EdgeId>>>();
            for (std::size_t t = 0; t < traces.size(); ++t)
                g.add_trace(traces[t], std::find(flagged.begin(), flagged.end(), t) != flagged.end());
        }
        if (doc.contains("initial"))
            for (const auto& n : doc["initial"]) g.mark_initial(n.get<NodeId>());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("tracegraph: ") + e.what());
    }
}

std::vector<std::vector<GroundAction>> read_plain_traces(std::string_view text) {
    std::vector<std::vector<GroundAction>> out;
    std::vector<GroundAction> current;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (auto hash = line.find(';'); hash != std::string::npos) line.erase(hash);
        for (auto& c : line)
            if (c == '(' || c == ')' || c == ',') c = ' ';
        std::istringstream words(line);
        std::vector<std::string> tokens;
        for (std::string w; words >> w;) tokens.push_back(w);
        if (tokens.empty()) {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
            continue;
        }
        current.push_back({tokens[0], {tokens.begin() + 1, tokens.end()}});
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::string write_plain_traces(const TraceGraph& graph) {
    std::string out;
    for (std::size_t t = 0; t < graph.traces().size(); ++t) {
        if (t) out += "\n";
        for (auto e : graph.traces()[t]) {
            auto a = graph.ground_action(graph.edge(e).label);
            out += a.name;
            for (const auto& o : a.args) out += " " + o;
            out += "\n";
        }
    }
    return out;
}

}  // namespace sift
