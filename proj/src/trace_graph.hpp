#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "strips.hpp"

namespace sift {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using LabelId = std::uint32_t;   // interned ground action
using ActionName = std::uint32_t;  // interned action name

/// Ground action label with interned name and objects.
struct Label {
    ActionName name = 0;
    std::vector<ObjectId> args;

    auto operator<=>(const Label&) const = default;
};

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    LabelId label = 0;

    bool operator==(const Edge&) const = default;
};

/// Labeled multigraph over anonymous hidden states. Plain traces are disjoint
/// chains; extended traces and state graphs arise from merging chain nodes.
class TraceGraph {
public:
    NodeId add_node();
    /// Interns the action's name and objects on first sight.
    EdgeId add_edge(NodeId src, NodeId dst, const GroundAction& action);
    EdgeId add_edge(NodeId src, NodeId dst, LabelId label);
    LabelId intern(const GroundAction& action);
    ObjectId intern_object(std::string_view name);
    /// Appends a trace made of existing edges; the edges must form a path.
    std::uint32_t add_trace(std::vector<EdgeId> edges, bool truncated = false);
    void mark_initial(NodeId node);

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }

    const std::vector<std::string>& objects() const noexcept { return objects_; }
    const std::vector<std::string>& action_names() const noexcept { return action_names_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const Label& label(LabelId id) const { return labels_.at(id); }
    GroundAction ground_action(LabelId id) const;
    std::optional<ObjectId> find_object(std::string_view name) const;
    std::optional<ActionName> find_action_name(std::string_view name) const;

    /// Sorted, unique.
    const std::vector<NodeId>& initial_nodes() const noexcept { return initial_; }
    const std::vector<std::vector<EdgeId>>& traces() const noexcept { return traces_; }
    const std::vector<bool>& truncated() const noexcept { return truncated_; }

    bool operator==(const TraceGraph&) const = default;

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::string> objects_;
    std::unordered_map<std::string, ObjectId> object_index_;
    std::vector<std::string> action_names_;
    std::unordered_map<std::string, ActionName> action_name_index_;
    std::vector<Label> labels_;
    std::unordered_map<std::string, LabelId> label_index_;
    std::vector<NodeId> initial_;
    std::vector<std::vector<EdgeId>> traces_;
    std::vector<bool> truncated_;
};

/// One chain per trace. When `first_is_initial`, the head of the first trace
/// is flagged as the instance's initial node.
TraceGraph from_traces(std::span<const std::vector<GroundAction>> traces, bool first_is_initial = false);

/// Union-find merge. Surviving nodes are renumbered compactly in the order of
/// their smallest member; edges, labels and traces keep their order.
TraceGraph merge_states(const TraceGraph& graph, std::span<const std::pair<NodeId, NodeId>> pairs);

/// Components ordered by smallest member, members ascending.
std::vector<std::vector<NodeId>> connected_components(const TraceGraph& graph);
/// Component index per node, consistent with connected_components.
std::vector<std::uint32_t> component_map(const TraceGraph& graph);

/// tracegraph v1 JSON.
std::string write_tracegraph(const TraceGraph& graph);
TraceGraph read_tracegraph(std::string_view json_text);

/// One ground action per line (`name a b` or `(name a b)`), blank line between traces.
std::vector<std::vector<GroundAction>> read_plain_traces(std::string_view text);
std::string write_plain_traces(const TraceGraph& graph);

}  // namespace sift
