#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "features.hpp"
#include "trace_graph.hpp"

namespace sift {

/// Nodes joined by edges whose action contributes no pattern to the group.
struct ReducedGraph {
    std::vector<std::uint32_t> node_map;  // original node -> reduced node
    std::size_t node_count = 0;
    std::vector<EdgeId> relevant;  // edges whose action has a pattern in the group
};

ReducedGraph build_reduced_graph(const TraceGraph& graph, const PatternGroup& group);

/// Edge of one grounding: `mask` holds every group pattern mapping it to the key.
struct SliceEdge {
    EdgeId edge = 0;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t mask = 0;
};

/// One grounding tuple over the reduced graph, with the edges that do not
/// touch the tuple contracted as well. Components are numbered 0..comp_count.
struct GroundingSlice {
    std::vector<ObjectId> key;
    std::vector<SliceEdge> edges;
    std::uint32_t comp_count = 0;
    std::vector<std::uint32_t> probe_comps;  // parallel to the probe list
};

/// Maps an original node into the current slice; nullopt when no slice edge
/// touches its component, in which case every atom is undefined there.
using ComponentLookup = std::function<std::optional<std::uint32_t>(NodeId)>;
/// Called once per grounding, possibly from several threads at once.
using SliceVisitor = std::function<void(std::size_t index, const GroundingSlice&, const ComponentLookup&)>;

/// Streams the slices of one group in key order without retaining them.
void visit_slices(const TraceGraph& graph, const PatternGroup& group, std::size_t workers, const SliceVisitor& visit);

/// Every grounding slice of one group. Probe nodes get their component
/// recorded in each slice.
class GroupSlices {
public:
    GroupSlices(const TraceGraph& graph, const PatternGroup& group, std::span<const NodeId> probes = {},
                std::size_t workers = 1);

    const PatternGroup& group() const noexcept { return *group_; }
    const TraceGraph& graph() const noexcept { return *graph_; }
    const ReducedGraph& reduced() const noexcept { return reduced_; }
    const std::vector<GroundingSlice>& slices() const noexcept { return slices_; }
    /// Slice index for a key, if any edge grounds to it.
    std::optional<std::size_t> find(std::span<const ObjectId> key) const;

private:
    const TraceGraph* graph_;
    const PatternGroup* group_;
    ReducedGraph reduced_;
    std::vector<GroundingSlice> slices_;  // sorted by key
};

/// Undefined values of fixed-sign propagation.
inline constexpr std::int8_t kUndefined = -1;

struct SignAssignment {
    std::vector<std::uint8_t> sign;          // per group pattern; 1 adds, 0 deletes
    std::vector<std::uint32_t> component;    // per group pattern: smallest pattern of its constraint component
};

struct Conflict {
    std::vector<ObjectId> key;
    EdgeId edge = 0;
};

struct CheckResult {
    bool consistent = false;
    SignAssignment signs;  // only for consistent features
    std::optional<Conflict> conflict;
};

/// Linear-time 0-1 propagation over the slices of the feature's group.
CheckResult check_feature(const GroupSlices& slices, std::uint32_t mask);
CheckResult check_feature(const TraceGraph& graph, const PatternGroup& group, std::uint32_t mask);

/// Exhaustive reference: tries all 2^|B| sign maps and labels the original
/// graph by flood fill. Returns a witness sign per group pattern (0 outside B).
/// Throws LimitError when |B| exceeds `cap`.
std::optional<std::vector<std::uint8_t>> brute_force_check(const TraceGraph& graph, const PatternGroup& group,
                                                           std::uint32_t mask, std::size_t cap = 8);

struct AdmissibleFeature {
    Feature feature;
    SignAssignment signs;
};

/// Deterministic order of `candidates` is preserved.
std::vector<AdmissibleFeature> admissible_features(const TraceGraph& graph, const std::vector<PatternGroup>& groups,
                                                   const std::vector<Feature>& candidates, std::size_t workers = 1);

/// Per rejected feature, one line naming the grounding and the edge where propagation failed.
std::string dump_conflicts(const TraceGraph& graph, const std::vector<PatternGroup>& groups,
                           const std::vector<Feature>& candidates, std::size_t workers = 1);

/// Three-valued truth of f(key) per slice component, under fixed signs.
/// Returns nullopt on a propagation conflict.
std::optional<std::vector<std::int8_t>> propagate_slice(const GroundingSlice& slice, std::uint32_t mask,
                                                        std::span<const std::uint8_t> signs,
                                                        EdgeId* conflict_edge = nullptr);

}  // namespace sift
