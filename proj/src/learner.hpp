#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consistency.hpp"
#include "features.hpp"
#include "strips.hpp"
#include "trace_graph.hpp"
#include "typing.hpp"

namespace sift {

/// Admissible feature turned into predicate `name`, with its support and signs.
struct LearnedPredicate {
    std::string name;
    FeatureType type;
    std::vector<ActionPattern> support;
    std::vector<std::uint8_t> signs;          // parallel to support
    std::vector<std::uint32_t> components;    // parallel to support: first support index of its constraint component

    PatternGroup group() const { return {type, support}; }
    std::uint32_t full_mask() const { return static_cast<std::uint32_t>((std::uint64_t{1} << support.size()) - 1); }
};

/// Precondition f(t[x]) of the schema named by `pattern.action`.
struct LearnedPrecondition {
    std::uint32_t predicate = 0;
    ActionPattern pattern;
    bool positive = true;

    auto operator<=>(const LearnedPrecondition&) const = default;
};

struct LearnStats {
    std::size_t types = 0;
    std::size_t max_arity = 0;
    std::vector<std::uint64_t> candidates_by_arity;
    std::size_t candidates = 0;
    std::size_t admissible = 0;
    double seconds_features = 0;
    double seconds_pruning = 0;
    double seconds_build = 0;
};

struct LearnedModel {
    StripsDomain domain;
    std::optional<StripsInstance> instance;  // only when the input flags an initial node
    std::vector<LearnedPredicate> predicates;
    std::vector<std::string> static_predicates;  // p_<action>, one per schema
    LearnStats stats;
};

struct LearnConfig {
    std::optional<std::size_t> max_arity;  // default: largest observed action arity
    std::size_t group_cap = 20;
    std::size_t workers = 1;
    std::string domain_name = "learned";
};

/// Values of f(key) at every node of `graph`; kUndefined where no member edge
/// of the grounding shares the node's component.
std::vector<std::int8_t> propagate_truth(const TraceGraph& graph, const LearnedPredicate& predicate,
                                         std::span<const ObjectId> key);

/// Predicates from admissible features, in candidate order, named f0, f1, ...
std::vector<LearnedPredicate> make_predicates(const std::vector<PatternGroup>& groups,
                                              const std::vector<AdmissibleFeature>& admissible);

/// Preconditions over every pattern of a predicate's type whose pre-state
/// values are defined and agree on all occurrences.
struct PreconditionScan {
    std::vector<LearnedPrecondition> preconditions;  // sorted
    /// Per predicate: (key, value at the initial node) for groundings defined there.
    std::vector<std::vector<std::pair<std::vector<ObjectId>, bool>>> initial_values;
};
PreconditionScan infer_preconditions(const TraceGraph& graph, const TypeAssignment& types,
                                     const std::vector<LearnedPredicate>& predicates, std::size_t workers = 1);

StripsDomain build_domain(const std::string& name, const TypeAssignment& types,
                          const std::vector<LearnedPredicate>& predicates,
                          const std::vector<LearnedPrecondition>& preconditions);

/// Adds p_a with a positive precondition p_a(x1..xk) to every schema; returns
/// the static init atoms, one per observed ground action.
std::vector<SignedAtom> add_static_predicates(StripsDomain& domain, const TraceGraph& graph);

/// Throws StructuralError when the graph has no initial node.
StripsInstance build_instance(const TraceGraph& graph, const StripsDomain& domain, const TypeAssignment& types,
                              const std::vector<LearnedPredicate>& predicates, const PreconditionScan& scan,
                              std::vector<SignedAtom> static_atoms);

/// Typing, enumeration, pruning and assembly. Throws EmptyInputError on a graph without edges.
LearnedModel learn(const TraceGraph& graph, const LearnConfig& config = {});

/// JSON sidecar mapping fi to its support and signs.
std::string write_sidecar(const LearnedModel& model);
/// Rebuilds a model from its emitted domain and sidecar; the instance is optional.
LearnedModel read_learned(std::string_view domain_pddl, std::string_view sidecar_json,
                          std::optional<std::string_view> instance_pddl = std::nullopt);

ActionPattern parse_pattern(std::string_view text);

}  // namespace sift
