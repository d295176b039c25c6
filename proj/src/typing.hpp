#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trace_graph.hpp"

namespace sift {

using TypeId = std::uint32_t;

/// Argument position of an action; `index` is 1-based.
struct ArgSlot {
    std::string action;
    std::uint32_t index = 1;

    auto operator<=>(const ArgSlot&) const = default;
};

/// Partition of argument slots into types, ordered by each type's smallest slot.
class TypeAssignment {
public:
    TypeAssignment() = default;

    std::size_t type_count() const noexcept { return members_.size(); }
    /// Slots of a type, sorted.
    const std::vector<ArgSlot>& members(TypeId t) const { return members_.at(t); }

    /// Observed actions with their arities, sorted by name.
    const std::vector<std::pair<std::string, std::size_t>>& actions() const noexcept { return actions_; }
    std::size_t max_arity() const noexcept;
    std::optional<std::size_t> arity(std::string_view action) const;
    /// `index` is 0-based here.
    TypeId type_of(std::string_view action, std::uint32_t index) const;
    /// Type of an object that occurs in some action argument.
    std::optional<TypeId> object_type(std::string_view object) const;
    const std::vector<std::pair<std::string, TypeId>>& object_types() const noexcept { return objects_; }

    static std::string type_name(TypeId t) { return "t" + std::to_string(t); }

private:
    friend TypeAssignment infer_types(const TraceGraph& graph);

    std::vector<std::vector<ArgSlot>> members_;
    std::vector<std::pair<std::string, std::size_t>> actions_;
    std::vector<std::vector<TypeId>> slot_types_;  // parallel to actions_
    std::vector<std::pair<std::string, TypeId>> objects_;  // sorted by name
};

/// Merges ω(a,i) and ω(b,j) whenever one object fills both slots, to a fixpoint.
/// Throws StructuralError when an action occurs with two different arities.
TypeAssignment infer_types(const TraceGraph& graph);

/// One line per type: `t0: drop[1] pick[1]`.
std::string dump_types(const TypeAssignment& types);

}  // namespace sift
