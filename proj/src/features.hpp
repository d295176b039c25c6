#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "typing.hpp"

namespace sift {

/// a[t]: action name plus distinct 0-based argument indexes (printed 1-based).
struct ActionPattern {
    std::string action;
    std::vector<std::uint32_t> args;

    auto operator<=>(const ActionPattern&) const = default;
    std::string to_string() const;
    std::size_t arity() const noexcept { return args.size(); }
};

using FeatureType = std::vector<TypeId>;

/// Canonical feature type with all patterns of that type tuple, sorted.
struct PatternGroup {
    FeatureType type;
    std::vector<ActionPattern> patterns;

    std::size_t arity() const noexcept { return type.size(); }
};

/// Support is a non-empty subset of one group's patterns.
struct Feature {
    std::uint32_t group = 0;
    std::uint32_t mask = 0;  // bit i selects group.patterns[i]

    auto operator<=>(const Feature&) const = default;
};

/// All injective index tuples of length k over observed actions, keyed by type tuple.
std::map<FeatureType, std::vector<ActionPattern>> enumerate_patterns(const TypeAssignment& types, std::size_t k);

/// Canonical (non-decreasing) groups for arities 0..max_arity, ordered by arity then type tuple.
/// Throws LimitError when a group exceeds `group_cap` patterns.
std::vector<PatternGroup> pattern_groups(const TypeAssignment& types, std::size_t max_arity,
                                         std::size_t group_cap = 20);

/// Every non-empty support of every group, by group then mask.
std::vector<Feature> enumerate_features(const std::vector<PatternGroup>& groups);

/// Candidate count per arity without materializing supports.
std::vector<std::uint64_t> candidate_count(const TypeAssignment& types, std::size_t max_arity,
                                           std::size_t group_cap = 20);

std::vector<ActionPattern> support(const PatternGroup& group, std::uint32_t mask);

/// `f<k>: a[t1,..] , b[t1,..]` one line per feature.
std::string dump_features(const std::vector<PatternGroup>& groups, const std::vector<Feature>& features);

}  // namespace sift
