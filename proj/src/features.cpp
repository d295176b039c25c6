#include "features.hpp"

#include <algorithm>

#include "error.hpp"

namespace sift {

std::string ActionPattern::to_string() const {
    std::string out = action + "[";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(args[i] + 1);
    }
    return out + "]";
}

std::map<FeatureType, std::vector<ActionPattern>> enumerate_patterns(const TypeAssignment& types, std::size_t k) {
    std::map<FeatureType, std::vector<ActionPattern>> out;
    for (const auto& [name, arity] : types.actions()) {
        if (k > arity) continue;
        std::vector<std::uint32_t> tuple(k);
        std::vector<bool> used(arity, false);
        // Depth-first enumeration of injective tuples in lexicographic order.
        auto rec = [&](auto&& self, std::size_t depth) -> void {
            if (depth == k) {
                FeatureType ft;
                for (auto i : tuple) ft.push_back(types.type_of(name, i));
                out[ft].push_back({name, tuple});
                return;
            }
            for (std::uint32_t i = 0; i < arity; ++i) {
                if (used[i]) continue;
                used[i] = true;
                tuple[depth] = i;
                self(self, depth + 1);
                used[i] = false;
            }
        };
        rec(rec, 0);
    }
    for (auto& [_, pats] : out) std::sort(pats.begin(), pats.end());
    return out;
}

std::vector<PatternGroup> pattern_groups(const TypeAssignment& types, std::size_t max_arity, std::size_t group_cap) {
    std::vector<PatternGroup> out;
    for (std::size_t k = 0; k <= max_arity; ++k) {
        for (auto& [ft, pats] : enumerate_patterns(types, k)) {
            if (!std::is_sorted(ft.begin(), ft.end())) continue;
            if (pats.size() > group_cap || pats.size() > 31) {
                std::string name = "(";
                for (std::size_t i = 0; i < ft.size(); ++i) name += (i ? "," : "") + TypeAssignment::type_name(ft[i]);
                throw LimitError("feature type " + name + ") has " + std::to_string(pats.size()) +
                                 " patterns, above the cap of " + std::to_string(group_cap));
            }
            out.push_back({ft, std::move(pats)});
        }
    }
    return out;
}

std::vector<Feature> enumerate_features(const std::vector<PatternGroup>& groups) {
    std::vector<Feature> out;
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
        std::uint32_t full = (std::uint32_t{1} << groups[g].patterns.size()) - 1;
        for (std::uint32_t m = 1; m <= full && m != 0; ++m) out.push_back({g, m});
    }
    return out;
}

std::vector<std::uint64_t> candidate_count(const TypeAssignment& types, std::size_t max_arity, std::size_t group_cap) {
    std::vector<std::uint64_t> counts(max_arity + 1, 0);
    for (const auto& g : pattern_groups(types, max_arity, group_cap))
        counts[g.arity()] += (std::uint64_t{1} << g.patterns.size()) - 1;
    return counts;
}

std::vector<ActionPattern> support(const PatternGroup& group, std::uint32_t mask) {
    std::vector<ActionPattern> out;
    for (std::size_t i = 0; i < group.patterns.size(); ++i)
        if (mask >> i & 1U) out.push_back(group.patterns[i]);
    return out;
}

std::string dump_features(const std::vector<PatternGroup>& groups, const std::vector<Feature>& features) {
    std::string out;
    for (const auto& f : features) {
        const auto& g = groups.at(f.group);
        out += "f" + std::to_string(g.arity()) + ":";
        bool first = true;
        for (const auto& p : support(g, f.mask)) {
            out += (first ? " " : " , ") + p.to_string();
            first = false;
        }
        out += "\n";
    }
    return out;
}

}  // namespace sift
