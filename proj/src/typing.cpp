#include "typing.hpp"

#include <algorithm>

#include "error.hpp"
#include "util.hpp"

namespace sift {

std::size_t TypeAssignment::max_arity() const noexcept {
    std::size_t m = 0;
    for (const auto& [_, k] : actions_) m = std::max(m, k);
    return m;
}

std::optional<std::size_t> TypeAssignment::arity(std::string_view action) const {
    auto it = std::lower_bound(actions_.begin(), actions_.end(), action,
                               [](const auto& p, std::string_view a) { return p.first < a; });
    if (it == actions_.end() || it->first != action) return std::nullopt;
    return it->second;
}

TypeId TypeAssignment::type_of(std::string_view action, std::uint32_t index) const {
    auto it = std::lower_bound(actions_.begin(), actions_.end(), action,
                               [](const auto& p, std::string_view a) { return p.first < a; });
    if (it == actions_.end() || it->first != action) throw StructuralError("unknown action '" + std::string(action) + "'");
    const auto& slots = slot_types_[static_cast<std::size_t>(it - actions_.begin())];
    if (index >= slots.size()) throw StructuralError("argument index out of range for '" + std::string(action) + "'");
    return slots[index];
}

std::optional<TypeId> TypeAssignment::object_type(std::string_view object) const {
    auto it = std::lower_bound(objects_.begin(), objects_.end(), object,
                               [](const auto& p, std::string_view o) { return p.first < o; });
    if (it == objects_.end() || it->first != object) return std::nullopt;
    return it->second;
}

TypeAssignment infer_types(const TraceGraph& graph) {
    const auto& names = graph.action_names();
    std::vector<std::optional<std::size_t>> arity(names.size());
    for (const auto& l : graph.labels()) {
        auto& a = arity[l.name];
        if (a && *a != l.args.size())
            throw StructuralError("action '" + names[l.name] + "' observed with arities " + std::to_string(*a) +
                                  " and " + std::to_string(l.args.size()));
        a = l.args.size();
    }
    // Slot numbering: actions by name, then argument index.
    std::vector<ActionName> order(names.size());
    for (ActionName i = 0; i < names.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
    std::vector<std::uint32_t> slot_base(names.size());
    std::uint32_t slots = 0;
    for (auto a : order) {
        slot_base[a] = slots;
        slots += static_cast<std::uint32_t>(arity[a].value_or(0));
    }
    // Uniting the slots of each object's first occurrence with every later
    // occurrence reaches the same fixpoint as iterated pairwise merging.
    UnionFind uf(slots);
    std::vector<std::int64_t> first_slot(graph.objects().size(), -1);
    for (const auto& l : graph.labels()) {
        for (std::uint32_t i = 0; i < l.args.size(); ++i) {
            auto s = slot_base[l.name] + i;
            auto& f = first_slot[l.args[i]];
            if (f < 0)
                f = s;
            else
                uf.unite(static_cast<std::uint32_t>(f), s);
        }
    }
    // Roots are minimal slots, and slots are numbered in (name, index) order,
    // so numbering roots in slot order yields the lexicographic type order.
    std::vector<TypeId> type_of_root(slots, 0);
    TypeAssignment out;
    for (std::uint32_t s = 0; s < slots; ++s) {
        if (uf.find(s) == s) {
            type_of_root[s] = static_cast<TypeId>(out.members_.size());
            out.members_.emplace_back();
        }
    }
    for (auto a : order) {
        out.actions_.emplace_back(names[a], arity[a].value_or(0));
        std::vector<TypeId> st;
        for (std::uint32_t i = 0; i < arity[a].value_or(0); ++i) {
            auto t = type_of_root[uf.find(slot_base[a] + i)];
            st.push_back(t);
            out.members_[t].push_back({names[a], i + 1});
        }
        out.slot_types_.push_back(std::move(st));
    }
    for (ObjectId o = 0; o < graph.objects().size(); ++o)
        if (first_slot[o] >= 0)
            out.objects_.emplace_back(graph.objects()[o], type_of_root[uf.find(static_cast<std::uint32_t>(first_slot[o]))]);
    std::sort(out.objects_.begin(), out.objects_.end());
    return out;
}

std::string dump_types(const TypeAssignment& types) {
    std::string out;
    for (TypeId t = 0; t < types.type_count(); ++t) {
        out += TypeAssignment::type_name(t) + ":";
        for (const auto& s : types.members(t)) out += " " + s.action + "[" + std::to_string(s.index) + "]";
        out += "\n";
    }
    return out;
}

}  // namespace sift
