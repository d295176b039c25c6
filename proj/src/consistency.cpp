#include "consistency.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "error.hpp"
#include "util.hpp"

namespace sift {
namespace {

/// Union-find with xor parities and lazily reset variables. Smaller indexes
/// always become roots, so low "persistent" variables never hang below high
/// "per-slice" variables and the latter can be reset by bumping the epoch.
class ParityForest {
public:
    void reserve(std::size_t n) {
        if (parent_.size() < n) {
            parent_.resize(n);
            parity_.resize(n);
            epoch_of_.resize(n, 0);
        }
    }

    void reset_all(std::size_t persistent) {
        ++epoch_;
        persistent_ = persistent;
        for (std::uint32_t v = 0; v < persistent; ++v) {
            parent_[v] = v;
            parity_[v] = 0;
        }
    }

    /// Forget every variable at index >= persistent.
    void next_slice() { ++epoch_; }

    std::pair<std::uint32_t, std::uint8_t> find(std::uint32_t v) {
        touch(v);
        std::uint8_t acc = 0;
        std::uint32_t root = v;
        while (parent_[root] != root) {
            acc ^= parity_[root];
            root = parent_[root];
        }
        // Path compression with parity fix-up.
        std::uint8_t rest = acc;
        while (parent_[v] != root && v != root) {
            auto next = parent_[v];
            auto p = parity_[v];
            parent_[v] = root;
            parity_[v] = rest;
            rest ^= p;
            v = next;
        }
        return {root, acc};
    }

    /// Requires value(a) xor value(b) == c; false on contradiction.
    bool unite(std::uint32_t a, std::uint32_t b, std::uint8_t c) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) return static_cast<std::uint8_t>(pa ^ pb) == c;
        if (rb < ra) std::swap(ra, rb);
        parent_[rb] = ra;
        parity_[rb] = static_cast<std::uint8_t>(pa ^ pb ^ c);
        return true;
    }

private:
    void touch(std::uint32_t v) {
        if (v < persistent_ || epoch_of_[v] == epoch_) return;
        epoch_of_[v] = epoch_;
        parent_[v] = v;
        parity_[v] = 0;
    }

    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> parity_;
    std::vector<std::uint64_t> epoch_of_;
    std::uint64_t epoch_ = 0;
    std::size_t persistent_ = 0;
};

ParityForest& local_forest() {
    thread_local ParityForest forest;
    return forest;
}

/// Pattern indexes per interned action name of `graph`.
std::vector<std::vector<std::uint32_t>> patterns_by_action(const TraceGraph& graph, const PatternGroup& group) {
    std::vector<std::vector<std::uint32_t>> out(graph.action_names().size());
    for (std::uint32_t p = 0; p < group.patterns.size(); ++p)
        if (auto a = graph.find_action_name(group.patterns[p].action)) out[*a].push_back(p);
    return out;
}

/// Objects selected by a pattern from an action's argument tuple.
bool project(const Label& label, const ActionPattern& p, std::vector<ObjectId>& key) {
    key.clear();
    for (auto i : p.args) {
        if (i >= label.args.size()) return false;
        key.push_back(label.args[i]);
    }
    return true;
}

}  // namespace

ReducedGraph build_reduced_graph(const TraceGraph& graph, const PatternGroup& group) {
    auto by_action = patterns_by_action(graph, group);
    UnionFind uf(graph.node_count());
    ReducedGraph out;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto& edge = graph.edge(e);
        if (by_action[graph.label(edge.label).name].empty())
            uf.unite(edge.src, edge.dst);
        else
            out.relevant.push_back(e);
    }
    out.node_map.resize(graph.node_count());
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        auto r = uf.find(n);
        out.node_map[n] = r == n ? static_cast<std::uint32_t>(out.node_count++) : out.node_map[r];
    }
    return out;
}

namespace {

using Occurrences = std::map<std::vector<ObjectId>, std::vector<std::pair<EdgeId, std::uint32_t>>>;

/// (edge, pattern) occurrences per grounding key, keys in lexicographic order.
Occurrences occurrences(const TraceGraph& graph, const PatternGroup& group, const ReducedGraph& reduced) {
    auto by_action = patterns_by_action(graph, group);
    Occurrences occ;
    std::vector<ObjectId> key;
    for (auto e : reduced.relevant) {
        const auto& label = graph.label(graph.edge(e).label);
        for (auto p : by_action[label.name])
            if (project(label, group.patterns[p], key)) occ[key].emplace_back(e, p);
    }
    return occ;
}

/// Builds slice `i` and hands it to `fn` together with its node lookup.
template <typename Fn>
void build_slices(const TraceGraph& graph, const ReducedGraph& reduced, const Occurrences& occ, std::size_t workers,
                  Fn&& fn) {
    std::vector<const Occurrences::value_type*> entries;
    for (const auto& kv : occ) entries.push_back(&kv);

    parallel_for(entries.size(), workers, [&](std::size_t i) {
        const auto& [k, members] = *entries[i];
        GroundingSlice slice;
        slice.key = k;
        // Contract every relevant edge that does not ground to this key.
        thread_local std::vector<std::uint64_t> edge_mark;
        thread_local std::uint64_t mark = 0;
        if (edge_mark.size() < graph.edge_count()) edge_mark.assign(graph.edge_count(), 0);
        ++mark;
        for (auto [e, _] : members) edge_mark[e] = mark;
        UnionFind uf(reduced.node_count);
        for (auto e : reduced.relevant) {
            if (edge_mark[e] == mark) continue;
            const auto& edge = graph.edge(e);
            uf.unite(reduced.node_map[edge.src], reduced.node_map[edge.dst]);
        }
        std::vector<std::uint32_t> comp_id(reduced.node_count, UINT32_MAX);
        auto comp = [&](NodeId n) {
            auto r = uf.find(reduced.node_map[n]);
            if (comp_id[r] == UINT32_MAX) comp_id[r] = slice.comp_count++;
            return comp_id[r];
        };
        for (std::size_t j = 0; j < members.size();) {
            auto e = members[j].first;
            std::uint32_t mask = 0;
            for (; j < members.size() && members[j].first == e; ++j) mask |= std::uint32_t{1} << members[j].second;
            const auto& edge = graph.edge(e);
            auto s = comp(edge.src);
            auto d = comp(edge.dst);
            slice.edges.push_back({e, s, d, mask});
        }
        auto lookup = [&](NodeId n) -> std::optional<std::uint32_t> {
            auto c = comp_id[uf.find(reduced.node_map[n])];
            if (c == UINT32_MAX) return std::nullopt;
            return c;
        };
        fn(i, slice, comp, lookup);
    });
}

}  // namespace

void visit_slices(const TraceGraph& graph, const PatternGroup& group, std::size_t workers, const SliceVisitor& visit) {
    auto reduced = build_reduced_graph(graph, group);
    auto occ = occurrences(graph, group, reduced);
    build_slices(graph, reduced, occ, workers, [&](std::size_t i, GroundingSlice& slice, auto&, auto& lookup) {
        visit(i, slice, ComponentLookup(lookup));
    });
}

GroupSlices::GroupSlices(const TraceGraph& graph, const PatternGroup& group, std::span<const NodeId> probes,
                         std::size_t workers)
    : graph_(&graph), group_(&group), reduced_(build_reduced_graph(graph, group)) {
    auto occ = occurrences(graph, group, reduced_);
    slices_.resize(occ.size());
    build_slices(graph, reduced_, occ, workers, [&](std::size_t i, GroundingSlice& slice, auto& comp, auto&) {
        for (auto n : probes) slice.probe_comps.push_back(comp(n));
        slices_[i] = std::move(slice);
    });
}

std::optional<std::size_t> GroupSlices::find(std::span<const ObjectId> key) const {
    auto it = std::lower_bound(slices_.begin(), slices_.end(), key, [](const GroundingSlice& s, std::span<const ObjectId> k) {
        return std::lexicographical_compare(s.key.begin(), s.key.end(), k.begin(), k.end());
    });
    if (it == slices_.end() || !std::equal(it->key.begin(), it->key.end(), key.begin(), key.end())) return std::nullopt;
    return static_cast<std::size_t>(it - slices_.begin());
}

CheckResult check_feature(const GroupSlices& slices, std::uint32_t mask) {
    const auto P = static_cast<std::uint32_t>(slices.group().patterns.size());
    auto& forest = local_forest();
    std::size_t max_comp = 0;
    for (const auto& s : slices.slices()) max_comp = std::max<std::size_t>(max_comp, s.comp_count);
    forest.reserve(P + max_comp);
    forest.reset_all(P);
    CheckResult out;
    for (const auto& slice : slices.slices()) {
        forest.next_slice();
        for (const auto& e : slice.edges) {
            auto m = e.mask & mask;
            bool ok = true;
            if (m == 0) {
                ok = forest.unite(P + e.src, P + e.dst, 0);
            } else {
                for (std::uint32_t p = 0; ok && p < P; ++p) {
                    if (!(m >> p & 1U)) continue;
                    ok = forest.unite(P + e.dst, p, 0) && forest.unite(P + e.src, p, 1);
                }
            }
            if (!ok) {
                out.conflict = Conflict{slice.key, e.edge};
                return out;
            }
        }
    }
    out.consistent = true;
    out.signs.sign.resize(P);
    out.signs.component.resize(P);
    for (std::uint32_t p = 0; p < P; ++p) {
        // The root is the smallest pattern of the component and is seeded with 1.
        auto [root, parity] = forest.find(p);
        out.signs.sign[p] = static_cast<std::uint8_t>(1U ^ parity);
        out.signs.component[p] = root;
    }
    return out;
}

CheckResult check_feature(const TraceGraph& graph, const PatternGroup& group, std::uint32_t mask) {
    GroupSlices slices(graph, group);
    return check_feature(slices, mask);
}

std::optional<std::vector<std::int8_t>> propagate_slice(const GroundingSlice& slice, std::uint32_t mask,
                                                        std::span<const std::uint8_t> signs, EdgeId* conflict_edge) {
    auto& forest = local_forest();
    forest.reserve(1 + slice.comp_count);
    forest.reset_all(1);  // variable 0 is the constant false
    for (const auto& e : slice.edges) {
        auto m = e.mask & mask;
        bool ok = true;
        if (m == 0) {
            ok = forest.unite(1 + e.src, 1 + e.dst, 0);
        } else {
            for (std::uint32_t p = 0; ok && p < signs.size(); ++p) {
                if (!(m >> p & 1U)) continue;
                std::uint8_t s = signs[p];
                ok = forest.unite(1 + e.dst, 0, s) && forest.unite(1 + e.src, 0, static_cast<std::uint8_t>(1U ^ s));
            }
        }
        if (!ok) {
            if (conflict_edge) *conflict_edge = e.edge;
            return std::nullopt;
        }
    }
    std::vector<std::int8_t> values(slice.comp_count, kUndefined);
    for (std::uint32_t c = 0; c < slice.comp_count; ++c) {
        auto [root, parity] = forest.find(1 + c);
        if (root == 0) values[c] = static_cast<std::int8_t>(parity);
    }
    return values;
}

std::optional<std::vector<std::uint8_t>> brute_force_check(const TraceGraph& graph, const PatternGroup& group,
                                                           std::uint32_t mask, std::size_t cap) {
    std::vector<std::uint32_t> bits;
    for (std::uint32_t p = 0; p < group.patterns.size(); ++p)
        if (mask >> p & 1U) bits.push_back(p);
    if (bits.size() > cap) throw LimitError("brute-force check limited to " + std::to_string(cap) + " patterns");

    // Members of each grounding: edge -> patterns of B grounding it to the key.
    std::map<std::vector<ObjectId>, std::map<EdgeId, std::vector<std::uint32_t>>> groundings;
    std::vector<ObjectId> key;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto& label = graph.label(graph.edge(e).label);
        const auto& name = graph.action_names()[label.name];
        for (auto p : bits) {
            const auto& pat = group.patterns[p];
            if (pat.action != name) continue;
            if (!project(label, pat, key)) continue;
            groundings[key][e].push_back(p);
        }
    }
    const auto N = graph.node_count();
    std::vector<std::int8_t> value(N);
    std::vector<std::vector<NodeId>> adj(N);
    for (std::uint64_t assignment = 0; assignment < (std::uint64_t{1} << bits.size()); ++assignment) {
        std::vector<std::uint8_t> sign(group.patterns.size(), 0);
        for (std::size_t i = 0; i < bits.size(); ++i) sign[bits[i]] = static_cast<std::uint8_t>(assignment >> i & 1U);
        bool ok = true;
        for (const auto& [k, members] : groundings) {
            std::fill(value.begin(), value.end(), kUndefined);
            for (auto& a : adj) a.clear();
            for (EdgeId e = 0; e < graph.edge_count(); ++e) {
                if (members.count(e)) continue;
                const auto& edge = graph.edge(e);
                adj[edge.src].push_back(edge.dst);
                adj[edge.dst].push_back(edge.src);
            }
            std::deque<NodeId> queue;
            auto force = [&](NodeId n, std::int8_t v) {
                if (value[n] == kUndefined) {
                    value[n] = v;
                    queue.push_back(n);
                    return true;
                }
                return value[n] == v;
            };
            for (const auto& [e, ps] : members) {
                const auto& edge = graph.edge(e);
                for (auto p : ps) {
                    ok = ok && force(edge.dst, static_cast<std::int8_t>(sign[p]));
                    ok = ok && force(edge.src, static_cast<std::int8_t>(1 - sign[p]));
                }
            }
            while (ok && !queue.empty()) {
                auto n = queue.front();
                queue.pop_front();
                for (auto m : adj[n]) ok = ok && force(m, value[n]);
            }
            if (!ok) break;
        }
        if (ok) return sign;
    }
    return std::nullopt;
}

namespace {

std::vector<CheckResult> check_all(const TraceGraph& graph, const std::vector<PatternGroup>& groups,
                                   const std::vector<Feature>& candidates, std::size_t workers) {
    std::vector<CheckResult> results(candidates.size());
    std::map<std::uint32_t, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < candidates.size(); ++i) by_group[candidates[i].group].push_back(i);
    for (const auto& [g, idx] : by_group) {
        GroupSlices slices(graph, groups.at(g), {}, workers);
        parallel_for(idx.size(), workers,
                     [&](std::size_t j) { results[idx[j]] = check_feature(slices, candidates[idx[j]].mask); });
    }
    return results;
}

}  // namespace

std::vector<AdmissibleFeature> admissible_features(const TraceGraph& graph, const std::vector<PatternGroup>& groups,
                                                   const std::vector<Feature>& candidates, std::size_t workers) {
    auto results = check_all(graph, groups, candidates, workers);
    std::vector<AdmissibleFeature> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (results[i].consistent) out.push_back({candidates[i], std::move(results[i].signs)});
    return out;
}

std::string dump_conflicts(const TraceGraph& graph, const std::vector<PatternGroup>& groups,
                           const std::vector<Feature>& candidates, std::size_t workers) {
    auto results = check_all(graph, groups, candidates, workers);
    std::string out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (results[i].consistent || !results[i].conflict) continue;
        const auto& c = *results[i].conflict;
        std::string line;
        for (const auto& p : support(groups[candidates[i].group], candidates[i].mask))
            line += (line.empty() ? "" : " , ") + p.to_string();
        line += " | grounding (";
        for (std::size_t j = 0; j < c.key.size(); ++j) line += (j ? "," : "") + graph.objects()[c.key[j]];
        const auto& edge = graph.edge(c.edge);
        line += ") | edge " + std::to_string(c.edge) + " " + std::to_string(edge.src) + "->" +
                std::to_string(edge.dst) + " " + graph.ground_action(edge.label).to_string();
        out += line + "\n";
    }
    return out;
}

}  // namespace sift
