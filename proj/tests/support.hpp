#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "consistency.hpp"
#include "features.hpp"
#include "learner.hpp"
#include "pddl.hpp"
#include "pipeline.hpp"
#include "sampling.hpp"
#include "strips.hpp"
#include "trace_graph.hpp"
#include "typing.hpp"

namespace testing {

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline sift::Problem bench(const std::string& name) { return sift::load_problem(sift::find_benchmark(name)); }

inline sift::TraceGraph chain(const std::vector<std::string>& actions, bool initial = true) {
    std::vector<sift::GroundAction> trace;
    for (const auto& a : actions) {
        std::istringstream in(a);
        sift::GroundAction g;
        in >> g.name;
        for (std::string o; in >> o;) g.args.push_back(o);
        trace.push_back(std::move(g));
    }
    std::vector<std::vector<sift::GroundAction>> traces{trace};
    return sift::from_traces(traces, initial);
}

/// The Delivery trace pick(o1,c), move(c,c'), drop(o1,c'), pick(o1,c').
inline sift::TraceGraph delivery_trace() { return chain({"pick o1 c", "move c c2", "drop o1 c2", "pick o1 c2"}); }

inline std::optional<std::size_t> find_group(const std::vector<sift::PatternGroup>& groups,
                                             const sift::FeatureType& type) {
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].type == type) return i;
    return std::nullopt;
}

inline std::uint32_t mask_of(const sift::PatternGroup& group, const std::vector<std::string>& patterns) {
    std::uint32_t m = 0;
    for (const auto& p : patterns)
        for (std::size_t i = 0; i < group.patterns.size(); ++i)
            if (group.patterns[i].to_string() == p) m |= 1U << i;
    return m;
}

/// Feature induced by one hidden predicate, restricted to observed actions and
/// permuted into the canonical type order.
struct HiddenFeature {
    std::string predicate;
    std::size_t group = 0;
    std::uint32_t mask = 0;
    std::vector<std::uint8_t> sign;  // per group pattern
};

struct HiddenFeatures {
    std::vector<HiddenFeature> features;
    std::vector<std::string> skipped;  // predicates with no representable support in this input
};

inline HiddenFeatures hidden_features(const sift::StripsDomain& domain, const sift::TypeAssignment& types,
                                      const std::vector<sift::PatternGroup>& groups) {
    HiddenFeatures out;
    for (const auto& pred : domain.predicates) {
        struct Occ {
            std::string action;
            std::vector<std::uint32_t> args;
            bool positive;
        };
        std::vector<Occ> occs;
        bool representable = true;
        for (const auto& s : domain.schemas) {
            if (!types.arity(s.name)) continue;  // unobserved action
            for (const auto& e : s.effects) {
                if (e.predicate != pred.name) continue;
                std::set<std::uint32_t> distinct(e.args.begin(), e.args.end());
                if (distinct.size() != e.args.size()) representable = false;
                occs.push_back({s.name, e.args, e.positive});
            }
        }
        if (occs.empty()) continue;
        if (!representable) {
            out.skipped.push_back(pred.name);
            continue;
        }
        auto k = pred.arity;
        sift::FeatureType type(k);
        for (std::size_t i = 0; i < k; ++i) type[i] = types.type_of(occs[0].action, occs[0].args[i]);
        for (const auto& o : occs)
            for (std::size_t i = 0; i < k; ++i)
                if (types.type_of(o.action, o.args[i]) != type[i]) representable = false;
        if (!representable) {
            out.skipped.push_back(pred.name);
            continue;
        }
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(), [&](auto a, auto b) { return type[a] < type[b]; });
        sift::FeatureType sorted(k);
        for (std::size_t j = 0; j < k; ++j) sorted[j] = type[perm[j]];
        auto g = find_group(groups, sorted);
        if (!g) {
            out.skipped.push_back(pred.name);
            continue;
        }
        HiddenFeature f{pred.name, *g, 0, std::vector<std::uint8_t>(groups[*g].patterns.size(), 0)};
        for (const auto& o : occs) {
            sift::ActionPattern p{o.action, {}};
            for (std::size_t j = 0; j < k; ++j) p.args.push_back(o.args[perm[j]]);
            const auto& ps = groups[*g].patterns;
            auto it = std::find(ps.begin(), ps.end(), p);
            if (it == ps.end()) {
                representable = false;
                break;
            }
            auto idx = static_cast<std::size_t>(it - ps.begin());
            f.mask |= 1U << idx;
            f.sign[idx] = o.positive ? 1 : 0;
        }
        if (!representable) {
            out.skipped.push_back(pred.name);
            continue;
        }
        out.features.push_back(std::move(f));
    }
    return out;
}

/// True when `signs` equals `hidden` on the support up to complementing whole components.
inline bool signs_match_up_to_component(const sift::SignAssignment& signs, const HiddenFeature& hidden) {
    std::map<std::uint32_t, int> flip;  // component -> 0 same, 1 complemented
    for (std::size_t i = 0; i < hidden.sign.size(); ++i) {
        if (!(hidden.mask >> i & 1U)) continue;
        int f = signs.sign[i] == hidden.sign[i] ? 0 : 1;
        auto [it, inserted] = flip.emplace(signs.component[i], f);
        if (!inserted && it->second != f) return false;
    }
    return true;
}

/// Expected feature: patterns with a sign, e.g. {"pick[1]", 1}; a negative sign is not compared.
using GoldenFeature = std::vector<std::pair<std::string, int>>;

/// Matches a learned predicate against a golden support, allowing one
/// permutation of argument positions and per-component complement.
inline bool matches_golden(const sift::LearnedPredicate& pred, const GoldenFeature& golden) {
    if (pred.support.size() != golden.size()) return false;
    auto k = pred.type.size();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::map<std::string, int> want(golden.begin(), golden.end());
    do {
        std::map<std::uint32_t, int> flip;
        bool ok = true;
        for (std::size_t i = 0; i < pred.support.size() && ok; ++i) {
            auto p = pred.support[i];
            auto args = p.args;
            for (std::size_t j = 0; j < k; ++j) p.args[j] = args[perm[j]];
            auto it = want.find(p.to_string());
            if (it == want.end()) {
                ok = false;
                break;
            }
            if (it->second < 0) continue;
            int f = pred.signs[i] == it->second ? 0 : 1;
            auto [fit, inserted] = flip.emplace(pred.components[i], f);
            if (!inserted && fit->second != f) ok = false;
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

/// Expected gripper features; left patterns add, right patterns delete.
inline std::vector<GoldenFeature> gripper_golden() {
    return {
        {{"pick[1]", 1}, {"drop[1]", 0}},
        {{"move[1]", 1}, {"move[2]", 0}},
        {{"drop[3]", 1}, {"pick[3]", 0}},
        {{"pick[1,2]", 1}, {"drop[1,2]", 0}},
        {{"move[2,1]", 1}, {"move[1,2]", 0}},
        {{"pick[3,1]", 1}, {"drop[3,1]", 0}},
    };
}

/// Expected blocks features (the 3-operator domain). Only the first feature's
/// layout pins down signs; the others are compared by support.
inline std::vector<GoldenFeature> blocks_golden() {
    return {
        {{"move-to-table[1]", 1}, {"move-from-table[1]", 0}},
        {{"move[3]", -1}, {"move-from-table[2]", -1}, {"move[2]", -1}, {"move-to-table[2]", -1}},
        {{"move[1,2]", -1}, {"move-to-table[1,2]", -1}, {"move[1,3]", -1}, {"move-from-table[1,2]", -1}},
        {{"move-from-table[2,1]", -1}, {"move[3,1]", -1}, {"move[2,1]", -1}, {"move-to-table[2,1]", -1}},
        {{"move[1,2]", -1},
         {"move-to-table[1,2]", -1},
         {"move[2,1]", -1},
         {"move-to-table[2,1]", -1},
         {"move-from-table[2,1]", -1},
         {"move[3,1]", -1},
         {"move[1,3]", -1},
         {"move-from-table[1,2]", -1}},
    };
}

/// Small random graph plus a candidate feature, for oracle comparisons.
struct RandomCase {
    sift::TraceGraph graph;
    std::vector<sift::PatternGroup> groups;
    std::size_t group = 0;
    std::uint32_t mask = 0;
};

inline std::optional<RandomCase> random_case(std::mt19937_64& rng, std::size_t max_nodes = 6,
                                             std::size_t max_edges = 9) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    RandomCase c;
    auto nodes = pick(2, max_nodes);
    for (std::size_t i = 0; i < nodes; ++i) c.graph.add_node();
    std::vector<std::pair<std::string, std::size_t>> actions;
    auto action_count = pick(1, 3);
    for (std::size_t a = 0; a < action_count; ++a) actions.emplace_back(std::string(1, char('a' + a)), pick(0, 2));
    auto objects = pick(1, 3);
    auto edges = pick(1, max_edges);
    for (std::size_t e = 0; e < edges; ++e) {
        const auto& [name, arity] = actions[pick(0, actions.size() - 1)];
        sift::GroundAction g{name, {}};
        for (std::size_t i = 0; i < arity; ++i) g.args.push_back("o" + std::to_string(pick(1, objects)));
        c.graph.add_edge(static_cast<sift::NodeId>(pick(0, nodes - 1)), static_cast<sift::NodeId>(pick(0, nodes - 1)),
                         g);
    }
    c.graph.mark_initial(0);
    auto types = sift::infer_types(c.graph);
    c.groups = sift::pattern_groups(types, 2, 20);
    std::vector<std::size_t> usable;
    for (std::size_t g = 0; g < c.groups.size(); ++g)
        if (!c.groups[g].patterns.empty()) usable.push_back(g);
    if (usable.empty()) return std::nullopt;
    c.group = usable[pick(0, usable.size() - 1)];
    auto size = c.groups[c.group].patterns.size();
    std::vector<std::uint32_t> bits(size);
    std::iota(bits.begin(), bits.end(), 0U);
    std::shuffle(bits.begin(), bits.end(), rng);
    auto take = pick(1, std::min<std::size_t>(size, 8));
    for (std::size_t i = 0; i < take; ++i) c.mask |= 1U << bits[i];
    return c;
}

/// Grounding key of `label` under `pattern`.
inline std::vector<sift::ObjectId> key_of(const sift::Label& label, const sift::ActionPattern& pattern) {
    std::vector<sift::ObjectId> key;
    for (auto a : pattern.args) key.push_back(label.args[a]);
    return key;
}

/// Search straight from the definition: some sign map, and per grounding some
/// node valuation, such that member edges go from the complement of their sign
/// to their sign and all other edges keep the value.
inline bool definitional_consistent(const sift::TraceGraph& graph, const sift::PatternGroup& group, std::uint32_t mask,
                                    const std::vector<std::uint8_t>* fixed_signs = nullptr) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < group.patterns.size(); ++i)
        if (mask >> i & 1U) members.push_back(i);
    const auto& names = graph.action_names();
    // Member patterns per edge, grouped by key.
    std::map<std::vector<sift::ObjectId>, std::vector<std::vector<std::size_t>>> by_key;
    for (auto m : members) {
        const auto& p = group.patterns[m];
        for (sift::EdgeId e = 0; e < graph.edge_count(); ++e) {
            const auto& l = graph.label(graph.edge(e).label);
            if (names[l.name] != p.action) continue;
            auto& slots = by_key[key_of(l, p)];
            slots.resize(graph.edge_count());
            slots[e].push_back(m);
        }
    }
    auto nodes = graph.node_count();
    auto sat_for = [&](const std::vector<std::uint8_t>& sign) {
        for (const auto& [key, slots] : by_key) {
            bool found = false;
            for (std::uint64_t val = 0; val < (std::uint64_t{1} << nodes) && !found; ++val) {
                bool ok = true;
                for (sift::EdgeId e = 0; e < graph.edge_count() && ok; ++e) {
                    const auto& ed = graph.edge(e);
                    int vs = static_cast<int>(val >> ed.src & 1U), vd = static_cast<int>(val >> ed.dst & 1U);
                    if (slots[e].empty()) {
                        ok = vs == vd;
                    } else {
                        for (auto m : slots[e]) ok = ok && vd == sign[m] && vs != sign[m];
                    }
                }
                found = ok;
            }
            if (!found) return false;
        }
        return true;
    };
    if (fixed_signs) return sat_for(*fixed_signs);
    std::vector<std::uint8_t> sign(group.patterns.size(), 0);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << members.size()); ++s) {
        for (std::size_t j = 0; j < members.size(); ++j) sign[members[j]] = static_cast<std::uint8_t>(s >> j & 1U);
        if (sat_for(sign)) return true;
    }
    return false;
}

/// BFS-tree paths from the initial node to up to `limit` nodes, shortest first.
inline std::vector<std::vector<sift::GroundAction>> bfs_paths(const sift::TraceGraph& graph, std::size_t limit) {
    std::vector<std::vector<sift::GroundAction>> out;
    if (graph.initial_nodes().empty()) return out;
    std::vector<std::vector<sift::EdgeId>> adj(graph.node_count());
    for (sift::EdgeId e = 0; e < graph.edge_count(); ++e) adj[graph.edge(e).src].push_back(e);
    std::vector<std::int64_t> parent(graph.node_count(), -2);
    auto root = graph.initial_nodes().front();
    parent[root] = -1;
    std::vector<sift::NodeId> order{root};
    for (std::size_t i = 0; i < order.size() && order.size() < limit; ++i)
        for (auto e : adj[order[i]]) {
            auto d = graph.edge(e).dst;
            if (parent[d] != -2) continue;
            parent[d] = e;
            order.push_back(d);
            if (order.size() >= limit) break;
        }
    for (auto n : order) {
        std::vector<sift::GroundAction> path;
        for (auto cur = n; parent[cur] >= 0;) {
            const auto& e = graph.edge(static_cast<sift::EdgeId>(parent[cur]));
            path.push_back(graph.ground_action(e.label));
            cur = e.src;
        }
        std::reverse(path.begin(), path.end());
        out.push_back(std::move(path));
    }
    return out;
}

}  // namespace testing
