#include "sampling.hpp"

#include <deque>
#include <unordered_map>

#include "error.hpp"
#include "util.hpp"

namespace sift {

std::string to_string(SampleKind kind) {
    switch (kind) {
        case SampleKind::traces: return "traces";
        case SampleKind::partial_graph: return "partial";
        case SampleKind::full_graph: return "full";
    }
    return "?";
}

SampleKind parse_sample_kind(std::string_view text) {
    if (text == "traces") return SampleKind::traces;
    if (text == "partial" || text == "partial_graph") return SampleKind::partial_graph;
    if (text == "full" || text == "full_graph") return SampleKind::full_graph;
    throw ConfigError("unknown sample kind '" + std::string(text) + "'");
}

void SampleConfig::validate() const {
    switch (kind) {
        case SampleKind::traces:
            if (n < 1) throw ConfigError("trace count must be at least 1");
            if (length < 1) throw ConfigError("trace length must be at least 1");
            break;
        case SampleKind::partial_graph:
            if (bfs_budget < 1) throw ConfigError("BFS budget must be positive");
            if (sample_roots < 1) throw ConfigError("root count must be at least 1");
            if (sample_roots > 1 && length < 1) throw ConfigError("root walk length must be at least 1");
            break;
        case SampleKind::full_graph:
            if (node_cap < 1) throw ConfigError("node cap must be positive");
            break;
    }
}

namespace {

/// Uniform random walk of up to `steps` steps; stops early at a dead end.
State random_walk(const GroundTask& task, State s, std::size_t steps, Rng& rng) {
    for (std::size_t i = 0; i < steps; ++i) {
        auto app = task.applicable(s);
        if (app.empty()) break;
        s = task.apply(s, app[uniform_int(rng, 0, app.size() - 1)]);
    }
    return s;
}

std::size_t walk_length(std::size_t length, Rng& rng) { return uniform_int(rng, 2 * length, 5 * length); }

}  // namespace

Sample sample_traces(const GroundTask& task, const SampleConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "traces"));
    Sample out;
    auto s0 = task.initial_state();
    if (task.applicable(s0).empty()) throw GenerationError("initial state has no applicable action");
    for (std::size_t t = 0; t < cfg.n; ++t) {
        State s = t == 0 ? s0 : random_walk(task, s0, walk_length(cfg.length, rng), rng);
        NodeId cur = out.graph.add_node();
        out.hidden.push_back(s);
        if (t == 0) out.graph.mark_initial(cur);
        std::vector<EdgeId> ids;
        bool truncated = false;
        for (std::size_t step = 0; step < cfg.length; ++step) {
            auto app = task.applicable(s);
            if (app.empty()) {
                truncated = true;
                break;
            }
            auto a = app[uniform_int(rng, 0, app.size() - 1)];
            s = task.apply(s, a);
            NodeId next = out.graph.add_node();
            out.hidden.push_back(s);
            ids.push_back(out.graph.add_edge(cur, next, task.ground_action(a)));
            cur = next;
        }
        out.graph.add_trace(std::move(ids), truncated);
    }
    return out;
}

namespace {

/// Breadth-first expansion from `root` until `budget` edges exist or the space
/// is exhausted. States are deduplicated within this expansion only.
void expand(const GroundTask& task, const State& root, std::size_t budget, bool cap_nodes, std::size_t node_cap,
            bool flag_initial, Sample& out) {
    std::unordered_map<State, NodeId, StateHash> seen;
    std::deque<std::pair<State, NodeId>> frontier;
    auto intern = [&](const State& s) -> std::pair<NodeId, bool> {
        auto it = seen.find(s);
        if (it != seen.end()) return {it->second, false};
        if (cap_nodes && seen.size() >= node_cap)
            throw LimitError("state graph exceeds the node cap of " + std::to_string(node_cap));
        NodeId id = out.graph.add_node();
        out.hidden.push_back(s);
        seen.emplace(s, id);
        return {id, true};
    };
    auto [root_id, _] = intern(root);
    if (flag_initial) out.graph.mark_initial(root_id);
    frontier.emplace_back(root, root_id);
    std::size_t edges = 0;
    while (!frontier.empty() && edges < budget) {
        auto [s, id] = std::move(frontier.front());
        frontier.pop_front();
        for (auto a : task.applicable(s)) {
            if (edges >= budget) break;
            State next = task.apply(s, a);
            auto [nid, fresh] = intern(next);
            if (fresh) frontier.emplace_back(std::move(next), nid);
            auto e = out.graph.add_edge(id, nid, task.ground_action(a));
            out.graph.add_trace({e});
            ++edges;
        }
    }
}

}  // namespace

Sample bfs_partial_graph(const GroundTask& task, const SampleConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "partial"));
    Sample out;
    auto s0 = task.initial_state();
    for (std::size_t r = 0; r < cfg.sample_roots; ++r) {
        State root = r == 0 ? s0 : random_walk(task, s0, walk_length(cfg.length, rng), rng);
        expand(task, root, cfg.bfs_budget, false, 0, r == 0, out);
    }
    return out;
}

Sample full_state_graph(const GroundTask& task, std::size_t node_cap) {
    Sample out;
    expand(task, task.initial_state(), SIZE_MAX, true, node_cap, true, out);
    return out;
}

Sample generate_sample(const GroundTask& task, const SampleConfig& cfg) {
    switch (cfg.kind) {
        case SampleKind::traces: return sample_traces(task, cfg);
        case SampleKind::partial_graph: return bfs_partial_graph(task, cfg);
        case SampleKind::full_graph: cfg.validate(); return full_state_graph(task, cfg.node_cap);
    }
    throw ConfigError("unknown sample kind");
}

}  // namespace sift
