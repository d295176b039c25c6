#pragma once

#include <cstdint>
#include <string>

#include "strips.hpp"
#include "trace_graph.hpp"

namespace sift {

enum class SampleKind { traces, partial_graph, full_graph };

std::string to_string(SampleKind kind);
SampleKind parse_sample_kind(std::string_view text);

struct SampleConfig {
    SampleKind kind = SampleKind::traces;
    std::size_t n = 5;             // trace count
    std::size_t length = 100;      // trace length; also the root-walk scale for partial graphs
    std::uint64_t seed = 0;
    std::size_t bfs_budget = 100;  // edges per root
    std::size_t sample_roots = 1;
    std::size_t node_cap = 4'000'000;

    /// Throws ConfigError on out-of-range values for the chosen kind.
    void validate() const;
};

/// Training or test input together with the hidden state of every node.
struct Sample {
    TraceGraph graph;
    std::vector<State> hidden;
};

Sample sample_traces(const GroundTask& task, const SampleConfig& cfg);
Sample bfs_partial_graph(const GroundTask& task, const SampleConfig& cfg);
Sample full_state_graph(const GroundTask& task, std::size_t node_cap = 4'000'000);
Sample generate_sample(const GroundTask& task, const SampleConfig& cfg);

}  // namespace sift
