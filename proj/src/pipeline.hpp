#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "learner.hpp"
#include "sampling.hpp"
#include "strips.hpp"
#include "verify.hpp"

namespace sift {

/// Expected figures of one regime, as reported for the experiment suite.
struct RegimeExpectation {
    double admissible = 0;
    double verif = 1.0;
};

struct BenchmarkEntry {
    std::string name;
    std::filesystem::path domain, train, test;
    std::size_t objects = 0;
    std::size_t predicates = 0;  // dynamic hidden predicates
    std::size_t candidates = 0;
    std::size_t full_nodes = 0, full_edges = 0;
    RegimeExpectation full;
    std::size_t partial_edges = 0, partial_roots = 5;
    RegimeExpectation partial;
    std::size_t trace_count = 5, trace_length = 0;
    RegimeExpectation traces;
    std::vector<RegimeExpectation> trace_ablation;  // index i: i+1 traces

    RegimeExpectation expected(SampleKind kind) const;
};

/// SIFT_BENCHMARK_DIR when set, else the bundled directory.
std::filesystem::path benchmark_dir();
std::vector<BenchmarkEntry> list_benchmarks(const std::filesystem::path& dir = benchmark_dir());
/// Throws ConfigError for unknown names.
BenchmarkEntry find_benchmark(const std::string& name, const std::filesystem::path& dir = benchmark_dir());

struct Problem {
    std::string name;
    StripsDomain domain;
    StripsInstance train;
    std::optional<StripsInstance> test;
};

Problem load_problem(const std::string& name, const std::filesystem::path& domain, const std::filesystem::path& train,
                     const std::optional<std::filesystem::path>& test);
Problem load_problem(const BenchmarkEntry& entry);

/// Sampling parameters of a regime for this benchmark; the seed is left at 0.
SampleConfig regime_config(const BenchmarkEntry& entry, SampleKind kind);

struct PipelineConfig {
    SampleConfig train;                 // seed is replaced per run
    std::vector<SampleConfig> tests;    // drawn once from the test instance
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    LearnConfig learn;
};

/// Verification inputs: plain traces plus a partial graph.
std::vector<SampleConfig> default_test_configs(const BenchmarkEntry& entry);

struct RunResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t traces = 0;
    std::size_t candidates = 0;
    std::size_t admissible = 0;
    bool verified = false;
    VerificationReport report;
    double seconds = 0;
};

struct PipelineRow {
    std::string name;
    SampleKind kind = SampleKind::traces;
    std::uint64_t seed = 0;
    std::vector<RunResult> runs;

    double mean_admissible() const;
    double mean_edges() const;
    /// Edges per trace; the column reported for the trace regime.
    double mean_trace_length() const;
    double mean_seconds() const;
    double verif() const;

    /// Deterministic: no timings.
    std::string to_json() const;
    /// Table-style line including timings.
    std::string to_text() const;
};

std::vector<NamedSample> generate_tests(const Problem& problem, const std::vector<SampleConfig>& tests,
                                        std::uint64_t seed);

PipelineRow run_pipeline(const Problem& problem, const PipelineConfig& config);

}  // namespace sift
