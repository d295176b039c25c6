#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "pddl.hpp"
#include "util.hpp"

#ifndef SIFT_DEFAULT_BENCHMARK_DIR
#define SIFT_DEFAULT_BENCHMARK_DIR "benchmarks"
#endif

namespace sift {
namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RegimeExpectation expectation(const nlohmann::json& j) {
    return {j.value("admissible", 0.0), j.value("verif", 1.0)};
}

template <typename F>
double mean(const std::vector<RunResult>& runs, F&& f) {
    if (runs.empty()) return 0;
    double sum = 0;
    for (const auto& r : runs) sum += f(r);
    return sum / static_cast<double>(runs.size());
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

RegimeExpectation BenchmarkEntry::expected(SampleKind kind) const {
    switch (kind) {
        case SampleKind::traces: return traces;
        case SampleKind::partial_graph: return partial;
        case SampleKind::full_graph: return full;
    }
    return {};
}

std::filesystem::path benchmark_dir() {
    if (const char* env = std::getenv("SIFT_BENCHMARK_DIR"); env && *env) return env;
    return SIFT_DEFAULT_BENCHMARK_DIR;
}

std::vector<BenchmarkEntry> list_benchmarks(const std::filesystem::path& dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("benchmark manifest: " + std::string(e.what()));
    }
    std::vector<BenchmarkEntry> out;
    try {
        for (const auto& b : j.at("benchmarks")) {
            BenchmarkEntry e;
            e.name = b.at("name").get<std::string>();
            e.domain = dir / b.at("domain").get<std::string>();
            e.train = dir / b.at("train").get<std::string>();
            e.test = dir / b.at("test").get<std::string>();
            e.objects = b.value("objects", 0U);
            e.predicates = b.value("predicates", 0U);
            e.candidates = b.value("candidates", 0U);
            const auto& full = b.at("full");
            e.full_nodes = full.value("nodes", 0U);
            e.full_edges = full.value("edges", 0U);
            e.full = expectation(full);
            const auto& partial = b.at("partial");
            e.partial_edges = partial.at("edges").get<std::size_t>();
            e.partial_roots = partial.value("roots", 5U);
            e.partial = expectation(partial);
            const auto& traces = b.at("traces");
            e.trace_count = traces.value("n", 5U);
            e.trace_length = traces.at("length").get<std::size_t>();
            e.traces = expectation(traces);
            if (b.contains("trace_ablation"))
                for (const auto& a : b["trace_ablation"]) e.trace_ablation.push_back(expectation(a));
            out.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("benchmark manifest: " + std::string(e.what()));
    }
    return out;
}

BenchmarkEntry find_benchmark(const std::string& name, const std::filesystem::path& dir) {
    for (auto& e : list_benchmarks(dir))
        if (e.name == name) return e;
    throw ConfigError("unknown benchmark '" + name + "'");
}

Problem load_problem(const std::string& name, const std::filesystem::path& domain, const std::filesystem::path& train,
                     const std::optional<std::filesystem::path>& test) {
    Problem p;
    p.name = name;
    p.domain = parse_domain(read_file(domain));
    p.train = parse_instance(read_file(train), p.domain);
    if (test) p.test = parse_instance(read_file(*test), p.domain);
    return p;
}

Problem load_problem(const BenchmarkEntry& entry) {
    return load_problem(entry.name, entry.domain, entry.train, entry.test);
}

SampleConfig regime_config(const BenchmarkEntry& entry, SampleKind kind) {
    SampleConfig c;
    c.kind = kind;
    c.n = entry.trace_count;
    c.length = entry.trace_length;
    c.bfs_budget = entry.partial_edges;
    c.sample_roots = entry.partial_roots;
    return c;
}

std::vector<SampleConfig> default_test_configs(const BenchmarkEntry& entry) {
    return {regime_config(entry, SampleKind::traces), regime_config(entry, SampleKind::partial_graph)};
}

std::vector<NamedSample> generate_tests(const Problem& problem, const std::vector<SampleConfig>& tests,
                                        std::uint64_t seed) {
    std::vector<NamedSample> out;
    if (tests.empty()) return out;
    if (!problem.test) throw ConfigError("verification needs a test instance");
    GroundTask task(problem.domain, *problem.test);
    for (std::size_t i = 0; i < tests.size(); ++i) {
        auto cfg = tests[i];
        cfg.seed = derive_seed(seed, "test", i);
        out.push_back({to_string(cfg.kind), generate_sample(task, cfg)});
    }
    return out;
}

PipelineRow run_pipeline(const Problem& problem, const PipelineConfig& config) {
    if (config.runs == 0) throw ConfigError("at least one run is required");
    config.train.validate();
    for (const auto& t : config.tests) t.validate();
    PipelineRow row;
    row.name = problem.name;
    row.kind = config.train.kind;
    row.seed = config.seed;

    GroundTask train_task(problem.domain, problem.train);
    auto tests = generate_tests(problem, config.tests, config.seed);
    std::optional<GroundTask> test_task;
    if (problem.test) test_task.emplace(problem.domain, *problem.test);

    // Spread runs over the workers; a single run gets them all.
    auto outer = config.runs > 1 ? config.workers : 1;
    auto inner = config.runs > 1 ? 1 : config.workers;
    row.runs.resize(config.runs);
    parallel_for(config.runs, outer, [&](std::size_t r) {
        auto t0 = std::chrono::steady_clock::now();
        auto& out = row.runs[r];
        out.index = r;
        out.seed = derive_seed(config.seed, "run", r);
        auto cfg = config.train;
        cfg.seed = out.seed;
        auto sample = generate_sample(train_task, cfg);
        out.nodes = sample.graph.node_count();
        out.edges = sample.graph.edge_count();
        out.traces = sample.graph.traces().size();
        auto lc = config.learn;
        lc.workers = inner;
        if (lc.domain_name == LearnConfig{}.domain_name) lc.domain_name = problem.name + "-learned";
        auto model = learn(sample.graph, lc);
        out.candidates = model.stats.candidates;
        out.admissible = model.stats.admissible;
        if (test_task) out.report = verify(model, *test_task, tests, inner);
        out.verified = out.report.passed();
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return row;
}

double PipelineRow::mean_admissible() const {
    return mean(runs, [](const RunResult& r) { return static_cast<double>(r.admissible); });
}

double PipelineRow::mean_edges() const {
    return mean(runs, [](const RunResult& r) { return static_cast<double>(r.edges); });
}

double PipelineRow::mean_trace_length() const {
    return mean(runs, [](const RunResult& r) {
        return r.traces ? static_cast<double>(r.edges) / static_cast<double>(r.traces) : 0.0;
    });
}

double PipelineRow::mean_seconds() const {
    return mean(runs, [](const RunResult& r) { return r.seconds; });
}

double PipelineRow::verif() const {
    auto ok = std::make_unique<bool[]>(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) ok[i] = runs[i].verified;
    return verification_rate({ok.get(), runs.size()});
}

std::string PipelineRow::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["benchmark"] = name;
    j["kind"] = to_string(kind);
    j["seed"] = seed;
    j["runs"] = runs.size();
    j["mean_admissible"] = fixed(mean_admissible(), 2);
    j["mean_edges"] = fixed(kind == SampleKind::traces ? mean_trace_length() : mean_edges(), 1);
    j["verif"] = fixed(verif(), 4);
    j["per_run"] = ordered_json::array();
    for (const auto& r : runs) {
        ordered_json rj;
        rj["run"] = r.index;
        rj["seed"] = r.seed;
        rj["nodes"] = r.nodes;
        rj["edges"] = r.edges;
        rj["candidates"] = r.candidates;
        rj["admissible"] = r.admissible;
        rj["verified"] = r.verified;
        std::size_t failures = 0;
        for (const auto& in : r.report.inputs) failures += in.compatibility.failures + in.inapplicability.failures;
        rj["failures"] = failures;
        j["per_run"].push_back(std::move(rj));
    }
    return j.dump(1) + "\n";
}

std::string PipelineRow::to_text() const {
    auto e = kind == SampleKind::traces ? mean_trace_length() : mean_edges();
    return name + "  " + to_string(kind) + "  runs " + std::to_string(runs.size()) + "  #F_a " +
           fixed(mean_admissible(), 1) + "  #E " + fixed(e, 0) + "  time " + fixed(mean_seconds(), 2) +
           "s  Verif " + fixed(100.0 * verif(), 0) + "%";
}

}  // namespace sift
