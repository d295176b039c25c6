#include "sift/sift.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "error.hpp"
#include "learner.hpp"
#include "pddl.hpp"
#include "pipeline.hpp"
#include "sampling.hpp"
#include "verify.hpp"

struct sift_problem {
    sift::Problem problem;
};

struct sift_sample {
    sift::Sample sample;
    const sift_problem* source = nullptr;  // problem whose test instance produced the hidden states
};

struct sift_model {
    sift::LearnedModel model;
};

struct sift_report {
    sift::VerificationReport report;
};

namespace {

thread_local std::string last_error;
thread_local std::optional<sift::SourceSpan> last_span;

sift_status fail(sift_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

/// Maps library exceptions to status codes.
template <typename Fn>
sift_status guarded(Fn&& fn) {
    last_error.clear();
    last_span.reset();
    try {
        fn();
        return SIFT_OK;
    } catch (const sift::ParseError& e) {
        last_span = e.span();
        return fail(SIFT_ERR_PARSE, e.what());
    } catch (const sift::StructuralError& e) {
        return fail(SIFT_ERR_STRUCTURAL, e.what());
    } catch (const sift::InapplicableActionError& e) {
        return fail(SIFT_ERR_INAPPLICABLE, e.what());
    } catch (const sift::LimitError& e) {
        return fail(SIFT_ERR_LIMIT, e.what());
    } catch (const sift::ConfigError& e) {
        return fail(SIFT_ERR_CONFIG, e.what());
    } catch (const sift::GenerationError& e) {
        return fail(SIFT_ERR_GENERATION, e.what());
    } catch (const sift::EmptyInputError& e) {
        return fail(SIFT_ERR_EMPTY_INPUT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SIFT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SIFT_ERR_INTERNAL, e.what());
    }
}

char* dup(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

sift::SampleConfig to_cpp(const sift_sample_config& c) {
    sift::SampleConfig out;
    switch (c.kind) {
        case SIFT_SAMPLE_TRACES: out.kind = sift::SampleKind::traces; break;
        case SIFT_SAMPLE_PARTIAL: out.kind = sift::SampleKind::partial_graph; break;
        case SIFT_SAMPLE_FULL: out.kind = sift::SampleKind::full_graph; break;
        default: throw sift::ConfigError("unknown sample kind");
    }
    out.n = c.n;
    out.length = c.length;
    out.seed = c.seed;
    out.bfs_budget = c.bfs_budget;
    out.sample_roots = c.sample_roots;
    out.node_cap = c.node_cap;
    return out;
}

sift_sample_config to_c(const sift::SampleConfig& c) {
    sift_sample_config out{};
    out.kind = c.kind == sift::SampleKind::traces          ? SIFT_SAMPLE_TRACES
               : c.kind == sift::SampleKind::partial_graph ? SIFT_SAMPLE_PARTIAL
                                                         : SIFT_SAMPLE_FULL;
    out.n = c.n;
    out.length = c.length;
    out.seed = c.seed;
    out.bfs_budget = c.bfs_budget;
    out.sample_roots = c.sample_roots;
    out.node_cap = c.node_cap;
    return out;
}

sift::LearnConfig to_cpp(const sift_learn_config& c) {
    sift::LearnConfig out;
    if (c.max_arity >= 0) out.max_arity = static_cast<std::size_t>(c.max_arity);
    out.group_cap = c.group_cap;
    out.workers = c.workers ? c.workers : 1;
    if (c.domain_name && *c.domain_name) out.domain_name = c.domain_name;
    if (out.group_cap == 0 || out.group_cap > 31) throw sift::ConfigError("group cap must be in 1..31");
    return out;
}

#define SIFT_REQUIRE(cond)                                                   \
    do {                                                                     \
        if (!(cond)) return fail(SIFT_ERR_ARGUMENT, "invalid argument: " #cond); \
    } while (0)

}  // namespace

extern "C" {

const char* sift_version(void) { return "1.0.0"; }

const char* sift_last_error(void) { return last_error.c_str(); }

int sift_last_error_span(size_t* line, size_t* column, size_t* start, size_t* end) {
    if (!last_span) return 0;
    if (line) *line = last_span->line;
    if (column) *column = last_span->column;
    if (start) *start = last_span->start;
    if (end) *end = last_span->end;
    return 1;
}

void sift_string_free(char* s) { std::free(s); }

void sift_sample_config_default(sift_sample_config* config) {
    if (config) *config = to_c(sift::SampleConfig{});
}

void sift_learn_config_default(sift_learn_config* config) {
    if (!config) return;
    config->max_arity = -1;
    config->group_cap = 20;
    config->workers = 1;
    config->domain_name = nullptr;
}

sift_status sift_domain_normalize(const char* domain_pddl, char** out) {
    SIFT_REQUIRE(domain_pddl && out);
    return guarded([&] { *out = dup(sift::emit_domain(sift::parse_domain(domain_pddl))); });
}

sift_status sift_problem_create(const char* domain_pddl, const char* train_pddl, const char* test_pddl,
                                sift_problem** out) {
    SIFT_REQUIRE(domain_pddl && train_pddl && out);
    return guarded([&] {
        auto p = std::make_unique<sift_problem>();
        p->problem.domain = sift::parse_domain(domain_pddl);
        p->problem.name = p->problem.domain.name;
        p->problem.train = sift::parse_instance(train_pddl, p->problem.domain);
        if (test_pddl) p->problem.test = sift::parse_instance(test_pddl, p->problem.domain);
        *out = p.release();
    });
}

void sift_problem_free(sift_problem* problem) { delete problem; }

sift_status sift_generate(const sift_problem* problem, const sift_sample_config* config, int from_test,
                          sift_sample** out) {
    SIFT_REQUIRE(problem && config && out);
    SIFT_REQUIRE(!from_test || problem->problem.test);
    return guarded([&] {
        const auto& inst = from_test ? *problem->problem.test : problem->problem.train;
        sift::GroundTask task(problem->problem.domain, inst);
        auto s = std::make_unique<sift_sample>();
        s->sample = sift::generate_sample(task, to_cpp(*config));
        if (from_test) s->source = problem;
        *out = s.release();
    });
}

sift_status sift_sample_read(const char* tracegraph_json, sift_sample** out) {
    SIFT_REQUIRE(tracegraph_json && out);
    return guarded([&] {
        auto s = std::make_unique<sift_sample>();
        s->sample.graph = sift::read_tracegraph(tracegraph_json);
        *out = s.release();
    });
}

sift_status sift_sample_read_plain(const char* traces_text, sift_sample** out) {
    SIFT_REQUIRE(traces_text && out);
    return guarded([&] {
        auto traces = sift::read_plain_traces(traces_text);
        auto s = std::make_unique<sift_sample>();
        s->sample.graph = sift::from_traces(traces, true);
        *out = s.release();
    });
}

sift_status sift_sample_write(const sift_sample* sample, char** out) {
    SIFT_REQUIRE(sample && out);
    return guarded([&] { *out = dup(sift::write_tracegraph(sample->sample.graph)); });
}

size_t sift_sample_node_count(const sift_sample* sample) { return sample ? sample->sample.graph.node_count() : 0; }
size_t sift_sample_edge_count(const sift_sample* sample) { return sample ? sample->sample.graph.edge_count() : 0; }
size_t sift_sample_trace_count(const sift_sample* sample) {
    return sample ? sample->sample.graph.traces().size() : 0;
}
void sift_sample_free(sift_sample* sample) { delete sample; }

sift_status sift_learn(const sift_sample* sample, const sift_learn_config* config, sift_model** out) {
    SIFT_REQUIRE(sample && out);
    return guarded([&] {
        sift_learn_config c;
        sift_learn_config_default(&c);
        if (config) c = *config;
        auto m = std::make_unique<sift_model>();
        m->model = sift::learn(sample->sample.graph, to_cpp(c));
        *out = m.release();
    });
}

sift_status sift_model_read(const char* domain_pddl, const char* sidecar_json, const char* instance_pddl,
                            sift_model** out) {
    SIFT_REQUIRE(domain_pddl && sidecar_json && out);
    return guarded([&] {
        auto m = std::make_unique<sift_model>();
        std::optional<std::string_view> inst;
        if (instance_pddl) inst = instance_pddl;
        m->model = sift::read_learned(domain_pddl, sidecar_json, inst);
        *out = m.release();
    });
}

sift_status sift_model_domain(const sift_model* model, char** out) {
    SIFT_REQUIRE(model && out);
    return guarded([&] { *out = dup(sift::emit_domain(model->model.domain)); });
}

sift_status sift_model_instance(const sift_model* model, char** out) {
    SIFT_REQUIRE(model && out);
    if (!model->model.instance) return fail(SIFT_ERR_STRUCTURAL, "input has no initial node");
    return guarded([&] { *out = dup(sift::emit_instance(*model->model.instance)); });
}

sift_status sift_model_sidecar(const sift_model* model, char** out) {
    SIFT_REQUIRE(model && out);
    return guarded([&] { *out = dup(sift::write_sidecar(model->model)); });
}

size_t sift_model_candidate_count(const sift_model* model) { return model ? model->model.stats.candidates : 0; }
size_t sift_model_admissible_count(const sift_model* model) { return model ? model->model.predicates.size() : 0; }

void sift_model_timings(const sift_model* model, double* features, double* pruning, double* build) {
    if (!model) return;
    if (features) *features = model->model.stats.seconds_features;
    if (pruning) *pruning = model->model.stats.seconds_pruning;
    if (build) *build = model->model.stats.seconds_build;
}

void sift_model_free(sift_model* model) { delete model; }

sift_status sift_verify(const sift_model* model, const sift_problem* problem, const sift_sample* const* tests,
                        size_t test_count, size_t workers, sift_report** out) {
    SIFT_REQUIRE(model && out && (tests || test_count == 0));
    for (size_t i = 0; i < test_count; ++i) SIFT_REQUIRE(tests[i]);
    return guarded([&] {
        auto r = std::make_unique<sift_report>();
        std::optional<sift::GroundTask> hidden;
        if (problem && problem->problem.test) hidden.emplace(problem->problem.domain, *problem->problem.test);
        auto w = workers ? workers : 1;
        for (size_t i = 0; i < test_count; ++i) {
            const auto& s = *tests[i];
            sift::InputReport in;
            in.name = "input" + std::to_string(i);
            in.compatibility = sift::check_compatibility(model->model, s.sample.graph, w);
            if (hidden && s.source == problem)
                in.inapplicability = sift::check_inapplicability(model->model, *hidden, s.sample, w);
            r->report.inputs.push_back(std::move(in));
        }
        *out = r.release();
    });
}

int sift_report_passed(const sift_report* report) { return report && report->report.passed() ? 1 : 0; }

sift_status sift_report_json(const sift_report* report, char** out) {
    SIFT_REQUIRE(report && out);
    return guarded([&] { *out = dup(report->report.to_json()); });
}

void sift_report_free(sift_report* report) { delete report; }

sift_status sift_benchmarks(char** out) {
    SIFT_REQUIRE(out);
    return guarded([&] {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& e : sift::list_benchmarks()) {
            j.push_back({{"name", e.name},
                         {"domain", e.domain.string()},
                         {"train", e.train.string()},
                         {"test", e.test.string()},
                         {"objects", e.objects},
                         {"predicates", e.predicates},
                         {"candidates", e.candidates},
                         {"full_nodes", e.full_nodes},
                         {"full_edges", e.full_edges}});
        }
        *out = dup(j.dump(1) + "\n");
    });
}

sift_status sift_benchmark_problem(const char* name, sift_problem** out) {
    SIFT_REQUIRE(name && out);
    return guarded([&] {
        auto p = std::make_unique<sift_problem>();
        p->problem = sift::load_problem(sift::find_benchmark(name));
        *out = p.release();
    });
}

sift_status sift_benchmark_sample_config(const char* name, sift_sample_kind kind, sift_sample_config* out) {
    SIFT_REQUIRE(name && out);
    return guarded([&] {
        sift_sample_config probe{};
        probe.kind = kind;
        auto k = to_cpp(probe).kind;
        *out = to_c(sift::regime_config(sift::find_benchmark(name), k));
    });
}

sift_status sift_pipeline(const sift_problem* problem, const sift_pipeline_config* config, char** row_json,
                          char** row_text, double* verif_rate) {
    SIFT_REQUIRE(problem && config && (config->tests || config->test_count == 0));
    return guarded([&] {
        sift::PipelineConfig c;
        c.train = to_cpp(config->train);
        for (size_t i = 0; i < config->test_count; ++i) c.tests.push_back(to_cpp(config->tests[i]));
        c.runs = config->runs;
        c.seed = config->seed;
        c.workers = config->workers ? config->workers : 1;
        c.learn = to_cpp(config->learn);
        auto row = sift::run_pipeline(problem->problem, c);
        std::unique_ptr<char, decltype(&std::free)> json(dup(row.to_json()), &std::free);
        std::unique_ptr<char, decltype(&std::free)> text(dup(row.to_text()), &std::free);
        if (verif_rate) *verif_rate = row.verif();
        if (row_json) *row_json = json.release();
        if (row_text) *row_text = text.release();
    });
}

}  // extern "C"
