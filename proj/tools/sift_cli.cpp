#include <sift/sift.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

enum Exit : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_generation = 3,
    exit_empty = 4,
    exit_threshold = 5,
};

/// Carries an exit code out of a subcommand.
struct Failure : std::runtime_error {
    int code;
    Failure(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

int exit_code(sift_status s) {
    switch (s) {
        case SIFT_OK: return exit_ok;
        case SIFT_ERR_ARGUMENT:
        case SIFT_ERR_PARSE:
        case SIFT_ERR_CONFIG: return exit_config;
        case SIFT_ERR_STRUCTURAL:
        case SIFT_ERR_INAPPLICABLE:
        case SIFT_ERR_LIMIT:
        case SIFT_ERR_GENERATION: return exit_generation;
        case SIFT_ERR_EMPTY_INPUT: return exit_empty;
        default: return exit_internal;
    }
}

void check(sift_status s, const std::string& what) {
    if (s == SIFT_OK) return;
    std::string msg = what + ": " + sift_last_error();
    size_t line = 0, column = 0;
    if (s == SIFT_ERR_PARSE && sift_last_error_span(&line, &column, nullptr, nullptr))
        msg += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    throw Failure(exit_code(s), msg);
}

struct Freer {
    void operator()(sift_problem* p) const { sift_problem_free(p); }
    void operator()(sift_sample* p) const { sift_sample_free(p); }
    void operator()(sift_model* p) const { sift_model_free(p); }
    void operator()(sift_report* p) const { sift_report_free(p); }
};
using Problem = std::unique_ptr<sift_problem, Freer>;
using Sample = std::unique_ptr<sift_sample, Freer>;
using Model = std::unique_ptr<sift_model, Freer>;
using Report = std::unique_ptr<sift_report, Freer>;

/// Takes ownership of a string returned by the library.
std::string take(char* s) {
    std::string out = s ? s : "";
    sift_string_free(s);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Failure(exit_config, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text)) throw Failure(exit_config, "cannot write " + p.string());
}

std::size_t default_workers() {
    if (const char* env = std::getenv("SIFT_WORKERS"); env && *env) {
        char* end = nullptr;
        auto v = std::strtoul(env, &end, 10);
        if (*end || v == 0) throw Failure(exit_config, "SIFT_WORKERS must be a positive integer");
        return v;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Hidden problem: a bundled benchmark or explicit files.
struct ProblemArgs {
    std::string benchmark;
    std::string domain, train, test;

    void add(CLI::App& app, bool need_train = true) {
        app.add_option("--benchmark,-b", benchmark, "bundled benchmark name");
        app.add_option("--domain", domain, "hidden domain file");
        if (need_train) app.add_option("--train", train, "training instance file");
        app.add_option("--test", test, "test instance file");
    }

    Problem load() const {
        sift_problem* p = nullptr;
        if (!benchmark.empty()) {
            check(sift_benchmark_problem(benchmark.c_str(), &p), "benchmark");
            return Problem(p);
        }
        if (domain.empty()) throw Failure(exit_config, "either --benchmark or --domain is required");
        auto d = read_file(domain);
        // The test instance doubles as the training one when only it is given.
        auto tr = !train.empty() ? read_file(train) : !test.empty() ? read_file(test) : std::string();
        if (tr.empty()) throw Failure(exit_config, "an instance file is required");
        std::optional<std::string> te;
        if (!test.empty()) te = read_file(test);
        check(sift_problem_create(d.c_str(), tr.c_str(), te ? te->c_str() : nullptr, &p), "problem");
        return Problem(p);
    }
};

sift_sample_kind parse_kind(const std::string& k) {
    if (k == "traces") return SIFT_SAMPLE_TRACES;
    if (k == "partial" || k == "partial_graph") return SIFT_SAMPLE_PARTIAL;
    if (k == "full" || k == "full_graph") return SIFT_SAMPLE_FULL;
    throw Failure(exit_config, "unknown sample kind '" + k + "'");
}

/// Sampling flags layered over benchmark regime defaults.
struct SampleArgs {
    std::string kind = "traces";
    std::optional<std::size_t> n, length, budget, roots, node_cap;

    void add(CLI::App& app) {
        app.add_option("--kind", kind, "traces, partial or full")->check(CLI::IsMember({"traces", "partial", "full"}));
        app.add_option("--n", n, "trace count");
        app.add_option("--L,--length", length, "trace length");
        app.add_option("--budget", budget, "BFS edges per root");
        app.add_option("--roots", roots, "BFS roots");
        app.add_option("--node-cap", node_cap, "node cap of full graphs");
    }

    sift_sample_config config(const std::string& benchmark, std::uint64_t seed) const {
        sift_sample_config c;
        sift_sample_config_default(&c);
        c.kind = parse_kind(kind);
        if (!benchmark.empty()) check(sift_benchmark_sample_config(benchmark.c_str(), c.kind, &c), "benchmark");
        if (n) c.n = *n;
        if (length) c.length = *length;
        if (budget) c.bfs_budget = *budget;
        if (roots) c.sample_roots = *roots;
        if (node_cap) c.node_cap = *node_cap;
        c.seed = seed;
        return c;
    }
};

struct GenerateCmd {
    ProblemArgs problem;
    SampleArgs sample;
    std::uint64_t seed = 0;
    bool from_test = false;
    std::string out = ".";

    void add(CLI::App& app) {
        problem.add(app);
        sample.add(app);
        app.add_option("--seed", seed, "master seed")->required();
        app.add_flag("--from-test", from_test, "sample the test instance");
        app.add_option("--out,-o", out, "output directory");
    }

    int run() const {
        auto p = problem.load();
        auto cfg = sample.config(problem.benchmark, seed);
        sift_sample* raw = nullptr;
        check(sift_generate(p.get(), &cfg, from_test ? 1 : 0, &raw), "generate");
        Sample s(raw);
        char* text = nullptr;
        check(sift_sample_write(s.get(), &text), "write");
        auto path = fs::path(out) / "tracegraph.json";
        write_file(path, take(text));
        std::printf("nodes %zu  edges %zu  traces %zu  -> %s\n", sift_sample_node_count(s.get()),
                    sift_sample_edge_count(s.get()), sift_sample_trace_count(s.get()), path.string().c_str());
        return exit_ok;
    }
};

struct LearnCmd {
    std::string input, plain, name = "learned", out = ".";
    std::int64_t max_arity = -1;
    std::size_t group_cap = 20;
    std::size_t workers = 0;

    void add(CLI::App& app) {
        auto* in = app.add_option("--input,-i", input, "tracegraph v1 file");
        auto* pl = app.add_option("--plain", plain, "plain trace file, one action per line");
        in->excludes(pl);
        app.add_option("--max-arity", max_arity, "largest feature arity; negative for the largest action arity");
        app.add_option("--group-cap", group_cap, "largest pattern group solved by bitmask search")
            ->check(CLI::Range(1, 31));
        app.add_option("--name", name, "learned domain name");
        app.add_option("--workers,-j", workers, "worker threads");
        app.add_option("--out,-o", out, "output directory");
    }

    int run() const {
        if (input.empty() == plain.empty()) throw Failure(exit_config, "exactly one of --input or --plain is required");
        sift_sample* raw = nullptr;
        if (!input.empty())
            check(sift_sample_read(read_file(input).c_str(), &raw), "read " + input);
        else
            check(sift_sample_read_plain(read_file(plain).c_str(), &raw), "read " + plain);
        Sample s(raw);

        sift_learn_config lc;
        sift_learn_config_default(&lc);
        lc.max_arity = max_arity;
        lc.group_cap = group_cap;
        lc.workers = workers ? workers : default_workers();
        lc.domain_name = name.c_str();
        sift_model* m = nullptr;
        check(sift_learn(s.get(), &lc, &m), "learn");
        Model model(m);

        fs::path dir(out);
        char* text = nullptr;
        check(sift_model_domain(model.get(), &text), "domain");
        write_file(dir / "domain.pddl", take(text));
        check(sift_model_sidecar(model.get(), &text), "sidecar");
        write_file(dir / "learned.json", take(text));
        if (sift_model_instance(model.get(), &text) == SIFT_OK)
            write_file(dir / "instance.pddl", take(text));
        else
            std::fprintf(stderr, "note: %s; no instance written\n", sift_last_error());

        double tf = 0, tp = 0, tb = 0;
        sift_model_timings(model.get(), &tf, &tp, &tb);
        std::printf("#F %zu  #F_a %zu\n", sift_model_candidate_count(model.get()),
                    sift_model_admissible_count(model.get()));
        std::printf("time features %.3fs  pruning %.3fs  build %.3fs\n", tf, tp, tb);
        return exit_ok;
    }
};

struct VerifyCmd {
    ProblemArgs problem;
    std::string model_dir;
    std::vector<std::string> inputs;
    std::vector<std::string> kinds;
    std::uint64_t seed = 0;
    double threshold = 1.0;
    std::size_t workers = 0;
    std::string out = ".";

    void add(CLI::App& app) {
        problem.add(app, false);
        app.add_option("--model,-m", model_dir, "directory holding domain.pddl, learned.json and instance.pddl")
            ->required();
        app.add_option("--input,-i", inputs, "tracegraph files checked for compatibility only");
        app.add_option("--kind", kinds, "test inputs drawn from the test instance (default: traces partial)")
            ->check(CLI::IsMember({"traces", "partial", "full"}));
        app.add_option("--seed", seed, "seed of generated test inputs");
        app.add_option("--threshold", threshold, "required fraction of passed obligations")->check(CLI::Range(0.0, 1.0));
        app.add_option("--workers,-j", workers, "worker threads");
        app.add_option("--out,-o", out, "output directory");
    }

    int run() const {
        fs::path dir(model_dir);
        auto domain = read_file(dir / "domain.pddl");
        auto sidecar = read_file(dir / "learned.json");
        std::optional<std::string> instance;
        if (fs::exists(dir / "instance.pddl")) instance = read_file(dir / "instance.pddl");
        sift_model* m = nullptr;
        check(sift_model_read(domain.c_str(), sidecar.c_str(), instance ? instance->c_str() : nullptr, &m), "model");
        Model model(m);

        std::vector<Sample> tests;
        for (const auto& f : inputs) {
            sift_sample* s = nullptr;
            check(sift_sample_read(read_file(f).c_str(), &s), "read " + f);
            tests.emplace_back(s);
        }
        Problem p;
        bool generate = !kinds.empty() || inputs.empty();
        if (!problem.benchmark.empty() || !problem.domain.empty()) p = problem.load();
        if (generate) {
            if (!p) throw Failure(exit_config, "generated test inputs need --benchmark or --domain with --test");
            auto ks = kinds.empty() ? std::vector<std::string>{"traces", "partial"} : kinds;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                SampleArgs sa;
                sa.kind = ks[i];
                auto cfg = sa.config(problem.benchmark, seed + i);
                sift_sample* s = nullptr;
                check(sift_generate(p.get(), &cfg, 1, &s), "generate");
                tests.emplace_back(s);
            }
        }
        std::vector<const sift_sample*> ptrs;
        for (const auto& t : tests) ptrs.push_back(t.get());

        sift_report* r = nullptr;
        check(sift_verify(model.get(), p.get(), ptrs.data(), ptrs.size(), workers ? workers : default_workers(), &r),
              "verify");
        Report report(r);
        char* text = nullptr;
        check(sift_report_json(report.get(), &text), "report");
        auto json = take(text);
        write_file(fs::path(out) / "report.json", json);

        std::size_t obligations = 0, failures = 0;
        auto parsed = nlohmann::json::parse(json);
        for (const auto& in : parsed.at("inputs"))
            for (const char* k : {"compatibility", "inapplicability"}) {
                obligations += in.at(k).at("obligations").get<std::size_t>();
                failures += in.at(k).at("failures").get<std::size_t>();
            }
        double rate = obligations ? 1.0 - static_cast<double>(failures) / static_cast<double>(obligations) : 1.0;
        std::printf("obligations %zu  failures %zu  rate %.6f  %s\n", obligations, failures, rate,
                    sift_report_passed(report.get()) ? "passed" : "failed");
        bool met = threshold >= 1.0 ? failures == 0 : rate >= threshold;
        return met ? exit_ok : exit_threshold;
    }
};

struct PipelineCmd {
    ProblemArgs problem;
    SampleArgs sample;
    std::size_t runs = 25;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::int64_t max_arity = -1;
    std::string out = ".";

    void add(CLI::App& app) {
        problem.add(app);
        sample.add(app);
        app.add_option("--runs,-r", runs, "seeded runs")->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "master seed")->required();
        app.add_option("--max-arity", max_arity, "largest feature arity");
        app.add_option("--workers,-j", workers, "worker threads");
        app.add_option("--out,-o", out, "output directory");
    }

    int run() const {
        auto p = problem.load();
        sift_pipeline_config c{};
        c.train = sample.config(problem.benchmark, 0);
        // Verification inputs follow the benchmark's trace and partial regimes.
        std::vector<sift_sample_config> tests;
        for (const char* k : {"traces", "partial"}) {
            SampleArgs sa;
            sa.kind = k;
            tests.push_back(sa.config(problem.benchmark, 0));
        }
        if (problem.benchmark.empty() && problem.test.empty()) tests.clear();
        c.tests = tests.data();
        c.test_count = tests.size();
        c.runs = runs;
        c.seed = seed;
        c.workers = workers ? workers : default_workers();
        sift_learn_config_default(&c.learn);
        c.learn.max_arity = max_arity;

        char *json = nullptr, *text = nullptr;
        double rate = 0;
        check(sift_pipeline(p.get(), &c, &json, &text, &rate), "pipeline");
        write_file(fs::path(out) / "row.json", take(json));
        std::printf("%s\n", take(text).c_str());
        return exit_ok;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learns lifted STRIPS domains from traces and state graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sift_version()));

    GenerateCmd gen;
    LearnCmd lrn;
    VerifyCmd ver;
    PipelineCmd pipe;
    gen.add(*app.add_subcommand("generate", "sample traces or graphs from an instance"));
    lrn.add(*app.add_subcommand("learn", "learn a domain from a trace graph"));
    ver.add(*app.add_subcommand("verify", "check a learned domain against held-out inputs"));
    pipe.add(*app.add_subcommand("pipeline", "seeded generate, learn and verify runs"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    try {
        if (app.got_subcommand("generate")) return gen.run();
        if (app.got_subcommand("learn")) return lrn.run();
        if (app.got_subcommand("verify")) return ver.run();
        return pipe.run();
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s\n", f.what());
        return f.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_internal;
    }
}
