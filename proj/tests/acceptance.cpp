// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "error.hpp"
#include "support.hpp"
#include "verify.hpp"

using namespace sift;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Sample sample_of(const Problem& p, const BenchmarkEntry& e, SampleKind kind, std::uint64_t seed) {
    GroundTask task(p.domain, p.train);
    auto cfg = regime_config(e, kind);
    cfg.seed = seed;
    return generate_sample(task, cfg);
}

PipelineConfig regime(const BenchmarkEntry& e, SampleKind kind, std::size_t runs, std::uint64_t seed,
                      std::size_t workers = 1) {
    PipelineConfig c;
    c.train = regime_config(e, kind);
    c.tests = default_test_configs(e);
    c.runs = runs;
    c.seed = seed;
    c.workers = workers;
    return c;
}

std::size_t verified_runs(const PipelineRow& row) {
    return static_cast<std::size_t>(
        std::count_if(row.runs.begin(), row.runs.end(), [](const RunResult& r) { return r.verified; }));
}

void candidates(Outcome& o) {
    struct Want {
        const char* name;
        std::uint64_t total;
    };
    for (auto w : {Want{"gripper", 43}, Want{"blocks4", 93}, Want{"delivery", 62}, Want{"npuzzle", 912}}) {
        auto e = find_benchmark(w.name);
        auto p = load_problem(e);
        auto s = sample_of(p, e, SampleKind::traces, 1);
        auto types = infer_types(s.graph);
        auto by_arity = candidate_count(types, types.max_arity());
        std::uint64_t total = 0;
        for (auto c : by_arity) total += c;
        o.detail << " " << w.name << "=" << total;
        o.require(total == w.total, std::string(w.name) + " total");
        if (std::string(w.name) == "gripper") {
            o.detail << " (nullary " << by_arity[0] << ", unary " << by_arity[1] << ", binary " << by_arity[2]
                     << ", ternary " << by_arity[3] << ")";
            o.require(by_arity == std::vector<std::uint64_t>{7, 21, 12, 3}, "gripper breakdown");
        }
    }
}

void delivery_example(Outcome& o) {
    auto g = testing::delivery_trace();
    auto types = infer_types(g);
    auto groups = pattern_groups(types, 1);
    auto object_type = FeatureType{types.type_of("pick", 0)};
    auto gi = testing::find_group(groups, object_type);
    o.require(gi.has_value(), "object group");
    if (!gi) return;
    const auto& group = groups[*gi];
    auto both = testing::mask_of(group, {"pick[1]", "drop[1]"});
    auto pick = testing::mask_of(group, {"pick[1]"});
    auto r = check_feature(g, group, both);
    o.require(r.consistent, "{pick[1],drop[1]} consistent");
    if (r.consistent) {
        std::uint8_t sp = 2, sd = 2;
        for (std::size_t i = 0; i < group.patterns.size(); ++i) {
            if (group.patterns[i].to_string() == "pick[1]") sp = r.signs.sign[i];
            if (group.patterns[i].to_string() == "drop[1]") sd = r.signs.sign[i];
        }
        o.detail << " signs pick=" << int(sp) << " drop=" << int(sd);
        o.require(sp != sd && sp < 2 && sd < 2, "opposite signs");
    }
    auto single = check_feature(g, group, pick);
    o.detail << " {pick[1]} " << (single.consistent ? "consistent" : "inconsistent");
    o.require(!single.consistent, "{pick[1]} inconsistent");
    o.require(brute_force_check(g, group, both).has_value() && !brute_force_check(g, group, pick).has_value(),
              "brute force agrees");
}

void golden_full(Outcome& o) {
    struct Want {
        const char* name;
        std::size_t admissible;
        std::vector<testing::GoldenFeature> golden;
    };
    for (const auto& w : {Want{"gripper", 6, testing::gripper_golden()}, Want{"blocks3", 5, testing::blocks_golden()},
                          Want{"hanoi", 4, {}}}) {
        auto t0 = std::chrono::steady_clock::now();
        auto p = testing::bench(w.name);
        GroundTask task(p.domain, p.train);
        auto s = full_state_graph(task);
        auto m = learn(s.graph);
        auto sec = seconds_since(t0);
        o.detail << " " << w.name << " " << s.graph.node_count() << " nodes #F_a=" << m.predicates.size();
        o.require(m.predicates.size() == w.admissible, std::string(w.name) + " #F_a");
        o.require(sec <= 600, std::string(w.name) + " time");
        std::size_t matched = 0;
        for (const auto& golden : w.golden) {
            bool found = false;
            for (const auto& pr : m.predicates) found = found || testing::matches_golden(pr, golden);
            matched += found ? 1 : 0;
        }
        if (!w.golden.empty()) {
            o.detail << " golden " << matched << "/" << w.golden.size();
            o.require(matched == w.golden.size(), std::string(w.name) + " golden supports");
        }
    }
    auto p = testing::bench("gripper");
    GroundTask task(p.domain, p.train);
    o.require(full_state_graph(task).graph.node_count() == 17728, "gripper node count");
}

void npuzzle_scale(Outcome& o) {
    auto e = find_benchmark("npuzzle");
    auto p = load_problem(e);
    auto t0 = std::chrono::steady_clock::now();
    GroundTask task(p.domain, p.train);
    auto s = full_state_graph(task);
    auto m = learn(s.graph);
    o.detail << " full " << s.graph.node_count() << "/" << s.graph.edge_count() << " #F_a=" << m.predicates.size()
             << " in " << std::lround(seconds_since(t0)) << "s";
    o.require(s.graph.node_count() == 181440 && s.graph.edge_count() == 483840, "full graph size");
    o.require(m.predicates.size() == 26, "full #F_a");

    auto row = run_pipeline(p, regime(e, SampleKind::partial_graph, 25, 1));
    char buf[128];
    std::snprintf(buf, sizeof buf, " partial: #F_a %.2f Verif %.0f%%", row.mean_admissible(), 100 * row.verif());
    o.detail << buf;
    o.require(std::abs(row.mean_admissible() - 26.0) <= 0.5, "partial mean #F_a");
    o.require(row.verif() >= 0.96, "partial Verif");
}

void trace_regime(Outcome& o) {
    for (const char* name : {"gripper", "ferry", "miconic", "blocks4"}) {
        auto e = find_benchmark(name);
        auto row = run_pipeline(load_problem(e), regime(e, SampleKind::traces, 25, 1));
        auto ok = verified_runs(row);
        char buf[160];
        std::snprintf(buf, sizeof buf, " %s %.2f (table %.1f) %zu/25", name, row.mean_admissible(),
                      e.traces.admissible, ok);
        o.detail << buf;
        o.require(ok >= 24, std::string(name) + " verified runs");
        o.require(std::abs(row.mean_admissible() - e.traces.admissible) <= 0.5, std::string(name) + " mean #F_a");
    }
    auto e = find_benchmark("gripper");
    auto c = regime(e, SampleKind::traces, 25, 1);
    c.train.n = 1;
    auto row = run_pipeline(load_problem(e), c);
    char buf[96];
    std::snprintf(buf, sizeof buf, " gripper 1 trace %.2f Verif %.0f%%", row.mean_admissible(), 100 * row.verif());
    o.detail << buf;
    o.require(!e.trace_ablation.empty() && e.trace_ablation[0].admissible == 6.0, "ablation entry");
    o.require(row.mean_admissible() == 6.0 && row.verif() == 1.0, "one-trace gripper");
}

void oracle_equivalence(Outcome& o) {
    std::mt19937_64 rng(777);
    std::size_t cases = 0, disagreements = 0, consistent = 0;
    while (cases < 10000) {
        auto c = testing::random_case(rng);
        if (!c) continue;
        ++cases;
        const auto& g = c->groups[c->group];
        auto fast = check_feature(c->graph, g, c->mask);
        auto slow = brute_force_check(c->graph, g, c->mask).has_value();
        auto def = testing::definitional_consistent(c->graph, g, c->mask);
        bool agree = fast.consistent == slow && slow == def;
        if (agree && fast.consistent) {
            ++consistent;
            agree = testing::definitional_consistent(c->graph, g, c->mask, &fast.signs.sign);
        }
        disagreements += agree ? 0 : 1;
    }
    o.detail << " " << cases << " cases, " << consistent << " consistent, " << disagreements << " disagreements";
    o.require(disagreements == 0, "disagreements");
    o.require(consistent > 0 && consistent < cases, "both verdicts exercised");
}

void learning_guarantees(Outcome& o) {
    std::size_t inputs = 0, hidden = 0, inadmissible = 0, sign_mismatch = 0, replays = 0, replay_fail = 0,
                ill_formed = 0;
    for (const auto& e : list_benchmarks()) {
        auto p = load_problem(e);
        std::vector<SampleKind> kinds{SampleKind::traces, SampleKind::partial_graph};
        if (e.name == "gripper" || e.name == "blocks3" || e.name == "hanoi") kinds.push_back(SampleKind::full_graph);
        for (auto kind : kinds) {
            for (std::uint64_t seed : {1, 2}) {
                if (kind == SampleKind::full_graph && seed == 2) continue;
                ++inputs;
                auto s = sample_of(p, e, kind, seed);
                auto types = infer_types(s.graph);
                auto groups = pattern_groups(types, types.max_arity());
                for (const auto& hf : testing::hidden_features(p.domain, types, groups).features) {
                    ++hidden;
                    auto r = check_feature(s.graph, groups[hf.group], hf.mask);
                    if (!r.consistent) {
                        ++inadmissible;
                        o.detail << " inadmissible " << e.name << "/" << to_string(kind) << "/" << hf.predicate;
                        continue;
                    }
                    if (!testing::signs_match_up_to_component(r.signs, hf)) {
                        ++sign_mismatch;
                        o.detail << " signs " << e.name << "/" << hf.predicate;
                    }
                }
                auto m = learn(s.graph);
                if (!check_well_formed(m.domain).empty()) {
                    ++ill_formed;
                    o.detail << " ill-formed " << e.name;
                }
                std::vector<std::vector<GroundAction>> paths;
                if (kind == SampleKind::traces) {
                    std::vector<GroundAction> first;
                    for (auto id : s.graph.traces().front()) first.push_back(s.graph.ground_action(s.graph.edge(id).label));
                    paths.push_back(std::move(first));
                } else {
                    paths = testing::bfs_paths(s.graph, 100);
                }
                for (const auto& path : paths) {
                    ++replays;
                    auto r = replay(m, path);
                    if (!r.ok) {
                        ++replay_fail;
                        o.detail << " replay " << e.name << " step " << r.failed_step;
                    }
                }
            }
        }
    }
    o.detail << " " << inputs << " inputs; (a) " << hidden - inadmissible << "/" << hidden << " hidden admissible;"
             << " (b) " << replays - replay_fail << "/" << replays << " replays;"
             << " (c) " << ill_formed << " ill-formed; (d) " << sign_mismatch << " sign mismatches";
    o.require(inadmissible == 0, "(a)");
    o.require(replay_fail == 0, "(b)");
    o.require(ill_formed == 0, "(c)");
    o.require(sign_mismatch == 0, "(d)");
}

void determinism(Outcome& o) {
    for (auto [name, kind] : {std::pair{"gripper", SampleKind::traces}, std::pair{"blocks3", SampleKind::partial_graph}}) {
        auto e = find_benchmark(name);
        auto p = load_problem(e);
        auto a = run_pipeline(p, regime(e, kind, 3, 42, 1)).to_json();
        auto b = run_pipeline(p, regime(e, kind, 3, 42, 1)).to_json();
        auto c = run_pipeline(p, regime(e, kind, 3, 42, 3)).to_json();
        o.require(a == b, std::string(name) + " rerun");
        o.require(a == c, std::string(name) + " workers");

        auto s1 = sample_of(p, e, kind, 9);
        auto s2 = sample_of(p, e, kind, 9);
        o.require(write_tracegraph(s1.graph) == write_tracegraph(s2.graph), std::string(name) + " generated");
        LearnConfig one, many;
        many.workers = 3;
        auto m1 = learn(s1.graph, one);
        auto m2 = learn(s2.graph, many);
        o.require(emit_domain(m1.domain) == emit_domain(m2.domain) && write_sidecar(m1) == write_sidecar(m2) &&
                      emit_instance(*m1.instance) == emit_instance(*m2.instance),
                  std::string(name) + " learned");
    }
    o.detail << " pipeline rows, generated samples and learned outputs identical";
}

std::string mutate(std::string text, std::mt19937_64& rng) {
    static const std::vector<std::string> tokens{"(", ")", "not", ":action", ":parameters", ":precondition",
                                                 ":effect", "and", "?x", "-", ";", "\n", "define", ":init",
                                                 ":objects", ":predicates", "\"", "\x01", "\xff"};
    auto pick = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(0, hi)(rng); };
    auto rounds = 1 + pick(4);
    for (std::size_t r = 0; r < rounds; ++r) {
        auto pos = text.empty() ? 0 : pick(text.size() - 1);
        switch (pick(5)) {
        case 0:
            if (!text.empty()) text[pos] = static_cast<char>(pick(255));
            break;
        case 1:
            text.erase(pos, pick(16));
            break;
        case 2:
            text.insert(pos, tokens[pick(tokens.size() - 1)]);
            break;
        case 3: {
            auto len = pick(64);
            text.insert(pick(text.size()), text.substr(pos, len));
            break;
        }
        case 4:
            text.resize(pos);
            break;
        default: {
            auto q = text.empty() ? 0 : pick(text.size() - 1);
            if (!text.empty()) std::swap(text[pos], text[q]);
        }
        }
    }
    return text;
}

void parser_fuzz(Outcome& o) {
    double budget = 60;
    if (const char* s = std::getenv("SIFT_FUZZ_SECONDS")) budget = std::atof(s);
    std::vector<std::pair<std::string, std::string>> corpus;  // domain, instance
    for (const auto& e : list_benchmarks())
        corpus.emplace_back(testing::read_text(e.domain), testing::read_text(e.train));
    std::mt19937_64 rng(99);
    std::size_t runs = 0, rejects = 0, bad_span = 0, other = 0;
    auto check_span = [&](const ParseError& err, const std::string& text) {
        const auto& sp = err.span();
        bool ok = sp.line >= 1 && sp.column >= 1 && sp.start <= sp.end && sp.end <= text.size();
        if (!ok) ++bad_span;
    };
    auto t0 = std::chrono::steady_clock::now();
    while (seconds_since(t0) < budget) {
        const auto& [dom, inst] = corpus[runs % corpus.size()];
        ++runs;
        bool mutate_domain = runs % 3 != 0;
        auto text = mutate_domain ? mutate(dom, rng) : mutate(inst, rng);
        try {
            if (mutate_domain) {
                auto d = parse_domain(text);
                (void)emit_domain(d);
            } else {
                auto d = parse_domain(dom);
                (void)parse_instance(text, d);
            }
        } catch (const ParseError& err) {
            ++rejects;
            check_span(err, text);
        } catch (const std::exception& err) {
            if (other++ < 3) o.detail << " non-parse reject: " << err.what();
        }
    }
    o.detail << " " << runs << " inputs in " << std::lround(seconds_since(t0)) << "s, " << rejects << " rejects, "
             << bad_span << " bad spans, " << other << " other errors";
    o.require(bad_span == 0, "spans");
    o.require(other == 0, "non-parse errors");
    o.require(rejects > 0, "rejects exercised");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Outcome&)> run;
    };
    std::vector<Criterion> all{
        {1, "candidate enumeration", candidates},
        {2, "delivery micro-example", delivery_example},
        {3, "golden features on full graphs", golden_full},
        {4, "npuzzle scale check", npuzzle_scale},
        {5, "trace-regime reproduction", trace_regime},
        {6, "oracle equivalence", oracle_equivalence},
        {7, "learning guarantees", learning_guarantees},
        {8, "determinism", determinism},
        {9, "parser robustness", parser_fuzz},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << " (" << std::lround(seconds_since(t0))
                  << "s):" << o.detail.str() << std::endl;
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " failed" : std::string("acceptance: all passed"))
              << std::endl;
    return failed ? 1 : 0;
}
