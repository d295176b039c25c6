#include <doctest.h>

#include "error.hpp"
#include "support.hpp"
#include "verify.hpp"

using namespace sift;

namespace {

struct Delivery {
    TraceGraph graph = testing::delivery_trace();
    TypeAssignment types = infer_types(graph);
    std::vector<PatternGroup> groups = pattern_groups(types, 2);
    std::size_t object_group = *testing::find_group(groups, {types.type_of("pick", 0)});
};

Sample sample_of(const std::string& name, SampleKind kind, std::uint64_t seed) {
    auto e = find_benchmark(name);
    auto p = load_problem(e);
    GroundTask task(p.domain, p.train);
    auto cfg = regime_config(e, kind);
    cfg.seed = seed;
    return generate_sample(task, cfg);
}

}  // namespace

TEST_CASE("delivery reduced graph") {
    Delivery d;
    const auto& g = d.groups[d.object_group];
    auto r = build_reduced_graph(d.graph, g);
    CHECK(r.relevant.size() == 3);
    CHECK(r.node_count == 4);

    // a group covering every action contracts nothing
    auto all = testing::chain({"a x", "b x"});
    auto t = infer_types(all);
    auto gs = pattern_groups(t, 1);
    auto idx = *testing::find_group(gs, {t.type_of("a", 0)});
    auto ra = build_reduced_graph(all, gs[idx]);
    CHECK(ra.node_count == all.node_count());
}

TEST_CASE("delivery feature consistency") {
    Delivery d;
    const auto& g = d.groups[d.object_group];
    auto both = testing::mask_of(g, {"pick[1]", "drop[1]"});
    auto pick = testing::mask_of(g, {"pick[1]"});
    REQUIRE(both != 0);
    auto r = check_feature(d.graph, g, both);
    REQUIRE(r.consistent);
    std::size_t ip = 0, id = 0;
    for (std::size_t i = 0; i < g.patterns.size(); ++i) {
        if (g.patterns[i].to_string() == "pick[1]") ip = i;
        if (g.patterns[i].to_string() == "drop[1]") id = i;
    }
    CHECK(r.signs.sign[ip] != r.signs.sign[id]);
    CHECK(r.signs.component[ip] == r.signs.component[id]);

    auto bad = check_feature(d.graph, g, pick);
    CHECK_FALSE(bad.consistent);
    REQUIRE(bad.conflict);
    CHECK(d.graph.action_names()[d.graph.label(d.graph.edge(bad.conflict->edge).label).name] == "pick");

    CHECK(brute_force_check(d.graph, g, both).has_value());
    CHECK_FALSE(brute_force_check(d.graph, g, pick).has_value());
}

TEST_CASE("single member occurrence is consistent with sign 1") {
    auto g = testing::chain({"a x", "b x"});
    auto t = infer_types(g);
    auto gs = pattern_groups(t, 1);
    auto idx = *testing::find_group(gs, {t.type_of("a", 0)});
    auto r = check_feature(g, gs[idx], testing::mask_of(gs[idx], {"a[1]"}));
    REQUIRE(r.consistent);
    CHECK(r.signs.sign[0] == 1);
}

TEST_CASE("fork patterns need equal signs") {
    // two edges leaving one state with different patterns of the same grounding
    TraceGraph g;
    auto n0 = g.add_node(), n1 = g.add_node(), n2 = g.add_node();
    g.add_edge(n0, n1, GroundAction{"a", {"x"}});
    g.add_edge(n0, n2, GroundAction{"b", {"x"}});
    auto t = infer_types(g);
    auto gs = pattern_groups(t, 1);
    auto idx = *testing::find_group(gs, {t.type_of("a", 0)});
    auto r = check_feature(g, gs[idx], testing::mask_of(gs[idx], {"a[1]", "b[1]"}));
    REQUIRE(r.consistent);
    CHECK(r.signs.sign[0] == r.signs.sign[1]);
}

TEST_CASE("brute force agrees on gripper candidates over a 50-step trace") {
    auto p = testing::bench("gripper");
    GroundTask task(p.domain, p.train);
    SampleConfig c;
    c.n = 1;
    c.length = 50;
    c.seed = 11;
    auto s = sample_traces(task, c);
    auto types = infer_types(s.graph);
    auto groups = pattern_groups(types, 3);
    auto features = enumerate_features(groups);
    CHECK(features.size() == 43);
    for (const auto& f : features) {
        auto fast = check_feature(s.graph, groups[f.group], f.mask).consistent;
        auto slow = brute_force_check(s.graph, groups[f.group], f.mask).has_value();
        CHECK(fast == slow);
    }
}

TEST_CASE("oracle agreement on random small graphs") {
    std::mt19937_64 rng(20240601);
    std::size_t cases = 0, consistent = 0;
    while (cases < 1500) {
        auto c = testing::random_case(rng);
        if (!c) continue;
        ++cases;
        const auto& g = c->groups[c->group];
        auto fast = check_feature(c->graph, g, c->mask);
        auto slow = brute_force_check(c->graph, g, c->mask).has_value();
        auto def = testing::definitional_consistent(c->graph, g, c->mask);
        REQUIRE(fast.consistent == slow);
        REQUIRE(fast.consistent == def);
        if (fast.consistent) {
            ++consistent;
            CHECK(testing::definitional_consistent(c->graph, g, c->mask, &fast.signs.sign));
        }
    }
    CHECK(consistent > 100);
    CHECK(consistent < cases);
}

TEST_CASE("delivery truth propagation and preconditions") {
    Delivery d;
    const auto& g = d.groups[d.object_group];
    auto r = check_feature(d.graph, g, testing::mask_of(g, {"pick[1]", "drop[1]"}));
    REQUIRE(r.consistent);
    std::vector<AdmissibleFeature> adm{{Feature{static_cast<std::uint32_t>(d.object_group),
                                                testing::mask_of(g, {"pick[1]", "drop[1]"})},
                                        r.signs}};
    auto preds = make_predicates(d.groups, adm);
    REQUIRE(preds.size() == 1);
    auto& holding = preds[0];
    // orient so that pick adds
    for (std::size_t i = 0; i < holding.support.size(); ++i)
        holding.signs[i] = holding.support[i].action == "pick" ? 1 : 0;
    auto o1 = *d.graph.find_object("o1");
    auto vals = propagate_truth(d.graph, holding, std::vector<ObjectId>{o1});
    CHECK(vals == std::vector<std::int8_t>{0, 1, 1, 0, 1});

    auto scan = infer_preconditions(d.graph, d.types, preds);
    LearnedPrecondition not_holding{0, {"pick", {0}}, false};
    CHECK(std::count(scan.preconditions.begin(), scan.preconditions.end(), not_holding) == 1);
    LearnedPrecondition holding_for_drop{0, {"drop", {0}}, true};
    CHECK(std::count(scan.preconditions.begin(), scan.preconditions.end(), holding_for_drop) == 1);
    REQUIRE(scan.initial_values[0].size() == 1);
    CHECK(scan.initial_values[0][0].second == false);

    // no member edge for a second object: undefined everywhere
    auto c2 = *d.graph.find_object("c2");
    auto none = propagate_truth(d.graph, holding, std::vector<ObjectId>{c2});
    CHECK(std::all_of(none.begin(), none.end(), [](auto v) { return v == kUndefined; }));
}

TEST_CASE("gripper full graph golden features") {
    auto s = sample_of("gripper", SampleKind::full_graph, 0);
    LearnConfig cfg;
    cfg.domain_name = "gripper-learned";
    auto m = learn(s.graph, cfg);
    CHECK(m.stats.candidates == 43);
    REQUIRE(m.predicates.size() == 6);
    CHECK(m.domain.schemas.size() == 3);
    for (const auto& golden : testing::gripper_golden()) {
        bool found = false;
        for (const auto& p : m.predicates) found = found || testing::matches_golden(p, golden);
        CHECK_MESSAGE(found, golden.front().first);
    }
    CHECK(check_well_formed(m.domain).empty());

    // feature 3 analog: pick needs a free gripper
    const auto& pick = *m.domain.find_schema("pick");
    bool free_pre = false;
    for (std::size_t i = 0; i < m.predicates.size(); ++i) {
        const auto& p = m.predicates[i];
        if (p.support.size() == 2 && p.support[0].to_string() == "drop[3]") {
            for (const auto& l : pick.preconditions)
                if (l.predicate == p.name && l.args == std::vector<std::uint32_t>{2})
                    free_pre = l.positive == (p.signs[0] == 1);
        }
    }
    CHECK(free_pre);

    REQUIRE(m.instance);
    CHECK(m.instance->domain_name == "gripper-learned");
    CHECK(m.static_predicates == std::vector<std::string>{"p_drop", "p_move", "p_pick"});
    CHECK(std::count(m.instance->init.begin(), m.instance->init.end(),
                     SignedAtom{{"p_move", {"room1", "room2"}}, true}) == 1);
}

TEST_CASE("learned model round trips through domain and sidecar") {
    auto s = sample_of("gripper", SampleKind::traces, 3);
    auto m = learn(s.graph);
    auto back = read_learned(emit_domain(m.domain), write_sidecar(m), emit_instance(*m.instance));
    CHECK(back.predicates.size() == m.predicates.size());
    for (std::size_t i = 0; i < m.predicates.size(); ++i) {
        CHECK(back.predicates[i].support == m.predicates[i].support);
        CHECK(back.predicates[i].signs == m.predicates[i].signs);
    }
    CHECK(write_sidecar(back) == write_sidecar(m));
    CHECK(parse_pattern("drop[1,3]") == ActionPattern{"drop", {0, 2}});
    CHECK(parse_pattern("noop[]") == ActionPattern{"noop", {}});
    CHECK_THROWS(parse_pattern("drop[0]"));
}

TEST_CASE("learn edge cases") {
    TraceGraph empty;
    CHECK_THROWS_AS(learn(empty), EmptyInputError);

    auto single = testing::chain({"a", "a"});
    auto m = learn(single);
    CHECK(m.domain.schemas.size() == 1);
    for (const auto& p : m.predicates) CHECK(p.support.front().action == "a");

    // no initial node: no instance
    auto loose = testing::chain({"pick o1 c", "drop o1 c"}, false);
    auto lm = learn(loose);
    CHECK_FALSE(lm.instance.has_value());

    LearnConfig zero;
    zero.max_arity = 0;
    auto g0 = learn(sample_of("gripper", SampleKind::traces, 1).graph, zero);
    CHECK(g0.stats.candidates <= 7);
}

TEST_CASE("observed static atoms") {
    auto g = testing::chain({"move r1 r2", "move r2 r1", "noop"});
    auto m = learn(g);
    REQUIRE(m.instance);
    auto has = [&](const GroundAtom& a) {
        return std::count(m.instance->init.begin(), m.instance->init.end(), SignedAtom{a, true}) == 1;
    };
    CHECK(has({"p_move", {"r1", "r2"}}));
    CHECK(has({"p_move", {"r2", "r1"}}));
    CHECK(has({"p_noop", {}}));
    CHECK_FALSE(has({"p_move", {"r1", "r1"}}));
}

TEST_CASE("compatibility") {
    auto train = sample_of("gripper", SampleKind::full_graph, 0);
    auto m = learn(train.graph);
    auto self = check_compatibility(m, train.graph);
    CHECK(self.passed());
    CHECK(self.obligations > 0);
    CHECK(check_compatibility(m, TraceGraph{}).passed());

    // a drop from an unknown state is fine; picking the same ball twice is not
    CHECK(check_compatibility(m, testing::chain({"drop ball1 room1 g1", "pick ball1 room1 g1"})).passed());
    auto bad = testing::chain({"pick ball1 room1 g1", "pick ball1 room1 g1"});
    auto r = check_compatibility(m, bad);
    CHECK_FALSE(r.passed());
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].node == 1);
    CHECK(r.witnesses[0].action.name == "pick");

    CHECK(check_compatibility(m, sample_of("gripper", SampleKind::partial_graph, 9).graph).passed());
}

TEST_CASE("passing survives edge removal") {
    auto m = learn(sample_of("gripper", SampleKind::traces, 1).graph);
    auto test = sample_of("gripper", SampleKind::partial_graph, 2).graph;
    REQUIRE(check_compatibility(m, test).passed());
    for (std::size_t keep : {test.edge_count() / 2, test.edge_count() / 10}) {
        TraceGraph sub;
        for (std::size_t i = 0; i < test.node_count(); ++i) sub.add_node();
        for (EdgeId e = 0; e < keep; ++e)
            sub.add_edge(test.edge(e).src, test.edge(e).dst, test.ground_action(test.edge(e).label));
        CHECK(check_compatibility(m, sub).passed());
    }
}

TEST_CASE("inapplicability probes") {
    auto p = testing::bench("gripper");
    auto train = sample_of("gripper", SampleKind::full_graph, 0);
    auto m = learn(train.graph);
    GroundTask hidden(p.domain, *p.test);
    SampleConfig c;
    c.n = 2;
    c.length = 40;
    c.seed = 5;
    auto test = sample_traces(hidden, c);
    auto r = check_inapplicability(m, hidden, test);
    CHECK(r.obligations > 0);
    CHECK(r.passed());

    // with every precondition stripped, probes fail
    auto weak = m;
    for (auto& s : weak.domain.schemas) s.preconditions.clear();
    CHECK_FALSE(check_inapplicability(weak, hidden, test).passed());
}

TEST_CASE("verification rate") {
    auto rate = [](std::vector<bool> v) {
        auto b = std::make_unique<bool[]>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) b[i] = v[i];
        return verification_rate({b.get(), v.size()});
    };
    CHECK(rate(std::vector<bool>(25, true)) == doctest::Approx(1.0));
    std::vector<bool> one(25, false);
    one[3] = true;
    CHECK(rate(one) == doctest::Approx(0.04));
    CHECK_THROWS_AS(rate({}), EmptyInputError);
}

TEST_CASE("replay of training paths") {
    auto s = sample_of("blocks3", SampleKind::partial_graph, 2);
    auto m = learn(s.graph);
    for (const auto& path : testing::bfs_paths(s.graph, 60)) {
        auto r = replay(m, path);
        CHECK_MESSAGE(r.ok, r.reason);
    }
}
