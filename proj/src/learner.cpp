#include "learner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <set>

#include <json.hpp>

#include "error.hpp"
#include "pddl.hpp"

namespace sift {
namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<ObjectId> project(std::span<const ObjectId> args, std::span<const std::uint32_t> idx) {
    std::vector<ObjectId> key;
    key.reserve(idx.size());
    for (auto i : idx) key.push_back(args[i]);
    return key;
}

std::vector<std::vector<EdgeId>> edges_by_label(const TraceGraph& graph) {
    std::vector<std::vector<EdgeId>> out(graph.labels().size());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) out[graph.edge(e).label].push_back(e);
    return out;
}

std::string support_comment(const LearnedPredicate& p) {
    std::string out;
    for (std::size_t i = 0; i < p.support.size(); ++i)
        out += (i ? " " : "") + p.support[i].to_string() + (p.signs[i] ? "+" : "-");
    return out;
}

}  // namespace

std::vector<std::int8_t> propagate_truth(const TraceGraph& graph, const LearnedPredicate& predicate,
                                         std::span<const ObjectId> key) {
    std::vector<std::int8_t> out(graph.node_count(), kUndefined);
    auto group = predicate.group();
    visit_slices(graph, group, 1, [&](std::size_t, const GroundingSlice& slice, const ComponentLookup& lookup) {
        if (!std::equal(slice.key.begin(), slice.key.end(), key.begin(), key.end())) return;
        auto values = propagate_slice(slice, predicate.full_mask(), predicate.signs);
        if (!values) throw Error("signs of " + predicate.name + " conflict on the input");
        for (NodeId n = 0; n < graph.node_count(); ++n)
            if (auto c = lookup(n)) out[n] = (*values)[*c];
    });
    return out;
}

std::vector<LearnedPredicate> make_predicates(const std::vector<PatternGroup>& groups,
                                              const std::vector<AdmissibleFeature>& admissible) {
    std::vector<LearnedPredicate> out;
    for (const auto& a : admissible) {
        const auto& group = groups.at(a.feature.group);
        LearnedPredicate p;
        p.name = "f" + std::to_string(out.size());
        p.type = group.type;
        std::map<std::uint32_t, std::uint32_t> position;  // group pattern -> support index
        for (std::uint32_t i = 0; i < group.patterns.size(); ++i) {
            if (!(a.feature.mask >> i & 1U)) continue;
            position[i] = static_cast<std::uint32_t>(p.support.size());
            p.support.push_back(group.patterns[i]);
            p.signs.push_back(a.signs.sign[i]);
        }
        for (std::uint32_t i = 0; i < group.patterns.size(); ++i)
            if (a.feature.mask >> i & 1U) p.components.push_back(position.at(a.signs.component[i]));
        out.push_back(std::move(p));
    }
    return out;
}

PreconditionScan infer_preconditions(const TraceGraph& graph, const TypeAssignment& types,
                                     const std::vector<LearnedPredicate>& predicates, std::size_t workers) {
    PreconditionScan scan;
    scan.initial_values.resize(predicates.size());
    auto by_label = edges_by_label(graph);
    std::optional<NodeId> initial;
    if (!graph.initial_nodes().empty()) initial = graph.initial_nodes().front();
    std::map<std::size_t, std::map<FeatureType, std::vector<ActionPattern>>> patterns_by_arity;

    for (std::uint32_t f = 0; f < predicates.size(); ++f) {
        const auto& pred = predicates[f];
        auto k = pred.type.size();
        if (!patterns_by_arity.count(k)) patterns_by_arity[k] = enumerate_patterns(types, k);
        const auto& candidates = patterns_by_arity[k][pred.type];

        // Groundings each (label, precondition pattern) reads.
        std::map<std::vector<ObjectId>, std::vector<std::pair<LabelId, std::uint32_t>>> bucket;
        for (LabelId l = 0; l < graph.labels().size(); ++l) {
            const auto& label = graph.label(l);
            const auto& name = graph.action_names()[label.name];
            for (std::uint32_t q = 0; q < candidates.size(); ++q)
                if (candidates[q].action == name) bucket[project(label.args, candidates[q].args)].emplace_back(l, q);
        }

        std::vector<std::atomic<std::uint8_t>> seen(candidates.size());  // bit 0 true, bit 1 false
        std::mutex init_mutex;
        auto& init = scan.initial_values[f];
        auto group = pred.group();
        visit_slices(graph, group, workers, [&](std::size_t, const GroundingSlice& slice, const ComponentLookup& lookup) {
            auto values = propagate_slice(slice, pred.full_mask(), pred.signs);
            if (!values) throw Error("signs of " + pred.name + " conflict on the input");
            if (initial) {
                if (auto c = lookup(*initial); c && (*values)[*c] != kUndefined) {
                    std::lock_guard lock(init_mutex);
                    init.emplace_back(slice.key, (*values)[*c] == 1);
                }
            }
            auto it = bucket.find(slice.key);
            if (it == bucket.end()) return;
            for (auto [l, q] : it->second) {
                std::uint8_t bits = 0;
                for (auto e : by_label[l]) {
                    auto c = lookup(graph.edge(e).src);
                    if (!c || (*values)[*c] == kUndefined) continue;
                    bits |= (*values)[*c] == 1 ? 1 : 2;
                }
                if (bits) seen[q].fetch_or(bits, std::memory_order_relaxed);
            }
        });
        std::sort(init.begin(), init.end());
        for (std::uint32_t q = 0; q < candidates.size(); ++q) {
            auto bits = seen[q].load();
            if (bits == 1 || bits == 2) scan.preconditions.push_back({f, candidates[q], bits == 1});
        }
    }
    std::sort(scan.preconditions.begin(), scan.preconditions.end());
    return scan;
}

StripsDomain build_domain(const std::string& name, const TypeAssignment& types,
                          const std::vector<LearnedPredicate>& predicates,
                          const std::vector<LearnedPrecondition>& preconditions) {
    StripsDomain d;
    d.name = name;
    for (const auto& p : predicates) {
        PredicateSymbol sym{p.name, p.type.size(), {}, support_comment(p)};
        for (auto t : p.type) sym.arg_types.push_back(TypeAssignment::type_name(t));
        d.predicates.push_back(std::move(sym));
    }
    std::map<std::string, std::size_t> schema_index;
    for (const auto& [action, arity] : types.actions()) {
        ActionSchema s;
        s.name = action;
        s.arity = arity;
        for (std::uint32_t i = 0; i < arity; ++i) s.param_types.push_back(TypeAssignment::type_name(types.type_of(action, i)));
        schema_index[action] = d.schemas.size();
        d.schemas.push_back(std::move(s));
    }
    for (const auto& p : predicates)
        for (std::size_t i = 0; i < p.support.size(); ++i)
            d.schemas[schema_index.at(p.support[i].action)].effects.push_back(
                {p.name, p.support[i].args, p.signs[i] == 1});
    for (const auto& pre : preconditions)
        d.schemas[schema_index.at(pre.pattern.action)].preconditions.push_back(
            {predicates.at(pre.predicate).name, pre.pattern.args, pre.positive});
    for (auto& s : d.schemas) {
        std::sort(s.effects.begin(), s.effects.end());
        std::sort(s.preconditions.begin(), s.preconditions.end());
    }
    validate_domain(d);
    return d;
}

std::vector<SignedAtom> add_static_predicates(StripsDomain& domain, const TraceGraph& graph) {
    for (auto& s : domain.schemas) {
        PredicateSymbol sym{"p_" + s.name, s.arity, s.param_types, "observed " + s.name + " groundings"};
        std::vector<std::uint32_t> all(s.arity);
        for (std::uint32_t i = 0; i < s.arity; ++i) all[i] = i;
        s.preconditions.push_back({sym.name, all, true});
        std::sort(s.preconditions.begin(), s.preconditions.end());
        domain.predicates.push_back(std::move(sym));
    }
    std::set<SignedAtom> atoms;
    for (const auto& label : graph.labels()) {
        GroundAtom a{"p_" + graph.action_names()[label.name], {}};
        for (auto o : label.args) a.args.push_back(graph.objects()[o]);
        atoms.insert({std::move(a), true});
    }
    return {atoms.begin(), atoms.end()};
}

StripsInstance build_instance(const TraceGraph& graph, const StripsDomain& domain, const TypeAssignment& types,
                              const std::vector<LearnedPredicate>& predicates, const PreconditionScan& scan,
                              std::vector<SignedAtom> static_atoms) {
    if (graph.initial_nodes().empty()) throw StructuralError("input has no initial node");
    StripsInstance inst;
    inst.name = domain.name + "-instance";
    inst.domain_name = domain.name;
    inst.objects = graph.objects();
    for (const auto& o : inst.objects) {
        auto t = types.object_type(o);
        inst.object_types.push_back(t ? TypeAssignment::type_name(*t) : "object");
    }
    // Every grounding with a slice arises from an effect of an observed action,
    // so the defined initial values are exactly the relevant atoms.
    for (std::size_t f = 0; f < predicates.size(); ++f) {
        for (const auto& [key, value] : scan.initial_values[f]) {
            GroundAtom a{predicates[f].name, {}};
            for (auto o : key) a.args.push_back(graph.objects()[o]);
            inst.init.push_back({std::move(a), value});
        }
    }
    inst.init.insert(inst.init.end(), std::make_move_iterator(static_atoms.begin()),
                     std::make_move_iterator(static_atoms.end()));
    std::sort(inst.init.begin(), inst.init.end());
    return inst;
}

LearnedModel learn(const TraceGraph& graph, const LearnConfig& config) {
    if (graph.edge_count() == 0) throw EmptyInputError("input graph has no edges");
    LearnedModel m;
    auto t0 = Clock::now();
    auto types = infer_types(graph);
    m.stats.types = types.type_count();
    m.stats.max_arity = config.max_arity.value_or(types.max_arity());
    auto groups = pattern_groups(types, m.stats.max_arity, config.group_cap);
    auto candidates = enumerate_features(groups);
    m.stats.candidates_by_arity = candidate_count(types, m.stats.max_arity, config.group_cap);
    m.stats.candidates = candidates.size();
    m.stats.seconds_features = since(t0);

    t0 = Clock::now();
    auto admissible = admissible_features(graph, groups, candidates, config.workers);
    m.stats.admissible = admissible.size();
    m.stats.seconds_pruning = since(t0);

    t0 = Clock::now();
    m.predicates = make_predicates(groups, admissible);
    auto scan = infer_preconditions(graph, types, m.predicates, config.workers);
    m.domain = build_domain(config.domain_name, types, m.predicates, scan.preconditions);
    auto statics = add_static_predicates(m.domain, graph);
    for (const auto& s : m.domain.schemas) m.static_predicates.push_back("p_" + s.name);
    if (!graph.initial_nodes().empty())
        m.instance = build_instance(graph, m.domain, types, m.predicates, scan, std::move(statics));
    m.stats.seconds_build = since(t0);
    return m;
}

ActionPattern parse_pattern(std::string_view text) {
    auto open = text.find('[');
    if (open == std::string_view::npos || open == 0 || text.back() != ']')
        throw StructuralError("bad action pattern '" + std::string(text) + "'");
    ActionPattern p{std::string(text.substr(0, open)), {}};
    auto body = text.substr(open + 1, text.size() - open - 2);
    while (!body.empty()) {
        auto comma = body.find(',');
        auto num = body.substr(0, comma);
        std::uint32_t v = 0;
        if (num.empty()) throw StructuralError("bad action pattern '" + std::string(text) + "'");
        for (char c : num) {
            if (c < '0' || c > '9') throw StructuralError("bad action pattern '" + std::string(text) + "'");
            v = v * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (v == 0) throw StructuralError("pattern indexes are 1-based in '" + std::string(text) + "'");
        p.args.push_back(v - 1);
        if (comma == std::string_view::npos) break;
        body = body.substr(comma + 1);
    }
    return p;
}

std::string write_sidecar(const LearnedModel& model) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "sift-learned";
    j["version"] = 1;
    j["domain"] = model.domain.name;
    j["predicates"] = ordered_json::array();
    for (const auto& p : model.predicates) {
        ordered_json pj;
        pj["name"] = p.name;
        pj["type"] = ordered_json::array();
        for (auto t : p.type) pj["type"].push_back(TypeAssignment::type_name(t));
        pj["support"] = ordered_json::array();
        for (std::size_t i = 0; i < p.support.size(); ++i)
            pj["support"].push_back(
                {{"pattern", p.support[i].to_string()}, {"sign", p.signs[i]}, {"component", p.components[i]}});
        j["predicates"].push_back(std::move(pj));
    }
    j["statics"] = model.static_predicates;
    j["stats"] = {{"types", model.stats.types},
                  {"max_arity", model.stats.max_arity},
                  {"candidates", model.stats.candidates},
                  {"candidates_by_arity", model.stats.candidates_by_arity},
                  {"admissible", model.stats.admissible}};
    return j.dump(1) + "\n";
}

LearnedModel read_learned(std::string_view domain_pddl, std::string_view sidecar_json,
                          std::optional<std::string_view> instance_pddl) {
    LearnedModel m;
    m.domain = parse_domain(domain_pddl);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sidecar_json);
        if (j.at("format") != "sift-learned" || j.at("version") != 1)
            throw StructuralError("not a sift-learned v1 sidecar");
        for (const auto& pj : j.at("predicates")) {
            LearnedPredicate p;
            p.name = pj.at("name").get<std::string>();
            for (const auto& t : pj.at("type")) {
                auto s = t.get<std::string>();
                if (s.size() < 2 || s[0] != 't') throw StructuralError("bad type name '" + s + "'");
                p.type.push_back(static_cast<TypeId>(std::stoul(s.substr(1))));
            }
            for (const auto& sj : pj.at("support")) {
                p.support.push_back(parse_pattern(sj.at("pattern").get<std::string>()));
                p.signs.push_back(sj.at("sign").get<std::uint8_t>() ? 1 : 0);
                p.components.push_back(sj.value("component", 0U));
            }
            if (p.support.empty() || p.support.size() > 31)
                throw StructuralError("predicate " + p.name + " has an invalid support size");
            if (!m.domain.find_predicate(p.name)) throw StructuralError("predicate " + p.name + " missing from domain");
            m.predicates.push_back(std::move(p));
        }
        for (const auto& s : j.at("statics")) m.static_predicates.push_back(s.get<std::string>());
        if (j.contains("stats")) {
            const auto& st = j["stats"];
            m.stats.types = st.value("types", 0U);
            m.stats.max_arity = st.value("max_arity", 0U);
            m.stats.candidates = st.value("candidates", 0U);
            m.stats.admissible = st.value("admissible", 0U);
            if (st.contains("candidates_by_arity"))
                m.stats.candidates_by_arity = st["candidates_by_arity"].get<std::vector<std::uint64_t>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("sidecar: ") + e.what());
    }
    if (instance_pddl) m.instance = parse_instance(*instance_pddl, m.domain);
    return m;
}

}  // namespace sift
