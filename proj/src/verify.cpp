#include "verify.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>

#include <json.hpp>

#include "error.hpp"

namespace sift {
namespace {

constexpr std::size_t kMaxWitnesses = 10;

/// Learned precondition of one schema over one learned predicate.
struct Obligation {
    const ActionSchema* schema;
    SchemaLiteral literal;
};

class WitnessSink {
public:
    void add(Witness w) {
        ++failures_;
        std::lock_guard lock(mutex_);
        witnesses_.insert(std::move(w));
        if (witnesses_.size() > kMaxWitnesses) witnesses_.erase(std::prev(witnesses_.end()));
    }
    void fill(CheckReport& r) const {
        r.failures += failures_.load();
        r.witnesses.assign(witnesses_.begin(), witnesses_.end());
    }

private:
    std::atomic<std::size_t> failures_{0};
    std::mutex mutex_;
    std::set<Witness> witnesses_;
};

std::string ground_literal(const TraceGraph& graph, const Label& label, const SchemaLiteral& lit) {
    std::string atom = "(" + lit.predicate;
    for (auto i : lit.args) atom += " " + graph.objects()[label.args[i]];
    atom += ")";
    return lit.positive ? atom : "(not " + atom + ")";
}

/// Labels of `graph` whose action has a learned schema of the same arity.
std::vector<const ActionSchema*> schema_per_label(const LearnedModel& model, const TraceGraph& graph) {
    std::vector<const ActionSchema*> out(graph.labels().size(), nullptr);
    for (LabelId l = 0; l < graph.labels().size(); ++l) {
        const auto& label = graph.label(l);
        const auto* s = model.domain.find_schema(graph.action_names()[label.name]);
        if (s && s->arity == label.args.size()) out[l] = s;
    }
    return out;
}

using SliceCallback = std::function<void(const GroundingSlice&, const ComponentLookup&,
                                         const std::optional<std::vector<std::int8_t>>& values, EdgeId conflict,
                                         std::span<const std::pair<LabelId, const SchemaLiteral*>> entries)>;

/// Per learned predicate, evaluates its slices on `graph` and hands over the
/// (label, precondition) pairs that read each grounding.
void for_each_obligation(const LearnedModel& model, const TraceGraph& graph,
                         const std::vector<const ActionSchema*>& schemas, std::size_t workers,
                         const SliceCallback& fn) {
    for (const auto& pred : model.predicates) {
        std::map<std::vector<ObjectId>, std::vector<std::pair<LabelId, const SchemaLiteral*>>> bucket;
        for (LabelId l = 0; l < graph.labels().size(); ++l) {
            if (!schemas[l]) continue;
            const auto& label = graph.label(l);
            for (const auto& lit : schemas[l]->preconditions) {
                if (lit.predicate != pred.name) continue;
                std::vector<ObjectId> key;
                for (auto i : lit.args) key.push_back(label.args[i]);
                bucket[key].emplace_back(l, &lit);
            }
        }
        if (bucket.empty()) continue;
        auto group = pred.group();
        visit_slices(graph, group, workers, [&](std::size_t, const GroundingSlice& slice, const ComponentLookup& lookup) {
            EdgeId conflict = 0;
            auto values = propagate_slice(slice, pred.full_mask(), pred.signs, &conflict);
            auto it = bucket.find(slice.key);
            std::span<const std::pair<LabelId, const SchemaLiteral*>> entries;
            if (it != bucket.end()) entries = it->second;
            fn(slice, lookup, values, conflict, entries);
        });
    }
}

std::vector<std::vector<EdgeId>> edges_by_label(const TraceGraph& graph) {
    std::vector<std::vector<EdgeId>> out(graph.labels().size());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) out[graph.edge(e).label].push_back(e);
    return out;
}

}  // namespace

CheckReport check_compatibility(const LearnedModel& model, const TraceGraph& test, std::size_t workers) {
    CheckReport report;
    auto schemas = schema_per_label(model, test);
    for (const auto& e : test.edges())
        if (!schemas[e.label]) ++report.incomparable;
    auto by_label = edges_by_label(test);
    std::atomic<std::size_t> obligations{0};
    WitnessSink sink;
    for_each_obligation(model, test, schemas, workers,
                        [&](const GroundingSlice& slice, const ComponentLookup& lookup, const auto& values,
                            EdgeId conflict, auto entries) {
                            if (!values) {
                                const auto& e = test.edge(conflict);
                                std::string key;
                                for (auto o : slice.key) key += " " + test.objects()[o];
                                sink.add({e.src, test.ground_action(e.label), "effects conflict on grounding (" +
                                                                                   key.substr(key.empty() ? 0 : 1) + ")"});
                                return;
                            }
                            std::size_t count = 0;
                            for (auto [l, lit] : entries) {
                                for (auto e : by_label[l]) {
                                    ++count;
                                    auto src = test.edge(e).src;
                                    auto c = lookup(src);
                                    if (!c) continue;
                                    auto v = (*values)[*c];
                                    if (v == kUndefined || (v == 1) == lit->positive) continue;
                                    sink.add({src, test.ground_action(l), ground_literal(test, test.label(l), *lit)});
                                }
                            }
                            obligations += count;
                        });
    report.obligations = obligations.load();
    sink.fill(report);
    return report;
}

CheckReport check_inapplicability(const LearnedModel& model, const GroundTask& hidden, const Sample& test,
                                  std::size_t workers) {
    CheckReport report;
    const auto& graph = test.graph;
    auto schemas = schema_per_label(model, graph);
    for (const auto& e : graph.edges())
        if (!schemas[e.label]) ++report.incomparable;

    // Per trace: its node sequence, its comparable labels, and a rejection flag per (prefix, label).
    struct TraceProbes {
        std::vector<NodeId> nodes;
        std::vector<LabelId> labels;
        std::vector<std::uint8_t> rejected;
    };
    std::vector<TraceProbes> traces(graph.traces().size());
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> where(graph.labels().size());  // (trace, local)
    for (std::uint32_t t = 0; t < traces.size(); ++t) {
        const auto& edges = graph.traces()[t];
        auto& tp = traces[t];
        if (edges.empty()) continue;
        tp.nodes.push_back(graph.edge(edges.front()).src);
        for (auto e : edges) tp.nodes.push_back(graph.edge(e).dst);
        std::set<LabelId> seen;
        for (auto e : edges)
            if (schemas[graph.edge(e).label]) seen.insert(graph.edge(e).label);
        tp.labels.assign(seen.begin(), seen.end());
        for (std::uint32_t i = 0; i < tp.labels.size(); ++i) where[tp.labels[i]].emplace_back(t, i);
        tp.rejected.assign(tp.nodes.size() * tp.labels.size(), 0);
    }

    for_each_obligation(model, graph, schemas, workers,
                        [&](const GroundingSlice&, const ComponentLookup& lookup, const auto& values, EdgeId,
                            auto entries) {
                            if (!values) return;  // reported by the compatibility check
                            for (auto [l, lit] : entries) {
                                for (auto [t, local] : where[l]) {
                                    auto& tp = traces[t];
                                    for (std::size_t j = 0; j < tp.nodes.size(); ++j) {
                                        auto c = lookup(tp.nodes[j]);
                                        if (!c) continue;
                                        auto v = (*values)[*c];
                                        if (v == kUndefined || (v == 1) == lit->positive) continue;
                                        std::atomic_ref<std::uint8_t>(tp.rejected[j * tp.labels.size() + local])
                                            .store(1, std::memory_order_relaxed);
                                    }
                                }
                            }
                        });

    std::vector<ActionId> hidden_id(graph.labels().size(), 0);
    for (LabelId l = 0; l < graph.labels().size(); ++l) {
        if (!schemas[l]) continue;
        auto id = hidden.find_action(graph.ground_action(l));
        if (!id) throw StructuralError("test action " + graph.ground_action(l).to_string() + " is not executable");
        hidden_id[l] = *id;
    }
    WitnessSink sink;
    for (const auto& tp : traces) {
        for (std::size_t j = 0; j < tp.nodes.size(); ++j) {
            const auto& state = test.hidden.at(tp.nodes[j]);
            for (std::size_t i = 0; i < tp.labels.size(); ++i) {
                if (hidden.is_applicable(state, hidden_id[tp.labels[i]])) continue;
                ++report.obligations;
                if (tp.rejected[j * tp.labels.size() + i]) continue;
                sink.add({tp.nodes[j], graph.ground_action(tp.labels[i]), "inapplicable in the hidden task but accepted"});
            }
        }
    }
    sink.fill(report);
    return report;
}

bool VerificationReport::passed() const noexcept {
    return std::all_of(inputs.begin(), inputs.end(), [](const InputReport& r) { return r.passed(); });
}

std::string VerificationReport::to_json() const {
    using nlohmann::ordered_json;
    auto check = [](const CheckReport& c) {
        ordered_json j;
        j["passed"] = c.passed();
        j["obligations"] = c.obligations;
        j["failures"] = c.failures;
        j["incomparable"] = c.incomparable;
        j["witnesses"] = ordered_json::array();
        for (const auto& w : c.witnesses)
            j["witnesses"].push_back({{"node", w.node}, {"action", w.action.to_string()}, {"detail", w.detail}});
        return j;
    };
    ordered_json j;
    j["passed"] = passed();
    j["inputs"] = ordered_json::array();
    for (const auto& in : inputs)
        j["inputs"].push_back({{"name", in.name},
                               {"compatibility", check(in.compatibility)},
                               {"inapplicability", check(in.inapplicability)}});
    return j.dump(1) + "\n";
}

VerificationReport verify(const LearnedModel& model, const GroundTask& hidden, std::span<const NamedSample> tests,
                          std::size_t workers) {
    VerificationReport out;
    for (const auto& t : tests)
        out.inputs.push_back({t.name, check_compatibility(model, t.sample.graph, workers),
                              check_inapplicability(model, hidden, t.sample, workers)});
    return out;
}

double verification_rate(std::span<const bool> runs) {
    if (runs.empty()) throw EmptyInputError("verification rate over zero runs");
    auto ok = std::count(runs.begin(), runs.end(), true);
    return static_cast<double>(ok) / static_cast<double>(runs.size());
}

ReplayResult replay(const LearnedModel& model, std::span<const GroundAction> trace) {
    if (!model.instance) throw StructuralError("learned model has no instance");
    std::set<std::string> statics(model.static_predicates.begin(), model.static_predicates.end());
    std::map<GroundAtom, bool> state;
    for (const auto& a : model.instance->init) state[a.atom] = a.positive;
    auto ground = [](const SchemaLiteral& lit, const GroundAction& act) {
        GroundAtom a{lit.predicate, {}};
        for (auto i : lit.args) a.args.push_back(act.args.at(i));
        return a;
    };
    for (std::size_t step = 0; step < trace.size(); ++step) {
        const auto& act = trace[step];
        const auto* s = model.domain.find_schema(act.name);
        if (!s || s->arity != act.args.size()) return {false, step, "no learned schema for " + act.to_string()};
        for (const auto& lit : s->preconditions) {
            auto atom = ground(lit, act);
            auto it = state.find(atom);
            std::optional<bool> value;
            if (it != state.end()) value = it->second;
            else if (statics.count(lit.predicate)) value = false;
            if (value && *value != lit.positive)
                return {false, step, act.to_string() + " needs " + (lit.positive ? "" : "not ") + atom.to_string()};
        }
        for (const auto& lit : s->effects)
            if (!lit.positive) state[ground(lit, act)] = false;
        for (const auto& lit : s->effects)
            if (lit.positive) state[ground(lit, act)] = true;
    }
    return {};
}

}  // namespace sift
