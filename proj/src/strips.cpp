#include "strips.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "error.hpp"

namespace sift {

std::string ActionSchema::param_name(std::size_t i) const {
    if (i < param_names.size() && !param_names[i].empty()) return param_names[i];
    return "x" + std::to_string(i + 1);
}

const PredicateSymbol* StripsDomain::find_predicate(std::string_view name) const {
    for (const auto& p : predicates)
        if (p.name == name) return &p;
    return nullptr;
}

const ActionSchema* StripsDomain::find_schema(std::string_view name) const {
    for (const auto& s : schemas)
        if (s.name == name) return &s;
    return nullptr;
}

std::set<std::string> StripsDomain::static_predicates() const {
    std::set<std::string> result;
    for (const auto& p : predicates) result.insert(p.name);
    for (const auto& s : schemas)
        for (const auto& e : s.effects) result.erase(e.predicate);
    return result;
}

std::string GroundAtom::to_string() const {
    std::string out = "(" + predicate;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

std::string GroundAction::to_string() const {
    std::string out = "(" + name;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

namespace {

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct SchemaKey {
    std::string name;
    std::size_t arity;
    std::vector<std::string> param_types;
    std::vector<SchemaLiteral> pre;
    std::vector<SchemaLiteral> eff;
    auto operator<=>(const SchemaKey&) const = default;
};

SchemaKey schema_key(const ActionSchema& s) {
    return {s.name, s.arity, s.param_types, sorted(s.preconditions), sorted(s.effects)};
}

}  // namespace

bool structurally_equal(const StripsDomain& a, const StripsDomain& b) {
    if (a.name != b.name) return false;
    auto pred_key = [](const StripsDomain& d) {
        std::vector<std::tuple<std::string, std::size_t, std::vector<std::string>>> keys;
        for (const auto& p : d.predicates) keys.emplace_back(p.name, p.arity, p.arg_types);
        return sorted(keys);
    };
    if (pred_key(a) != pred_key(b)) return false;
    std::vector<SchemaKey> sa, sb;
    for (const auto& s : a.schemas) sa.push_back(schema_key(s));
    for (const auto& s : b.schemas) sb.push_back(schema_key(s));
    return sorted(sa) == sorted(sb);
}

bool structurally_equal(const StripsInstance& a, const StripsInstance& b) {
    return a.name == b.name && a.domain_name == b.domain_name && sorted(a.objects) == sorted(b.objects) &&
           sorted(a.init) == sorted(b.init);
}

std::string literal_to_string(const SchemaLiteral& literal, const ActionSchema& schema) {
    std::string atom = "(" + literal.predicate;
    for (auto i : literal.args) atom += " ?" + schema.param_name(i);
    atom += ")";
    return literal.positive ? atom : "(not " + atom + ")";
}

std::string WellFormednessViolation::to_string(const ActionSchema& s) const {
    return s.name + ": effect " + literal_to_string(effect, s) + " lacks precondition " +
           literal_to_string(effect.complement(), s);
}

void validate_domain(const StripsDomain& domain) {
    std::set<std::string> names;
    for (const auto& p : domain.predicates)
        if (!names.insert(p.name).second) throw StructuralError("duplicate predicate '" + p.name + "'");
    std::set<std::string> schema_names;
    for (const auto& s : domain.schemas) {
        if (s.name.empty()) throw StructuralError("action schema with empty name");
        if (!schema_names.insert(s.name).second) throw StructuralError("duplicate action schema '" + s.name + "'");
        auto check_list = [&](const std::vector<SchemaLiteral>& lits, const char* what) {
            std::set<std::pair<std::string, std::vector<std::uint32_t>>> pos, neg;
            for (const auto& l : lits) {
                const auto* p = domain.find_predicate(l.predicate);
                if (p == nullptr)
                    throw StructuralError(s.name + ": undeclared predicate '" + l.predicate + "' in " + what);
                if (p->arity != l.args.size())
                    throw StructuralError(s.name + ": predicate '" + l.predicate + "' used with wrong arity in " +
                                          what);
                for (auto a : l.args)
                    if (a >= s.arity) throw StructuralError(s.name + ": parameter index out of range in " + what);
                (l.positive ? pos : neg).insert({l.predicate, l.args});
            }
            for (const auto& k : pos)
                if (neg.count(k))
                    throw StructuralError(s.name + ": literal and its complement both in " + std::string(what));
        };
        check_list(s.preconditions, "preconditions");
        check_list(s.effects, "effects");
        std::set<std::pair<std::string, std::vector<std::uint32_t>>> atoms;
        for (const auto& e : s.effects)
            if (!atoms.insert({e.predicate, e.args}).second)
                throw StructuralError(s.name + ": effect atom repeated");
    }
}

void validate_instance(const StripsInstance& instance, const StripsDomain& domain) {
    std::set<std::string> objects(instance.objects.begin(), instance.objects.end());
    if (objects.size() != instance.objects.size()) throw StructuralError("duplicate object in instance");
    std::map<GroundAtom, bool> signs;
    for (const auto& l : instance.init) {
        const auto* p = domain.find_predicate(l.atom.predicate);
        if (p == nullptr) throw StructuralError("init: undeclared predicate '" + l.atom.predicate + "'");
        if (p->arity != l.atom.args.size())
            throw StructuralError("init: wrong arity for '" + l.atom.predicate + "'");
        for (const auto& a : l.atom.args)
            if (!objects.count(a)) throw StructuralError("init: undeclared object '" + a + "'");
        auto [it, inserted] = signs.emplace(l.atom, l.positive);
        if (!inserted && it->second != l.positive)
            throw StructuralError("init: atom " + l.atom.to_string() + " listed with both signs");
    }
}

std::vector<WellFormednessViolation> check_well_formed(const StripsDomain& domain) {
    std::vector<WellFormednessViolation> out;
    for (const auto& s : domain.schemas) {
        std::set<SchemaLiteral> pre(s.preconditions.begin(), s.preconditions.end());
        for (const auto& e : s.effects)
            if (!pre.count(e.complement())) out.push_back({s.name, e});
    }
    return out;
}

std::size_t State::hash() const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto w : words_) {
        std::uint64_t z = w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        h ^= z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
}

GroundTask::GroundTask(const StripsDomain& domain, const StripsInstance& instance)
    : domain_(domain), objects_(instance.objects) {
    validate_domain(domain_);
    validate_instance(instance, domain_);
    for (std::size_t i = 0; i < objects_.size(); ++i) object_index_.emplace(objects_[i], static_cast<ObjectId>(i));
    auto statics = domain_.static_predicates();
    for (std::size_t i = 0; i < domain_.predicates.size(); ++i) {
        predicate_index_.emplace(domain_.predicates[i].name, static_cast<std::uint32_t>(i));
        predicate_static_.push_back(statics.count(domain_.predicates[i].name) > 0);
    }
    std::vector<std::pair<std::uint32_t, std::vector<ObjectId>>> init_dynamic;
    for (const auto& l : instance.init) {
        if (!l.positive) continue;
        auto p = predicate_index_.at(l.atom.predicate);
        std::vector<ObjectId> args;
        for (const auto& a : l.atom.args) args.push_back(object_index_.at(a));
        if (predicate_static_[p])
            static_true_.insert(atom_key(p, args));
        else
            init_dynamic.emplace_back(p, std::move(args));
    }
    for (const auto& [p, args] : init_dynamic) initial_true_.push_back(intern_atom(p, args));
    build_actions();
    initial_ = State(atoms_.size());
    for (auto a : initial_true_) initial_.set(a);
}

std::string GroundTask::atom_key(std::uint32_t predicate, std::span<const ObjectId> args) const {
    std::string key;
    key.reserve(4 * (args.size() + 1));
    auto put = [&key](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) key.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    put(predicate);
    for (auto a : args) put(a);
    return key;
}

AtomId GroundTask::intern_atom(std::uint32_t predicate, std::span<const ObjectId> args) {
    auto key = atom_key(predicate, args);
    auto [it, inserted] = atom_index_.emplace(std::move(key), static_cast<AtomId>(atoms_.size()));
    if (inserted) atoms_.emplace_back(predicate, std::vector<ObjectId>(args.begin(), args.end()));
    return it->second;
}

void GroundTask::build_actions() {
    const auto object_count = static_cast<ObjectId>(objects_.size());
    for (std::uint32_t si = 0; si < domain_.schemas.size(); ++si) {
        const auto& schema = domain_.schemas[si];
        const auto k = schema.arity;
        // Static literals are checked as soon as their last argument is bound.
        std::vector<std::vector<const SchemaLiteral*>> checks(k + 1);
        for (const auto& l : schema.preconditions) {
            auto p = predicate_index_.at(l.predicate);
            if (!predicate_static_[p]) continue;
            std::size_t depth = 0;
            for (auto a : l.args) depth = std::max<std::size_t>(depth, a + 1);
            checks[depth].push_back(&l);
        }
        std::vector<ObjectId> binding(k, 0);
        std::vector<ObjectId> scratch;
        auto static_ok = [&](std::size_t depth) {
            for (const auto* l : checks[depth]) {
                scratch.clear();
                for (auto a : l->args) scratch.push_back(binding[a]);
                bool holds = static_true_.count(atom_key(predicate_index_.at(l->predicate), scratch)) > 0;
                if (holds != l->positive) return false;
            }
            return true;
        };
        auto emit = [&]() {
            Action act;
            act.schema = si;
            act.args = binding;
            auto ground = [&](const SchemaLiteral& l) {
                scratch.clear();
                for (auto a : l.args) scratch.push_back(binding[a]);
                return intern_atom(predicate_index_.at(l.predicate), scratch);
            };
            for (const auto& l : schema.preconditions) {
                if (predicate_static_[predicate_index_.at(l.predicate)]) continue;
                (l.positive ? act.pre_pos : act.pre_neg).push_back(ground(l));
            }
            for (const auto& l : schema.effects) (l.positive ? act.add : act.del).push_back(ground(l));
            for (auto* v : {&act.pre_pos, &act.pre_neg, &act.add, &act.del}) {
                std::sort(v->begin(), v->end());
                v->erase(std::unique(v->begin(), v->end()), v->end());
            }
            // Bindings that make the preconditions contradictory can never fire.
            for (auto a : act.pre_pos)
                if (std::binary_search(act.pre_neg.begin(), act.pre_neg.end(), a)) return;
            std::string key = atom_key(si, act.args);
            action_index_.emplace(std::move(key), static_cast<ActionId>(actions_.size()));
            actions_.push_back(std::move(act));
        };
        if (!static_ok(0)) continue;
        if (k == 0) {
            emit();
            continue;
        }
        if (object_count == 0) continue;
        std::size_t depth = 0;
        binding[0] = 0;
        // Iterative backtracking over parameter bindings in lexicographic order.
        while (true) {
            bool ok = static_ok(depth + 1);
            if (ok && depth + 1 == k) emit();
            if (ok && depth + 1 < k) {
                ++depth;
                binding[depth] = 0;
                continue;
            }
            while (true) {
                if (++binding[depth] < object_count) break;
                if (depth == 0) goto next_schema;
                --depth;
            }
        }
    next_schema:;
    }
}

std::vector<ActionId> GroundTask::applicable(const State& state) const {
    std::vector<ActionId> out;
    for (ActionId id = 0; id < actions_.size(); ++id)
        if (is_applicable(state, id)) out.push_back(id);
    return out;
}

bool GroundTask::is_applicable(const State& state, ActionId id) const {
    const auto& a = actions_[id];
    for (auto p : a.pre_pos)
        if (!state.test(p)) return false;
    for (auto p : a.pre_neg)
        if (state.test(p)) return false;
    return true;
}

State GroundTask::apply(const State& state, ActionId id) const {
    if (!is_applicable(state, id)) throw InapplicableActionError("action " + ground_action(id).to_string() +
                                                                 " is not applicable");
    State next = state;
    const auto& a = actions_[id];
    for (auto d : a.del) next.reset(d);
    for (auto d : a.add) next.set(d);
    return next;
}

GroundAction GroundTask::ground_action(ActionId id) const {
    const auto& a = actions_.at(id);
    GroundAction g{domain_.schemas[a.schema].name, {}};
    for (auto o : a.args) g.args.push_back(objects_[o]);
    return g;
}

std::optional<ActionId> GroundTask::find_action(const GroundAction& action) const {
    std::uint32_t si = 0;
    for (; si < domain_.schemas.size(); ++si)
        if (domain_.schemas[si].name == action.name) break;
    if (si == domain_.schemas.size()) throw StructuralError("unknown action '" + action.name + "'");
    if (domain_.schemas[si].arity != action.args.size())
        throw StructuralError("action '" + action.name + "' used with wrong arity");
    std::vector<ObjectId> args;
    for (const auto& o : action.args) {
        auto it = object_index_.find(o);
        if (it == object_index_.end()) throw StructuralError("unknown object '" + o + "'");
        args.push_back(it->second);
    }
    auto it = action_index_.find(atom_key(si, args));
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
}

GroundAtom GroundTask::atom(AtomId id) const {
    const auto& [p, args] = atoms_.at(id);
    GroundAtom g{domain_.predicates[p].name, {}};
    for (auto o : args) g.args.push_back(objects_[o]);
    return g;
}

std::optional<AtomId> GroundTask::find_atom(const GroundAtom& atom) const {
    auto pit = predicate_index_.find(atom.predicate);
    if (pit == predicate_index_.end()) throw StructuralError("unknown predicate '" + atom.predicate + "'");
    std::vector<ObjectId> args;
    for (const auto& o : atom.args) {
        auto it = object_index_.find(o);
        if (it == object_index_.end()) throw StructuralError("unknown object '" + o + "'");
        args.push_back(it->second);
    }
    auto it = atom_index_.find(atom_key(pit->second, args));
    if (it == atom_index_.end()) return std::nullopt;
    return it->second;
}

bool GroundTask::static_holds(const GroundAtom& atom) const {
    auto pit = predicate_index_.find(atom.predicate);
    if (pit == predicate_index_.end()) return false;
    std::vector<ObjectId> args;
    for (const auto& o : atom.args) {
        auto it = object_index_.find(o);
        if (it == object_index_.end()) return false;
        args.push_back(it->second);
    }
    return static_true_.count(atom_key(pit->second, args)) > 0;
}

GroundState GroundTask::to_ground_state(const State& state) const {
    GroundState out;
    for (AtomId a = 0; a < atoms_.size(); ++a)
        if (state.test(a)) out.insert(atom(a));
    for (const auto& key : static_true_) {
        auto get = [&key](std::size_t i) {
            std::uint32_t v = 0;
            for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[4 * i + b])) << (8 * b);
            return v;
        };
        GroundAtom g{domain_.predicates[get(0)].name, {}};
        for (std::size_t i = 1; i < key.size() / 4; ++i) g.args.push_back(objects_[get(i)]);
        out.insert(std::move(g));
    }
    return out;
}

State GroundTask::from_ground_state(const GroundState& atoms) const {
    State s(atoms_.size());
    for (const auto& g : atoms) {
        auto p = predicate_index_.find(g.predicate);
        if (p == predicate_index_.end()) throw StructuralError("unknown predicate '" + g.predicate + "'");
        if (predicate_static_[p->second]) continue;
        if (auto id = find_atom(g)) s.set(*id);
    }
    return s;
}

GroundState initial_ground_state(const StripsInstance& instance) {
    GroundState s;
    for (const auto& l : instance.init)
        if (l.positive) s.insert(l.atom);
    return s;
}

namespace {

StripsInstance with_state(const StripsInstance& instance, const GroundState& state) {
    StripsInstance copy;
    copy.name = instance.name;
    copy.domain_name = instance.domain_name;
    copy.objects = instance.objects;
    for (const auto& a : state) copy.init.push_back({a, true});
    return copy;
}

}  // namespace

std::vector<GroundAction> applicable_actions(const StripsDomain& domain, const StripsInstance& instance,
                                             const GroundState& state) {
    GroundTask task(domain, with_state(instance, state));
    std::vector<GroundAction> out;
    for (auto id : task.applicable(task.initial_state())) out.push_back(task.ground_action(id));
    return out;
}

GroundState apply(const StripsDomain& domain, const StripsInstance& instance, const GroundState& state,
                  const GroundAction& action) {
    GroundTask task(domain, with_state(instance, state));
    auto id = task.find_action(action);
    if (!id) throw InapplicableActionError("action " + action.to_string() + " violates a static precondition");
    return task.to_ground_state(task.apply(task.initial_state(), *id));
}

}  // namespace sift
