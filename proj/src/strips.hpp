#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sift {

using ObjectId = std::uint32_t;
using AtomId = std::uint32_t;
using ActionId = std::uint32_t;

struct PredicateSymbol {
    std::string name;
    std::size_t arity = 0;
    std::vector<std::string> arg_types;  // documentation only, may be empty
    std::string comment;                 // emitted above the declaration, not compared

    bool operator==(const PredicateSymbol& other) const {
        return name == other.name && arity == other.arity && arg_types == other.arg_types;
    }
};

/// Literal inside a schema; `args` index the schema's parameter list.
struct SchemaLiteral {
    std::string predicate;
    std::vector<std::uint32_t> args;
    bool positive = true;

    auto operator<=>(const SchemaLiteral&) const = default;

    SchemaLiteral complement() const { return {predicate, args, !positive}; }
};

struct ActionSchema {
    std::string name;
    std::size_t arity = 0;
    std::vector<std::string> param_names;  // without the leading '?'; empty means x1..xk
    std::vector<std::string> param_types;  // documentation only, may be empty
    std::vector<SchemaLiteral> preconditions;
    std::vector<SchemaLiteral> effects;

    std::string param_name(std::size_t i) const;
};

struct StripsDomain {
    std::string name;
    std::vector<PredicateSymbol> predicates;
    std::vector<ActionSchema> schemas;

    const PredicateSymbol* find_predicate(std::string_view name) const;
    const ActionSchema* find_schema(std::string_view name) const;

    /// Predicates that never occur in any effect.
    std::set<std::string> static_predicates() const;
};

struct GroundAtom {
    std::string predicate;
    std::vector<std::string> args;

    auto operator<=>(const GroundAtom&) const = default;
    std::string to_string() const;
};

struct SignedAtom {
    GroundAtom atom;
    bool positive = true;

    auto operator<=>(const SignedAtom&) const = default;
};

struct GroundAction {
    std::string name;
    std::vector<std::string> args;

    auto operator<=>(const GroundAction&) const = default;
    std::string to_string() const;
};

/// Goals are not represented; only the initial situation matters for learning.
struct StripsInstance {
    std::string name;
    std::string domain_name;
    std::vector<std::string> objects;
    std::vector<std::string> object_types;  // documentation only, parallel to objects or empty
    std::vector<SignedAtom> init;
};

/// Closed-world set of true ground atoms.
using GroundState = std::set<GroundAtom>;

/// Structural comparison that ignores declaration order and documentation fields.
bool structurally_equal(const StripsDomain& a, const StripsDomain& b);
bool structurally_equal(const StripsInstance& a, const StripsInstance& b);

/// Throws StructuralError when schema or domain invariants are broken.
void validate_domain(const StripsDomain& domain);
void validate_instance(const StripsInstance& instance, const StripsDomain& domain);

struct WellFormednessViolation {
    std::string schema;
    SchemaLiteral effect;

    std::string to_string(const ActionSchema& schema) const;
};

/// One record per (schema, effect) whose complement is missing from the preconditions.
std::vector<WellFormednessViolation> check_well_formed(const StripsDomain& domain);

std::string literal_to_string(const SchemaLiteral& literal, const ActionSchema& schema);

/// Fixed-size bitset over the dynamic atoms of a GroundTask.
class State {
public:
    State() = default;
    explicit State(std::size_t atom_count) : words_((atom_count + 63) / 64, 0) {}

    bool test(AtomId atom) const { return (words_[atom >> 6] >> (atom & 63)) & 1U; }
    void set(AtomId atom) { words_[atom >> 6] |= (std::uint64_t{1} << (atom & 63)); }
    void reset(AtomId atom) { words_[atom >> 6] &= ~(std::uint64_t{1} << (atom & 63)); }

    bool operator==(const State&) const = default;
    std::size_t hash() const noexcept;
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

private:
    std::vector<std::uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

/// Ground successor model of one instance. Ground actions are fixed at
/// construction: every parameter binding that satisfies the static
/// preconditions. Dynamic preconditions are checked per state.
class GroundTask {
public:
    struct Action {
        std::uint32_t schema = 0;
        std::vector<ObjectId> args;
        std::vector<AtomId> pre_pos;
        std::vector<AtomId> pre_neg;
        std::vector<AtomId> add;
        std::vector<AtomId> del;
    };

    GroundTask(const StripsDomain& domain, const StripsInstance& instance);

    const StripsDomain& domain() const noexcept { return domain_; }
    const std::vector<std::string>& objects() const noexcept { return objects_; }
    std::size_t atom_count() const noexcept { return atoms_.size(); }
    std::size_t action_count() const noexcept { return actions_.size(); }
    const Action& action(ActionId id) const { return actions_.at(id); }

    State initial_state() const { return initial_; }
    /// Sorted by schema declaration order, then argument tuple.
    std::vector<ActionId> applicable(const State& state) const;
    bool is_applicable(const State& state, ActionId id) const;
    /// Throws InapplicableActionError if the preconditions do not hold.
    State apply(const State& state, ActionId id) const;

    GroundAction ground_action(ActionId id) const;
    /// Throws StructuralError on unknown schema or object names; nullopt when the
    /// binding violates a static precondition.
    std::optional<ActionId> find_action(const GroundAction& action) const;

    GroundAtom atom(AtomId id) const;
    std::optional<AtomId> find_atom(const GroundAtom& atom) const;
    bool static_holds(const GroundAtom& atom) const;

    GroundState to_ground_state(const State& state) const;
    State from_ground_state(const GroundState& atoms) const;

private:
    std::string atom_key(std::uint32_t predicate, std::span<const ObjectId> args) const;
    AtomId intern_atom(std::uint32_t predicate, std::span<const ObjectId> args);
    void build_actions();

    StripsDomain domain_;
    std::vector<std::string> objects_;
    std::unordered_map<std::string, ObjectId> object_index_;
    std::unordered_map<std::string, std::uint32_t> predicate_index_;
    std::vector<bool> predicate_static_;
    std::unordered_map<std::string, AtomId> atom_index_;
    std::vector<std::pair<std::uint32_t, std::vector<ObjectId>>> atoms_;
    std::set<std::string> static_true_;
    std::vector<Action> actions_;
    std::unordered_map<std::string, ActionId> action_index_;
    std::vector<AtomId> initial_true_;
    State initial_;
};

/// Set-based convenience wrappers: `state` is the complete closed-world situation.
std::vector<GroundAction> applicable_actions(const StripsDomain& domain, const StripsInstance& instance,
                                             const GroundState& state);
GroundState apply(const StripsDomain& domain, const StripsInstance& instance, const GroundState& state,
                  const GroundAction& action);

/// Closed-world initial situation of an instance (true atoms only).
GroundState initial_ground_state(const StripsInstance& instance);

}  // namespace sift
