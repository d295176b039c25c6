#include "pddl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"

namespace sift {
namespace {

constexpr std::size_t kMaxDepth = 64;

struct Sexp {
    bool is_list = false;
    std::string atom;  // lowercased symbol when !is_list
    std::vector<Sexp> items;
    SourceSpan span;

    bool is_atom(std::string_view s) const { return !is_list && atom == s; }
};

bool symbol_char(unsigned char c) {
    if (c <= 0x20 || c >= 0x7F) return false;
    return c != '(' && c != ')' && c != ';';
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<Sexp> read_all() {
        std::vector<Sexp> out;
        while (skip_blank(), pos_ < text_.size()) out.push_back(read(0));
        return out;
    }

private:
    SourceSpan here(std::size_t len = 1) const {
        return {pos_, std::min(pos_ + len, text_.size()), line_, col_};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else {
                break;
            }
        }
    }

    Sexp read(std::size_t depth) {
        skip_blank();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", here(0));
        Sexp node;
        node.span = here();
        unsigned char c = static_cast<unsigned char>(text_[pos_]);
        if (c == '(') {
            if (depth >= kMaxDepth) throw ParseError("nesting too deep", here());
            node.is_list = true;
            advance();
            while (true) {
                skip_blank();
                if (pos_ >= text_.size()) throw ParseError("unbalanced '(': missing ')'", node.span);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                node.items.push_back(read(depth + 1));
            }
            node.span.end = pos_;
            return node;
        }
        if (c == ')') throw ParseError("unexpected ')'", here());
        if (!symbol_char(c)) throw ParseError("invalid character", here());
        while (pos_ < text_.size() && symbol_char(static_cast<unsigned char>(text_[pos_]))) {
            char ch = text_[pos_];
            node.atom.push_back(static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch));
            advance();
        }
        node.span.end = pos_;
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

[[noreturn]] void fail(const std::string& message, const Sexp& at) { throw ParseError(message, at.span); }

const Sexp& expect_list(const Sexp& s, const char* what) {
    if (!s.is_list) fail(std::string("expected ") + what, s);
    return s;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    unsigned char c = static_cast<unsigned char>(s[0]);
    if (!((c >= 'a' && c <= 'z') || c == '_')) return false;
    for (char ch : s)
        if (!((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.'))
            return false;
    return true;
}

const std::string& expect_name(const Sexp& s, const char* what) {
    if (s.is_list || !valid_name(s.atom)) fail(std::string("expected ") + what, s);
    return s.atom;
}

/// Splits a define form into its header name and the keyword sections.
struct DefineForm {
    std::string kind;
    std::string name;
    std::vector<const Sexp*> sections;
};

DefineForm read_define(const std::vector<Sexp>& top, std::string_view kind, std::string_view text) {
    if (top.empty()) throw ParseError("empty input", SourceSpan{0, 0, 1, 1});
    if (top.size() > 1) fail("trailing content after define form", top[1]);
    const Sexp& def = top[0];
    expect_list(def, "(define ...)");
    if (def.items.empty() || !def.items[0].is_atom("define")) fail("expected 'define'", def);
    if (def.items.size() < 2) fail("missing header", def);
    const Sexp& header = expect_list(def.items[1], "header list");
    if (header.items.size() != 2 || !header.items[0].is_atom(kind))
        fail("expected (" + std::string(kind) + " <name>)", header);
    DefineForm form;
    form.kind = std::string(kind);
    form.name = expect_name(header.items[1], "name");
    for (std::size_t i = 2; i < def.items.size(); ++i) {
        const Sexp& sec = def.items[i];
        if (!sec.is_list || sec.items.empty() || sec.items[0].is_list || sec.items[0].atom.empty() ||
            sec.items[0].atom[0] != ':')
            fail("expected a keyword section", sec);
        form.sections.push_back(&sec);
    }
    (void)text;
    return form;
}

/// `?a ?b - t ?c` style list. Types stay empty when no '-' occurs.
struct TypedEntry {
    std::string name;
    std::string type;
    const Sexp* node;
};

std::vector<TypedEntry> read_typed_list(const std::vector<Sexp>& items, std::size_t from, bool variables) {
    std::vector<TypedEntry> out;
    std::size_t untyped_start = 0;
    bool any_type = false;
    for (std::size_t i = from; i < items.size(); ++i) {
        const Sexp& it = items[i];
        if (it.is_list) fail("unexpected list in typed list", it);
        if (it.atom == "-") {
            if (i + 1 >= items.size()) fail("missing type after '-'", it);
            const Sexp& t = items[i + 1];
            if (t.is_list) fail("either-types are not supported", t);
            const auto& type = expect_name(t, "type name");
            if (untyped_start == out.size()) fail("'-' without preceding names", it);
            for (std::size_t j = untyped_start; j < out.size(); ++j) out[j].type = type;
            untyped_start = out.size();
            any_type = true;
            ++i;
            continue;
        }
        std::string name = it.atom;
        if (variables) {
            if (name.size() < 2 || name[0] != '?') fail("expected variable", it);
            name = name.substr(1);
        }
        if (!valid_name(name)) fail(variables ? "invalid variable name" : "invalid name", it);
        out.push_back({name, "", &it});
    }
    if (any_type)
        for (std::size_t j = untyped_start; j < out.size(); ++j) out[j].type = "object";
    return out;
}

void read_requirements(const Sexp& sec) {
    static const std::set<std::string> accepted = {":strips", ":typing", ":negative-preconditions"};
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
        const Sexp& r = sec.items[i];
        if (r.is_list || !accepted.count(r.atom)) fail("unsupported requirement", r);
    }
}

struct LiteralForm {
    std::string predicate;
    std::vector<const Sexp*> args;
    bool positive;
    const Sexp* node;
};

LiteralForm read_literal(const Sexp& s) {
    expect_list(s, "literal");
    if (s.items.empty()) fail("empty literal", s);
    const Sexp* atom = &s;
    bool positive = true;
    if (s.items[0].is_atom("not")) {
        if (s.items.size() != 2) fail("'not' takes exactly one atom", s);
        atom = &expect_list(s.items[1], "atom inside 'not'");
        positive = false;
        if (atom->items.empty()) fail("empty atom", *atom);
        if (atom->items[0].is_atom("not")) fail("double negation is not supported", *atom);
    }
    const Sexp& head = atom->items[0];
    if (head.is_atom("and") || head.is_atom("or") || head.is_atom("forall") || head.is_atom("exists") ||
        head.is_atom("when") || head.is_atom("imply") || head.is_atom("="))
        fail("unsupported connective '" + head.atom + "'", head);
    LiteralForm lit{expect_name(head, "predicate name"), {}, positive, &s};
    for (std::size_t i = 1; i < atom->items.size(); ++i) {
        if (atom->items[i].is_list) fail("nested term in atom", atom->items[i]);
        lit.args.push_back(&atom->items[i]);
    }
    return lit;
}

/// `(and l1 l2 ...)`, a single literal, or `()`.
std::vector<LiteralForm> read_conjunction(const Sexp& s) {
    expect_list(s, "conjunction");
    std::vector<LiteralForm> out;
    if (s.items.empty()) return out;
    if (s.items[0].is_atom("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i) out.push_back(read_literal(s.items[i]));
        return out;
    }
    out.push_back(read_literal(s));
    return out;
}

SchemaLiteral bind_literal(const LiteralForm& lit, const StripsDomain& domain,
                           const std::map<std::string, std::uint32_t>& params) {
    const auto* pred = domain.find_predicate(lit.predicate);
    if (pred == nullptr) fail("undeclared predicate '" + lit.predicate + "'", *lit.node);
    if (pred->arity != lit.args.size()) fail("wrong arity for '" + lit.predicate + "'", *lit.node);
    SchemaLiteral out{lit.predicate, {}, lit.positive};
    for (const Sexp* a : lit.args) {
        if (a->atom.empty() || a->atom[0] != '?') fail("constants are not supported in schemas", *a);
        auto it = params.find(a->atom.substr(1));
        if (it == params.end()) fail("unknown parameter '" + a->atom + "'", *a);
        out.args.push_back(it->second);
    }
    return out;
}

void check_literal_set(const std::vector<SchemaLiteral>& lits, const std::vector<LiteralForm>& forms,
                       bool effects) {
    std::map<std::pair<std::string, std::vector<std::uint32_t>>, std::size_t> seen;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        auto key = std::make_pair(lits[i].predicate, lits[i].args);
        auto [it, inserted] = seen.emplace(key, i);
        if (inserted) continue;
        if (lits[it->second].positive != lits[i].positive)
            fail("literal and its complement both present", *forms[i].node);
        if (effects) fail("effect atom repeated", *forms[i].node);
    }
}

ActionSchema read_action(const Sexp& sec, const StripsDomain& domain) {
    if (sec.items.size() < 2) fail("missing action name", sec);
    ActionSchema schema;
    schema.name = expect_name(sec.items[1], "action name");
    std::map<std::string, std::uint32_t> params;
    bool seen_params = false, seen_pre = false, seen_eff = false;
    std::vector<LiteralForm> pre_forms, eff_forms;
    for (std::size_t i = 2; i < sec.items.size(); i += 2) {
        const Sexp& key = sec.items[i];
        if (key.is_list) fail("expected action keyword", key);
        if (i + 1 >= sec.items.size()) fail("missing value for '" + key.atom + "'", key);
        const Sexp& value = sec.items[i + 1];
        if (key.atom == ":parameters") {
            if (seen_params) fail("duplicate :parameters", key);
            seen_params = true;
            if (seen_pre || seen_eff) fail(":parameters must come first", key);
            expect_list(value, "parameter list");
            auto entries = read_typed_list(value.items, 0, true);
            for (const auto& e : entries) {
                if (!params.emplace(e.name, static_cast<std::uint32_t>(schema.param_names.size())).second)
                    fail("duplicate parameter '?" + e.name + "'", *e.node);
                schema.param_names.push_back(e.name);
                if (!e.type.empty()) schema.param_types.push_back(e.type);
            }
            schema.arity = schema.param_names.size();
        } else if (key.atom == ":precondition") {
            if (seen_pre) fail("duplicate :precondition", key);
            seen_pre = true;
            pre_forms = read_conjunction(value);
        } else if (key.atom == ":effect") {
            if (seen_eff) fail("duplicate :effect", key);
            seen_eff = true;
            eff_forms = read_conjunction(value);
        } else {
            fail("unsupported action keyword '" + key.atom + "'", key);
        }
    }
    for (const auto& f : pre_forms) schema.preconditions.push_back(bind_literal(f, domain, params));
    for (const auto& f : eff_forms) schema.effects.push_back(bind_literal(f, domain, params));
    check_literal_set(schema.preconditions, pre_forms, false);
    check_literal_set(schema.effects, eff_forms, true);
    auto dedup = [](std::vector<SchemaLiteral>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(schema.preconditions);
    return schema;
}

}  // namespace

StripsDomain parse_domain(std::string_view text) {
    Reader reader(text);
    auto top = reader.read_all();
    auto form = read_define(top, "domain", text);
    StripsDomain domain;
    domain.name = form.name;
    bool seen_predicates = false;
    std::set<std::string> seen_sections;
    for (const Sexp* sec : form.sections) {
        const auto& key = sec->items[0].atom;
        if (key != ":action" && !seen_sections.insert(key).second) fail("duplicate section '" + key + "'", *sec);
        if (key == ":requirements") {
            read_requirements(*sec);
        } else if (key == ":types") {
            read_typed_list(sec->items, 1, false);
        } else if (key == ":predicates") {
            seen_predicates = true;
            for (std::size_t i = 1; i < sec->items.size(); ++i) {
                const Sexp& p = expect_list(sec->items[i], "predicate declaration");
                if (p.items.empty()) fail("empty predicate declaration", p);
                PredicateSymbol sym;
                sym.name = expect_name(p.items[0], "predicate name");
                if (domain.find_predicate(sym.name)) fail("duplicate predicate '" + sym.name + "'", p);
                auto entries = read_typed_list(p.items, 1, true);
                std::set<std::string> vars;
                for (const auto& e : entries) {
                    if (!vars.insert(e.name).second) fail("duplicate variable in predicate", *e.node);
                    if (!e.type.empty()) sym.arg_types.push_back(e.type);
                }
                sym.arity = entries.size();
                domain.predicates.push_back(std::move(sym));
            }
        } else if (key == ":action") {
            if (!seen_predicates) fail(":action before :predicates", *sec);
            auto schema = read_action(*sec, domain);
            if (domain.find_schema(schema.name)) fail("duplicate action schema '" + schema.name + "'", sec->items[1]);
            domain.schemas.push_back(std::move(schema));
        } else {
            fail("unsupported section '" + key + "'", *sec);
        }
    }
    try {
        validate_domain(domain);
    } catch (const StructuralError& e) {
        throw ParseError(e.what(), top[0].span);
    }
    return domain;
}

StripsInstance parse_instance(std::string_view text, const StripsDomain& domain) {
    Reader reader(text);
    auto top = reader.read_all();
    auto form = read_define(top, "problem", text);
    StripsInstance instance;
    instance.name = form.name;
    std::set<std::string> objects;
    std::map<GroundAtom, std::pair<bool, const Sexp*>> init;
    std::set<std::string> seen_sections;
    for (const Sexp* sec : form.sections) {
        const auto& key = sec->items[0].atom;
        if (!seen_sections.insert(key).second) fail("duplicate section '" + key + "'", *sec);
        if (key == ":domain") {
            if (sec->items.size() != 2) fail("expected (:domain <name>)", *sec);
            instance.domain_name = expect_name(sec->items[1], "domain name");
            if (instance.domain_name != domain.name)
                fail("instance refers to domain '" + instance.domain_name + "'", sec->items[1]);
        } else if (key == ":requirements") {
            read_requirements(*sec);
        } else if (key == ":objects") {
            if (!init.empty()) fail(":objects must precede :init", *sec);
            auto entries = read_typed_list(sec->items, 1, false);
            bool typed = !entries.empty() && !entries.front().type.empty();
            for (const auto& e : entries) {
                if (!objects.insert(e.name).second) fail("duplicate object '" + e.name + "'", *e.node);
                instance.objects.push_back(e.name);
                if (typed) instance.object_types.push_back(e.type);
            }
        } else if (key == ":init") {
            for (std::size_t i = 1; i < sec->items.size(); ++i) {
                auto lit = read_literal(sec->items[i]);
                const auto* pred = domain.find_predicate(lit.predicate);
                if (pred == nullptr) fail("undeclared predicate '" + lit.predicate + "'", *lit.node);
                if (pred->arity != lit.args.size()) fail("wrong arity for '" + lit.predicate + "'", *lit.node);
                GroundAtom atom{lit.predicate, {}};
                for (const Sexp* a : lit.args) {
                    if (!objects.count(a->atom)) fail("undeclared object '" + a->atom + "'", *a);
                    atom.args.push_back(a->atom);
                }
                auto [it, inserted] = init.emplace(atom, std::make_pair(lit.positive, lit.node));
                if (!inserted && it->second.first != lit.positive)
                    fail("atom " + atom.to_string() + " listed with both signs", *lit.node);
            }
        } else if (key == ":goal") {
            // Goals are parsed for syntax only.
            if (sec->items.size() != 2) fail("expected a single goal formula", *sec);
        } else {
            fail("unsupported section '" + key + "'", *sec);
        }
    }
    if (instance.domain_name.empty()) fail("missing (:domain ...)", top[0]);
    for (const auto& [atom, value] : init) instance.init.push_back({atom, value.first});
    return instance;
}

namespace {

std::string param_list(const std::vector<std::string>& names, const std::vector<std::string>& types) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += " ";
        out += "?" + names[i];
        if (!types.empty()) out += " - " + types[i];
    }
    return out;
}

void emit_conjunction(std::ostringstream& os, std::vector<SchemaLiteral> lits, const ActionSchema& s) {
    std::sort(lits.begin(), lits.end());
    os << "(and";
    for (const auto& l : lits) os << " " << literal_to_string(l, s);
    os << ")";
}

}  // namespace

std::string emit_domain(const StripsDomain& domain) {
    std::ostringstream os;
    std::set<std::string> types;
    auto preds = domain.predicates;
    auto schemas = domain.schemas;
    std::sort(preds.begin(), preds.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(schemas.begin(), schemas.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (const auto& p : preds) types.insert(p.arg_types.begin(), p.arg_types.end());
    for (const auto& s : schemas) types.insert(s.param_types.begin(), s.param_types.end());
    types.erase("object");
    os << "(define (domain " << (domain.name.empty() ? "unnamed" : domain.name) << ")\n";
    os << "  (:requirements :strips" << (types.empty() ? "" : " :typing") << " :negative-preconditions)\n";
    if (!types.empty()) {
        os << "  (:types";
        for (const auto& t : types) os << " " << t;
        os << ")\n";
    }
    os << "  (:predicates";
    for (const auto& p : preds) {
        os << "\n";
        std::istringstream comment(p.comment);
        for (std::string line; std::getline(comment, line);) os << "    ; " << line << "\n";
        std::vector<std::string> names;
        for (std::size_t i = 0; i < p.arity; ++i) names.push_back("x" + std::to_string(i + 1));
        os << "    (" << p.name << (p.arity ? " " : "") << param_list(names, p.arg_types) << ")";
    }
    os << ")\n";
    for (const auto& s : schemas) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < s.arity; ++i) names.push_back(s.param_name(i));
        os << "  (:action " << s.name << "\n";
        os << "    :parameters (" << param_list(names, s.param_types) << ")\n";
        os << "    :precondition ";
        emit_conjunction(os, s.preconditions, s);
        os << "\n    :effect ";
        emit_conjunction(os, s.effects, s);
        os << ")\n";
    }
    os << ")\n";
    return os.str();
}

std::string emit_instance(const StripsInstance& instance) {
    std::ostringstream os;
    os << "(define (problem " << (instance.name.empty() ? "unnamed" : instance.name) << ")\n";
    os << "  (:domain " << (instance.domain_name.empty() ? "unnamed" : instance.domain_name) << ")\n";
    os << "  (:objects";
    if (instance.object_types.size() == instance.objects.size() && !instance.objects.empty()) {
        std::map<std::string, std::vector<std::string>> by_type;
        for (std::size_t i = 0; i < instance.objects.size(); ++i)
            by_type[instance.object_types[i]].push_back(instance.objects[i]);
        for (auto& [type, objs] : by_type) {
            std::sort(objs.begin(), objs.end());
            os << "\n   ";
            for (const auto& o : objs) os << " " << o;
            os << " - " << type;
        }
    } else {
        auto objs = instance.objects;
        std::sort(objs.begin(), objs.end());
        for (const auto& o : objs) os << " " << o;
    }
    os << ")\n  (:init";
    auto init = instance.init;
    std::sort(init.begin(), init.end());
    for (const auto& l : init) {
        os << "\n    ";
        if (l.positive)
            os << l.atom.to_string();
        else
            os << "(not " << l.atom.to_string() << ")";
    }
    os << ")\n  (:goal (and)))\n";
    return os.str();
}

}  // namespace sift
