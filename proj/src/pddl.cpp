#include "symwm/pddl.hpp"

#include <regex>
#include <set>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
bool plain_identifier(const string &s) {
    static const regex id(R"(^[A-Za-z][A-Za-z0-9_\-]*$)");
    return regex_match(s, id);
}

// PDDL spelling of each predicate key, stable for one predicate list.
map<string, string> pddl_names(const vector<PredicateRef> &predicates) {
    map<string, string> out;
    set<string> taken;
    for (const auto &p : predicates)
        if (plain_identifier(p->name()))
            taken.insert(to_lower(p->name()));
    set<string> plain_used;
    for (size_t i = 0; i < predicates.size(); ++i) {
        const auto &p = predicates[i];
        if (out.count(p->key()))
            continue;
        string name = p->name();
        if (plain_identifier(name) && plain_used.insert(to_lower(name)).second) {
            out[p->key()] = name;
            continue;
        }
        string alias = "p" + std::to_string(i);
        while (taken.count(alias))
            alias += "_";
        taken.insert(alias);
        out[p->key()] = alias;
    }
    return out;
}

string atom_text(const string &name, const vector<string> &args) {
    string s = "(" + name;
    for (const auto &a : args)
        s += " " + a;
    return s + ")";
}

string lifted_text(const LiftedAtom &a, const map<string, string> &names) {
    vector<string> args;
    for (const auto &v : a.args)
        args.push_back(v.name);
    return atom_text(names.at(a.predicate->key()), args);
}

string typed_list(const vector<Variable> &vars) {
    vector<string> parts;
    for (const auto &v : vars)
        parts.push_back(v.name + " - " + v.type);
    return join(parts, " ");
}

[[noreturn]] void fail(const Sexpr &at, const string &what) {
    throw PddlSyntaxError(at.line, at.column, what);
}

const Sexpr &expect_list(const Sexpr &e, const string &what) {
    if (!e.is_list)
        fail(e, "expected " + what);
    return e;
}

bool head_is(const Sexpr &e, const string &word) {
    return e.is_list && !e.items.empty() && !e.items[0].is_list &&
           to_lower(e.items[0].atom) == word;
}

// "?a ?b - t ?c - u" or "a b - t".
vector<pair<string, string>> parse_typed(const Sexpr &list, size_t from) {
    vector<pair<string, string>> out;
    vector<string> pending;
    for (size_t i = from; i < list.items.size(); ++i) {
        const Sexpr &e = list.items[i];
        if (e.is_list)
            fail(e, "unexpected list in typed list");
        if (e.atom == "-") {
            if (i + 1 >= list.items.size() || list.items[i + 1].is_list)
                fail(e, "'-' must be followed by a type");
            if (pending.empty())
                fail(e, "type without names");
            for (auto &n : pending)
                out.emplace_back(n, list.items[i + 1].atom);
            pending.clear();
            ++i;
            continue;
        }
        pending.push_back(e.atom);
    }
    for (auto &n : pending)
        out.emplace_back(n, TypeHierarchy::root);
    return out;
}

struct Resolver {
    map<string, PredicateRef> by_pddl;  // pddl name -> predicate
};

vector<const Sexpr *> conjuncts(const Sexpr &e) {
    if (!e.is_list)
        fail(e, "expected a formula");
    if (e.items.empty())
        return {};
    if (head_is(e, "and")) {
        vector<const Sexpr *> out;
        for (size_t i = 1; i < e.items.size(); ++i)
            out.push_back(&expect_list(e.items[i], "a literal"));
        return out;
    }
    return {&e};
}

LiftedAtom parse_lifted(const Sexpr &e, const Resolver &r,
                        const map<string, string> &var_types) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list)
        fail(e, "expected an atom");
    auto it = r.by_pddl.find(to_lower(e.items[0].atom));
    if (it == r.by_pddl.end())
        fail(e.items[0], "undeclared predicate '" + e.items[0].atom + "'");
    LiftedAtom atom{it->second, {}};
    if (e.items.size() - 1 != it->second->arity())
        fail(e, "wrong number of arguments for '" + e.items[0].atom + "'");
    for (size_t i = 1; i < e.items.size(); ++i) {
        const Sexpr &a = e.items[i];
        if (a.is_list)
            fail(a, "nested term");
        auto t = var_types.find(a.atom);
        if (t == var_types.end())
            fail(a, "unknown parameter '" + a.atom + "'");
        atom.args.push_back({a.atom, t->second});
    }
    return atom;
}
}

SexprDocument parse_sexprs(const string &text) {
    SexprDocument doc;
    vector<Sexpr> stack;
    Sexpr root;
    root.is_list = true;
    stack.push_back(root);
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&] {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    while (i < text.size()) {
        char c = text[i];
        if (isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == ';') {
            size_t end = text.find('\n', i);
            if (end == string::npos)
                end = text.size();
            string comment = text.substr(i, end - i);
            if (comment.rfind(";; ", 0) == 0)
                doc.directives.push_back(comment.substr(3));
            while (i < end)
                advance();
        } else if (c == '(') {
            Sexpr e;
            e.is_list = true;
            e.line = line;
            e.column = col;
            stack.push_back(e);
            advance();
        } else if (c == ')') {
            if (stack.size() == 1)
                throw PddlSyntaxError(line, col, "unmatched ')'");
            Sexpr done = move(stack.back());
            stack.pop_back();
            stack.back().items.push_back(move(done));
            advance();
        } else {
            Sexpr e;
            e.line = line;
            e.column = col;
            while (i < text.size() && !isspace(static_cast<unsigned char>(text[i])) &&
                   text[i] != '(' && text[i] != ')' && text[i] != ';') {
                e.atom += text[i];
                advance();
            }
            stack.back().items.push_back(move(e));
        }
    }
    if (stack.size() > 1)
        throw PddlSyntaxError(stack.back().line, stack.back().column,
                              "unclosed '('");
    doc.forms = move(stack.back().items);
    return doc;
}

string emit_pddl(const string &domain_name, const TypeHierarchy &types,
                 const vector<PredicateRef> &predicates,
                 const vector<Operator> &operators) {
    // Operators may mention predicates the caller did not list.
    vector<PredicateRef> all = predicates;
    set<string> seen;
    for (const auto &p : all)
        seen.insert(p->key());
    for (const auto &op : operators)
        for (const auto *list : {&op.preconditions, &op.add_effects,
                                 &op.delete_effects})
            for (const auto &a : *list)
                if (seen.insert(a.predicate->key()).second)
                    all.push_back(a.predicate);
    auto names = pddl_names(all);

    ostringstream out;
    out << "(define (domain " << domain_name << ")\n";
    out << "  (:requirements :strips :typing)\n";
    out << "  (:types";
    for (const auto &t : types.names())
        if (t != TypeHierarchy::root)
            out << "\n    " << t << " - " << types.parent(t);
    out << ")\n";
    set<string> announced;
    for (const auto &p : all) {
        const string &alias = names.at(p->key());
        if (alias != p->name() && announced.insert(alias).second)
            out << "  ;; name " << alias << " " << p->name() << "\n";
    }
    out << "  (:predicates";
    set<string> declared;
    for (const auto &p : all) {
        if (!declared.insert(p->key()).second)
            continue;
        vector<Variable> vars;
        for (size_t k = 0; k < p->arity(); ++k)
            vars.push_back({"?a" + std::to_string(k), p->arg_types()[k]});
        out << "\n    (" << names.at(p->key());
        if (!vars.empty())
            out << " " << typed_list(vars);
        out << ")";
    }
    out << ")\n";
    for (const auto &op : operators) {
        vector<string> skill_vars;
        for (const auto &v : op.skill_args)
            skill_vars.push_back(v.str());
        out << "  ;; skill " << op.name << " "
            << (op.skill ? op.skill->continuous_dim : 0) << " "
            << (op.skill ? op.skill->name : op.name) << "("
            << join(skill_vars, ", ") << ")\n";
        out << "  (:action " << op.name << "\n";
        out << "    :parameters (" << typed_list(op.params) << ")\n";
        out << "    :precondition (and";
        for (const auto &a : op.preconditions)
            out << " " << lifted_text(a, names);
        out << ")\n";
        out << "    :effect (and";
        for (const auto &a : op.add_effects)
            out << " " << lifted_text(a, names);
        for (const auto &a : op.delete_effects)
            out << " (not " << lifted_text(a, names) << ")";
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

PddlDomain parse_pddl(const string &text, const vector<PredicateRef> &known,
                      const vector<SkillRef> &skills) {
    SexprDocument doc = parse_sexprs(text);
    if (doc.forms.size() != 1 || !head_is(doc.forms[0], "define"))
        throw PddlSyntaxError(doc.forms.empty() ? 1 : doc.forms[0].line,
                              doc.forms.empty() ? 1 : doc.forms[0].column,
                              "expected a single (define ...) form");
    const Sexpr &def = doc.forms[0];
    map<string, string> aliases;  // pddl name -> original
    map<string, tuple<int, string, vector<Variable>>> skill_notes;
    for (const auto &d : doc.directives) {
        istringstream in(d);
        string word;
        in >> word;
        if (word == "name") {
            string alias, original;
            in >> alias;
            getline(in >> ws, original);
            aliases[to_lower(alias)] = original;
        } else if (word == "skill") {
            string op, call;
            int dim = 0;
            in >> op >> dim;
            getline(in >> ws, call);
            size_t open = call.find('(');
            if (open == string::npos || call.back() != ')')
                throw PddlSyntaxError(1, 1, "bad skill comment '" + d + "'");
            vector<Variable> vars;
            string inner = call.substr(open + 1, call.size() - open - 2);
            istringstream parts(inner);
            string part;
            while (getline(parts >> ws, part, ',')) {
                size_t colon = part.find(':');
                if (colon == string::npos)
                    throw PddlSyntaxError(1, 1, "bad skill argument '" + part + "'");
                vars.push_back({part.substr(0, colon), part.substr(colon + 1)});
            }
            skill_notes[op] = {dim, call.substr(0, open), vars};
        }
    }

    PddlDomain out;
    Resolver r;
    for (size_t i = 1; i < def.items.size(); ++i) {
        const Sexpr &sec = expect_list(def.items[i], "a section");
        if (head_is(sec, "domain")) {
            if (sec.items.size() != 2 || sec.items[1].is_list)
                fail(sec, "bad domain name");
            out.name = sec.items[1].atom;
        } else if (head_is(sec, ":requirements")) {
            for (size_t k = 1; k < sec.items.size(); ++k) {
                string req = to_lower(sec.items[k].atom);
                if (req != ":strips" && req != ":typing")
                    fail(sec.items[k], "unsupported requirement " + sec.items[k].atom);
            }
        } else if (head_is(sec, ":types")) {
            auto pairs = parse_typed(sec, 1);
            // Parents may be declared after their children.
            set<string> pending;
            for (auto &[name, parent] : pairs)
                pending.insert(name);
            bool progress = true;
            while (!pending.empty() && progress) {
                progress = false;
                for (auto &[name, parent] : pairs) {
                    if (!pending.count(name) || !out.types.contains(parent))
                        continue;
                    out.types.add(name, parent);
                    pending.erase(name);
                    progress = true;
                }
            }
            if (!pending.empty())
                fail(sec, "type '" + *pending.begin() + "' has an unknown parent");
        } else if (head_is(sec, ":predicates")) {
            for (size_t k = 1; k < sec.items.size(); ++k) {
                const Sexpr &decl = sec.items[k];
                if (!decl.is_list || decl.items.empty() || decl.items[0].is_list)
                    fail(decl, "bad predicate declaration");
                string spelled = decl.items[0].atom;
                string original = aliases.count(to_lower(spelled))
                                      ? aliases[to_lower(spelled)]
                                      : spelled;
                vector<string> arg_types;
                for (auto &[v, t] : parse_typed(decl, 1)) {
                    if (!out.types.contains(t))
                        fail(decl, "unknown type '" + t + "'");
                    arg_types.push_back(t);
                }
                PredicateRef p;
                for (const auto &q : known)
                    if (q->name() == original && q->arg_types() == arg_types)
                        p = q;
                if (!p)
                    p = Predicate::visual(original, arg_types);
                if (!r.by_pddl.emplace(to_lower(spelled), p).second)
                    fail(decl, "predicate '" + spelled + "' declared twice");
                out.predicates.push_back(p);
            }
        } else if (head_is(sec, ":action")) {
            if (sec.items.size() < 2 || sec.items[1].is_list)
                fail(sec, "action without a name");
            Operator op;
            op.name = sec.items[1].atom;
            map<string, string> var_types;
            const Sexpr *pre = nullptr, *eff = nullptr;
            for (size_t k = 2; k < sec.items.size(); ++k) {
                const Sexpr &key = sec.items[k];
                string word = to_lower(key.atom);
                if (key.is_list || k + 1 >= sec.items.size())
                    fail(key, "expected a keyword with a value");
                const Sexpr &val = sec.items[++k];
                if (word == ":parameters") {
                    for (auto &[v, t] : parse_typed(expect_list(val, "parameters"), 0)) {
                        if (v.empty() || v[0] != '?')
                            fail(val, "parameter '" + v + "' must start with '?'");
                        if (!out.types.contains(t))
                            fail(val, "unknown type '" + t + "'");
                        op.params.push_back({v, t});
                        var_types[v] = t;
                    }
                } else if (word == ":precondition") {
                    pre = &val;
                } else if (word == ":effect") {
                    eff = &val;
                } else {
                    fail(key, "unsupported action field " + key.atom);
                }
            }
            if (pre)
                for (const Sexpr *lit : conjuncts(*pre)) {
                    if (head_is(*lit, "not"))
                        fail(*lit, "negative preconditions are not STRIPS");
                    op.preconditions.push_back(parse_lifted(*lit, r, var_types));
                }
            if (eff)
                for (const Sexpr *lit : conjuncts(*eff)) {
                    if (head_is(*lit, "not")) {
                        if (lit->items.size() != 2)
                            fail(*lit, "bad negation");
                        op.delete_effects.push_back(
                            parse_lifted(lit->items[1], r, var_types));
                    } else {
                        op.add_effects.push_back(parse_lifted(*lit, r, var_types));
                    }
                }
            auto note = skill_notes.find(op.name);
            if (note != skill_notes.end()) {
                auto &[dim, skill_name, vars] = note->second;
                for (const auto &s : skills)
                    if (s->name == skill_name)
                        op.skill = s;
                if (!op.skill) {
                    vector<string> types;
                    for (const auto &v : vars)
                        types.push_back(v.type);
                    op.skill = make_shared<Skill>(Skill{skill_name, types, dim});
                }
                op.skill_args = vars;
            } else {
                vector<string> types;
                for (const auto &v : op.params)
                    types.push_back(v.type);
                op.skill = make_shared<Skill>(Skill{op.name, types, 0});
                op.skill_args = op.params;
            }
            out.operators.push_back(move(op));
        } else {
            fail(sec, "unsupported section");
        }
    }
    return out;
}

string emit_pddl_problem(const string &problem_name, const string &domain_name,
                         const vector<Object> &objects, const AtomSet &init,
                         const vector<GroundAtom> &goal,
                         const vector<PredicateRef> &predicates) {
    vector<PredicateRef> all = predicates;
    set<string> seen;
    for (const auto &p : all)
        seen.insert(p->key());
    for (const auto &a : init)
        if (seen.insert(a.predicate->key()).second)
            all.push_back(a.predicate);
    for (const auto &a : goal)
        if (seen.insert(a.predicate->key()).second)
            all.push_back(a.predicate);
    auto names = pddl_names(all);
    ostringstream out;
    out << "(define (problem " << problem_name << ")\n";
    out << "  (:domain " << domain_name << ")\n";
    out << "  (:objects";
    for (const auto &o : objects)
        out << "\n    " << o.name << " - " << o.type;
    out << ")\n  (:init";
    for (const auto &a : init)
        out << "\n    " << atom_text(names.at(a.predicate->key()), a.args);
    out << ")\n  (:goal (and";
    for (const auto &a : goal)
        out << " " << atom_text(names.at(a.predicate->key()), a.args);
    out << ")))\n";
    return out.str();
}
}
