#include "symwm/core.hpp"
#include "symwm/digest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

using namespace std;

namespace symwm {
TypeHierarchy::TypeHierarchy() {
    parent_[root] = "";
}

void TypeHierarchy::add(const string &name, const string &parent) {
    if (name.empty())
        throw Error("empty type name");
    if (!contains(parent))
        throw Error("unknown parent type '" + parent + "' for '" + name + "'");
    auto it = parent_.find(name);
    if (it != parent_.end()) {
        if (it->second != parent)
            throw Error("type '" + name + "' redeclared with another parent");
        return;
    }
    parent_[name] = parent;
}

bool TypeHierarchy::contains(const string &name) const {
    return parent_.count(name) > 0;
}

bool TypeHierarchy::is_subtype(const string &type,
                               const string &ancestor) const {
    string current = type;
    // The tree is acyclic by construction; the bound is only a guard.
    for (size_t steps = 0; steps <= parent_.size(); ++steps) {
        if (current == ancestor)
            return true;
        auto it = parent_.find(current);
        if (it == parent_.end() || it->second.empty())
            return false;
        current = it->second;
    }
    return false;
}

const string &TypeHierarchy::parent(const string &name) const {
    auto it = parent_.find(name);
    if (it == parent_.end())
        throw Error("unknown type '" + name + "'");
    return it->second;
}

vector<string> TypeHierarchy::names() const {
    vector<string> out;
    for (const auto &[name, p] : parent_)
        out.push_back(name);
    return out;
}

double State::feature(const string &object, const string &name) const {
    auto it = objects.find(object);
    if (it == objects.end())
        throw Error("state has no object '" + object + "'");
    auto f = it->second.find(name);
    if (f == it->second.end())
        throw Error("object '" + object + "' has no feature '" + name + "'");
    return f->second;
}

double State::hidden_value(const string &key, double fallback) const {
    auto it = hidden.find(key);
    return it == hidden.end() ? fallback : it->second;
}

static void append_double(string &out, double v) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

uint64_t State::digest() const {
    string canon = "t=" + to_string(timestep) + ";";
    for (const auto &img : images)
        canon += "img=" + img + ";";
    for (const auto &[obj, feats] : objects) {
        canon += obj + "{";
        for (const auto &[f, v] : feats) {
            canon += f + "=";
            append_double(canon, v);
            canon += ",";
        }
        canon += "}";
    }
    canon += "h{";
    for (const auto &[k, v] : hidden) {
        canon += k + "=";
        append_double(canon, v);
        canon += ",";
    }
    canon += "}";
    return fnv1a64(canon);
}

string to_string(PredicateKind kind) {
    switch (kind) {
    case PredicateKind::visual: return "visual";
    case PredicateKind::feature: return "feature";
    case PredicateKind::provided: return "provided";
    }
    return "visual";
}

PredicateKind predicate_kind_from_string(const string &text) {
    if (text == "visual")
        return PredicateKind::visual;
    if (text == "feature")
        return PredicateKind::feature;
    if (text == "provided")
        return PredicateKind::provided;
    throw Error("unknown predicate kind '" + text + "'");
}

bool FeatureThreshold::holds(const State &state, const string &object) const {
    bool below = state.feature(object, feature) <= threshold;
    return negated ? !below : below;
}

string format_double(double value) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.2f", value);
    string s = buf;
    if (s.find('.') != string::npos) {
        while (s.back() == '0')
            s.pop_back();
        if (s.back() == '.')
            s.pop_back();
    }
    if (s == "-0")
        s = "0";
    return s;
}

string FeatureThreshold::name() const {
    string base = "[[0:" + type + "]." + feature + "<=[idx_0]" +
                  format_double(threshold) + "]";
    return negated ? "NOT-" + base : base;
}

Predicate::Predicate(string name, vector<string> arg_types, PredicateKind kind)
    : name_(move(name)), arg_types_(move(arg_types)), kind_(kind) {
    key_ = name_ + "(" + join(arg_types_, ",") + ")";
}

PredicateRef Predicate::visual(string name, vector<string> arg_types) {
    return PredicateRef(
        new Predicate(move(name), move(arg_types), PredicateKind::visual));
}

PredicateRef Predicate::feature(const FeatureThreshold &classifier) {
    auto *p = new Predicate(classifier.name(), {classifier.type},
                            PredicateKind::feature);
    p->classifier_ = classifier;
    return PredicateRef(p);
}

PredicateRef Predicate::provided(string name, vector<string> arg_types,
                                 ProvidedFn fn) {
    auto *p = new Predicate(move(name), move(arg_types),
                            PredicateKind::provided);
    p->fn_ = move(fn);
    return PredicateRef(p);
}

bool Predicate::has_evaluator() const {
    return (kind_ == PredicateKind::feature && classifier_) ||
           (kind_ == PredicateKind::provided && fn_);
}

bool Predicate::evaluate(const State &state, span<const string> args) const {
    if (args.size() != arg_types_.size())
        throw ArityMismatch("predicate " + name_ + " expects " +
                            to_string(arg_types_.size()) + " arguments");
    if (kind_ == PredicateKind::feature && classifier_)
        return classifier_->holds(state, args[0]);
    if (kind_ == PredicateKind::provided && fn_)
        return fn_(state, args);
    throw Error("predicate " + name_ + " has no local evaluator");
}

PredicateRef Predicate::renamed(const string &new_name) const {
    auto *p = new Predicate(*this);
    p->name_ = new_name;
    p->key_ = new_name + "(" + join(arg_types_, ",") + ")";
    return PredicateRef(p);
}

string Predicate::declaration() const {
    if (arg_types_.empty())
        return name_;
    map<char, int> seen;
    for (const auto &t : arg_types_)
        ++seen[t.empty() ? 'x' : t[0]];
    map<char, int> used;
    vector<string> parts;
    for (const auto &t : arg_types_) {
        char c = t.empty() ? 'x' : t[0];
        string var = string("?") + c;
        if (seen[c] > 1)
            var += to_string(used[c]++);
        parts.push_back(var + ":" + t);
    }
    return name_ + "(" + join(parts, ", ") + ")";
}

bool same_predicate(const PredicateRef &a, const PredicateRef &b) {
    return a == b || a->key() == b->key();
}

bool GroundAtom::operator==(const GroundAtom &other) const {
    return same_predicate(predicate, other.predicate) && args == other.args;
}

bool GroundAtom::operator<(const GroundAtom &other) const {
    if (predicate != other.predicate) {
        int c = predicate->key().compare(other.predicate->key());
        if (c != 0)
            return c < 0;
    }
    return args < other.args;
}

string GroundAtom::str() const {
    return predicate->name() + "(" + join(args, ", ") + ")";
}

AtomSet::AtomSet(vector<GroundAtom> atoms) : atoms_(move(atoms)) {
    sort(atoms_.begin(), atoms_.end());
    atoms_.erase(unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool AtomSet::contains(const GroundAtom &atom) const {
    return binary_search(atoms_.begin(), atoms_.end(), atom);
}

void AtomSet::insert(const GroundAtom &atom) {
    auto it = lower_bound(atoms_.begin(), atoms_.end(), atom);
    if (it == atoms_.end() || !(*it == atom))
        atoms_.insert(it, atom);
}

void AtomSet::erase(const GroundAtom &atom) {
    auto it = lower_bound(atoms_.begin(), atoms_.end(), atom);
    if (it != atoms_.end() && *it == atom)
        atoms_.erase(it);
}

bool AtomSet::subset_of(const AtomSet &other) const {
    return includes(other.atoms_.begin(), other.atoms_.end(), atoms_.begin(),
                    atoms_.end());
}

AtomSet AtomSet::minus(const AtomSet &other) const {
    AtomSet out;
    set_difference(atoms_.begin(), atoms_.end(), other.atoms_.begin(),
                   other.atoms_.end(), back_inserter(out.atoms_));
    return out;
}

AtomSet AtomSet::united(const AtomSet &other) const {
    AtomSet out;
    set_union(atoms_.begin(), atoms_.end(), other.atoms_.begin(),
              other.atoms_.end(), back_inserter(out.atoms_));
    return out;
}

string AtomSet::str() const {
    vector<string> parts;
    for (const auto &a : atoms_)
        parts.push_back(a.str());
    return "{" + join(parts, ", ") + "}";
}

bool LiftedAtom::operator==(const LiftedAtom &other) const {
    return same_predicate(predicate, other.predicate) && args == other.args;
}

bool LiftedAtom::operator<(const LiftedAtom &other) const {
    if (predicate != other.predicate) {
        int c = predicate->name().compare(other.predicate->name());
        if (c != 0)
            return c < 0;
        c = predicate->key().compare(other.predicate->key());
        if (c != 0)
            return c < 0;
    }
    return args < other.args;
}

string LiftedAtom::str() const {
    vector<string> parts;
    for (const auto &v : args)
        parts.push_back(v.str());
    return predicate->name() + "(" + join(parts, ", ") + ")";
}

GroundAtom LiftedAtom::ground(const map<string, string> &binding) const {
    GroundAtom atom{predicate, {}};
    atom.args.reserve(args.size());
    for (const auto &v : args) {
        auto it = binding.find(v.name);
        if (it == binding.end())
            throw Error("unbound variable " + v.name + " in " + str());
        atom.args.push_back(it->second);
    }
    return atom;
}

string Action::str(const vector<Object> &objects_in_scope) const {
    vector<string> parts;
    for (const auto &name : objects)
        parts.push_back(name + ":" + find_object(objects_in_scope, name).type);
    return skill->name + "[" + join(parts, ", ") + "]";
}

SkillRef DomainSpec::skill(const string &skill_name) const {
    for (const auto &s : skills)
        if (s->name == skill_name)
            return s;
    throw Error("domain " + name + " has no skill '" + skill_name + "'");
}

PredicateRef DomainSpec::init_predicate(const string &pred_name) const {
    for (const auto &p : init_predicates)
        if (p->name() == pred_name)
            return p;
    throw Error("domain " + name + " has no predicate '" + pred_name + "'");
}

const Object &find_object(const vector<Object> &objects, const string &name) {
    for (const auto &o : objects)
        if (o.name == name)
            return o;
    throw Error("unknown object '" + name + "'");
}

GroundAtom ground(const PredicateRef &predicate, const vector<string> &args,
                  const vector<Object> &objects, const TypeHierarchy &types) {
    if (args.size() != predicate->arity())
        throw ArityMismatch(predicate->name() + " takes " +
                            to_string(predicate->arity()) + " arguments, got " +
                            to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i) {
        const Object &o = find_object(objects, args[i]);
        if (!types.is_subtype(o.type, predicate->arg_types()[i]))
            throw TypeMismatch(predicate->name() + " argument " +
                               to_string(i) + " expects " +
                               predicate->arg_types()[i] + ", got " + o.name +
                               ":" + o.type);
    }
    return GroundAtom{predicate, args};
}

AtomSet apply(const AtomSet &state, const AtomSet &add, const AtomSet &del) {
    return state.minus(del).united(add);
}

bool goal_holds(const vector<GroundAtom> &goal, const AtomSet &state) {
    for (const auto &g : goal)
        if (!state.contains(g))
            return false;
    return true;
}

vector<GroundAtom> groundings(const PredicateRef &predicate,
                              const vector<Object> &objects,
                              const TypeHierarchy &types) {
    vector<vector<string>> choices;
    for (const auto &t : predicate->arg_types()) {
        vector<string> fit;
        for (const auto &o : objects)
            if (types.is_subtype(o.type, t))
                fit.push_back(o.name);
        if (fit.empty())
            return {};
        choices.push_back(move(fit));
    }
    vector<GroundAtom> out;
    vector<string> current(choices.size());
    function<void(size_t)> rec = [&](size_t i) {
        if (i == choices.size()) {
            out.push_back(GroundAtom{predicate, current});
            return;
        }
        for (const auto &name : choices[i]) {
            // Repeated objects are never meaningful for these predicates.
            if (find(current.begin(), current.begin() + i, name) !=
                current.begin() + i)
                continue;
            current[i] = name;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

string join(const vector<string> &parts, const string &sep) {
    string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

string to_lower(string text) {
    transform(text.begin(), text.end(), text.begin(),
              [](unsigned char c) {return static_cast<char>(tolower(c));});
    return text;
}
}
