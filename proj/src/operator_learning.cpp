#include "symwm/operator_learning.hpp"

#include <algorithm>
#include <functional>
#include <set>

using namespace std;

namespace symwm {
const string &Transition::type_of(const string &object) const {
    return find_object(*objects, object).type;
}

vector<Transition> abstract_demos(const vector<Demonstration> &demos,
                                  const vector<PredicateRef> &predicates,
                                  AbstractionCache &cache) {
    vector<PredicateRef> visual;
    for (const auto &p : predicates)
        if (!p->has_evaluator())
            visual.push_back(p);

    vector<Transition> out;
    for (size_t d = 0; d < demos.size(); ++d) {
        const Demonstration &demo = demos[d];
        if (demo.states.size() != demo.actions.size() + 1)
            throw Error("demonstration " + to_string(d) +
                        " needs one more state than actions");
        auto objects = make_shared<const vector<Object>>(demo.objects);
        vector<AtomSet> abs;
        for (size_t t = 0; t < demo.states.size(); ++t) {
            LabelContext ctx;
            if (t > 0 && !visual.empty()) {
                AtomSet prev = cache.abstract(demo.states[t - 1], visual,
                                              demo.objects);
                ctx.previous_state = demo.states[t - 1];
                ctx.previous_action = demo.actions[t - 1];
                ctx.objects = demo.objects;
                for (const auto &a : prev)
                    ctx.previous_labels.emplace_back(a, Label::yes);
                if (ctx.previous_labels.empty())
                    ctx = LabelContext();
            }
            cache.prime(demo.states[t], predicates, demo.objects, ctx);
            abs.push_back(cache.abstract(demo.states[t], predicates,
                                         demo.objects));
        }
        for (size_t t = 0; t < demo.actions.size(); ++t) {
            Transition tr;
            tr.before = abs[t];
            tr.action = demo.actions[t];
            tr.after = abs[t + 1];
            tr.demo = static_cast<int>(d);
            tr.step = static_cast<int>(t);
            tr.objects = objects;
            out.push_back(move(tr));
        }
    }
    return out;
}

namespace {
struct TaggedAtom {
    bool add;
    const GroundAtom *atom;
};

vector<TaggedAtom> effects_of(const AtomSet &add, const AtomSet &del) {
    vector<TaggedAtom> out;
    for (const auto &a : add)
        out.push_back({true, &a});
    for (const auto &a : del)
        out.push_back({false, &a});
    return out;
}

string effect_signature(const Transition &t, const AtomSet &add,
                        const AtomSet &del) {
    string sig = t.action.skill->name + "/" + to_string(t.action.objects.size());
    for (const auto &o : t.action.objects)
        sig += "," + t.type_of(o);
    sig += "|+";
    for (const auto &a : add)
        sig += a.predicate->key() + ";";
    sig += "|-";
    for (const auto &a : del)
        sig += a.predicate->key() + ";";
    return sig;
}
}

optional<map<string, string>> unify_transitions(const Transition &a,
                                                const Transition &b) {
    if (a.action.skill->name != b.action.skill->name ||
        a.action.objects.size() != b.action.objects.size())
        return nullopt;
    AtomSet a_add = a.add_effects(), a_del = a.delete_effects();
    AtomSet b_add = b.add_effects(), b_del = b.delete_effects();
    if (a_add.size() != b_add.size() || a_del.size() != b_del.size())
        return nullopt;
    if (effect_signature(a, a_add, a_del) != effect_signature(b, b_add, b_del))
        return nullopt;

    map<string, string> fwd, bwd;
    auto bind = [&](const string &x, const string &y,
                    vector<string> &fresh) -> bool {
        auto f = fwd.find(x);
        if (f != fwd.end())
            return f->second == y;
        if (bwd.count(y))
            return false;
        if (a.type_of(x) != b.type_of(y))
            return false;
        fwd[x] = y;
        bwd[y] = x;
        fresh.push_back(x);
        return true;
    };
    auto undo = [&](vector<string> &fresh) {
        for (const auto &x : fresh) {
            bwd.erase(fwd[x]);
            fwd.erase(x);
        }
        fresh.clear();
    };
    {
        vector<string> fresh;
        for (size_t i = 0; i < a.action.objects.size(); ++i)
            if (!bind(a.action.objects[i], b.action.objects[i], fresh))
                return nullopt;
    }

    vector<TaggedAtom> lhs = effects_of(a_add, a_del);
    vector<TaggedAtom> rhs = effects_of(b_add, b_del);
    vector<bool> used(rhs.size(), false);
    function<bool(size_t)> match = [&](size_t i) -> bool {
        if (i == lhs.size())
            return true;
        const TaggedAtom &l = lhs[i];
        for (size_t j = 0; j < rhs.size(); ++j) {
            const TaggedAtom &r = rhs[j];
            if (used[j] || r.add != l.add ||
                !same_predicate(r.atom->predicate, l.atom->predicate))
                continue;
            vector<string> fresh;
            bool ok = true;
            for (size_t k = 0; k < l.atom->args.size() && ok; ++k)
                ok = bind(l.atom->args[k], r.atom->args[k], fresh);
            if (ok) {
                used[j] = true;
                if (match(i + 1))
                    return true;
                used[j] = false;
            }
            undo(fresh);
        }
        return false;
    };
    if (!match(0))
        return nullopt;
    return fwd;
}

vector<EquivalenceClass> partition(const vector<Transition> &transitions) {
    vector<EquivalenceClass> classes;
    map<string, vector<size_t>> buckets;  // signature -> class indices
    for (size_t i = 0; i < transitions.size(); ++i) {
        const Transition &t = transitions[i];
        string sig = effect_signature(t, t.add_effects(), t.delete_effects());
        auto &bucket = buckets[sig];
        bool placed = false;
        for (size_t c : bucket) {
            const Transition &rep = transitions[classes[c].members.front()];
            if (auto m = unify_transitions(rep, t)) {
                classes[c].members.push_back(i);
                classes[c].bindings.push_back(move(*m));
                placed = true;
                break;
            }
        }
        if (!placed) {
            EquivalenceClass cls;
            cls.members.push_back(i);
            map<string, string> self;
            for (const auto &o : t.action.objects)
                self[o] = o;
            for (const auto &set : {t.add_effects(), t.delete_effects()})
                for (const auto &a : set)
                    for (const auto &o : a.args)
                        self[o] = o;
            cls.bindings.push_back(move(self));
            bucket.push_back(classes.size());
            classes.push_back(move(cls));
        }
    }
    return classes;
}

Skeleton induce_skeleton(const EquivalenceClass &cls,
                         const vector<Transition> &transitions) {
    const Transition &rep = transitions[cls.members.front()];
    // Variables follow the sorted names of the representative's objects.
    vector<string> objs;
    for (const auto &[o, _] : cls.bindings.front())
        objs.push_back(o);
    sort(objs.begin(), objs.end());
    map<string, Variable> var_of;
    Skeleton sk;
    for (size_t i = 0; i < objs.size(); ++i) {
        Variable v{"?x" + to_string(i), rep.type_of(objs[i])};
        var_of[objs[i]] = v;
        sk.op.params.push_back(v);
    }
    auto lift = [&](const AtomSet &atoms) {
        vector<LiftedAtom> out;
        for (const auto &a : atoms) {
            LiftedAtom la{a.predicate, {}};
            for (const auto &arg : a.args)
                la.args.push_back(var_of.at(arg));
            out.push_back(move(la));
        }
        sort(out.begin(), out.end());
        return out;
    };
    sk.op.add_effects = lift(rep.add_effects());
    sk.op.delete_effects = lift(rep.delete_effects());
    sk.op.skill = rep.action.skill;
    for (const auto &o : rep.action.objects)
        sk.op.skill_args.push_back(var_of.at(o));
    sk.op.support_count = static_cast<int>(cls.members.size());
    for (const auto &binding : cls.bindings) {
        map<string, string> sub;
        for (const auto &[rep_obj, member_obj] : binding)
            sub[var_of.at(rep_obj).name] = member_obj;
        sk.substitutions.push_back(move(sub));
    }
    return sk;
}

void learn_preconditions(Skeleton &skeleton, const EquivalenceClass &cls,
                         const vector<Transition> &transitions,
                         double h_pre_frac) {
    map<string, Variable> vars;
    for (const auto &v : skeleton.op.params)
        vars[v.name] = v;
    map<LiftedAtom, int> counts;
    for (size_t m = 0; m < cls.members.size(); ++m) {
        const Transition &t = transitions[cls.members[m]];
        map<string, Variable> inverse;
        for (const auto &[var, obj] : skeleton.substitutions[m])
            inverse[obj] = vars.at(var);
        set<LiftedAtom> seen;
        for (const auto &a : t.before) {
            LiftedAtom la{a.predicate, {}};
            bool inside = true;
            for (const auto &arg : a.args) {
                auto it = inverse.find(arg);
                if (it == inverse.end()) {
                    inside = false;
                    break;
                }
                la.args.push_back(it->second);
            }
            if (inside && seen.insert(la).second)
                ++counts[la];
        }
    }
    double n = static_cast<double>(cls.members.size());
    skeleton.op.preconditions.clear();
    for (const auto &[la, c] : counts)
        if (c / n >= h_pre_frac)
            skeleton.op.preconditions.push_back(la);
    sort(skeleton.op.preconditions.begin(), skeleton.op.preconditions.end());
}

vector<Operator> prune_low_data(const vector<Operator> &operators,
                                const vector<Transition> &transitions,
                                double h_data_frac) {
    map<string, int> per_skill;
    for (const auto &t : transitions)
        ++per_skill[t.action.skill->name];
    vector<Operator> kept;
    for (const auto &op : operators) {
        int total = per_skill[op.skill->name];
        if (total == 0)
            continue;
        if (static_cast<double>(op.support_count) / total >= h_data_frac)
            kept.push_back(op);
    }
    return kept;
}

LearnedOperators learn_operators(const vector<Transition> &transitions,
                                 const LearnConfig &config) {
    LearnedOperators all;
    vector<EquivalenceClass> classes = partition(transitions);
    for (size_t i = 0; i < classes.size(); ++i) {
        Skeleton sk = induce_skeleton(classes[i], transitions);
        learn_preconditions(sk, classes[i], transitions, config.h_pre_frac);
        sk.op.name = "Op" + to_string(i);
        all.operators.push_back(sk.op);
        all.classes.push_back(classes[i]);
        all.skeletons.push_back(move(sk));
    }
    if (!config.prune)
        return all;
    vector<Operator> kept =
        prune_low_data(all.operators, transitions, config.h_data_frac);
    LearnedOperators out;
    size_t k = 0;
    for (size_t i = 0; i < all.operators.size() && k < kept.size(); ++i) {
        if (all.operators[i].name != kept[k].name)
            continue;
        out.operators.push_back(all.operators[i]);
        out.classes.push_back(all.classes[i]);
        out.skeletons.push_back(all.skeletons[i]);
        ++k;
    }
    return out;
}
}
