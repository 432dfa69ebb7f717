#include "symwm/isomorphism.hpp"

#include <functional>

using namespace std;

namespace symwm {
namespace {
struct Maps {
    map<string, string> fwd;
    map<string, string> back;
};

bool bind(Maps &m, const PredicateRef &a, const PredicateRef &b) {
    if (a->arg_types() != b->arg_types())
        return false;
    auto f = m.fwd.find(a->key());
    if (f != m.fwd.end())
        return f->second == b->key();
    if (m.back.count(b->key()))
        return false;
    m.fwd[a->key()] = b->key();
    m.back[b->key()] = a->key();
    return true;
}

using Cont = function<bool(Maps &)>;

// Pairs a[i..] with unused members of b, consistently with sigma and m.
bool match_atoms(const vector<LiftedAtom> &a, const vector<LiftedAtom> &b,
                 size_t i, vector<char> &used, const map<string, string> &sigma,
                 Maps &m, const Cont &next) {
    if (i == a.size())
        return next(m);
    for (size_t j = 0; j < b.size(); ++j) {
        if (used[j] || a[i].args.size() != b[j].args.size())
            continue;
        bool args_ok = true;
        for (size_t k = 0; k < a[i].args.size() && args_ok; ++k)
            args_ok = sigma.at(a[i].args[k].name) == b[j].args[k].name;
        if (!args_ok)
            continue;
        Maps trial = m;
        if (!bind(trial, a[i].predicate, b[j].predicate))
            continue;
        used[j] = 1;
        if (match_atoms(a, b, i + 1, used, sigma, trial, next)) {
            m = trial;
            return true;
        }
        used[j] = 0;
    }
    return false;
}

bool match_lists(const Operator &a, const Operator &b,
                 const map<string, string> &sigma, Maps &m, const Cont &next) {
    const vector<LiftedAtom> Operator::*lists[] = {
        &Operator::preconditions, &Operator::add_effects,
        &Operator::delete_effects};
    function<bool(size_t, Maps &)> step = [&](size_t l, Maps &cur) {
        if (l == 3)
            return next(cur);
        const auto &la = a.*lists[l];
        const auto &lb = b.*lists[l];
        vector<char> used(lb.size(), 0);
        return match_atoms(la, lb, 0, used, sigma, cur,
                           [&](Maps &mm) {return step(l + 1, mm);});
    };
    return step(0, m);
}

bool shapes_agree(const Operator &a, const Operator &b) {
    if (a.skill->name != b.skill->name || a.params.size() != b.params.size() ||
        a.skill_args.size() != b.skill_args.size() ||
        a.preconditions.size() != b.preconditions.size() ||
        a.add_effects.size() != b.add_effects.size() ||
        a.delete_effects.size() != b.delete_effects.size())
        return false;
    for (size_t k = 0; k < a.skill_args.size(); ++k)
        if (a.skill_args[k].type != b.skill_args[k].type)
            return false;
    return true;
}

// Tries every type-preserving parameter bijection from a to b.
bool match_operator(const Operator &a, const Operator &b, Maps &m,
                    const Cont &next) {
    if (!shapes_agree(a, b))
        return false;
    map<string, string> sigma;
    vector<char> taken(b.params.size(), 0);
    function<bool(size_t)> assign = [&](size_t i) -> bool {
        if (i == a.params.size()) {
            for (size_t k = 0; k < a.skill_args.size(); ++k)
                if (sigma.at(a.skill_args[k].name) != b.skill_args[k].name)
                    return false;
            Maps trial = m;
            if (!match_lists(a, b, sigma, trial, next))
                return false;
            m = trial;
            return true;
        }
        for (size_t j = 0; j < b.params.size(); ++j) {
            if (taken[j] || a.params[i].type != b.params[j].type)
                continue;
            taken[j] = 1;
            sigma[a.params[i].name] = b.params[j].name;
            if (assign(i + 1))
                return true;
            taken[j] = 0;
        }
        return false;
    };
    return assign(0);
}

optional<ModelMatch> inject(const vector<Operator> &a, const vector<Operator> &b) {
    if (a.size() > b.size())
        return nullopt;
    ModelMatch result;
    vector<char> used(b.size(), 0);
    function<bool(size_t, Maps &)> rec = [&](size_t i, Maps &m) -> bool {
        if (i == a.size()) {
            result.predicates = m.fwd;
            return true;
        }
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j])
                continue;
            used[j] = 1;
            Maps trial = m;
            if (match_operator(a[i], b[j], trial,
                               [&](Maps &mm) {return rec(i + 1, mm);})) {
                result.operators[a[i].name] = b[j].name;
                return true;
            }
            used[j] = 0;
        }
        return false;
    };
    Maps m;
    if (!rec(0, m))
        return nullopt;
    return result;
}
}

optional<ModelMatch> match_models(const vector<Operator> &a,
                                  const vector<Operator> &b) {
    if (a.size() != b.size())
        return nullopt;
    return inject(a, b);
}

bool contains_schemas(const vector<Operator> &model,
                      const vector<Operator> &wanted) {
    return inject(wanted, model).has_value();
}
}
