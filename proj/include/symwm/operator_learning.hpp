#ifndef SYMWM_OPERATOR_LEARNING_HPP
#define SYMWM_OPERATOR_LEARNING_HPP

#include "core.hpp"
#include "labeling.hpp"

namespace symwm {

struct Transition {
    AtomSet before;
    Action action;
    AtomSet after;
    int demo = 0;
    int step = 0;
    std::shared_ptr<const std::vector<Object>> objects;

    AtomSet add_effects() const {return after.minus(before);}
    AtomSet delete_effects() const {return before.minus(after);}
    const std::string &type_of(const std::string &object) const;
};

struct LearnConfig {
    double h_pre_frac = 0.8;
    double h_data_frac = 0.05;
    bool prune = true;
};

// Members are transition indices. binding[i] maps each relevant object of
// the representative (the first member) to the matching object of member i.
struct EquivalenceClass {
    std::vector<std::size_t> members;
    std::vector<std::map<std::string, std::string>> bindings;
};

// Abstracts every state of every demo. Visual predicates are labeled once
// per state and memoized in the cache.
std::vector<Transition> abstract_demos(const std::vector<Demonstration> &demos,
                                       const std::vector<PredicateRef> &predicates,
                                       AbstractionCache &cache);

// Finds an object bijection under which a and b have the same skill, the
// same skill arguments and the same add and delete sets. Returns the map
// from a's objects to b's.
std::optional<std::map<std::string, std::string>>
unify_transitions(const Transition &a, const Transition &b);

std::vector<EquivalenceClass> partition(const std::vector<Transition> &transitions);

struct Skeleton {
    Operator op;
    // Per member: variable name -> object.
    std::vector<std::map<std::string, std::string>> substitutions;
};

Skeleton induce_skeleton(const EquivalenceClass &cls,
                         const std::vector<Transition> &transitions);

void learn_preconditions(Skeleton &skeleton, const EquivalenceClass &cls,
                         const std::vector<Transition> &transitions,
                         double h_pre_frac);

std::vector<Operator> prune_low_data(const std::vector<Operator> &operators,
                                     const std::vector<Transition> &transitions,
                                     double h_data_frac);

struct LearnedOperators {
    std::vector<Operator> operators;
    std::vector<EquivalenceClass> classes;  // parallel to operators
    std::vector<Skeleton> skeletons;        // parallel to operators
};

LearnedOperators learn_operators(const std::vector<Transition> &transitions,
                                 const LearnConfig &config);
}

#endif
