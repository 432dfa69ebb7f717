#ifndef SYMWM_TESTS_ORACLES_HPP
#define SYMWM_TESTS_ORACLES_HPP

// Deliberately naive reference implementations. Nothing here calls the
// library's learning, grounding or search code.

#include "symwm/operator_learning.hpp"
#include "symwm/planner.hpp"

#include <random>

namespace oracle {
using namespace symwm;

Transition make_transition(const AtomSet &before, const Action &action,
                           const AtomSet &after,
                           std::shared_ptr<const std::vector<Object>> objects,
                           int demo = 0, int step = 0);

// Objects an action touches: its arguments and everything in its effects.
std::vector<std::string> relevant_objects(const Transition &t);

// Tries every bijection between the relevant objects of a and b. Returns
// a's objects mapped to b's.
std::optional<std::map<std::string, std::string>>
brute_unify(const Transition &a, const Transition &b);

// First-fit clustering with brute_unify, lifted representative effects and
// plain intersection of lifted pre-states (no thresholds, no pruning).
std::vector<Operator> naive_learn(const std::vector<Transition> &transitions);

// Operator text minimized over every parameter renaming, so two operators
// over the same predicates compare equal iff they are the same schema.
std::string canonical_form(const Operator &op, bool with_support = true);

// Multiset equality of canonical forms.
bool same_schemas(const std::vector<Operator> &a, const std::vector<Operator> &b,
                  bool with_support = true);

// Exhaustive breadth-first search over the ground operators.
// Length of a shortest plan, if any.
std::optional<std::size_t> bfs_distance(const AtomSet &init,
                                        const std::vector<GroundAtom> &goal,
                                        const std::vector<GroundOperator> &operators);

bool bfs_reachable(const AtomSet &init, const std::vector<GroundAtom> &goal,
                   const std::vector<GroundOperator> &operators);

// Applies a ground plan by hand; false if a step is inapplicable or the
// goal is missed.
bool replay(const std::vector<GroundOperator> &plan, const AtomSet &init,
            const std::vector<GroundAtom> &goal);

// Every injective, type-correct assignment of objects to the operator's
// parameters, as parameter-ordered object lists.
std::vector<std::vector<std::string>> brute_groundings(
    const Operator &op, const std::vector<Object> &objects,
    const TypeHierarchy &types);

// Two-pass long double mean and population variance, floored.
void gaussian_mle(const std::vector<std::vector<double>> &thetas, double floor,
                  std::vector<double> &mean, std::vector<double> &variance);

// Random instance for clustering oracles: at most six objects of two types,
// few predicates, effects drawn from per-skill templates so that classes
// get several members.
struct LearningInstance {
    TypeHierarchy types;
    std::shared_ptr<const std::vector<Object>> objects;
    std::vector<PredicateRef> predicates;
    std::vector<Transition> transitions;
};
LearningInstance random_learning_instance(std::mt19937_64 &rng);

// Random small planning model: at most 12 ground atoms and 40 ground
// operators.
struct PlanningInstance {
    TypeHierarchy types;
    std::vector<Object> objects;
    std::vector<Operator> operators;
    AtomSet init;
    std::vector<GroundAtom> goal;
};
PlanningInstance random_planning_instance(std::mt19937_64 &rng);
}

#endif
