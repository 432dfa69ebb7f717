#ifndef SYMWM_SELECTION_HPP
#define SYMWM_SELECTION_HPP

#include "operator_learning.hpp"
#include "domains/domain.hpp"

#include <limits>

namespace symwm {

class EmptyPool : public Error {
public:
    using Error::Error;
};

struct ObjectiveConfig {
    std::size_t node_budget = 10000;
    double fail_penalty = 1e6;
    double lambda_pred = 100;
    double lambda_op = 1;
    // Charged per (demo state, applicable ground operator) whose predicted
    // effects disagree with what the simulator does. Zero disables the
    // check, leaving the pure planning objective.
    double mispredict_penalty = 1000;
};

struct SelectionConfig {
    ObjectiveConfig objective;
    LearnConfig learn;
    double j_thresh = 2000;
    // Drop the last predicate when its improvement fell below j_thresh.
    bool rollback_final = true;
};

struct ObjectiveBreakdown {
    double total = 0;
    double plan_cost = 0;
    double complexity = 0;
    int solved = 0;
    int mispredictions = 0;
};

// Everything an objective evaluation reads besides the predicate set.
struct ObjectiveContext {
    const std::vector<Demonstration> &demos;
    const DomainSpec &spec;
    AbstractionCache &cache;
    // Optional; enables the one-step prediction check.
    const SimDomain *sim = nullptr;
};

ObjectiveBreakdown objective_J(const ObjectiveContext &ctx,
                               const std::vector<Operator> &operators,
                               const std::vector<PredicateRef> &predicates,
                               const ObjectiveConfig &config);

struct SelectionStep {
    std::string chosen;
    double j_before = 0;
    double j_after = 0;
    std::size_t candidates = 0;
    bool kept = true;
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    double j_init_only = 0;
    std::vector<std::string> selected;
    std::size_t operator_count = 0;
};

struct SelectionResult {
    std::vector<PredicateRef> predicates;
    LearnedOperators model;
    SelectionTrace trace;
};

// Greedy forward selection over the non-init part of the pool. Init
// predicates take part in every evaluation and are always returned.
SelectionResult hill_climb(const std::vector<PredicateRef> &pool,
                           const ObjectiveContext &ctx,
                           const SelectionConfig &config);
}

#endif
