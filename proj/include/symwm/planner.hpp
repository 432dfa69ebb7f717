#ifndef SYMWM_PLANNER_HPP
#define SYMWM_PLANNER_HPP

#include "core.hpp"

namespace symwm {

struct GroundOperator {
    std::shared_ptr<const Operator> op;
    std::vector<std::string> binding;  // one object per parameter
    AtomSet preconditions;
    AtomSet add_effects;
    AtomSet delete_effects;

    std::vector<std::string> skill_objects() const;
    std::string str() const;
    bool applicable(const AtomSet &state) const {
        return preconditions.subset_of(state);
    }
    AtomSet apply(const AtomSet &state) const {
        return symwm::apply(state, add_effects, delete_effects);
    }
};

// Every type-consistent injective grounding. With an initial state, only
// the groundings whose preconditions are delete-relaxed reachable are kept.
std::vector<GroundOperator> ground_all(const std::vector<Operator> &operators,
                                       const std::vector<Object> &objects,
                                       const TypeHierarchy &types,
                                       const AtomSet *init = nullptr);

enum class PlanStatus {success, budget_exhausted, proven_unreachable};
std::string to_string(PlanStatus status);

struct PlanResult {
    PlanStatus status = PlanStatus::proven_unreachable;
    std::vector<GroundOperator> plan;
    std::size_t nodes_created = 0;
    std::size_t expansions = 0;
};

// Greedy best-first search on h_add with duplicate detection. The budget
// bounds the number of distinct states created.
PlanResult plan(const AtomSet &init, const std::vector<GroundAtom> &goal,
                const std::vector<GroundOperator> &operators,
                std::size_t node_budget);

bool relaxed_reachable(const AtomSet &init, const std::vector<GroundAtom> &goal,
                       const std::vector<GroundOperator> &operators);

bool validate(const std::vector<GroundOperator> &steps, const AtomSet &init,
              const std::vector<GroundAtom> &goal);
}

#endif
