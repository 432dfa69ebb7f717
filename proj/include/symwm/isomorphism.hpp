#ifndef SYMWM_ISOMORPHISM_HPP
#define SYMWM_ISOMORPHISM_HPP

#include "core.hpp"

namespace symwm {

// A bijection between the operators, one between the predicates they use
// and, per operator pair, one between their parameters under which
// preconditions and effects coincide. Skills and types must match exactly.
struct ModelMatch {
    std::map<std::string, std::string> operators;
    std::map<std::string, std::string> predicates;
};

std::optional<ModelMatch> match_models(const std::vector<Operator> &a,
                                       const std::vector<Operator> &b);

inline bool isomorphic(const std::vector<Operator> &a,
                       const std::vector<Operator> &b) {
    return match_models(a, b).has_value();
}

// True when some sub-multiset of `model` is isomorphic to `wanted`.
bool contains_schemas(const std::vector<Operator> &model,
                      const std::vector<Operator> &wanted);
}

#endif
