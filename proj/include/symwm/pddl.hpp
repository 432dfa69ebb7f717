#ifndef SYMWM_PDDL_HPP
#define SYMWM_PDDL_HPP

#include "core.hpp"

namespace symwm {

class PddlSyntaxError : public Error {
public:
    PddlSyntaxError(int line, int column, const std::string &what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line), column(column) {}
    int line;
    int column;
};

// Parsed s-expression. Atoms keep their spelling; lists keep children.
struct Sexpr {
    std::string atom;
    std::vector<Sexpr> items;
    bool is_list = false;
    int line = 1;
    int column = 1;
};

// All top-level expressions plus the ";; " directive comments, in order.
struct SexprDocument {
    std::vector<Sexpr> forms;
    std::vector<std::string> directives;
};

SexprDocument parse_sexprs(const std::string &text);

// Typed STRIPS domain. Predicate names that are not plain PDDL identifiers
// are replaced by p<i> and the original is kept in a ";; name" comment.
// Skills travel in ";; skill" comments.
std::string emit_pddl(const std::string &domain_name, const TypeHierarchy &types,
                      const std::vector<PredicateRef> &predicates,
                      const std::vector<Operator> &operators);

struct PddlDomain {
    std::string name;
    TypeHierarchy types;
    std::vector<PredicateRef> predicates;
    std::vector<Operator> operators;
};

// Predicates matching one of `known` by name and signature are reused;
// the rest become visual placeholders.
PddlDomain parse_pddl(const std::string &text,
                      const std::vector<PredicateRef> &known = {},
                      const std::vector<SkillRef> &skills = {});

std::string emit_pddl_problem(const std::string &problem_name,
                              const std::string &domain_name,
                              const std::vector<Object> &objects,
                              const AtomSet &init,
                              const std::vector<GroundAtom> &goal,
                              const std::vector<PredicateRef> &predicates);
}

#endif
