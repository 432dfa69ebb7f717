#ifndef SYMWM_LISTING_HPP
#define SYMWM_LISTING_HPP

#include "core.hpp"

namespace symwm {

class ListingSyntaxError : public Error {
public:
    ListingSyntaxError(int line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

// Human-readable model dump:
//
//   Learned predicates:
//   cooked0(?p:patty)
//
//   Learned operators:
//   STRIPS-Op0:
//     Parameters: [?x0:patty, ?x1:robot]
//     ...
//
// The document keeps enough layout (header spelling, blank runs) to be
// re-emitted byte for byte.
struct ListingAtom {
    std::string predicate;
    std::vector<Variable> args;

    bool operator==(const ListingAtom &) const = default;
    std::string str() const;
};

struct ListingOperator {
    std::string name;
    std::vector<Variable> params;
    std::vector<ListingAtom> preconditions;
    std::vector<ListingAtom> add_effects;
    std::vector<ListingAtom> delete_effects;
    std::vector<ListingAtom> ignore_effects;
    std::string skill;
    std::vector<Variable> skill_args;
    int blank_lines_after = 1;
};

struct Listing {
    std::string predicates_header = "Learned predicates:";
    std::vector<std::string> predicate_lines;
    int blank_lines_after_predicates = 1;
    std::string operators_header = "Learned operators:";
    std::vector<ListingOperator> operators;
    bool final_newline = true;
};

Listing parse_listing(const std::string &text);
std::string emit_listing(const Listing &listing);

// Layout used for freshly learned models. `learned` lists the predicates to
// declare in the header block.
Listing make_listing(const std::vector<PredicateRef> &learned,
                     const std::vector<Operator> &operators);

// Operators over the predicates named in the text: the domain's own when name
// and types fit, threshold classifiers when the name spells one, visual
// placeholders otherwise. Skills come from `spec` when it knows them, else
// are synthesized from the call.
std::vector<Operator> listing_operators(const Listing &listing,
                                        const DomainSpec *spec = nullptr);
}

#endif
