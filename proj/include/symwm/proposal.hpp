#ifndef SYMWM_PROPOSAL_HPP
#define SYMWM_PROPOSAL_HPP

#include "core.hpp"

namespace symwm {

struct ProposedAtom {
    std::string name;
    std::vector<std::string> args;

    bool operator==(const ProposedAtom &) const = default;
};

struct RejectedProposal {
    std::string token;
    std::string reason;  // unknown_object, malformed or arity_conflict
};

struct ParsedProposals {
    std::vector<ProposedAtom> atoms;
    std::vector<RejectedProposal> rejected;
};

// Pulls every name(arg, ...) token out of free text. Names are lowercased.
ParsedProposals parse_proposals(const std::string &text,
                                const std::vector<Object> &objects);

// One predicate per (name, signature). A name seen with several signatures
// gets a numeric suffix per signature, in first-seen order.
std::vector<PredicateRef> lift_and_dedup(const std::vector<ProposedAtom> &atoms,
                                         const std::vector<Object> &objects);

struct GrammarConfig {
    std::size_t max_thresholds = 4;
};

// Single-feature threshold classifiers and their negations.
std::vector<PredicateRef> generate_feature_grammar(
    const std::vector<Demonstration> &demos, const GrammarConfig &config = {});

// Init predicates first, then visual, then grammar. Visual predicates that
// duplicate an init predicate are dropped; ones that only share its name
// are renamed.
std::vector<PredicateRef> assemble_pool(const std::vector<PredicateRef> &init,
                                        const std::vector<PredicateRef> &visual,
                                        const std::vector<PredicateRef> &grammar);
}

#endif
