#ifndef SYMWM_PIPELINE_HPP
#define SYMWM_PIPELINE_HPP

#include "planner.hpp"
#include "proposal.hpp"
#include "samplers.hpp"
#include "selection.hpp"

namespace symwm {

struct PipelineConfig {
    Hyperparameters hyper;
    ObjectiveConfig objective;
    bool rollback_final = true;
    bool use_grammar = true;
    GrammarConfig grammar;
    SamplerConfig sampler;
};

struct LearnedModel {
    std::vector<PredicateRef> predicates;
    std::vector<Operator> operators;
    std::map<std::string, Sampler> samplers;
};

struct LearnOutput {
    std::vector<PredicateRef> pool;
    std::vector<RejectedProposal> rejected;
    SelectionResult selection;
    LearnedModel model;
};

// Candidate visual predicates from free-text proposals, one text per demo.
std::vector<PredicateRef> visual_candidates(
    const std::vector<std::string> &texts,
    const std::vector<Demonstration> &demos,
    std::vector<RejectedProposal> *rejected = nullptr);

// Proposal parsing, pool assembly, selection and sampler fitting.
LearnOutput learn_model(const SimDomain &domain,
                        const std::vector<Demonstration> &demos,
                        const std::vector<std::string> &proposal_texts,
                        Labeler &labeler, const PipelineConfig &config);

// Wraps hand-written or loaded operators into a runnable model: each demo
// transition is credited to the first operator that explains it exactly,
// and samplers are fit on the credited transitions.
LearnedModel model_for_operators(const SimDomain &domain,
                                 const std::vector<PredicateRef> &predicates,
                                 const std::vector<Operator> &operators,
                                 const std::vector<Demonstration> &demos,
                                 Labeler &labeler,
                                 const SamplerConfig &config = {});

enum class Outcome {success, plan_failure, execution_divergence};
std::string to_string(Outcome outcome);

struct ExecutionReport {
    Outcome outcome = Outcome::plan_failure;
    PlanStatus plan_status = PlanStatus::proven_unreachable;
    std::vector<Action> executed;
    std::size_t plan_length = 0;
    // First step whose observed abstraction differs from the expected one.
    int divergence_step = -1;
    std::string message;
};

struct ExecuteConfig {
    std::size_t node_budget = 100000;
    std::uint64_t seed = 0;
};

// Plans once from the abstracted initial state and runs the plan open loop.
ExecutionReport plan_and_execute(const LearnedModel &model, Environment &env,
                                 Labeler &labeler, const ExecuteConfig &config);
}

#endif
