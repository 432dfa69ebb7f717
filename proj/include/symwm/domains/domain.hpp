#ifndef SYMWM_DOMAINS_DOMAIN_HPP
#define SYMWM_DOMAINS_DOMAIN_HPP

#include "../core.hpp"
#include "../labeling.hpp"

namespace symwm {

class UnknownSkill : public Error {
public:
    using Error::Error;
};

class UnsupportedPredicateKind : public Error {
public:
    using Error::Error;
};

struct Hyperparameters {
    double j_thresh = 2000;
    double h_pre_frac = 0.8;
    double h_data_frac = 0.05;
    int n_demo = 12;
};

struct StepResult {
    State next;
    bool failed = false;
};

struct MockProposerConfig {
    int k_synonyms = 0;
    int k_antonyms = 0;
    int junk = 0;
    std::uint64_t seed = 0;
};

// A visual concept the simulator can label, plus the names a proposer might
// use for it. Antonyms are labeled as the negation.
struct Concept {
    std::string name;
    std::vector<std::string> arg_types;
    std::vector<std::string> synonyms;
    std::vector<std::string> antonyms;
    std::function<bool(const State &, const std::vector<std::string> &)> holds;
};

class SimDomain {
public:
    virtual ~SimDomain() = default;
    virtual const DomainSpec &spec() const = 0;
    virtual Hyperparameters default_hyperparameters() const = 0;

    virtual std::vector<Demonstration> generate_demos(int n,
                                                      std::uint64_t seed) const = 0;
    // Task `index` of the held-out distribution for `seed`.
    virtual Task make_task(std::uint64_t seed, int index) const = 0;
    // A scripted solution, used to certify that generated tasks are solvable.
    virtual std::vector<Action> witness_plan(const Task &task) const = 0;

    virtual StepResult step(const State &state, const std::vector<Object> &objects,
                            const Action &action) const = 0;
    // The parameters an expert would pick for this skill invocation.
    virtual std::vector<double> expert_params(const State &state,
                                              const std::vector<Object> &objects,
                                              const Action &action) const;

    virtual const std::vector<Concept> &concepts() const = 0;
    virtual std::string ascii(const State &state,
                              const std::vector<Object> &objects) const = 0;

    std::shared_ptr<Labeler> ground_truth_labeler() const;
    std::string mock_propose(const Demonstration &demo,
                             const MockProposerConfig &config) const;
    bool goal_reached(const State &state, const std::vector<Object> &objects,
                      const std::vector<GroundAtom> &goal) const;
    const Concept *find_concept(const std::string &name, bool &negated) const;
};

// Labels visual atoms through the domain's concept table; provided and
// feature predicates are evaluated directly.
class ConceptLabeler : public Labeler {
    const SimDomain &domain_;
public:
    explicit ConceptLabeler(const SimDomain &domain) : domain_(domain) {}
    std::string identity() const override;
    std::vector<Label> label_batch(const State &state,
                                   const std::vector<GroundAtom> &atoms,
                                   const LabelContext &context) override;
};

// Mutable wrapper that owns the current state of one task.
class Environment {
    const SimDomain &domain_;
    Task task_;
    State state_;
    bool last_failed_ = false;
public:
    Environment(const SimDomain &domain, Task task);
    const State &reset();
    const State &step(const Action &action);
    const State &state() const {return state_;}
    bool last_failed() const {return last_failed_;}
    const Task &task() const {return task_;}
    const SimDomain &domain() const {return domain_;}
};

std::unique_ptr<SimDomain> make_domain(const std::string &name);
std::vector<std::string> domain_names();
}

#endif
