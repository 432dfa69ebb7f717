#include "symwm/pipeline.hpp"

#include <functional>
#include <set>

using namespace std;

namespace symwm {
vector<PredicateRef> visual_candidates(const vector<string> &texts,
                                       const vector<Demonstration> &demos,
                                       vector<RejectedProposal> *rejected) {
    vector<ProposedAtom> atoms;
    vector<Object> scope;
    set<string> names;
    for (size_t i = 0; i < texts.size() && i < demos.size(); ++i) {
        ParsedProposals parsed = parse_proposals(texts[i], demos[i].objects);
        atoms.insert(atoms.end(), parsed.atoms.begin(), parsed.atoms.end());
        if (rejected)
            rejected->insert(rejected->end(), parsed.rejected.begin(),
                             parsed.rejected.end());
        for (const auto &o : demos[i].objects)
            if (names.insert(o.name).second)
                scope.push_back(o);
    }
    return lift_and_dedup(atoms, scope);
}

LearnOutput learn_model(const SimDomain &domain, const vector<Demonstration> &demos,
                        const vector<string> &proposal_texts, Labeler &labeler,
                        const PipelineConfig &config) {
    const DomainSpec &spec = domain.spec();
    LearnOutput out;
    auto visual = visual_candidates(proposal_texts, demos, &out.rejected);
    vector<PredicateRef> grammar;
    if (config.use_grammar)
        grammar = generate_feature_grammar(demos, config.grammar);
    out.pool = assemble_pool(spec.init_predicates, visual, grammar);

    AbstractionCache cache(spec.types, &labeler);
    ObjectiveContext ctx{demos, spec, cache, &domain};
    SelectionConfig sel;
    sel.objective = config.objective;
    sel.learn = {config.hyper.h_pre_frac, config.hyper.h_data_frac, true};
    sel.j_thresh = config.hyper.j_thresh;
    sel.rollback_final = config.rollback_final;
    out.selection = hill_climb(out.pool, ctx, sel);

    out.model.predicates = out.selection.predicates;
    out.model.operators = out.selection.model.operators;
    auto transitions = abstract_demos(demos, out.model.predicates, cache);
    out.model.samplers = learn_samplers(out.selection.model, transitions, demos,
                                        config.sampler);
    return out;
}

namespace {
// Does some injective binding of op's parameters turn it into exactly t?
bool explains(const Operator &op, const Transition &t, const TypeHierarchy &types) {
    if (op.skill->name != t.action.skill->name ||
        op.skill_args.size() != t.action.objects.size())
        return false;
    map<string, string> binding;
    set<string> used;
    for (size_t k = 0; k < op.skill_args.size(); ++k) {
        const string &obj = t.action.objects[k];
        auto [it, fresh] = binding.emplace(op.skill_args[k].name, obj);
        if (!fresh && it->second != obj)
            return false;
        if (fresh && !used.insert(obj).second)
            return false;
    }
    vector<const Variable *> open;
    for (const auto &v : op.params)
        if (!binding.count(v.name))
            open.push_back(&v);
    AtomSet adds = t.add_effects(), dels = t.delete_effects();
    auto ground_set = [&](const vector<LiftedAtom> &atoms) {
        vector<GroundAtom> out;
        for (const auto &a : atoms)
            out.push_back(a.ground(binding));
        return AtomSet(out);
    };
    function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == open.size()) {
            for (const auto &a : op.preconditions)
                if (!t.before.contains(a.ground(binding)))
                    return false;
            return ground_set(op.add_effects) == adds &&
                   ground_set(op.delete_effects) == dels;
        }
        for (const auto &o : *t.objects) {
            if (used.count(o.name) || !types.is_subtype(o.type, open[i]->type))
                continue;
            binding[open[i]->name] = o.name;
            used.insert(o.name);
            if (rec(i + 1))
                return true;
            used.erase(o.name);
            binding.erase(open[i]->name);
        }
        return false;
    };
    return rec(0);
}
}

LearnedModel model_for_operators(const SimDomain &domain,
                                 const vector<PredicateRef> &predicates,
                                 const vector<Operator> &operators,
                                 const vector<Demonstration> &demos,
                                 Labeler &labeler, const SamplerConfig &config) {
    const TypeHierarchy &types = domain.spec().types;
    AbstractionCache cache(types, &labeler);
    auto transitions = abstract_demos(demos, predicates, cache);
    LearnedModel model{predicates, operators, {}};
    vector<EquivalenceClass> credited(operators.size());
    for (size_t i = 0; i < transitions.size(); ++i)
        for (size_t o = 0; o < operators.size(); ++o)
            if (explains(operators[o], transitions[i], types)) {
                credited[o].members.push_back(i);
                break;
            }
    for (size_t o = 0; o < operators.size(); ++o) {
        if (operators[o].skill->continuous_dim == 0 || credited[o].members.empty())
            continue;
        model.samplers[operators[o].name] =
            fit(build_dataset(credited[o], transitions, demos), config);
    }
    return model;
}

string to_string(Outcome outcome) {
    switch (outcome) {
    case Outcome::success: return "success";
    case Outcome::plan_failure: return "plan_failure";
    case Outcome::execution_divergence: return "execution_divergence";
    }
    return "plan_failure";
}

ExecutionReport plan_and_execute(const LearnedModel &model, Environment &env,
                                 Labeler &labeler, const ExecuteConfig &config) {
    ExecutionReport report;
    const SimDomain &domain = env.domain();
    const Task &task = env.task();
    const TypeHierarchy &types = domain.spec().types;
    env.reset();
    auto observe = [&] {
        return abstract(env.state(), model.predicates, task.objects, types,
                        &labeler);
    };
    AtomSet expected = observe();
    auto ground = ground_all(model.operators, task.objects, types, &expected);
    PlanResult result = plan(expected, task.goal, ground, config.node_budget);
    report.plan_status = result.status;
    if (result.status != PlanStatus::success) {
        report.message = "planner: " + to_string(result.status);
        return report;
    }
    report.plan_length = result.plan.size();
    mt19937_64 rng(config.seed);
    for (size_t i = 0; i < result.plan.size(); ++i) {
        const GroundOperator &step = result.plan[i];
        Action act{step.op->skill, step.skill_objects(), {}};
        if (act.skill->continuous_dim > 0) {
            auto it = model.samplers.find(step.op->name);
            if (it == model.samplers.end()) {
                report.message = "no sampler for " + step.op->name;
                return report;
            }
            try {
                act.theta = sample(it->second,
                                   sampler_input(env.state(), act.objects), rng);
            } catch (const Exhausted &e) {
                report.message = string("step ") + to_string(i) + ": " + e.what();
                return report;
            }
        }
        env.step(act);
        report.executed.push_back(act);
        expected = step.apply(expected);
        if (report.divergence_step < 0 && observe() != expected)
            report.divergence_step = static_cast<int>(i);
    }
    if (domain.goal_reached(env.state(), task.objects, task.goal)) {
        report.outcome = Outcome::success;
    } else {
        report.outcome = Outcome::execution_divergence;
        report.message = "goal not reached after executing the plan";
    }
    return report;
}
}
