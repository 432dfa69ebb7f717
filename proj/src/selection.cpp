#include "symwm/selection.hpp"
#include "symwm/planner.hpp"

#include <algorithm>
#include <set>

using namespace std;

namespace symwm {
namespace {
int count_mispredictions(const ObjectiveContext &ctx, const Demonstration &demo,
                         const vector<Operator> &operators,
                         const vector<PredicateRef> &predicates) {
    auto all = ground_all(operators, demo.objects, ctx.spec.types);
    int bad = 0;
    for (const State &s : demo.states) {
        AtomSet now = ctx.cache.abstract(s, predicates, demo.objects);
        for (const auto &g : all) {
            if (!g.applicable(now))
                continue;
            Action act{g.op->skill, g.skill_objects(), {}};
            act.theta = ctx.sim->expert_params(s, demo.objects, act);
            StepResult r = ctx.sim->step(s, demo.objects, act);
            AtomSet next = r.failed
                               ? now
                               : ctx.cache.abstract(r.next, predicates, demo.objects);
            bool wrong = !g.add_effects.subset_of(next);
            for (const auto &d : g.delete_effects)
                wrong = wrong || next.contains(d);
            bad += wrong;
        }
    }
    return bad;
}
}

ObjectiveBreakdown objective_J(const ObjectiveContext &ctx,
                               const vector<Operator> &operators,
                               const vector<PredicateRef> &predicates,
                               const ObjectiveConfig &config) {
    ObjectiveBreakdown out;
    for (const auto &demo : ctx.demos) {
        AtomSet init = ctx.cache.abstract(demo.states.front(), predicates,
                                          demo.objects);
        auto ground = ground_all(operators, demo.objects, ctx.spec.types, &init);
        PlanResult r = plan(init, demo.goal, ground, config.node_budget);
        if (r.status == PlanStatus::success) {
            out.plan_cost += static_cast<double>(r.nodes_created);
            ++out.solved;
        } else {
            out.plan_cost += config.fail_penalty;
        }
        if (ctx.sim && config.mispredict_penalty > 0)
            out.mispredictions +=
                count_mispredictions(ctx, demo, operators, predicates);
    }
    set<string> init_keys;
    for (const auto &p : ctx.spec.init_predicates)
        init_keys.insert(p->key());
    size_t invented = 0;
    for (const auto &p : predicates)
        invented += !init_keys.count(p->key());
    double size = 0;
    for (const auto &op : operators)
        size += static_cast<double>(op.complexity());
    out.complexity = config.lambda_pred * static_cast<double>(invented) +
                     config.lambda_op * size;
    out.total = out.plan_cost + out.complexity +
                config.mispredict_penalty * out.mispredictions;
    return out;
}

SelectionResult hill_climb(const vector<PredicateRef> &pool,
                           const ObjectiveContext &ctx,
                           const SelectionConfig &config) {
    if (ctx.spec.goal_predicates.empty())
        throw EmptyPool("no goal predicates to keep");
    set<string> base_keys;
    vector<PredicateRef> base;
    for (const auto &p : ctx.spec.init_predicates)
        if (base_keys.insert(p->key()).second)
            base.push_back(p);
    for (const auto &p : ctx.spec.goal_predicates)
        if (base_keys.insert(p->key()).second)
            base.push_back(p);

    vector<PredicateRef> remaining;
    set<string> seen = base_keys;
    for (const auto &p : pool)
        if (seen.insert(p->key()).second)
            remaining.push_back(p);
    // Fixed evaluation order doubles as the tie-break.
    sort(remaining.begin(), remaining.end(),
         [](const PredicateRef &a, const PredicateRef &b) {
             if (a->name() != b->name())
                 return a->name() < b->name();
             return a->key() < b->key();
         });

    auto evaluate = [&](const vector<PredicateRef> &preds, LearnedOperators &model) {
        auto transitions = abstract_demos(ctx.demos, preds, ctx.cache);
        model = learn_operators(transitions, config.learn);
        return objective_J(ctx, model.operators, preds, config.objective).total;
    };

    SelectionResult result;
    vector<PredicateRef> current = base;
    result.trace.j_init_only = evaluate(current, result.model);
    double j_prev = numeric_limits<double>::infinity();
    while (!remaining.empty()) {
        size_t best = 0;
        double best_j = numeric_limits<double>::infinity();
        LearnedOperators best_model;
        for (size_t i = 0; i < remaining.size(); ++i) {
            vector<PredicateRef> trial = current;
            trial.push_back(remaining[i]);
            LearnedOperators model;
            double j = evaluate(trial, model);
            if (j < best_j || i == 0) {
                best = i;
                best_j = j;
                best_model = move(model);
            }
        }
        SelectionStep step{remaining[best]->name(), j_prev, best_j,
                           remaining.size(), true};
        bool first = j_prev == numeric_limits<double>::infinity();
        bool enough = first || j_prev - best_j > config.j_thresh;
        if (!enough && config.rollback_final) {
            step.kept = false;
            result.trace.steps.push_back(step);
            break;
        }
        current.push_back(remaining[best]);
        remaining.erase(remaining.begin() + static_cast<ptrdiff_t>(best));
        result.model = move(best_model);
        result.trace.steps.push_back(step);
        if (!enough)
            break;
        j_prev = best_j;
    }
    result.predicates = current;
    for (size_t i = base.size(); i < current.size(); ++i)
        result.trace.selected.push_back(current[i]->name());
    result.trace.operator_count = result.model.operators.size();
    return result;
}
}
