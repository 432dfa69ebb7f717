#include "symwm/planner.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

using namespace std;

namespace symwm {
vector<string> GroundOperator::skill_objects() const {
    vector<string> out;
    for (const auto &v : op->skill_args) {
        for (size_t i = 0; i < op->params.size(); ++i)
            if (op->params[i].name == v.name)
                out.push_back(binding[i]);
    }
    return out;
}

string GroundOperator::str() const {
    return op->name + "(" + join(binding, ", ") + ")";
}

string to_string(PlanStatus status) {
    switch (status) {
    case PlanStatus::success: return "success";
    case PlanStatus::budget_exhausted: return "budget_exhausted";
    case PlanStatus::proven_unreachable: return "proven_unreachable";
    }
    return "proven_unreachable";
}

static AtomSet ground_list(const vector<LiftedAtom> &atoms,
                           const map<string, string> &sub) {
    vector<GroundAtom> out;
    out.reserve(atoms.size());
    for (const auto &a : atoms)
        out.push_back(a.ground(sub));
    return AtomSet(move(out));
}

vector<GroundOperator> ground_all(const vector<Operator> &operators,
                                  const vector<Object> &objects,
                                  const TypeHierarchy &types,
                                  const AtomSet *init) {
    vector<GroundOperator> all;
    for (const auto &op : operators) {
        auto shared = make_shared<const Operator>(op);
        vector<vector<const Object *>> choices;
        for (const auto &p : op.params) {
            vector<const Object *> fit;
            for (const auto &o : objects)
                if (types.is_subtype(o.type, p.type))
                    fit.push_back(&o);
            choices.push_back(move(fit));
        }
        vector<string> current(op.params.size());
        function<void(size_t)> rec = [&](size_t i) {
            if (i == op.params.size()) {
                map<string, string> sub;
                for (size_t k = 0; k < current.size(); ++k)
                    sub[op.params[k].name] = current[k];
                GroundOperator g;
                g.op = shared;
                g.binding = current;
                g.preconditions = ground_list(op.preconditions, sub);
                g.add_effects = ground_list(op.add_effects, sub);
                g.delete_effects = ground_list(op.delete_effects, sub);
                all.push_back(move(g));
                return;
            }
            for (const Object *o : choices[i]) {
                if (find(current.begin(), current.begin() + i, o->name) !=
                    current.begin() + i)
                    continue;
                current[i] = o->name;
                rec(i + 1);
            }
        };
        rec(0);
    }
    if (!init)
        return all;

    AtomSet reached = *init;
    vector<bool> fired(all.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < all.size(); ++i) {
            if (fired[i] || !all[i].preconditions.subset_of(reached))
                continue;
            fired[i] = true;
            changed = true;
            reached = reached.united(all[i].add_effects);
        }
    }
    vector<GroundOperator> kept;
    for (size_t i = 0; i < all.size(); ++i)
        if (fired[i])
            kept.push_back(move(all[i]));
    return kept;
}

namespace {
constexpr int inf = numeric_limits<int>::max();

struct SearchTask {
    int num_atoms = 0;
    vector<vector<int>> pre, add, del;
    vector<int> goal;
    // atom -> operators having it as a precondition
    vector<vector<int>> consumers;
    vector<int> no_pre_ops;
};

struct VecHash {
    size_t operator()(const vector<int> &v) const {
        size_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) +
                 (h >> 2);
        }
        return h;
    }
};

class AdditiveHeuristic {
    const SearchTask &task_;
    vector<int> cost_;
    vector<int> remaining_;
    vector<int> op_cost_;
    vector<char> closed_;
public:
    explicit AdditiveHeuristic(const SearchTask &task) : task_(task) {}

    // Also serves as the delete-relaxed reachability test.
    int operator()(const vector<int> &state) {
        cost_.assign(task_.num_atoms, inf);
        remaining_.resize(task_.pre.size());
        op_cost_.assign(task_.pre.size(), 1);
        closed_.assign(task_.num_atoms, 0);
        for (size_t i = 0; i < task_.pre.size(); ++i)
            remaining_[i] = static_cast<int>(task_.pre[i].size());
        using Entry = pair<int, int>;
        priority_queue<Entry, vector<Entry>, greater<Entry>> queue;
        for (int a : state) {
            cost_[a] = 0;
            queue.push({0, a});
        }
        auto fire = [&](int op) {
            int c = op_cost_[op];
            for (int a : task_.add[op])
                if (c < cost_[a]) {
                    cost_[a] = c;
                    queue.push({c, a});
                }
        };
        for (int op : task_.no_pre_ops)
            fire(op);
        while (!queue.empty()) {
            auto [c, a] = queue.top();
            queue.pop();
            if (c > cost_[a] || closed_[a])
                continue;
            closed_[a] = 1;
            for (int op : task_.consumers[a]) {
                op_cost_[op] += c;
                if (--remaining_[op] == 0)
                    fire(op);
            }
        }
        long long total = 0;
        for (int g : task_.goal) {
            if (cost_[g] == inf)
                return inf;
            total += cost_[g];
        }
        return static_cast<int>(min<long long>(total, inf - 1));
    }
};

bool holds_all(const vector<int> &state, const vector<int> &atoms) {
    return includes(state.begin(), state.end(), atoms.begin(), atoms.end());
}

vector<int> successor(const vector<int> &state, const vector<int> &add,
                      const vector<int> &del) {
    vector<int> tmp, out;
    set_difference(state.begin(), state.end(), del.begin(), del.end(),
                   back_inserter(tmp));
    set_union(tmp.begin(), tmp.end(), add.begin(), add.end(),
              back_inserter(out));
    return out;
}

struct Interned {
    SearchTask task;
    vector<int> init;
};

Interned intern(const AtomSet &init, const vector<GroundAtom> &goal,
                const vector<GroundOperator> &operators) {
    Interned out;
    map<GroundAtom, int> ids;
    auto id = [&](const GroundAtom &a) {
        auto [it, fresh] = ids.emplace(a, static_cast<int>(ids.size()));
        return it->second;
    };
    auto ids_of = [&](const AtomSet &atoms) {
        vector<int> v;
        for (const auto &a : atoms)
            v.push_back(id(a));
        sort(v.begin(), v.end());
        return v;
    };
    out.init = ids_of(init);
    for (const auto &op : operators) {
        out.task.pre.push_back(ids_of(op.preconditions));
        out.task.add.push_back(ids_of(op.add_effects));
        out.task.del.push_back(ids_of(op.delete_effects));
    }
    for (const auto &g : goal)
        out.task.goal.push_back(id(g));
    sort(out.task.goal.begin(), out.task.goal.end());
    out.task.goal.erase(unique(out.task.goal.begin(), out.task.goal.end()),
                        out.task.goal.end());
    out.task.num_atoms = static_cast<int>(ids.size());
    out.task.consumers.assign(ids.size(), {});
    for (size_t i = 0; i < out.task.pre.size(); ++i) {
        if (out.task.pre[i].empty())
            out.task.no_pre_ops.push_back(static_cast<int>(i));
        for (int a : out.task.pre[i])
            out.task.consumers[a].push_back(static_cast<int>(i));
    }
    return out;
}
}

bool relaxed_reachable(const AtomSet &init, const vector<GroundAtom> &goal,
                       const vector<GroundOperator> &operators) {
    Interned in = intern(init, goal, operators);
    AdditiveHeuristic h(in.task);
    return h(in.init) != inf;
}

PlanResult plan(const AtomSet &init, const vector<GroundAtom> &goal,
                const vector<GroundOperator> &operators, size_t node_budget) {
    PlanResult result;
    Interned in = intern(init, goal, operators);
    const SearchTask &task = in.task;

    struct Node {
        vector<int> state;
        int parent;
        int op;
    };
    vector<Node> nodes;
    unordered_map<vector<int>, int, VecHash> seen;
    nodes.push_back({in.init, -1, -1});
    seen.emplace(in.init, 0);
    result.nodes_created = 1;

    auto extract = [&](int node) {
        vector<GroundOperator> steps;
        for (int n = node; nodes[n].parent >= 0; n = nodes[n].parent)
            steps.push_back(operators[nodes[n].op]);
        reverse(steps.begin(), steps.end());
        return steps;
    };

    if (holds_all(in.init, task.goal)) {
        result.status = PlanStatus::success;
        return result;
    }
    AdditiveHeuristic h(task);
    int h0 = h(in.init);
    if (h0 == inf) {
        result.status = PlanStatus::proven_unreachable;
        return result;
    }
    using Entry = pair<int, int>;  // (h, node id); ids encode insertion order
    priority_queue<Entry, vector<Entry>, greater<Entry>> open;
    open.push({h0, 0});
    while (!open.empty()) {
        int id = open.top().second;
        open.pop();
        ++result.expansions;
        for (size_t o = 0; o < task.pre.size(); ++o) {
            if (!holds_all(nodes[id].state, task.pre[o]))
                continue;
            vector<int> next = successor(nodes[id].state, task.add[o],
                                         task.del[o]);
            if (seen.count(next))
                continue;
            if (result.nodes_created >= node_budget) {
                result.status = PlanStatus::budget_exhausted;
                return result;
            }
            int nid = static_cast<int>(nodes.size());
            nodes.push_back({next, id, static_cast<int>(o)});
            seen.emplace(move(next), nid);
            ++result.nodes_created;
            if (holds_all(nodes[nid].state, task.goal)) {
                result.status = PlanStatus::success;
                result.plan = extract(nid);
                return result;
            }
            int hv = h(nodes[nid].state);
            if (hv != inf)
                open.push({hv, nid});
        }
    }
    // The reachable space was exhausted without meeting the goal.
    result.status = PlanStatus::proven_unreachable;
    return result;
}

bool validate(const vector<GroundOperator> &steps, const AtomSet &init,
              const vector<GroundAtom> &goal) {
    AtomSet state = init;
    for (const auto &step : steps) {
        if (!step.applicable(state))
            return false;
        state = step.apply(state);
    }
    return goal_holds(goal, state);
}
}
