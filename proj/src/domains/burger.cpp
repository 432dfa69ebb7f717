#include "symwm/domains/burger.hpp"
#include "symwm/digest.hpp"

#include <algorithm>
#include <set>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
const vector<string> item_types = {"patty", "lettuce", "cheese", "bottom_bun",
                                   "top_bun"};

bool is_item(const string &type) {
    return find(item_types.begin(), item_types.end(), type) != item_types.end();
}

bool is_fixture(const string &type) {
    return type == "grill" || type == "cutting_board";
}

double f(const State &s, const string &o, const char *name) {
    return s.feature(o, name);
}

bool held(const State &s, const string &o) {
    return f(s, o, "z") < 0;
}

bool atop(const State &s, const string &x, const string &y) {
    if (x == y || burger_type_of(x) == "robot" || burger_type_of(y) == "robot")
        return false;
    if (held(s, x) || held(s, y))
        return false;
    return f(s, x, "row") == f(s, y, "row") && f(s, x, "col") == f(s, y, "col") &&
           f(s, x, "z") == f(s, y, "z") + 1;
}

bool somewhere_above(const State &s, const string &x, const string &y) {
    if (x == y || held(s, x) || held(s, y))
        return false;
    return f(s, x, "row") == f(s, y, "row") && f(s, x, "col") == f(s, y, "col") &&
           f(s, x, "z") > f(s, y, "z");
}

bool anything_atop(const State &s, const string &y) {
    for (const auto &[name, feats] : s.objects)
        if (atop(s, name, y))
            return true;
    return false;
}

bool prepped(const State &s, const string &o) {
    string t = burger_type_of(o);
    if (t == "patty")
        return s.hidden_value("cooked:" + o) > 0.5;
    if (t == "lettuce")
        return s.hidden_value("chopped:" + o) > 0.5;
    return false;
}

bool hand_empty(const State &s, const string &robot) {
    return f(s, robot, "fingers") < 0.5;
}

bool holding(const State &s, const string &robot, const string &item) {
    return burger_type_of(robot) == "robot" && !hand_empty(s, robot) &&
           held(s, item);
}

// Args are (below, above), matching the listing argument order.
bool somewhere_above_and_prepped(const State &s, span<const string> a) {
    return somewhere_above(s, a[1], a[0]) && prepped(s, a[1]);
}

bool right_above_and_prepped(const State &s, span<const string> a) {
    return atop(s, a[1], a[0]) && prepped(s, a[1]);
}

void move_next_to(State &s, const string &robot, double row, double col) {
    static const int dr[] = {-1, 0, 1, 0};
    static const int dc[] = {0, 1, 0, -1};
    // Robot standing north of the target faces south, and so on.
    static const int facing[] = {2, 3, 0, 1};
    for (int k = 0; k < 4; ++k) {
        int r = static_cast<int>(row) + dr[k];
        int c = static_cast<int>(col) + dc[k];
        if (r < 0 || c < 0 || r >= BurgerDomain::rows || c >= BurgerDomain::cols)
            continue;
        s.objects[robot]["row"] = r;
        s.objects[robot]["col"] = c;
        s.objects[robot]["dir"] = facing[k];
        return;
    }
}
}

string burger_type_of(const string &object_name) {
    string s = object_name;
    while (!s.empty() && isdigit(static_cast<unsigned char>(s.back())))
        s.pop_back();
    return s;
}

BurgerDomain::BurgerDomain(BurgerVariant variant) : variant_(variant) {
    switch (variant) {
    case BurgerVariant::bigger_burger: spec_.name = "bigger_burger"; break;
    case BurgerVariant::more_stacks: spec_.name = "more_stacks"; break;
    case BurgerVariant::combo_burger: spec_.name = "combo_burger"; break;
    }
    TypeHierarchy &t = spec_.types;
    t.add("robot");
    t.add("grill");
    t.add("cutting_board");
    t.add("item");
    for (const auto &it : item_types)
        t.add(it, "item");

    spec_.skills = {
        make_shared<Skill>(Skill{"Pick", {"robot", "item"}, 0}),
        make_shared<Skill>(Skill{"Place", {"robot", "item", "object"}, 0}),
        make_shared<Skill>(Skill{"Cook", {"robot", "patty", "grill"}, 0}),
        make_shared<Skill>(Skill{"Chop", {"robot", "lettuce", "cutting_board"}, 0}),
    };

    auto on = Predicate::provided(
        "On", {"object", "object"},
        [](const State &s, span<const string> a) {return atop(s, a[0], a[1]);});
    auto on_ground = Predicate::provided(
        "OnGround", {"object"}, [](const State &s, span<const string> a) {
            return is_item(burger_type_of(a[0])) && f(s, a[0], "z") == 0;
        });
    auto clear = Predicate::provided(
        "Clear", {"object"}, [](const State &s, span<const string> a) {
            if (burger_type_of(a[0]) == "robot")
                return true;
            return !held(s, a[0]) && !anything_atop(s, a[0]);
        });
    auto holding_pred = Predicate::provided(
        "Holding", {"robot", "item"},
        [](const State &s, span<const string> a) {return holding(s, a[0], a[1]);});
    auto sap = [](const string &below, const string &above) {
        return Predicate::provided("SomewhereAboveAndPrepped", {below, above},
                                   somewhere_above_and_prepped);
    };
    auto rap = [](const string &below, const string &above) {
        return Predicate::provided("RightAboveAndPrepped", {below, above},
                                   right_above_and_prepped);
    };
    spec_.init_predicates = {on, on_ground, clear, holding_pred,
                             sap("bottom_bun", "patty")};
    spec_.goal_predicates = {on, spec_.init_predicates[4]};
    if (variant == BurgerVariant::bigger_burger) {
        for (auto p : {rap("cutting_board", "patty"), rap("grill", "patty"),
                       rap("patty", "patty")}) {
            spec_.init_predicates.push_back(p);
            spec_.goal_predicates.push_back(p);
        }
    } else if (variant == BurgerVariant::combo_burger) {
        for (auto p : {sap("bottom_bun", "lettuce"), sap("patty", "lettuce")}) {
            spec_.init_predicates.push_back(p);
            spec_.goal_predicates.push_back(p);
        }
    }

    concepts_ = {
        {"cooked", {"patty"}, {"grilled", "prepared"}, {"raw", "uncooked"},
         [](const State &s, const vector<string> &a) {return prepped(s, a[0]);}},
        {"chopped", {"lettuce"}, {"cut", "sliced"}, {"whole", "uncut"},
         [](const State &s, const vector<string> &a) {return prepped(s, a[0]);}},
        {"holding", {"robot", "item"}, {"grasping", "carrying"},
         {"releasing", "dropping"},
         [](const State &s, const vector<string> &a) {
             return holding(s, a[0], a[1]);
         }},
        {"on", {"item", "object"}, {"atop", "resting_on"}, {"off", "not_on"},
         [](const State &s, const vector<string> &a) {
             return atop(s, a[0], a[1]);
         }},
        {"empty_hands", {"robot"}, {"free_hand", "hand_empty"},
         {"busy", "occupied"},
         [](const State &s, const vector<string> &a) {
             return hand_empty(s, a[0]);
         }},
    };
}

Hyperparameters BurgerDomain::default_hyperparameters() const {
    return {2000, 0.8, 0.05, 12};
}

PredicateRef BurgerDomain::predicate(const string &name,
                                     const vector<string> &arg_types) const {
    for (const auto &p : spec_.init_predicates)
        if (p->name() == name && p->arg_types() == arg_types)
            return p;
    throw Error("no predicate " + name + " with that signature");
}

BurgerDomain::Scene BurgerDomain::make_scene(const vector<string> &names,
                                             mt19937_64 &rng,
                                             const string &held_item) const {
    Scene scene;
    vector<int> cells(rows * cols);
    for (int i = 0; i < rows * cols; ++i)
        cells[i] = i;
    shuffle(cells.begin(), cells.end(), rng);
    size_t next = 0;
    scene.objects.push_back({"robot", "robot", "the robot"});
    int rc = cells[next++];
    scene.state.objects["robot"] = {{"row", rc / cols}, {"col", rc % cols},
                                    {"z", 0}, {"fingers", held_item.empty() ? 0.0 : 1.0},
                                    {"dir", 0}};
    for (const auto &name : names) {
        string type = burger_type_of(name);
        string desc = type;
        replace(desc.begin(), desc.end(), '_', ' ');
        scene.objects.push_back({name, type, "the " + desc});
        if (name == held_item) {
            scene.state.objects[name] = {{"row", -1}, {"col", -1}, {"z", -1}};
        } else {
            int c = cells[next++];
            scene.state.objects[name] = {{"row", c / cols}, {"col", c % cols},
                                         {"z", 0}};
        }
        if (type == "patty")
            scene.state.hidden["cooked:" + name] = 0;
        if (type == "lettuce")
            scene.state.hidden["chopped:" + name] = 0;
    }
    sort(scene.objects.begin(), scene.objects.end());
    scene.state.images = {"frame_0.png"};
    return scene;
}

Action BurgerDomain::action(const string &skill,
                            const vector<string> &args) const {
    return Action{spec_.skill(skill), args, {}};
}

StepResult BurgerDomain::step(const State &state, const vector<Object> &objects,
                              const Action &action) const {
    bool known = false;
    for (const auto &s : spec_.skills)
        if (s->name == action.skill->name)
            known = true;
    if (!known)
        throw UnknownSkill("burger has no skill " + action.skill->name);
    const Skill &skill = *action.skill;
    StepResult out{state, true};
    if (action.objects.size() != skill.param_types.size())
        return out;
    for (size_t i = 0; i < action.objects.size(); ++i) {
        const Object &o = find_object(objects, action.objects[i]);
        if (!spec_.types.is_subtype(o.type, skill.param_types[i]))
            return out;
    }
    State next = state;
    const auto &a = action.objects;
    const string &robot = a[0];
    if (skill.name == "Pick") {
        const string &item = a[1];
        if (!hand_empty(state, robot) || held(state, item) ||
            anything_atop(state, item))
            return out;
        move_next_to(next, robot, f(state, item, "row"), f(state, item, "col"));
        next.objects[item]["row"] = -1;
        next.objects[item]["col"] = -1;
        next.objects[item]["z"] = -1;
        next.objects[robot]["fingers"] = 1;
    } else if (skill.name == "Place") {
        const string &item = a[1], &target = a[2];
        string ttype = burger_type_of(target);
        if (hand_empty(state, robot) || !held(state, item) || item == target ||
            !(is_item(ttype) || is_fixture(ttype)) || held(state, target) ||
            anything_atop(state, target))
            return out;
        move_next_to(next, robot, f(state, target, "row"),
                     f(state, target, "col"));
        next.objects[item]["row"] = f(state, target, "row");
        next.objects[item]["col"] = f(state, target, "col");
        next.objects[item]["z"] = f(state, target, "z") + 1;
        next.objects[robot]["fingers"] = 0;
    } else if (skill.name == "Cook" || skill.name == "Chop") {
        const string &item = a[1], &station = a[2];
        if (!atop(state, item, station))
            return out;
        move_next_to(next, robot, f(state, station, "row"),
                     f(state, station, "col"));
        next.hidden[(skill.name == "Cook" ? "cooked:" : "chopped:") + item] = 1;
    }
    next.timestep = state.timestep + 1;
    next.images = {"frame_" + to_string(next.timestep) + ".png"};
    return {next, false};
}

Demonstration BurgerDomain::run_script(const Scene &scene,
                                       const vector<Action> &script,
                                       vector<GroundAtom> goal) const {
    Demonstration demo;
    demo.objects = scene.objects;
    demo.states.push_back(scene.state);
    for (const auto &act : script) {
        StepResult r = step(demo.states.back(), demo.objects, act);
        if (r.failed)
            throw Error("scripted action failed: " + act.str(demo.objects));
        demo.actions.push_back(act);
        demo.states.push_back(move(r.next));
    }
    demo.goal = move(goal);
    if (!goal_reached(demo.states.back(), demo.objects, demo.goal))
        throw Error("scripted demonstration misses its goal");
    return demo;
}

namespace {
struct Script {
    vector<pair<string, vector<string>>> steps;

    void add(const string &skill, vector<string> args) {
        args.insert(args.begin(), "robot");
        steps.push_back({skill, move(args)});
    }
    void cook(const string &p, bool already_held = false) {
        if (!already_held)
            add("Pick", {p});
        add("Place", {p, "grill"});
        add("Cook", {p, "grill"});
        add("Pick", {p});
    }
    void chop(const string &l) {
        add("Pick", {l});
        add("Place", {l, "cutting_board"});
        add("Chop", {l, "cutting_board"});
        add("Pick", {l});
    }
    void put(const string &item, const string &target, bool pick_first) {
        if (pick_first)
            add("Pick", {item});
        add("Place", {item, target});
    }
};
}

vector<Demonstration> BurgerDomain::generate_demos(int n, uint64_t seed) const {
    vector<Demonstration> demos;
    auto sap_bp = predicate("SomewhereAboveAndPrepped", {"bottom_bun", "patty"});
    auto on = predicate("On", {"object", "object"});
    for (int i = 0; i < n; ++i) {
        mt19937_64 rng(mix64(seed * 1000003ULL + static_cast<uint64_t>(i)));
        Script s;
        vector<string> names;
        vector<GroundAtom> goal;
        auto burger = [&](const string &p, const string &b, const string &t) {
            s.cook(p);
            s.put(p, b, false);
            s.put(t, p, true);
            goal.push_back({sap_bp, {b, p}});
            goal.push_back({on, {t, p}});
        };
        if (variant_ == BurgerVariant::more_stacks) {
            if (i == 0) {
                names = {"grill", "cutting_board", "patty1", "patty2",
                         "bottom_bun1", "bottom_bun2", "top_bun1", "top_bun2",
                         "lettuce1", "cheese1"};
                burger("patty1", "bottom_bun1", "top_bun1");
                burger("patty2", "bottom_bun2", "top_bun2");
            } else {
                names = {"grill", "cutting_board", "patty1", "bottom_bun1",
                         "top_bun1", "lettuce1", "cheese1"};
                burger("patty1", "bottom_bun1", "top_bun1");
            }
        } else if (variant_ == BurgerVariant::bigger_burger) {
            auto rap_board = predicate("RightAboveAndPrepped",
                                       {"cutting_board", "patty"});
            auto rap_grill = predicate("RightAboveAndPrepped", {"grill", "patty"});
            auto rap_pp = predicate("RightAboveAndPrepped", {"patty", "patty"});
            if (i % 3 == 0) {
                names = {"grill", "cutting_board", "patty1", "bottom_bun1",
                         "top_bun1", "cheese1"};
                burger("patty1", "bottom_bun1", "top_bun1");
            } else if (i % 3 == 1) {
                names = {"grill", "cutting_board", "patty1", "patty2", "cheese1"};
                s.cook("patty1");
                s.put("patty1", "cutting_board", false);
                s.cook("patty2");
                s.put("patty2", "patty1", false);
                goal = {{rap_board, {"cutting_board", "patty1"}},
                        {rap_pp, {"patty1", "patty2"}}};
            } else {
                names = {"grill", "cutting_board", "patty1", "patty2", "cheese1"};
                s.cook("patty1");
                s.put("patty1", "cutting_board", false);
                s.add("Pick", {"patty2"});
                s.add("Place", {"patty2", "grill"});
                s.add("Cook", {"patty2", "grill"});
                s.put("patty1", "patty2", true);
                goal = {{rap_grill, {"grill", "patty2"}},
                        {rap_pp, {"patty2", "patty1"}}};
            }
        } else {
            auto sap_bl = predicate("SomewhereAboveAndPrepped",
                                    {"bottom_bun", "lettuce"});
            auto sap_pl = predicate("SomewhereAboveAndPrepped", {"patty", "lettuce"});
            if (i % 4 == 0) {
                names = {"grill", "cutting_board", "patty1", "bottom_bun1",
                         "top_bun1", "lettuce1", "cheese1"};
                burger("patty1", "bottom_bun1", "top_bun1");
            } else if (i % 4 == 1) {
                names = {"grill", "cutting_board", "patty1", "bottom_bun1",
                         "top_bun1", "lettuce1", "cheese1"};
                s.chop("lettuce1");
                s.put("lettuce1", "bottom_bun1", false);
                s.put("top_bun1", "lettuce1", true);
                goal = {{sap_bl, {"bottom_bun1", "lettuce1"}},
                        {on, {"top_bun1", "lettuce1"}}};
            } else if (i % 4 == 2) {
                names = {"grill", "cutting_board", "patty1", "lettuce1",
                         "cheese1"};
                s.chop("lettuce1");
                s.put("lettuce1", "grill", false);
                s.put("patty1", "cutting_board", true);
                s.put("lettuce1", "patty1", true);
                goal = {{sap_pl, {"patty1", "lettuce1"}}};
            } else {
                names = {"grill", "cutting_board", "patty1", "lettuce1",
                         "cheese1"};
                s.put("patty1", "grill", true);
                s.chop("lettuce1");
                s.put("lettuce1", "patty1", false);
                goal = {{sap_pl, {"patty1", "lettuce1"}}};
            }
        }
        Scene scene = make_scene(names, rng);
        vector<Action> script;
        for (const auto &[skill, args] : s.steps)
            script.push_back(action(skill, args));
        demos.push_back(run_script(scene, script, goal));
    }
    return demos;
}

Task BurgerDomain::make_task(uint64_t seed, int index) const {
    mt19937_64 rng(mix64(0x7e57ULL ^ (seed * 7919ULL + static_cast<uint64_t>(index))));
    bool holding_variant = index % 2 == 1;
    auto sap_bp = predicate("SomewhereAboveAndPrepped", {"bottom_bun", "patty"});
    auto on = predicate("On", {"object", "object"});
    vector<string> names = {"grill", "cutting_board"};
    vector<GroundAtom> goal;
    Task task;
    if (variant_ == BurgerVariant::more_stacks) {
        int n = holding_variant ? 6 : 5;
        for (int k = 1; k <= n; ++k) {
            string p = "patty" + to_string(k), b = "bottom_bun" + to_string(k);
            names.push_back(p);
            names.push_back(b);
            goal.push_back({sap_bp, {b, p}});
        }
        task.name = spec_.name + (holding_variant ? "-6-held" : "-5");
    } else if (variant_ == BurgerVariant::bigger_burger) {
        auto rap_pp = predicate("RightAboveAndPrepped", {"patty", "patty"});
        names.insert(names.end(), {"patty1", "patty2", "bottom_bun1", "top_bun1"});
        goal = {{sap_bp, {"bottom_bun1", "patty1"}},
                {rap_pp, {"patty1", "patty2"}},
                {on, {"top_bun1", "patty2"}}};
        if (holding_variant) {
            names.insert(names.end(), {"patty3", "bottom_bun2"});
            goal.push_back({sap_bp, {"bottom_bun2", "patty3"}});
        }
        task.name = spec_.name + (holding_variant ? "-double-plus-open" : "-double");
    } else {
        auto sap_pl = predicate("SomewhereAboveAndPrepped", {"patty", "lettuce"});
        for (int k = 1; k <= 2; ++k) {
            string p = "patty" + to_string(k), b = "bottom_bun" + to_string(k);
            string l = "lettuce" + to_string(k), t = "top_bun" + to_string(k);
            names.insert(names.end(), {p, b, l, t});
            goal.push_back({sap_bp, {b, p}});
            goal.push_back({sap_pl, {p, l}});
            goal.push_back({on, {t, l}});
        }
        if (holding_variant) {
            names.insert(names.end(), {"patty3", "bottom_bun3", "top_bun3"});
            goal.push_back({sap_bp, {"bottom_bun3", "patty3"}});
            goal.push_back({on, {"top_bun3", "patty3"}});
        }
        task.name = spec_.name + (holding_variant ? "-combo-plus-held" : "-combo");
    }
    string held_item;
    if (holding_variant)
        held_item = variant_ == BurgerVariant::more_stacks ? "patty1" : "patty3";
    Scene scene = make_scene(names, rng, held_item);
    task.name += "-s" + to_string(seed) + "-" + to_string(index);
    task.objects = scene.objects;
    task.init = scene.state;
    task.goal = goal;
    return task;
}

vector<Action> BurgerDomain::witness_plan(const Task &task) const {
    Script s;
    auto held_now = [&](const string &p) {
        return task.init.objects.count(p) && task.init.feature(p, "z") < 0;
    };
    if (variant_ == BurgerVariant::more_stacks) {
        for (int k = 1;; ++k) {
            string p = "patty" + to_string(k);
            if (!task.init.objects.count(p))
                break;
            s.cook(p, held_now(p));
            s.put(p, "bottom_bun" + to_string(k), false);
        }
    } else if (variant_ == BurgerVariant::bigger_burger) {
        if (task.init.objects.count("patty3")) {
            s.cook("patty3", held_now("patty3"));
            s.put("patty3", "bottom_bun2", false);
        }
        s.cook("patty1");
        s.put("patty1", "bottom_bun1", false);
        s.cook("patty2");
        s.put("patty2", "patty1", false);
        s.put("top_bun1", "patty2", true);
    } else {
        if (task.init.objects.count("patty3")) {
            s.cook("patty3", held_now("patty3"));
            s.put("patty3", "bottom_bun3", false);
            s.put("top_bun3", "patty3", true);
        }
        for (int k = 1; k <= 2; ++k) {
            string p = "patty" + to_string(k), l = "lettuce" + to_string(k);
            s.cook(p);
            s.put(p, "bottom_bun" + to_string(k), false);
            s.chop(l);
            s.put(l, p, false);
            s.put("top_bun" + to_string(k), l, true);
        }
    }
    vector<Action> plan;
    for (const auto &[skill, args] : s.steps)
        plan.push_back(action(skill, args));
    return plan;
}

string BurgerDomain::ascii(const State &state, const vector<Object> &objects) const {
    vector<vector<vector<pair<double, string>>>> grid(
        rows, vector<vector<pair<double, string>>>(cols));
    string held_items;
    int rr = -1, rcol = -1;
    for (const auto &o : objects) {
        if (o.type == "robot") {
            rr = static_cast<int>(state.feature(o.name, "row"));
            rcol = static_cast<int>(state.feature(o.name, "col"));
            continue;
        }
        double z = state.feature(o.name, "z");
        if (z < 0) {
            held_items += " " + o.name;
            continue;
        }
        int r = static_cast<int>(state.feature(o.name, "row"));
        int c = static_cast<int>(state.feature(o.name, "col"));
        string tag = o.name;
        if (prepped(state, o.name))
            tag += "*";
        grid[r][c].push_back({z, tag});
    }
    ostringstream out;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            auto cell = grid[r][c];
            sort(cell.begin(), cell.end());
            string text;
            for (const auto &[z, tag] : cell)
                text += (text.empty() ? "" : "/") + tag;
            if (r == rr && c == rcol)
                text = "R" + string(text.empty() ? "" : ":") + text;
            if (text.empty())
                text = ".";
            out << "[" << text << "]";
        }
        out << "\n";
    }
    out << "held:" << (held_items.empty() ? " -" : held_items) << "\n";
    return out.str();
}
}
