#include "symwm/domains/kitchen.hpp"
#include "symwm/digest.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
const vector<string> burners = {"burner1", "burner2", "burner3", "burner4"};
const vector<string> knobs = {"knob1", "knob2", "knob3", "knob4"};
constexpr double kettle_z = 1.1;
constexpr double knob_angle = M_PI / 2;

char index_of(const string &name) {
    return name.empty() ? '\0' : name.back();
}

bool linked(const string &knob, const string &surface) {
    return index_of(knob) == index_of(surface);
}

bool knob_on(const State &s, const string &knob) {
    return s.hidden_value("on:" + knob) > 0.5;
}

bool kettle_on(const State &s, const string &kettle, const string &surface) {
    auto [x, y] = KitchenDomain::slot(surface);
    return fabs(s.feature(kettle, "x") - x) <= KitchenDomain::slot_half_width &&
           fabs(s.feature(kettle, "y") - y) <= KitchenDomain::slot_half_width;
}

bool burner_on(const State &s, const string &surface) {
    return knob_on(s, "knob" + string(1, index_of(surface)));
}

void set_burner_z(State &s) {
    for (const auto &b : burners)
        s.objects[b]["z"] = burner_on(s, b) ? KitchenDomain::burner_on_z
                                            : KitchenDomain::burner_off_z;
}
}

pair<double, double> KitchenDomain::slot(const string &burner) {
    // 1 front-left, 2 back-left, 3 front-right, 4 back-right
    switch (index_of(burner)) {
    case '1': return {0.0, 0.0};
    case '2': return {0.0, 0.3};
    case '3': return {0.3, 0.0};
    case '4': return {0.3, 0.3};
    }
    throw Error("no burner slot for " + burner);
}

KitchenDomain::KitchenDomain() {
    spec_.name = "kitchen";
    for (const char *t : {"gripper", "kettle", "knob", "surface"})
        spec_.types.add(t);
    spec_.skills = {
        make_shared<Skill>(Skill{"MoveAndTurnOnKnob", {"gripper", "knob"}, 1}),
        make_shared<Skill>(
            Skill{"PushKettleOntoBurner", {"gripper", "kettle", "surface"}, 3}),
    };
    auto boiling = Predicate::provided(
        "KettleBoiling", {"kettle", "surface", "knob"},
        [](const State &s, span<const string> a) {
            return kettle_on(s, a[0], a[1]) && linked(a[2], a[1]) &&
                   knob_on(s, a[2]);
        });
    auto link = Predicate::provided(
        "KnobAndBurnerLinked", {"knob", "surface"},
        [](const State &, span<const string> a) {return linked(a[0], a[1]);});
    spec_.init_predicates = {boiling, link};
    spec_.goal_predicates = {boiling};
    concepts_ = {
        {"burner_on", {"surface"}, {"burner_hot", "burner_glowing"},
         {"burner_off", "burner_cold"},
         [](const State &s, const vector<string> &a) {return burner_on(s, a[0]);}},
        {"kettle_on", {"kettle", "surface"}, {"kettle_atop", "kettle_resting_on"},
         {"kettle_off", "kettle_away_from"},
         [](const State &s, const vector<string> &a) {
             return kettle_on(s, a[0], a[1]);
         }},
    };
}

Hyperparameters KitchenDomain::default_hyperparameters() const {
    return {100, 0.8, 0.05, 3};
}

vector<Object> KitchenDomain::scene_objects() {
    vector<Object> out = {{"gripper", "gripper", "the robot gripper"},
                          {"kettle1", "kettle", "the kettle"}};
    for (const auto &b : burners)
        out.push_back({b, "surface", "a stove burner"});
    for (const auto &k : knobs)
        out.push_back({k, "knob", "a burner knob"});
    sort(out.begin(), out.end());
    return out;
}

State KitchenDomain::initial_state(double x, double y) {
    State s;
    s.objects["gripper"] = {{"x", 0.15}, {"y", -0.3}, {"z", 1.5}};
    s.objects["kettle1"] = {{"x", x}, {"y", y}, {"z", kettle_z}};
    for (const auto &b : burners) {
        auto [bx, by] = slot(b);
        s.objects[b] = {{"x", bx}, {"y", by}, {"z", burner_off_z}};
    }
    for (size_t i = 0; i < knobs.size(); ++i) {
        s.objects[knobs[i]] = {{"x", 0.1 * static_cast<double>(i)}, {"y", -0.2},
                               {"z", 0.9}};
        s.hidden["on:" + knobs[i]] = 0;
    }
    s.images = {"frame_0.png"};
    return s;
}

StepResult KitchenDomain::step(const State &state, const vector<Object> &objects,
                               const Action &action) const {
    const Skill &skill = *action.skill;
    if (skill.name != "MoveAndTurnOnKnob" && skill.name != "PushKettleOntoBurner")
        throw UnknownSkill("kitchen has no skill " + skill.name);
    StepResult out{state, true};
    if (action.objects.size() != skill.param_types.size() ||
        action.theta.size() != static_cast<size_t>(skill.continuous_dim))
        return out;
    for (size_t i = 0; i < action.objects.size(); ++i)
        if (find_object(objects, action.objects[i]).type != skill.param_types[i])
            return out;
    State next = state;
    if (skill.name == "MoveAndTurnOnKnob") {
        if (fabs(action.theta[0] - knob_angle) > knob_tolerance)
            return out;
        next.hidden["on:" + action.objects[1]] = 1;
        set_burner_z(next);
    } else {
        const string &kettle = action.objects[1], &surface = action.objects[2];
        next.objects[kettle]["x"] = state.feature(kettle, "x") + action.theta[0];
        next.objects[kettle]["y"] = state.feature(kettle, "y") + action.theta[1];
        if (!kettle_on(next, kettle, surface))
            return out;
    }
    next.timestep = state.timestep + 1;
    next.images = {"frame_" + to_string(next.timestep) + ".png"};
    return {next, false};
}

vector<double> KitchenDomain::expert_params(const State &state,
                                            const vector<Object> &,
                                            const Action &action) const {
    if (action.skill->name == "MoveAndTurnOnKnob")
        return {knob_angle};
    auto [x, y] = slot(action.objects.at(2));
    const string &kettle = action.objects.at(1);
    return {x - state.feature(kettle, "x"), y - state.feature(kettle, "y"), 0.0};
}

vector<Demonstration> KitchenDomain::generate_demos(int n, uint64_t seed) const {
    vector<Demonstration> demos;
    for (int i = 0; i < n; ++i) {
        mt19937_64 rng(mix64(seed * 1000003ULL + static_cast<uint64_t>(i)));
        normal_distribution<double> jitter(0.0, 0.01);
        normal_distribution<double> angle_noise(0.0, 0.05);
        Demonstration demo;
        demo.objects = scene_objects();
        demo.states.push_back(initial_state(jitter(rng), jitter(rng)));
        Action turn{spec_.skill("MoveAndTurnOnKnob"), {"gripper", "knob2"},
                    {knob_angle + angle_noise(rng)}};
        Action push{spec_.skill("PushKettleOntoBurner"),
                    {"gripper", "kettle1", "burner2"}, {}};
        for (Action act : {turn, push}) {
            if (act.theta.empty()) {
                act.theta = expert_params(demo.states.back(), demo.objects, act);
                act.theta[0] += jitter(rng);
                act.theta[1] += jitter(rng);
            }
            StepResult r = step(demo.states.back(), demo.objects, act);
            if (r.failed)
                throw Error("scripted kitchen action failed");
            demo.actions.push_back(act);
            demo.states.push_back(move(r.next));
        }
        demo.goal = {{spec_.init_predicates[0], {"kettle1", "burner2", "knob2"}}};
        if (!goal_reached(demo.states.back(), demo.objects, demo.goal))
            throw Error("scripted kitchen demonstration misses its goal");
        demos.push_back(move(demo));
    }
    return demos;
}

Task KitchenDomain::make_task(uint64_t seed, int index) const {
    mt19937_64 rng(mix64(0x6b17ULL ^ (seed * 7919ULL + static_cast<uint64_t>(index))));
    normal_distribution<double> jitter(0.0, 0.01);
    auto [x, y] = slot("burner3");
    Task task;
    task.name = "kitchen-front-right-to-back-right-s" + to_string(seed) + "-" +
                to_string(index);
    task.objects = scene_objects();
    task.init = initial_state(x + jitter(rng), y + jitter(rng));
    task.goal = {{spec_.init_predicates[0], {"kettle1", "burner4", "knob4"}}};
    return task;
}

vector<Action> KitchenDomain::witness_plan(const Task &task) const {
    Action turn{spec_.skill("MoveAndTurnOnKnob"), {"gripper", "knob4"}, {}};
    Action push{spec_.skill("PushKettleOntoBurner"),
                {"gripper", "kettle1", "burner4"}, {}};
    turn.theta = expert_params(task.init, task.objects, turn);
    push.theta = expert_params(task.init, task.objects, push);
    return {turn, push};
}

string KitchenDomain::ascii(const State &state, const vector<Object> &) const {
    // back row first, like looking at the stove from the front
    ostringstream out;
    for (const char *row : {"2 4", "1 3"}) {
        for (const char *c = row; *c; ++c) {
            if (*c == ' ')
                continue;
            string b = string("burner") + *c;
            out << "[" << b << (burner_on(state, b) ? " on" : " off")
                << (kettle_on(state, "kettle1", b) ? " K" : "") << "]";
        }
        out << "\n";
    }
    return out.str();
}
}
