#include "fixtures.hpp"
#include "oracles.hpp"
#include "symwm/domains/burger.hpp"
#include "symwm/domains/kitchen.hpp"
#include "symwm/listing.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace symwm;

namespace {
std::vector<PredicateRef> predicates_of(const std::vector<Operator> &ops) {
    std::map<std::string, PredicateRef> by_key;
    for (const auto &op : ops)
        for (const auto *list : {&op.preconditions, &op.add_effects, &op.delete_effects})
            for (const auto &a : *list)
                by_key[a.predicate->key()] = a.predicate;
    std::vector<PredicateRef> out;
    for (const auto &[k, p] : by_key)
        out.push_back(p);
    return out;
}

const GroundOperator *find_ground(const std::vector<GroundOperator> &ops,
                                  const std::string &skill,
                                  const std::vector<std::string> &objects) {
    for (const auto &g : ops)
        if (g.op->skill->name == skill && g.skill_objects() == objects)
            return &g;
    return nullptr;
}
}

TEST(GroundAll, UnaryOverThreeObjects) {
    TypeHierarchy types;
    types.add("block");
    std::vector<Object> objs = {{"a", "block", ""}, {"b", "block", ""}, {"c", "block", ""}};
    Operator op;
    op.name = "Touch";
    op.params = {{"?x", "block"}};
    op.skill = std::make_shared<Skill>(Skill{"Touch", {"block"}, 0});
    op.skill_args = op.params;
    EXPECT_EQ(ground_all({op}, objs, types).size(), 3u);
}

TEST(GroundAll, MissingTypeGivesNothing) {
    TypeHierarchy types;
    types.add("block");
    types.add("cup");
    std::vector<Object> objs = {{"a", "block", ""}};
    Operator op;
    op.name = "Fill";
    op.params = {{"?c", "cup"}};
    op.skill = std::make_shared<Skill>(Skill{"Fill", {"cup"}, 0});
    op.skill_args = op.params;
    EXPECT_TRUE(ground_all({op}, objs, types).empty());
}

TEST(GroundAll, MoreStacksMatchesEnumeration) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto ops = listing_operators(parse_listing(read_fixture("listings/more_stacks.txt")),
                                 &d.spec());
    std::vector<Object> objs = {{"bottom_bun1", "bottom_bun", ""}, {"grill", "grill", ""},
                                {"patty1", "patty", ""}, {"robot", "robot", ""},
                                {"top_bun1", "top_bun", ""}};
    size_t want = 0;
    std::set<std::string> brute;
    for (const auto &op : ops)
        for (const auto &b : oracle::brute_groundings(op, objs, d.spec().types)) {
            ++want;
            brute.insert(op.name + "(" + join(b, ", ") + ")");
        }
    auto got = ground_all(ops, objs, d.spec().types);
    EXPECT_EQ(got.size(), want);
    std::set<std::string> lib;
    for (const auto &g : got)
        lib.insert(g.str());
    EXPECT_EQ(lib, brute);
}

TEST(Plan, GoalAlreadyHolds) {
    auto p = Predicate::visual("A", {});
    AtomSet init({{p, {}}});
    PlanResult r = plan(init, {{p, {}}}, {}, 100);
    EXPECT_EQ(r.status, PlanStatus::success);
    EXPECT_TRUE(r.plan.empty());
    EXPECT_EQ(r.nodes_created, 1u);
}

TEST(Plan, UnreachableGoal) {
    auto p = Predicate::visual("A", {});
    auto q = Predicate::visual("B", {});
    Operator op;
    op.name = "MakeA";
    op.add_effects = {{p, {}}};
    op.skill = std::make_shared<Skill>(Skill{"S", {}, 0});
    auto ground = ground_all({op}, {}, TypeHierarchy());
    PlanResult r = plan(AtomSet(), {{q, {}}}, ground, 100);
    EXPECT_EQ(r.status, PlanStatus::proven_unreachable);
    EXPECT_EQ(r.expansions, 0u);
}

TEST(Plan, MoreStacksOpenFace) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto ops = listing_operators(parse_listing(read_fixture("listings/more_stacks.txt")),
                                 &d.spec());
    std::mt19937_64 rng(0);
    auto scene = d.make_scene({"bottom_bun1", "grill", "patty1"}, rng);
    auto lab = d.ground_truth_labeler();
    AtomSet init = abstract(scene.state, predicates_of(ops), scene.objects,
                            d.spec().types, lab.get());
    std::vector<GroundAtom> goal = {
        {d.predicate("SomewhereAboveAndPrepped", {"bottom_bun", "patty"}),
         {"bottom_bun1", "patty1"}}};
    auto ground = ground_all(ops, scene.objects, d.spec().types, &init);
    PlanResult r = plan(init, goal, ground, 10000);
    ASSERT_EQ(r.status, PlanStatus::success);
    std::vector<std::string> skills;
    for (const auto &g : r.plan)
        skills.push_back(g.op->skill->name);
    EXPECT_EQ(skills, (std::vector<std::string>{"Pick", "Place", "Cook", "Pick", "Place"}));
    EXPECT_EQ(oracle::bfs_distance(init, goal, ground), std::optional<size_t>(5));
    EXPECT_TRUE(validate(r.plan, init, goal));
    EXPECT_TRUE(oracle::replay(r.plan, init, goal));
}

TEST(Validate, RejectsViolatedPrecondition) {
    auto p = Predicate::visual("A", {});
    auto q = Predicate::visual("B", {});
    Operator op;
    op.name = "NeedsA";
    op.preconditions = {{p, {}}};
    op.add_effects = {{q, {}}};
    op.skill = std::make_shared<Skill>(Skill{"S", {}, 0});
    auto ground = ground_all({op}, {}, TypeHierarchy());
    EXPECT_FALSE(validate(ground, AtomSet(), {{q, {}}}));
    EXPECT_TRUE(validate(ground, AtomSet({{p, {}}}), {{q, {}}}));
}

TEST(Validate, KitchenTwoStepPlan) {
    KitchenDomain d;
    auto ops = listing_operators(parse_listing(read_fixture("listings/kitchen.txt")),
                                 &d.spec());
    Task task = d.make_task(0, 0);
    std::vector<PredicateRef> preds = d.spec().init_predicates;
    for (const auto &p : predicates_of(ops))
        if (p->kind() == PredicateKind::feature)
            preds.push_back(p);
    AtomSet init = abstract(task.init, preds, task.objects, d.spec().types, nullptr);
    auto ground = ground_all(ops, task.objects, d.spec().types);
    const GroundOperator *turn =
        find_ground(ground, "MoveAndTurnOnKnob", {"gripper", "knob4"});
    const GroundOperator *push =
        find_ground(ground, "PushKettleOntoBurner", {"gripper", "kettle1", "burner4"});
    ASSERT_TRUE(turn && push);
    // Turning knob4 grounds ?x0 to a burner; only burner4 is linked to it.
    std::vector<GroundOperator> steps;
    for (const auto &g : ground)
        if (g.op->skill->name == "MoveAndTurnOnKnob" &&
            g.skill_objects() == std::vector<std::string>{"gripper", "knob4"} &&
            g.binding[0] == "burner4")
            steps.push_back(g);
    for (const auto &g : ground)
        if (g.op->skill->name == "PushKettleOntoBurner" &&
            g.skill_objects() ==
                std::vector<std::string>{"gripper", "kettle1", "burner4"} &&
            g.binding[3] == "knob4")
            steps.push_back(g);
    ASSERT_EQ(steps.size(), 2u);
    EXPECT_TRUE(validate(steps, init, task.goal));
    EXPECT_FALSE(validate({steps[1]}, init, task.goal));
}

TEST(Plan, AgreesWithBreadthFirstOnRandomModels) {
    std::mt19937_64 rng(77);
    int solvable = 0;
    for (int n = 0; n < 150; ++n) {
        auto inst = oracle::random_planning_instance(rng);
        auto all = ground_all(inst.operators, inst.objects, inst.types);
        auto pruned = ground_all(inst.operators, inst.objects, inst.types, &inst.init);
        bool want = oracle::bfs_reachable(inst.init, inst.goal, all);
        PlanResult r = plan(inst.init, inst.goal, pruned, 100000);
        ASSERT_EQ(r.status == PlanStatus::success, want) << "instance " << n;
        if (r.status == PlanStatus::success) {
            ++solvable;
            EXPECT_TRUE(validate(r.plan, inst.init, inst.goal));
            EXPECT_TRUE(oracle::replay(r.plan, inst.init, inst.goal));
        } else {
            EXPECT_EQ(r.status, PlanStatus::proven_unreachable);
        }
    }
    EXPECT_GT(solvable, 10);
}

TEST(Plan, DeterministicNodeCounts) {
    std::mt19937_64 rng(8);
    for (int n = 0; n < 20; ++n) {
        auto inst = oracle::random_planning_instance(rng);
        auto ground = ground_all(inst.operators, inst.objects, inst.types, &inst.init);
        PlanResult a = plan(inst.init, inst.goal, ground, 100000);
        PlanResult b = plan(inst.init, inst.goal, ground, 100000);
        EXPECT_EQ(a.nodes_created, b.nodes_created);
        EXPECT_EQ(a.plan.size(), b.plan.size());
    }
}
