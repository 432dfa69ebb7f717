#include "fixtures.hpp"
#include "oracles.hpp"
#include "symwm/domains/burger.hpp"
#include "symwm/isomorphism.hpp"
#include "symwm/listing.hpp"

#include <gtest/gtest.h>

using namespace symwm;

namespace {
struct Toy {
    TypeHierarchy types;
    std::shared_ptr<const std::vector<Object>> objects;
    SkillRef pick = std::make_shared<Skill>(Skill{"Pick", {"robot", "item"}, 0});
    SkillRef place = std::make_shared<Skill>(Skill{"Place", {"robot", "item"}, 0});
    PredicateRef holding = Predicate::visual("Holding", {"robot", "item"});
    PredicateRef clear = Predicate::visual("Clear", {"item"});
    PredicateRef q = Predicate::visual("Q", {"item"});
    PredicateRef p = Predicate::visual("P", {"item"});

    Toy() {
        types.add("robot");
        types.add("item");
        std::vector<Object> objs = {{"robot", "robot", ""}};
        for (int i = 1; i <= 5; ++i)
            objs.push_back({"i" + std::to_string(i), "item", ""});
        objects = std::make_shared<const std::vector<Object>>(objs);
    }

    Transition picked(const std::string &item, AtomSet extra = {}) {
        AtomSet before = extra;
        before.insert({clear, {item}});
        AtomSet after = extra;
        after.insert({holding, {"robot", item}});
        return oracle::make_transition(before, {pick, {"robot", item}, {}}, after,
                                       objects);
    }
};

// Five Pick transitions; Q holds on the picked item in the first k.
std::vector<Transition> soft_class(Toy &toy, int k) {
    std::vector<Transition> ts;
    for (int i = 1; i <= 5; ++i) {
        std::string item = "i" + std::to_string(i);
        AtomSet extra({{toy.p, {item}}});
        if (i <= k)
            extra.insert({toy.q, {item}});
        ts.push_back(toy.picked(item, extra));
    }
    return ts;
}

std::vector<std::string> precondition_names(const Operator &op) {
    std::vector<std::string> out;
    for (const auto &a : op.preconditions)
        out.push_back(a.predicate->name());
    return out;
}

Operator learned_single(const std::vector<Transition> &ts, double h) {
    auto classes = partition(ts);
    EXPECT_EQ(classes.size(), 1u);
    Skeleton sk = induce_skeleton(classes[0], ts);
    learn_preconditions(sk, classes[0], ts, h);
    return sk.op;
}

std::vector<PredicateRef> more_stacks_predicates(const BurgerDomain &d) {
    std::vector<PredicateRef> preds = d.spec().init_predicates;
    preds.push_back(Predicate::visual("cooked0", {"patty"}));
    preds.push_back(Predicate::visual("empty_hands0", {"robot"}));
    return preds;
}
}

TEST(AbstractDemos, OneTransitionPerStep) {
    BurgerDomain d(BurgerVariant::combo_burger);
    auto demos = d.generate_demos(12, 0);
    auto lab = d.ground_truth_labeler();
    AbstractionCache cache(d.spec().types, lab.get());
    auto ts = abstract_demos(demos, d.spec().goal_predicates, cache);
    size_t steps = 0;
    for (const auto &demo : demos)
        steps += demo.actions.size();
    EXPECT_EQ(ts.size(), steps);
    for (const auto &t : ts)
        for (const auto &a : t.before)
            EXPECT_TRUE(std::any_of(d.spec().goal_predicates.begin(),
                                    d.spec().goal_predicates.end(),
                                    [&](const PredicateRef &g) {
                                        return g->key() == a.predicate->key();
                                    }));
}

TEST(Partition, SameEffectsUnify) {
    Toy toy;
    auto ts = std::vector<Transition>{toy.picked("i1"), toy.picked("i2")};
    auto m = unify_transitions(ts[0], ts[1]);
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(m->at("i1"), "i2");
    EXPECT_EQ(oracle::brute_unify(ts[0], ts[1]).has_value(), true);
    EXPECT_EQ(partition(ts).size(), 1u);
}

TEST(Partition, DifferentSkillsSplit) {
    Toy toy;
    Transition a = toy.picked("i1");
    Transition b = a;
    b.action.skill = toy.place;
    EXPECT_FALSE(unify_transitions(a, b).has_value());
    EXPECT_EQ(partition({a, b}).size(), 2u);
}

TEST(Partition, SpuriousEffectSplits) {
    Toy toy;
    Transition a = toy.picked("i1");
    Transition b = toy.picked("i2");
    b.after.insert({toy.q, {"i2"}});
    EXPECT_FALSE(unify_transitions(a, b).has_value());
    EXPECT_EQ(partition({a, b}).size(), 2u);
}

TEST(Partition, AgreesWithBruteForceBijection) {
    std::mt19937_64 rng(17);
    for (int n = 0; n < 60; ++n) {
        auto inst = oracle::random_learning_instance(rng);
        const auto &ts = inst.transitions;
        for (size_t i = 0; i < ts.size(); ++i) {
            for (size_t j = 0; j < ts.size(); ++j) {
                bool lib = unify_transitions(ts[i], ts[j]).has_value();
                bool brute = oracle::brute_unify(ts[i], ts[j]).has_value();
                ASSERT_EQ(lib, brute) << "instance " << n << " pair " << i << "," << j;
            }
        }
        // Members unify with their representative, and classes are maximal.
        auto classes = partition(ts);
        for (size_t c = 0; c < classes.size(); ++c) {
            const auto &rep = ts[classes[c].members[0]];
            for (size_t m : classes[c].members)
                EXPECT_TRUE(oracle::brute_unify(rep, ts[m]).has_value());
            for (size_t e = c + 1; e < classes.size(); ++e)
                EXPECT_FALSE(
                    oracle::brute_unify(rep, ts[classes[e].members[0]]).has_value());
        }
    }
}

TEST(Partition, EquivalenceRelation) {
    std::mt19937_64 rng(23);
    for (int n = 0; n < 40; ++n) {
        auto inst = oracle::random_learning_instance(rng);
        const auto &ts = inst.transitions;
        size_t k = std::min<size_t>(ts.size(), 8);
        for (size_t i = 0; i < k; ++i) {
            EXPECT_TRUE(unify_transitions(ts[i], ts[i]).has_value());
            for (size_t j = 0; j < k; ++j) {
                bool ij = unify_transitions(ts[i], ts[j]).has_value();
                EXPECT_EQ(ij, unify_transitions(ts[j], ts[i]).has_value());
                for (size_t l = 0; l < k && ij; ++l)
                    if (unify_transitions(ts[j], ts[l]))
                        EXPECT_TRUE(unify_transitions(ts[i], ts[l]).has_value());
            }
        }
    }
}

TEST(InduceSkeleton, MoreStacksPick) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto demos = d.generate_demos(12, 0);
    auto lab = d.ground_truth_labeler();
    AbstractionCache cache(d.spec().types, lab.get());
    auto ts = abstract_demos(demos, more_stacks_predicates(d), cache);
    auto classes = partition(ts);
    bool found = false;
    for (const auto &cls : classes) {
        const Transition &rep = ts[cls.members[0]];
        if (rep.action.skill->name != "Pick" || rep.type_of(rep.action.objects[1]) != "patty")
            continue;
        Skeleton sk = induce_skeleton(cls, ts);
        bool off_ground = false;
        for (const auto &a : sk.op.delete_effects)
            off_ground = off_ground || a.predicate->name() == "OnGround";
        if (!off_ground)
            continue;
        found = true;
        EXPECT_EQ(sk.op.params, (std::vector<Variable>{{"?x0", "patty"}, {"?x1", "robot"}}));
        std::vector<std::string> dels;
        for (const auto &a : sk.op.delete_effects)
            dels.push_back(a.str());
        EXPECT_EQ(dels, (std::vector<std::string>{"Clear(?x0:patty)",
                                                  "OnGround(?x0:patty)",
                                                  "empty_hands0(?x1:robot)"}));
        ASSERT_EQ(sk.op.add_effects.size(), 1u);
        EXPECT_EQ(sk.op.add_effects[0].str(), "Holding(?x1:robot, ?x0:patty)");
        // Every member's substitution maps the lifted effects onto its own.
        for (size_t m = 0; m < cls.members.size(); ++m) {
            const Transition &t = ts[cls.members[m]];
            AtomSet add, del;
            for (const auto &a : sk.op.add_effects)
                add.insert(a.ground(sk.substitutions[m]));
            for (const auto &a : sk.op.delete_effects)
                del.insert(a.ground(sk.substitutions[m]));
            EXPECT_EQ(add, t.add_effects());
            EXPECT_EQ(del, t.delete_effects());
        }
    }
    EXPECT_TRUE(found);
}

TEST(InduceSkeleton, NoEffectsUnaryController) {
    Toy toy;
    SkillRef wave = std::make_shared<Skill>(Skill{"Wave", {"robot"}, 0});
    Transition t = oracle::make_transition({}, {wave, {"robot"}, {}}, {}, toy.objects);
    auto classes = partition({t});
    Skeleton sk = induce_skeleton(classes[0], {t});
    EXPECT_EQ(sk.op.params, (std::vector<Variable>{{"?x0", "robot"}}));
}

TEST(SoftIntersection, FourOfFiveIncluded) {
    Toy toy;
    auto ts = soft_class(toy, 4);
    Operator op = learned_single(ts, 0.8);
    auto names = precondition_names(op);
    EXPECT_NE(std::find(names.begin(), names.end(), "Q"), names.end());
}

TEST(SoftIntersection, ThreeOfFiveExcluded) {
    Toy toy;
    auto ts = soft_class(toy, 3);
    Operator op = learned_single(ts, 0.8);
    auto names = precondition_names(op);
    EXPECT_EQ(std::find(names.begin(), names.end(), "Q"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "P"), names.end());
}

TEST(SoftIntersection, FullThresholdIsIntersection) {
    Toy toy;
    for (int k = 0; k <= 5; ++k) {
        auto ts = soft_class(toy, k);
        Operator lib = learned_single(ts, 1.0);
        auto naive = oracle::naive_learn(ts);
        ASSERT_EQ(naive.size(), 1u);
        EXPECT_EQ(oracle::canonical_form(lib), oracle::canonical_form(naive[0]));
    }
}

TEST(PruneLowData, Boundaries) {
    Toy toy;
    auto make = [&](int support, int total, double h) {
        std::vector<Transition> ts;
        for (int i = 0; i < total; ++i)
            ts.push_back(toy.picked("i1"));
        Operator op;
        op.name = "Op";
        op.skill = toy.pick;
        op.support_count = support;
        return prune_low_data({op}, ts, h).size();
    };
    EXPECT_EQ(make(1, 30, 0.05), 0u);
    EXPECT_EQ(make(2, 30, 0.05), 1u);
    EXPECT_EQ(make(1, 2, 0.4), 1u);
}

TEST(PruneLowData, KeepsCounts) {
    Toy toy;
    std::vector<Transition> ts(10, toy.picked("i1"));
    Operator op;
    op.name = "Op";
    op.skill = toy.pick;
    op.support_count = 7;
    auto kept = prune_low_data({op}, ts, 0.5);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].support_count, 7);
}

TEST(LearnOperators, Empty) {
    EXPECT_TRUE(learn_operators({}, {}).operators.empty());
}

TEST(LearnOperators, MoreStacksFixturePredicates) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto demos = d.generate_demos(12, 0);
    auto lab = d.ground_truth_labeler();
    AbstractionCache cache(d.spec().types, lab.get());
    auto ts = abstract_demos(demos, more_stacks_predicates(d), cache);
    auto learned = learn_operators(ts, {0.8, 0.05, true});
    auto want = listing_operators(parse_listing(read_fixture("listings/more_stacks.txt")),
                                  &d.spec());
    EXPECT_EQ(learned.operators.size(), 7u);
    EXPECT_TRUE(isomorphic(learned.operators, want));
}

TEST(LearnOperators, EffectsExactOnMembers) {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 30; ++n) {
        auto inst = oracle::random_learning_instance(rng);
        auto learned = learn_operators(inst.transitions, {0.8, 0.0, true});
        for (size_t k = 0; k < learned.operators.size(); ++k) {
            const auto &sk = learned.skeletons[k];
            for (size_t m = 0; m < learned.classes[k].members.size(); ++m) {
                const Transition &t = inst.transitions[learned.classes[k].members[m]];
                AtomSet add, del;
                for (const auto &a : sk.op.add_effects)
                    add.insert(a.ground(sk.substitutions[m]));
                for (const auto &a : sk.op.delete_effects)
                    del.insert(a.ground(sk.substitutions[m]));
                EXPECT_EQ(add, t.add_effects());
                EXPECT_EQ(del, t.delete_effects());
            }
        }
    }
}

TEST(LearnOperators, OrderAndRenamingInvariant) {
    std::mt19937_64 rng(99);
    for (int n = 0; n < 30; ++n) {
        auto inst = oracle::random_learning_instance(rng);
        LearnConfig cfg{1.0, 0.0, true};
        auto base = learn_operators(inst.transitions, cfg).operators;
        auto reversed = inst.transitions;
        std::reverse(reversed.begin(), reversed.end());
        EXPECT_TRUE(oracle::same_schemas(base, learn_operators(reversed, cfg).operators));
        // Rename every object.
        std::map<std::string, std::string> rename;
        std::vector<Object> objs;
        for (const auto &o : *inst.objects) {
            rename[o.name] = "r_" + o.name;
            objs.push_back({rename[o.name], o.type, ""});
        }
        auto shared = std::make_shared<const std::vector<Object>>(objs);
        auto move_atoms = [&](const AtomSet &s) {
            AtomSet out;
            for (const auto &a : s) {
                GroundAtom g{a.predicate, {}};
                for (const auto &x : a.args)
                    g.args.push_back(rename.at(x));
                out.insert(g);
            }
            return out;
        };
        std::vector<Transition> renamed;
        for (const auto &t : inst.transitions) {
            Action act = t.action;
            for (auto &o : act.objects)
                o = rename.at(o);
            renamed.push_back(oracle::make_transition(move_atoms(t.before), act,
                                                      move_atoms(t.after), shared));
        }
        EXPECT_TRUE(oracle::same_schemas(base, learn_operators(renamed, cfg).operators));
    }
}

TEST(LearnOperators, MatchesNaiveClusterAndIntersect) {
    std::mt19937_64 rng(2024);
    for (int n = 0; n < 50; ++n) {
        auto inst = oracle::random_learning_instance(rng);
        auto lib = learn_operators(inst.transitions, {1.0, 0.0, true}).operators;
        auto naive = oracle::naive_learn(inst.transitions);
        ASSERT_TRUE(oracle::same_schemas(lib, naive)) << "instance " << n;
    }
}
