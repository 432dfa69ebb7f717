#include "symwm/domains/burger.hpp"
#include "symwm/domains/kitchen.hpp"
#include "symwm/labeling.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace symwm;

namespace {
class AllTrue : public Labeler {
public:
    std::string identity() const override {return "all-true";}
    std::vector<Label> label_batch(const State &, const std::vector<GroundAtom> &atoms,
                                   const LabelContext &) override {
        return std::vector<Label>(atoms.size(), Label::yes);
    }
};

// Stack patty1 on bottom_bun1 so that some objects are covered.
BurgerDomain::Scene stacked_scene(const BurgerDomain &d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto scene = d.make_scene({"bottom_bun1", "patty1", "patty2"}, rng);
    for (auto act : {d.action("Pick", {"robot", "patty1"}),
                     d.action("Place", {"robot", "patty1", "bottom_bun1"}),
                     d.action("Pick", {"robot", "patty2"})}) {
        auto r = d.step(scene.state, scene.objects, act);
        EXPECT_FALSE(r.failed);
        scene.state = r.next;
    }
    return scene;
}

// Clear from raw grid occupancy: nothing rests one level above x in x's cell.
bool clear_by_grid(const State &s, const std::string &x) {
    if (burger_type_of(x) == "robot")
        return true;
    const auto &fx = s.objects.at(x);
    if (fx.at("z") < 0)
        return false;
    for (const auto &[name, f] : s.objects) {
        if (name == x || burger_type_of(name) == "robot" || f.at("z") < 0)
            continue;
        if (f.at("row") == fx.at("row") && f.at("col") == fx.at("col") &&
            f.at("z") == fx.at("z") + 1)
            return false;
    }
    return true;
}
}

TEST(GroundTruthLabeler, OnFollowsGeometry) {
    BurgerDomain d(BurgerVariant::more_stacks);
    std::mt19937_64 rng(3);
    auto scene = d.make_scene({"patty1"}, rng);
    scene.objects.push_back({"grill", "grill", "the grill"});
    scene.state.objects["grill"] = {{"row", 5}, {"col", 5}, {"z", 0}};
    scene.state.objects["patty1"] = {{"row", 5}, {"col", 5}, {"z", 1}};
    auto lab = d.ground_truth_labeler();
    auto on = d.predicate("On", {"object", "object"});
    auto labels = lab->label_batch(scene.state,
                                   {{on, {"patty1", "grill"}}, {on, {"grill", "patty1"}}},
                                   {});
    EXPECT_EQ(labels, (std::vector<Label>{Label::yes, Label::no}));
}

TEST(GroundTruthLabeler, EmptyBatch) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto lab = d.ground_truth_labeler();
    EXPECT_TRUE(lab->label_batch(State{}, {}, {}).empty());
}

TEST(GroundTruthLabeler, UnknownPredicate) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto scene = stacked_scene(d, 1);
    auto lab = d.ground_truth_labeler();
    auto p = Predicate::visual("frobnicated", {"patty"});
    EXPECT_THROW(lab->label_batch(scene.state, {{p, {"patty1"}}}, {}),
                 UnsupportedPredicateKind);
}

TEST(NoisyLabeler, ZeroRateIsIdentity) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto scene = stacked_scene(d, 2);
    auto base = d.ground_truth_labeler();
    auto noisy = make_noisy(base, 0.0, 7, {});
    std::vector<GroundAtom> atoms;
    for (const auto &p : d.spec().init_predicates)
        for (const auto &g : groundings(p, scene.objects, d.spec().types))
            atoms.push_back(g);
    EXPECT_EQ(noisy->label_batch(scene.state, atoms, {}),
              base->label_batch(scene.state, atoms, {}));
}

TEST(NoisyLabeler, FullRateFlipsAll) {
    auto base = std::make_shared<AllTrue>();
    auto noisy = make_noisy(base, 1.0, 7, {});
    auto p = Predicate::visual("q", {"object"});
    std::vector<GroundAtom> atoms;
    for (int i = 0; i < 50; ++i)
        atoms.push_back({p, {"o" + std::to_string(i)}});
    for (Label l : noisy->label_batch(State{}, atoms, {}))
        EXPECT_EQ(l, Label::no);
}

TEST(NoisyLabeler, ProtectedPassThrough) {
    auto base = std::make_shared<AllTrue>();
    auto p = Predicate::visual("goal", {"object"});
    auto noisy = make_noisy(base, 1.0, 7, {p});
    auto labels = noisy->label_batch(State{}, {{p, {"a"}}}, {});
    EXPECT_EQ(labels[0], Label::yes);
}

TEST(NoisyLabeler, FlipRateWithinBinomialBand) {
    auto base = std::make_shared<AllTrue>();
    auto p = Predicate::visual("q", {"object"});
    std::vector<GroundAtom> atoms;
    for (int i = 0; i < 100; ++i)
        atoms.push_back({p, {"o" + std::to_string(i)}});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto noisy = make_noisy(base, 0.05, seed, {});
        int flipped = 0, total = 0;
        for (int t = 0; t < 100; ++t) {
            State s;
            s.timestep = t;
            s.objects["o0"]["t"] = t;
            for (Label l : noisy->label_batch(s, atoms, {})) {
                flipped += l == Label::no;
                ++total;
            }
        }
        double frac = static_cast<double>(flipped) / total;
        EXPECT_GE(frac, 0.03) << "seed " << seed;
        EXPECT_LE(frac, 0.07) << "seed " << seed;
    }
}

TEST(NoisyLabeler, Reproducible) {
    auto base = std::make_shared<AllTrue>();
    auto p = Predicate::visual("q", {"object"});
    std::vector<GroundAtom> atoms;
    for (int i = 0; i < 200; ++i)
        atoms.push_back({p, {"o" + std::to_string(i)}});
    auto a = make_noisy(base, 0.3, 11, {});
    auto b = make_noisy(base, 0.3, 11, {});
    EXPECT_EQ(a->label_batch(State{}, atoms, {}), b->label_batch(State{}, atoms, {}));
}

TEST(Abstract, NoPredicates) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto scene = stacked_scene(d, 4);
    auto lab = d.ground_truth_labeler();
    EXPECT_TRUE(abstract(scene.state, {}, scene.objects, d.spec().types, lab.get())
                    .empty());
}

TEST(Abstract, ClearMatchesGridOccupancy) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto clear = d.predicate("Clear", {"object"});
    auto lab = d.ground_truth_labeler();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto scene = stacked_scene(d, seed);
        AtomSet got =
            abstract(scene.state, {clear}, scene.objects, d.spec().types, lab.get());
        for (const auto &o : scene.objects) {
            bool want = clear_by_grid(scene.state, o.name);
            EXPECT_EQ(got.contains({clear, {o.name}}), want)
                << o.name << " seed " << seed;
        }
    }
}

TEST(Abstract, KitchenBurnerThreshold) {
    KitchenDomain d;
    auto low = Predicate::feature({"surface", "z", 1.59, false});
    auto high = Predicate::feature({"surface", "z", 1.59, true});
    EXPECT_EQ(high->name(), "NOT-[[0:surface].z<=[idx_0]1.59]");
    auto objects = KitchenDomain::scene_objects();
    State s = KitchenDomain::initial_state(0, 0);
    Action turn{d.spec().skill("MoveAndTurnOnKnob"), {"gripper", "knob2"},
                {M_PI / 2}};
    State on = d.step(s, objects, turn).next;
    for (const State *st : {&s, &on}) {
        AtomSet got = abstract(*st, {low, high}, objects, d.spec().types, nullptr);
        for (const char *b : {"burner1", "burner2", "burner3", "burner4"}) {
            bool is_low = st->feature(b, "z") <= 1.59;
            EXPECT_EQ(got.contains({low, {b}}), is_low) << b;
            EXPECT_EQ(got.contains({high, {b}}), !is_low) << b;
        }
    }
    EXPECT_GT(on.feature("burner2", "z"), 1.59);
}

TEST(Abstract, UnionOfPredicateSets) {
    BurgerDomain d(BurgerVariant::more_stacks);
    auto scene = stacked_scene(d, 9);
    auto lab = d.ground_truth_labeler();
    std::vector<PredicateRef> a = {d.predicate("On", {"object", "object"}),
                                   Predicate::visual("cooked", {"patty"})};
    std::vector<PredicateRef> b = {d.predicate("Clear", {"object"}),
                                   Predicate::visual("holding", {"robot", "item"})};
    std::vector<PredicateRef> both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto &t = d.spec().types;
    EXPECT_EQ(abstract(scene.state, both, scene.objects, t, lab.get()),
              abstract(scene.state, a, scene.objects, t, lab.get())
                  .united(abstract(scene.state, b, scene.objects, t, lab.get())));
}

TEST(LabelContext, AllOrNothing) {
    LabelContext ctx;
    EXPECT_NO_THROW(ctx.validate());
    ctx.previous_state = State{};
    EXPECT_THROW(ctx.validate(), InvalidContext);
}

TEST(CachedLabeler, MatchesBackingLabeler) {
    auto dir = std::filesystem::temp_directory_path() / "symwm_cached_labeler";
    std::filesystem::remove_all(dir);
    BurgerDomain d(BurgerVariant::more_stacks);
    auto scene = stacked_scene(d, 5);
    auto base = d.ground_truth_labeler();
    auto cached = std::make_shared<CachedLabeler>(base, std::make_shared<DiskCache>(dir));
    std::vector<GroundAtom> atoms;
    for (const auto &g : groundings(Predicate::visual("cooked", {"patty"}),
                                    scene.objects, d.spec().types))
        atoms.push_back(g);
    auto want = base->label_batch(scene.state, atoms, {});
    EXPECT_EQ(cached->label_batch(scene.state, atoms, {}), want);
    EXPECT_EQ(cached->label_batch(scene.state, atoms, {}), want);
    EXPECT_EQ(cached->misses(), 1u);
    EXPECT_EQ(cached->hits(), 1u);
    std::filesystem::remove_all(dir);
}
