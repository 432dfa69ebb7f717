#ifndef SYMWM_DOMAINS_BURGER_HPP
#define SYMWM_DOMAINS_BURGER_HPP

#include "domain.hpp"

#include <random>

namespace symwm {

enum class BurgerVariant {bigger_burger, more_stacks, combo_burger};

// Grid kitchen: items stack on cells, the grill and the cutting board are
// fixtures. A held item has row = col = z = -1.
class BurgerDomain : public SimDomain {
    BurgerVariant variant_;
    DomainSpec spec_;
    std::vector<Concept> concepts_;
public:
    static constexpr int rows = 6;
    static constexpr int cols = 6;

    explicit BurgerDomain(BurgerVariant variant);

    const DomainSpec &spec() const override {return spec_;}
    Hyperparameters default_hyperparameters() const override;
    std::vector<Demonstration> generate_demos(int n,
                                              std::uint64_t seed) const override;
    Task make_task(std::uint64_t seed, int index) const override;
    std::vector<Action> witness_plan(const Task &task) const override;
    StepResult step(const State &state, const std::vector<Object> &objects,
                    const Action &action) const override;
    const std::vector<Concept> &concepts() const override {return concepts_;}
    std::string ascii(const State &state,
                      const std::vector<Object> &objects) const override;

    // Scene construction, exposed for tests.
    struct Scene {
        std::vector<Object> objects;
        State state;
    };
    Scene make_scene(const std::vector<std::string> &names, std::mt19937_64 &rng,
                     const std::string &held = "") const;
    Action action(const std::string &skill,
                  const std::vector<std::string> &args) const;
    Demonstration run_script(const Scene &scene,
                             const std::vector<Action> &script,
                             std::vector<GroundAtom> goal) const;
    PredicateRef predicate(const std::string &name,
                           const std::vector<std::string> &arg_types) const;
};

std::string burger_type_of(const std::string &object_name);
}

#endif
