#ifndef SYMWM_DOMAINS_KITCHEN_HPP
#define SYMWM_DOMAINS_KITCHEN_HPP

#include "domain.hpp"

namespace symwm {

// Four-burner stove with one kettle. Burners glow (z rises) while their knob
// is on; knob_i drives burner_i.
class KitchenDomain : public SimDomain {
    DomainSpec spec_;
    std::vector<Concept> concepts_;
public:
    static constexpr double slot_half_width = 0.1;
    static constexpr double knob_tolerance = 0.3;
    static constexpr double burner_off_z = 1.0;
    static constexpr double burner_on_z = 2.18;

    KitchenDomain();

    const DomainSpec &spec() const override {return spec_;}
    Hyperparameters default_hyperparameters() const override;
    std::vector<Demonstration> generate_demos(int n,
                                              std::uint64_t seed) const override;
    Task make_task(std::uint64_t seed, int index) const override;
    std::vector<Action> witness_plan(const Task &task) const override;
    StepResult step(const State &state, const std::vector<Object> &objects,
                    const Action &action) const override;
    std::vector<double> expert_params(const State &state,
                                      const std::vector<Object> &objects,
                                      const Action &action) const override;
    const std::vector<Concept> &concepts() const override {return concepts_;}
    std::string ascii(const State &state,
                      const std::vector<Object> &objects) const override;

    static std::vector<Object> scene_objects();
    // Kettle resting near (x, y) with every knob off.
    static State initial_state(double x, double y);
    static std::pair<double, double> slot(const std::string &burner);
};
}

#endif
