#include "symwm/domains/domain.hpp"
#include "symwm/domains/burger.hpp"
#include "symwm/domains/kitchen.hpp"
#include "symwm/digest.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
// Names the mock proposer may emit that mean nothing; the oracle answers
// them with a biased coin.
const vector<string> junk_names = {"shiny", "wobbly", "ready_to_serve",
                                   "important", "visible"};
constexpr double junk_true_rate = 0.3;

string base_name(const string &name) {
    string s = to_lower(name);
    while (!s.empty() && isdigit(static_cast<unsigned char>(s.back())))
        s.pop_back();
    return s;
}
}

vector<double> SimDomain::expert_params(const State &, const vector<Object> &,
                                        const Action &action) const {
    return vector<double>(action.skill->continuous_dim, 0.0);
}

const Concept *SimDomain::find_concept(const string &name,
                                       bool &negated) const {
    string base = base_name(name);
    for (const auto &c : concepts()) {
        negated = false;
        if (c.name == base)
            return &c;
        for (const auto &s : c.synonyms)
            if (s == base)
                return &c;
        negated = true;
        for (const auto &a : c.antonyms)
            if (a == base)
                return &c;
    }
    negated = false;
    return nullptr;
}

shared_ptr<Labeler> SimDomain::ground_truth_labeler() const {
    return make_shared<ConceptLabeler>(*this);
}

bool SimDomain::goal_reached(const State &state, const vector<Object> &objects,
                             const vector<GroundAtom> &goal) const {
    (void)objects;
    for (const auto &g : goal)
        if (!g.predicate->evaluate(state, g.args))
            return false;
    return true;
}

string SimDomain::mock_propose(const Demonstration &demo,
                               const MockProposerConfig &config) const {
    const TypeHierarchy &types = spec().types;
    struct Grounded {
        const Concept *concept_;
        vector<string> args;
    };
    vector<Grounded> atoms;
    for (const auto &c : concepts()) {
        auto probe = Predicate::visual(c.name, c.arg_types);
        for (const auto &g : groundings(probe, demo.objects, types))
            atoms.push_back({&c, g.args});
    }
    auto render = [](const string &name, const vector<string> &args) {
        return name + "(" + join(args, ", ") + ")";
    };
    auto true_at = [&](const State &s) {
        vector<bool> out;
        for (const auto &a : atoms)
            out.push_back(a.concept_->holds(s, a.args));
        return out;
    };
    auto variants = [&](const Grounded &g, bool synonyms) {
        const auto &names = synonyms ? g.concept_->synonyms : g.concept_->antonyms;
        int k = synonyms ? config.k_synonyms : config.k_antonyms;
        vector<string> out;
        for (int i = 0; i < k && i < static_cast<int>(names.size()); ++i)
            out.push_back(render(names[i], g.args));
        return out;
    };

    ostringstream out;
    set<size_t> mentioned;
    out << "**Predicates for Each Action**\n\n";
    for (size_t t = 0; t < demo.actions.size(); ++t) {
        vector<bool> before = true_at(demo.states[t]);
        vector<bool> after = true_at(demo.states[t + 1]);
        vector<string> lost, gained, syn, ant;
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (before[i] == after[i])
                continue;
            mentioned.insert(i);
            (before[i] ? lost : gained).push_back(
                render(atoms[i].concept_->name, atoms[i].args));
            for (auto &s : variants(atoms[i], true))
                syn.push_back(s);
            for (auto &s : variants(atoms[i], false))
                ant.push_back(s);
        }
        out << (t + 1) << ". **" << demo.actions[t].str(demo.objects)
            << "**\n";
        out << "   - Before: " << join(lost, ", ") << "\n";
        out << "   - After: " << join(gained, ", ") << "\n";
        if (!syn.empty())
            out << "   - Synonyms: " << join(syn, ", ") << "\n";
        if (!ant.empty())
            out << "   - Antonyms: " << join(ant, ", ") << "\n";
        out << "\n";
    }
    out << "**Other Important Predicates**\n\n";
    out << "**Additional Initial State Predicates:**\n";
    vector<bool> init = true_at(demo.states.front());
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (!init[i] || mentioned.count(i))
            continue;
        out << "- " << render(atoms[i].concept_->name, atoms[i].args) << "\n";
        for (auto &s : variants(atoms[i], true))
            out << "- " << s << "\n";
        for (auto &s : variants(atoms[i], false))
            out << "- " << s << "\n";
    }
    if (config.junk > 0) {
        out << "\n**Miscellaneous:**\n";
        mt19937_64 rng(mix64(config.seed ^ demo.states.front().digest()));
        for (int j = 0; j < config.junk; ++j) {
            const string &name = junk_names[j % junk_names.size()];
            if (j % 2 == 0) {
                const Object &o = demo.objects[rng() % demo.objects.size()];
                out << "- " << render(name, {o.name}) << "\n";
            } else {
                out << "- " << render(name, {"room1"}) << "\n";
            }
        }
    }
    return out.str();
}

string ConceptLabeler::identity() const {
    return "ground_truth:" + domain_.spec().name;
}

vector<Label> ConceptLabeler::label_batch(const State &state,
                                          const vector<GroundAtom> &atoms,
                                          const LabelContext &context) {
    context.validate();
    vector<Label> out;
    out.reserve(atoms.size());
    for (const auto &atom : atoms) {
        const auto &pred = atom.predicate;
        if (pred->has_evaluator()) {
            out.push_back(pred->evaluate(state, atom.args) ? Label::yes
                                                           : Label::no);
            continue;
        }
        bool negated = false;
        const Concept *c = domain_.find_concept(pred->name(), negated);
        if (c) {
            if (c->arg_types.size() != atom.args.size()) {
                out.push_back(Label::no);
                continue;
            }
            bool v = c->holds(state, atom.args);
            out.push_back(v != negated ? Label::yes : Label::no);
            continue;
        }
        string base = base_name(pred->name());
        if (find(junk_names.begin(), junk_names.end(), base) !=
            junk_names.end()) {
            double u = counter_uniform(0x6a756e6b, state.digest(),
                                       fnv1a64(atom.str()));
            out.push_back(u < junk_true_rate ? Label::yes : Label::no);
            continue;
        }
        throw UnsupportedPredicateKind("no ground-truth definition for " +
                                       pred->name());
    }
    return out;
}

Environment::Environment(const SimDomain &domain, Task task)
    : domain_(domain), task_(move(task)) {
    reset();
}

const State &Environment::reset() {
    state_ = task_.init;
    last_failed_ = false;
    return state_;
}

const State &Environment::step(const Action &action) {
    StepResult r = domain_.step(state_, task_.objects, action);
    state_ = move(r.next);
    last_failed_ = r.failed;
    return state_;
}

unique_ptr<SimDomain> make_domain(const string &name) {
    if (name == "kitchen")
        return make_unique<KitchenDomain>();
    if (name == "more_stacks")
        return make_unique<BurgerDomain>(BurgerVariant::more_stacks);
    if (name == "bigger_burger")
        return make_unique<BurgerDomain>(BurgerVariant::bigger_burger);
    if (name == "combo_burger")
        return make_unique<BurgerDomain>(BurgerVariant::combo_burger);
    throw Error("unknown domain '" + name + "'");
}

vector<string> domain_names() {
    return {"bigger_burger", "more_stacks", "combo_burger", "kitchen"};
}
}
