#ifndef SYMWM_CORE_HPP
#define SYMWM_CORE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symwm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArityMismatch : public Error {
public:
    using Error::Error;
};

class TypeMismatch : public Error {
public:
    using Error::Error;
};

// Single-inheritance type tree rooted at "object".
class TypeHierarchy {
    std::map<std::string, std::string> parent_;
public:
    static constexpr const char *root = "object";

    TypeHierarchy();
    void add(const std::string &name, const std::string &parent = root);
    bool contains(const std::string &name) const;
    bool is_subtype(const std::string &type, const std::string &ancestor) const;
    const std::string &parent(const std::string &name) const;
    std::vector<std::string> names() const;
};

struct Object {
    std::string name;
    std::string type;
    std::string descriptor;

    bool operator==(const Object &other) const {
        return name == other.name && type == other.type;
    }
    auto operator<=>(const Object &other) const {
        if (auto c = name <=> other.name; c != 0)
            return c;
        return type <=> other.type;
    }
};

using FeatureMap = std::map<std::string, double>;

struct State {
    std::vector<std::string> images;
    std::map<std::string, FeatureMap> objects;
    // Simulator bookkeeping that is not exposed as a feature.
    std::map<std::string, double> hidden;
    int timestep = 0;

    double feature(const std::string &object, const std::string &name) const;
    double hidden_value(const std::string &key, double fallback = 0.0) const;
    std::uint64_t digest() const;
};

enum class PredicateKind {visual, feature, provided};

using std::to_string;

std::string to_string(PredicateKind kind);
PredicateKind predicate_kind_from_string(const std::string &text);

// obj.feature <= threshold, optionally negated.
struct FeatureThreshold {
    std::string type;
    std::string feature;
    double threshold = 0.0;
    bool negated = false;

    bool holds(const State &state, const std::string &object) const;
    std::string name() const;
};

using ProvidedFn =
    std::function<bool(const State &, std::span<const std::string>)>;

class Predicate;
using PredicateRef = std::shared_ptr<const Predicate>;

class Predicate {
    std::string name_;
    std::vector<std::string> arg_types_;
    PredicateKind kind_;
    std::optional<FeatureThreshold> classifier_;
    ProvidedFn fn_;
    std::string key_;

    Predicate(std::string name, std::vector<std::string> arg_types,
              PredicateKind kind);
public:
    static PredicateRef visual(std::string name,
                               std::vector<std::string> arg_types);
    static PredicateRef feature(const FeatureThreshold &classifier);
    static PredicateRef provided(std::string name,
                                 std::vector<std::string> arg_types,
                                 ProvidedFn fn);

    const std::string &name() const {return name_;}
    const std::vector<std::string> &arg_types() const {return arg_types_;}
    std::size_t arity() const {return arg_types_.size();}
    PredicateKind kind() const {return kind_;}
    const std::optional<FeatureThreshold> &classifier() const {
        return classifier_;
    }
    bool has_evaluator() const;
    // Identity is (name, signature).
    const std::string &key() const {return key_;}

    bool evaluate(const State &state,
                  std::span<const std::string> args) const;
    PredicateRef renamed(const std::string &new_name) const;
    // name(?a:t, ?b:u) with one-letter variable names.
    std::string declaration() const;
};

bool same_predicate(const PredicateRef &a, const PredicateRef &b);

struct PredicateLess {
    bool operator()(const PredicateRef &a, const PredicateRef &b) const {
        return a->key() < b->key();
    }
};

struct GroundAtom {
    PredicateRef predicate;
    std::vector<std::string> args;

    bool operator==(const GroundAtom &other) const;
    bool operator<(const GroundAtom &other) const;
    std::string str() const;
};

// Sorted, duplicate-free set of ground atoms.
class AtomSet {
    std::vector<GroundAtom> atoms_;
public:
    AtomSet() = default;
    explicit AtomSet(std::vector<GroundAtom> atoms);

    bool contains(const GroundAtom &atom) const;
    void insert(const GroundAtom &atom);
    void erase(const GroundAtom &atom);
    bool subset_of(const AtomSet &other) const;
    AtomSet minus(const AtomSet &other) const;
    AtomSet united(const AtomSet &other) const;
    std::size_t size() const {return atoms_.size();}
    bool empty() const {return atoms_.empty();}
    auto begin() const {return atoms_.begin();}
    auto end() const {return atoms_.end();}
    const std::vector<GroundAtom> &atoms() const {return atoms_;}
    bool operator==(const AtomSet &other) const {return atoms_ == other.atoms_;}
    std::string str() const;
};

struct Variable {
    std::string name;
    std::string type;

    bool operator==(const Variable &) const = default;
    auto operator<=>(const Variable &) const = default;
    std::string str() const {return name + ":" + type;}
};

struct LiftedAtom {
    PredicateRef predicate;
    std::vector<Variable> args;

    bool operator==(const LiftedAtom &other) const;
    bool operator<(const LiftedAtom &other) const;
    std::string str() const;
    GroundAtom ground(const std::map<std::string, std::string> &binding) const;
};

struct Skill {
    std::string name;
    std::vector<std::string> param_types;
    int continuous_dim = 0;
};
using SkillRef = std::shared_ptr<const Skill>;

struct Action {
    SkillRef skill;
    std::vector<std::string> objects;
    std::vector<double> theta;

    // Pick[robot:robot, patty1:patty]
    std::string str(const std::vector<Object> &objects_in_scope) const;
};

struct Operator {
    std::string name;
    std::vector<Variable> params;
    std::vector<LiftedAtom> preconditions;
    std::vector<LiftedAtom> add_effects;
    std::vector<LiftedAtom> delete_effects;
    std::vector<LiftedAtom> ignore_effects;
    SkillRef skill;
    std::vector<Variable> skill_args;
    int support_count = 0;

    std::size_t complexity() const {
        return preconditions.size() + add_effects.size() +
               delete_effects.size();
    }
};

struct Demonstration {
    std::vector<Object> objects;
    std::vector<State> states;
    std::vector<Action> actions;
    std::vector<GroundAtom> goal;
};

struct Task {
    std::string name;
    std::vector<Object> objects;
    State init;
    std::vector<GroundAtom> goal;
};

// Everything about a domain that learning needs to know up front.
struct DomainSpec {
    std::string name;
    TypeHierarchy types;
    std::vector<SkillRef> skills;
    std::vector<PredicateRef> init_predicates;
    std::vector<PredicateRef> goal_predicates;

    SkillRef skill(const std::string &name) const;
    PredicateRef init_predicate(const std::string &name) const;
};

const Object &find_object(const std::vector<Object> &objects,
                          const std::string &name);

// Checks arity and argument types against the hierarchy.
GroundAtom ground(const PredicateRef &predicate,
                  const std::vector<std::string> &args,
                  const std::vector<Object> &objects,
                  const TypeHierarchy &types);

AtomSet apply(const AtomSet &state, const AtomSet &add, const AtomSet &del);

bool goal_holds(const std::vector<GroundAtom> &goal, const AtomSet &state);

// All type-consistent groundings of a predicate, args in object order.
std::vector<GroundAtom> groundings(const PredicateRef &predicate,
                                   const std::vector<Object> &objects,
                                   const TypeHierarchy &types);

std::string join(const std::vector<std::string> &parts,
                 const std::string &sep);
std::string format_double(double value);
std::string to_lower(std::string text);
}

#endif
