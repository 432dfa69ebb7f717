#ifndef SYMWM_LABELING_HPP
#define SYMWM_LABELING_HPP

#include "core.hpp"

#include <filesystem>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <unordered_map>

namespace symwm {

enum class Label {yes, no, unknown};

std::string to_string(Label label);
Label label_from_string(const std::string &text);

class InvalidContext : public Error {
public:
    using Error::Error;
};

// Previous-timestep information. Either everything is present or nothing is.
struct LabelContext {
    std::optional<State> previous_state;
    std::vector<std::pair<GroundAtom, Label>> previous_labels;
    std::optional<Action> previous_action;
    // Raw text of the previous answer, when the labeler produced one.
    std::string previous_response;
    std::vector<Object> objects;

    bool empty() const;
    void validate() const;
};

class Labeler {
public:
    virtual ~Labeler() = default;
    virtual std::string identity() const = 0;
    // One label per requested atom, in request order.
    virtual std::vector<Label> label_batch(const State &state,
                                           const std::vector<GroundAtom> &atoms,
                                           const LabelContext &context) = 0;
};

// Flips non-protected labels with probability p. Deterministic in
// (seed, state, atom) so relabeling the same state reproduces the flips.
class NoisyLabeler : public Labeler {
    std::shared_ptr<Labeler> base_;
    double p_;
    std::uint64_t seed_;
    std::set<std::string> protected_;
public:
    NoisyLabeler(std::shared_ptr<Labeler> base, double p, std::uint64_t seed,
                 std::set<std::string> protected_predicates);
    std::string identity() const override;
    std::vector<Label> label_batch(const State &state,
                                   const std::vector<GroundAtom> &atoms,
                                   const LabelContext &context) override;
};

std::shared_ptr<Labeler> make_noisy(std::shared_ptr<Labeler> base, double p,
                                    std::uint64_t seed,
                                    const std::vector<PredicateRef> &protect);

// One JSON file per key under <root>/<identity>/. Writes go through a
// temporary file and a rename, so concurrent writers cannot tear a record.
class DiskCache {
    std::filesystem::path root_;
    std::mutex mutex_;
public:
    explicit DiskCache(std::filesystem::path root);
    std::optional<std::string> load(const std::string &identity,
                                    const std::string &key);
    void store(const std::string &identity, const std::string &key,
               const std::string &payload);
    std::filesystem::path path_for(const std::string &identity,
                                   const std::string &key) const;
};

std::string canonical_label_request(const State &state,
                                    const std::vector<GroundAtom> &atoms,
                                    const LabelContext &context);

class CachedLabeler : public Labeler {
    std::shared_ptr<Labeler> base_;
    std::shared_ptr<DiskCache> cache_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
public:
    CachedLabeler(std::shared_ptr<Labeler> base,
                  std::shared_ptr<DiskCache> cache);
    std::string identity() const override {return base_->identity();}
    std::vector<Label> label_batch(const State &state,
                                   const std::vector<GroundAtom> &atoms,
                                   const LabelContext &context) override;
    std::size_t hits() const {return hits_;}
    std::size_t misses() const {return misses_;}
};

// Feature and provided predicates are evaluated locally; visual ones go to
// the labeler in one batch. Unknown counts as false.
AtomSet abstract(const State &state, const std::vector<PredicateRef> &predicates,
                 const std::vector<Object> &objects, const TypeHierarchy &types,
                 Labeler *labeler, const LabelContext &context = {});

// Memoizes the true groundings of each (state, predicate) pair. Safe to
// share between threads.
class AbstractionCache {
    struct Key {
        std::uint64_t state;
        std::string predicate;
        bool operator==(const Key &) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key &k) const;
    };
    std::unordered_map<Key, std::vector<GroundAtom>, KeyHash> table_;
    mutable std::shared_mutex mutex_;
    const TypeHierarchy &types_;
    Labeler *labeler_;
public:
    AbstractionCache(const TypeHierarchy &types, Labeler *labeler);

    // Labels every uncached predicate for this state at once.
    void prime(const State &state, const std::vector<PredicateRef> &predicates,
               const std::vector<Object> &objects,
               const LabelContext &context = {});
    AtomSet abstract(const State &state,
                     const std::vector<PredicateRef> &predicates,
                     const std::vector<Object> &objects);
    std::size_t size() const;
};
}

#endif
