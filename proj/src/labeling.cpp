#include "symwm/labeling.hpp"
#include "symwm/digest.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

using namespace std;
using json = nlohmann::json;

namespace symwm {
string to_string(Label label) {
    switch (label) {
    case Label::yes: return "True";
    case Label::no: return "False";
    case Label::unknown: return "Unknown";
    }
    return "Unknown";
}

Label label_from_string(const string &text) {
    string t = to_lower(text);
    if (t == "true")
        return Label::yes;
    if (t == "false")
        return Label::no;
    if (t == "unknown")
        return Label::unknown;
    throw Error("not a label: '" + text + "'");
}

bool LabelContext::empty() const {
    return !previous_state && previous_labels.empty() && !previous_action;
}

void LabelContext::validate() const {
    if (empty())
        return;
    if (!previous_state || !previous_action || previous_labels.empty())
        throw InvalidContext("label context must carry the previous state, "
                             "its labels and the action taken, or nothing");
}

NoisyLabeler::NoisyLabeler(shared_ptr<Labeler> base, double p, uint64_t seed,
                           set<string> protected_predicates)
    : base_(move(base)), p_(p), seed_(seed),
      protected_(move(protected_predicates)) {
    if (p_ < 0.0 || p_ > 1.0)
        throw Error("flip probability must lie in [0, 1]");
}

string NoisyLabeler::identity() const {
    return base_->identity() + "+noise(p=" + format_double(p_) +
           ",seed=" + std::to_string(seed_) + ")";
}

vector<Label> NoisyLabeler::label_batch(const State &state,
                                        const vector<GroundAtom> &atoms,
                                        const LabelContext &context) {
    vector<Label> labels = base_->label_batch(state, atoms, context);
    if (p_ == 0.0)
        return labels;
    uint64_t sd = state.digest();
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (protected_.count(atoms[i].predicate->name()))
            continue;
        if (labels[i] == Label::unknown)
            continue;
        double u = counter_uniform(seed_, sd, fnv1a64(atoms[i].str()));
        if (u < p_)
            labels[i] = labels[i] == Label::yes ? Label::no : Label::yes;
    }
    return labels;
}

shared_ptr<Labeler> make_noisy(shared_ptr<Labeler> base, double p,
                               uint64_t seed,
                               const vector<PredicateRef> &protect) {
    set<string> names;
    for (const auto &pred : protect)
        names.insert(pred->name());
    return make_shared<NoisyLabeler>(move(base), p, seed, move(names));
}

DiskCache::DiskCache(filesystem::path root) : root_(move(root)) {
    filesystem::create_directories(root_);
}

filesystem::path DiskCache::path_for(const string &identity,
                                     const string &key) const {
    string dir;
    for (char c : identity)
        dir.push_back(isalnum(static_cast<unsigned char>(c)) ? c : '_');
    if (dir.size() > 48)
        dir.resize(48);
    dir += "-" + sha256_hex(identity).substr(0, 12);
    return root_ / dir / (key + ".json");
}

optional<string> DiskCache::load(const string &identity, const string &key) {
    auto path = path_for(identity, key);
    ifstream in(path, ios::binary);
    if (!in)
        return nullopt;
    stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void DiskCache::store(const string &identity, const string &key,
                      const string &payload) {
    auto path = path_for(identity, key);
    filesystem::create_directories(path.parent_path());
    auto tid = std::hash<thread::id>()(this_thread::get_id());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(tid);
    {
        lock_guard<mutex> lock(mutex_);
        ofstream out(tmp, ios::binary | ios::trunc);
        out << payload;
    }
    filesystem::rename(tmp, path);
}

string canonical_label_request(const State &state,
                               const vector<GroundAtom> &atoms,
                               const LabelContext &context) {
    json j;
    j["state"] = std::to_string(state.digest());
    json a = json::array();
    for (const auto &atom : atoms)
        a.push_back(atom.str());
    j["atoms"] = a;
    if (!context.empty()) {
        j["previous_state"] = std::to_string(context.previous_state->digest());
        json prev = json::array();
        for (const auto &[atom, label] : context.previous_labels)
            prev.push_back(atom.str() + "=" + to_string(label));
        j["previous_labels"] = prev;
        j["previous_action"] =
            context.previous_action->skill->name + "(" +
            join(context.previous_action->objects, ",") + ")";
        j["previous_response"] = context.previous_response;
    }
    return j.dump();
}

CachedLabeler::CachedLabeler(shared_ptr<Labeler> base,
                             shared_ptr<DiskCache> cache)
    : base_(move(base)), cache_(move(cache)) {
}

vector<Label> CachedLabeler::label_batch(const State &state,
                                         const vector<GroundAtom> &atoms,
                                         const LabelContext &context) {
    context.validate();
    string request = canonical_label_request(state, atoms, context);
    string key = sha256_hex(request);
    if (auto hit = cache_->load(base_->identity(), key)) {
        json record = json::parse(*hit, nullptr, false);
        if (!record.is_discarded() && record.value("request", "") == request) {
            vector<Label> labels;
            for (const auto &l : record["labels"])
                labels.push_back(label_from_string(l.get<string>()));
            if (labels.size() == atoms.size()) {
                ++hits_;
                return labels;
            }
        }
    }
    ++misses_;
    vector<Label> labels = base_->label_batch(state, atoms, context);
    json record;
    record["schema_version"] = 1;
    record["labeler"] = base_->identity();
    record["request"] = request;
    json out = json::array();
    for (Label l : labels)
        out.push_back(to_string(l));
    record["labels"] = out;
    cache_->store(base_->identity(), key, record.dump(2));
    return labels;
}

AtomSet abstract(const State &state, const vector<PredicateRef> &predicates,
                 const vector<Object> &objects, const TypeHierarchy &types,
                 Labeler *labeler, const LabelContext &context) {
    context.validate();
    vector<GroundAtom> holds;
    vector<GroundAtom> ask;
    for (const auto &pred : predicates) {
        for (auto &atom : groundings(pred, objects, types)) {
            if (pred->has_evaluator()) {
                if (pred->evaluate(state, atom.args))
                    holds.push_back(move(atom));
            } else {
                ask.push_back(move(atom));
            }
        }
    }
    if (!ask.empty()) {
        if (!labeler)
            throw Error("visual predicates need a labeler");
        vector<Label> labels = labeler->label_batch(state, ask, context);
        if (labels.size() != ask.size())
            throw Error("labeler returned the wrong number of labels");
        for (size_t i = 0; i < ask.size(); ++i)
            if (labels[i] == Label::yes)
                holds.push_back(move(ask[i]));
    }
    return AtomSet(move(holds));
}

size_t AbstractionCache::KeyHash::operator()(const Key &k) const {
    return static_cast<size_t>(mix64(k.state ^ fnv1a64(k.predicate)));
}

AbstractionCache::AbstractionCache(const TypeHierarchy &types, Labeler *labeler)
    : types_(types), labeler_(labeler) {
}

void AbstractionCache::prime(const State &state,
                             const vector<PredicateRef> &predicates,
                             const vector<Object> &objects,
                             const LabelContext &context) {
    uint64_t sd = state.digest();
    vector<PredicateRef> missing;
    {
        shared_lock<shared_mutex> lock(mutex_);
        for (const auto &p : predicates)
            if (!table_.count(Key{sd, p->key()}))
                missing.push_back(p);
    }
    if (missing.empty())
        return;
    AtomSet atoms = symwm::abstract(state, missing, objects, types_, labeler_,
                                    context);
    map<string, vector<GroundAtom>> split;
    for (const auto &p : missing)
        split[p->key()];
    for (const auto &a : atoms)
        split[a.predicate->key()].push_back(a);
    unique_lock<shared_mutex> lock(mutex_);
    for (auto &[k, v] : split)
        table_.try_emplace(Key{sd, k}, move(v));
}

AtomSet AbstractionCache::abstract(const State &state,
                                   const vector<PredicateRef> &predicates,
                                   const vector<Object> &objects) {
    prime(state, predicates, objects);
    uint64_t sd = state.digest();
    vector<GroundAtom> out;
    shared_lock<shared_mutex> lock(mutex_);
    for (const auto &p : predicates) {
        const auto &atoms = table_.at(Key{sd, p->key()});
        for (const auto &a : atoms) {
            out.push_back(GroundAtom{p, a.args});
        }
    }
    return AtomSet(move(out));
}

size_t AbstractionCache::size() const {
    shared_lock<shared_mutex> lock(mutex_);
    return table_.size();
}
}
