#include "symwm/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

using namespace std;

namespace symwm {
static string trim(const string &s) {
    size_t b = s.find_first_not_of(" \t\r\n*`'\"");
    if (b == string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n*`'\"");
    return s.substr(b, e - b + 1);
}

static bool is_identifier(const string &s) {
    if (s.empty() || !(isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            return false;
    return true;
}

static string normalize_name(string name) {
    name = to_lower(move(name));
    replace(name.begin(), name.end(), '-', '_');
    return name;
}

ParsedProposals parse_proposals(const string &text,
                                const vector<Object> &objects) {
    // Second branch: a call whose parenthesis never closes.
    static const regex token(
        R"(([A-Za-z_][A-Za-z0-9_\-]*)\s*\(([^()]*)\)|[A-Za-z_][A-Za-z0-9_\-]*\s*\((?![^()]*\)))");
    map<string, string> by_lower;
    for (const auto &o : objects)
        by_lower[to_lower(o.name)] = o.name;

    ParsedProposals out;
    map<string, size_t> arity_of;
    for (sregex_iterator it(text.begin(), text.end(), token), end; it != end;
         ++it) {
        const smatch &m = *it;
        string whole = m.str(0);
        if (!m[1].matched) {
            out.rejected.push_back({whole, "malformed"});
            continue;
        }
        string name = normalize_name(m.str(1));
        string inside = m.str(2);

        vector<string> args;
        bool malformed = false;
        if (trim(inside).empty()) {
            malformed = true;
        } else {
            size_t start = 0;
            while (true) {
                size_t comma = inside.find(',', start);
                string arg = trim(inside.substr(
                    start, comma == string::npos ? string::npos : comma - start));
                if (!is_identifier(arg))
                    malformed = true;
                args.push_back(arg);
                if (comma == string::npos)
                    break;
                start = comma + 1;
            }
        }
        if (malformed) {
            out.rejected.push_back({whole, "malformed"});
            continue;
        }
        bool unknown = false;
        for (auto &arg : args) {
            auto found = by_lower.find(to_lower(arg));
            if (found == by_lower.end()) {
                unknown = true;
                break;
            }
            arg = found->second;
        }
        if (unknown) {
            out.rejected.push_back({whole, "unknown_object"});
            continue;
        }
        auto [ait, fresh] = arity_of.emplace(name, args.size());
        if (!fresh && ait->second != args.size()) {
            out.rejected.push_back({whole, "arity_conflict"});
            continue;
        }
        out.atoms.push_back({name, args});
    }
    return out;
}

vector<PredicateRef> lift_and_dedup(const vector<ProposedAtom> &atoms,
                                    const vector<Object> &objects) {
    // name (case-folded) -> signatures in first-seen order
    vector<string> name_order;
    map<string, string> display;
    map<string, vector<vector<string>>> signatures;
    for (const auto &atom : atoms) {
        vector<string> sig;
        for (const auto &arg : atom.args)
            sig.push_back(find_object(objects, arg).type);
        string folded = to_lower(atom.name);
        if (!signatures.count(folded)) {
            name_order.push_back(folded);
            display[folded] = atom.name;
        }
        auto &sigs = signatures[folded];
        if (find(sigs.begin(), sigs.end(), sig) == sigs.end())
            sigs.push_back(sig);
    }
    vector<PredicateRef> out;
    for (const auto &folded : name_order) {
        const auto &sigs = signatures[folded];
        for (size_t i = 0; i < sigs.size(); ++i) {
            string name = display[folded];
            if (sigs.size() > 1)
                name += to_string(i);
            out.push_back(Predicate::visual(name, sigs[i]));
        }
    }
    return out;
}

vector<PredicateRef> generate_feature_grammar(const vector<Demonstration> &demos,
                                              const GrammarConfig &config) {
    map<pair<string, string>, set<double>> values;
    for (const auto &demo : demos) {
        map<string, string> type_of;
        for (const auto &o : demo.objects)
            type_of[o.name] = o.type;
        for (const auto &state : demo.states)
            for (const auto &[obj, feats] : state.objects) {
                auto t = type_of.find(obj);
                if (t == type_of.end())
                    continue;
                for (const auto &[f, v] : feats)
                    values[{t->second, f}].insert(v);
            }
    }
    vector<PredicateRef> out;
    for (const auto &[tf, vals] : values) {
        vector<double> sorted(vals.begin(), vals.end());
        if (sorted.size() < 2)
            continue;
        size_t n = sorted.size() - 1;
        vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i)
            idx[i] = i;
        // Keep the cut points closest to the middle of the value range.
        double center = (static_cast<double>(n) - 1.0) / 2.0;
        stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return fabs(a - center) < fabs(b - center);
        });
        if (idx.size() > config.max_thresholds)
            idx.resize(config.max_thresholds);
        sort(idx.begin(), idx.end());
        for (size_t i : idx) {
            double thr = (sorted[i] + sorted[i + 1]) / 2.0;
            FeatureThreshold c{tf.first, tf.second, thr, false};
            out.push_back(Predicate::feature(c));
            c.negated = true;
            out.push_back(Predicate::feature(c));
        }
    }
    return out;
}

vector<PredicateRef> assemble_pool(const vector<PredicateRef> &init,
                                   const vector<PredicateRef> &visual,
                                   const vector<PredicateRef> &grammar) {
    vector<PredicateRef> pool;
    set<string> keys;
    set<string> names;
    auto add = [&](const PredicateRef &p) {
        if (keys.insert(p->key()).second) {
            pool.push_back(p);
            names.insert(to_lower(p->name()));
        }
    };
    for (const auto &p : init)
        add(p);
    map<string, vector<string>> init_sigs;
    for (const auto &p : init)
        init_sigs[to_lower(p->name())].push_back(p->key());
    for (const auto &p : visual) {
        string folded = to_lower(p->name());
        auto hit = init_sigs.find(folded);
        if (hit == init_sigs.end()) {
            add(p);
            continue;
        }
        bool same_sig = false;
        for (const auto &init_pred : init)
            if (to_lower(init_pred->name()) == folded &&
                init_pred->arg_types() == p->arg_types())
                same_sig = true;
        if (same_sig)
            continue;  // the provided version wins
        for (int i = 0;; ++i) {
            string candidate = p->name() + to_string(i);
            if (!names.count(to_lower(candidate))) {
                add(p->renamed(candidate));
                break;
            }
        }
    }
    for (const auto &p : grammar)
        add(p);
    return pool;
}
}
