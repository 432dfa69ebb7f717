#include "symwm/serialization.hpp"
#include "symwm/digest.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

using namespace std;

namespace symwm {
namespace {
[[noreturn]] void bad(const string &what) {
    throw SchemaError(what);
}

const Json &field(const Json &j, const char *name) {
    if (!j.is_object() || !j.contains(name))
        bad(string("missing field '") + name + "'");
    return j.at(name);
}

template <typename T>
T get(const Json &j, const char *name) {
    try {
        return field(j, name).get<T>();
    } catch (const nlohmann::json::exception &e) {
        bad(string("field '") + name + "': " + e.what());
    }
}

// JSON has no infinities; null stands for +inf.
Json number(double x) {
    if (isinf(x) && x > 0)
        return nullptr;
    return x;
}

double number_from(const Json &j) {
    if (j.is_null())
        return numeric_limits<double>::infinity();
    if (!j.is_number())
        bad("expected a number");
    return j.get<double>();
}

pair<size_t, size_t> line_col(const string &text, size_t byte) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Json objects_to_json(const vector<Object> &objects) {
    Json arr = Json::array();
    for (const auto &o : objects)
        arr.push_back({{"name", o.name}, {"type", o.type}, {"descriptor", o.descriptor}});
    return arr;
}

vector<Object> objects_from_json(const Json &j) {
    vector<Object> out;
    for (const auto &o : j)
        out.push_back({get<string>(o, "name"), get<string>(o, "type"),
                       o.value("descriptor", string())});
    return out;
}

Json types_to_json(const TypeHierarchy &types) {
    Json arr = Json::array();
    for (const auto &t : types.names())
        if (t != TypeHierarchy::root)
            arr.push_back({{"name", t}, {"parent", types.parent(t)}});
    return arr;
}

TypeHierarchy types_from_json(const Json &j) {
    TypeHierarchy types;
    set<pair<string, string>> pending;
    for (const auto &t : j)
        pending.insert({get<string>(t, "name"), get<string>(t, "parent")});
    bool progress = true;
    while (!pending.empty() && progress) {
        progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            if (types.contains(it->second)) {
                types.add(it->first, it->second);
                it = pending.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
    }
    if (!pending.empty())
        bad("type '" + pending.begin()->first + "' has an unknown parent");
    return types;
}

Json action_to_json(const Action &a) {
    return {{"skill", a.skill->name}, {"args", a.objects}, {"theta", a.theta}};
}

Action action_from_json(const Json &j, const DomainSpec &spec) {
    string name = get<string>(j, "skill");
    SkillRef s;
    for (const auto &k : spec.skills)
        if (k->name == name)
            s = k;
    if (!s)
        bad("unknown skill '" + name + "'");
    return {s, get<vector<string>>(j, "args"), get<vector<double>>(j, "theta")};
}

Json ground_to_json(const GroundAtom &a) {
    return {{"predicate", a.predicate->name()}, {"args", a.args}};
}

GroundAtom ground_from_json(const Json &j, const DomainSpec &spec) {
    string name = get<string>(j, "predicate");
    auto args = get<vector<string>>(j, "args");
    for (const auto *list : {&spec.goal_predicates, &spec.init_predicates})
        for (const auto &p : *list)
            if (p->name() == name && p->arity() == args.size())
                return {p, args};
    bad("goal predicate '" + name + "' is not part of domain " + spec.name);
}

string variable_text(const Variable &v) {
    return v.str();
}

Variable variable_from(const string &s) {
    size_t colon = s.find(':');
    if (colon == string::npos)
        bad("bad variable '" + s + "'");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

Json variables_to_json(const vector<Variable> &vars) {
    Json arr = Json::array();
    for (const auto &v : vars)
        arr.push_back(variable_text(v));
    return arr;
}

vector<Variable> variables_from_json(const Json &j) {
    vector<Variable> out;
    for (const auto &s : j)
        out.push_back(variable_from(s.get<string>()));
    return out;
}

Json lifted_to_json(const vector<LiftedAtom> &atoms) {
    Json arr = Json::array();
    for (const auto &a : atoms)
        arr.push_back({{"predicate", a.predicate->key()},
                       {"args", variables_to_json(a.args)}});
    return arr;
}

vector<LiftedAtom> lifted_from_json(const Json &j,
                                    const map<string, PredicateRef> &table) {
    vector<LiftedAtom> out;
    for (const auto &a : j) {
        string key = get<string>(a, "predicate");
        auto it = table.find(key);
        if (it == table.end())
            bad("operator refers to undeclared predicate '" + key + "'");
        out.push_back({it->second, variables_from_json(field(a, "args"))});
    }
    return out;
}
}

Json parse_json_text(const string &text, bool check_version) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw SchemaError(std::to_string(line) + ":" + std::to_string(col) +
                          ": " + e.what());
    }
    if (check_version) {
        if (!j.is_object() || !j.contains("schema_version"))
            bad("missing schema_version");
        if (j["schema_version"] != schema_version)
            bad("unsupported schema_version " + j["schema_version"].dump());
    }
    return j;
}

string read_text_file(const filesystem::path &path) {
    ifstream in(path, ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json_file(const filesystem::path &path, bool check_version) {
    try {
        return parse_json_text(read_text_file(path), check_version);
    } catch (const SchemaError &e) {
        throw SchemaError(path.string() + ":" + e.what());
    }
}

void write_text_file(const filesystem::path &path, const string &text) {
    if (path.has_parent_path())
        filesystem::create_directories(path.parent_path());
    ofstream out(path, ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

string dump_json(const Json &j) {
    return j.dump(2) + "\n";
}

Json state_to_json(const State &state) {
    Json features = Json::object();
    for (const auto &[obj, fm] : state.objects) {
        Json f = Json::object();
        for (const auto &[k, v] : fm)
            f[k] = v;
        features[obj] = f;
    }
    Json hidden = Json::object();
    for (const auto &[k, v] : state.hidden)
        hidden[k] = v;
    return {{"timestep", state.timestep},
            {"images", state.images},
            {"features", features},
            {"hidden", hidden}};
}

State state_from_json(const Json &j) {
    State s;
    s.timestep = get<int>(j, "timestep");
    s.images = j.value("images", vector<string>{});
    for (const auto &[obj, fm] : field(j, "features").items())
        for (const auto &[k, v] : fm.items())
            s.objects[obj][k] = v.get<double>();
    if (j.contains("hidden"))
        for (const auto &[k, v] : j["hidden"].items())
            s.hidden[k] = v.get<double>();
    return s;
}

Json dataset_to_json(const Dataset &d) {
    Json demos = Json::array();
    for (const auto &demo : d.demos) {
        Json goal = Json::array();
        for (const auto &g : demo.goal)
            goal.push_back(ground_to_json(g));
        Json steps = Json::array();
        for (size_t i = 0; i < demo.states.size(); ++i)
            steps.push_back({{"state", state_to_json(demo.states[i])},
                             {"action", i < demo.actions.size()
                                            ? action_to_json(demo.actions[i])
                                            : Json(nullptr)}});
        demos.push_back({{"objects", objects_to_json(demo.objects)},
                         {"goal", goal},
                         {"steps", steps}});
    }
    Json tasks = Json::array();
    for (const auto &t : d.tasks) {
        Json goal = Json::array();
        for (const auto &g : t.goal)
            goal.push_back(ground_to_json(g));
        tasks.push_back({{"name", t.name},
                         {"objects", objects_to_json(t.objects)},
                         {"init", state_to_json(t.init)},
                         {"goal", goal}});
    }
    return {{"schema_version", schema_version},
            {"kind", "dataset"},
            {"domain", d.domain},
            {"types", types_to_json(d.types)},
            {"demos", demos},
            {"tasks", tasks}};
}

Dataset dataset_from_json(const Json &j, const DomainSpec &spec) {
    Dataset d;
    d.domain = get<string>(j, "domain");
    d.types = types_from_json(field(j, "types"));
    for (const auto &dj : field(j, "demos")) {
        Demonstration demo;
        demo.objects = objects_from_json(field(dj, "objects"));
        for (const auto &g : field(dj, "goal"))
            demo.goal.push_back(ground_from_json(g, spec));
        const Json &steps = field(dj, "steps");
        for (size_t i = 0; i < steps.size(); ++i) {
            demo.states.push_back(state_from_json(field(steps[i], "state")));
            const Json &a = field(steps[i], "action");
            if (a.is_null()) {
                if (i + 1 != steps.size())
                    bad("only the last step may lack an action");
            } else {
                if (i + 1 == steps.size())
                    bad("the last step must not carry an action");
                demo.actions.push_back(action_from_json(a, spec));
            }
        }
        if (demo.states.empty())
            bad("demonstration without states");
        d.demos.push_back(move(demo));
    }
    if (j.contains("tasks"))
        for (const auto &tj : j["tasks"]) {
            Task t;
            t.name = get<string>(tj, "name");
            t.objects = objects_from_json(field(tj, "objects"));
            t.init = state_from_json(field(tj, "init"));
            for (const auto &g : field(tj, "goal"))
                t.goal.push_back(ground_from_json(g, spec));
            d.tasks.push_back(move(t));
        }
    return d;
}

Json predicate_to_json(const PredicateRef &p) {
    Json j = {{"name", p->name()},
              {"kind", to_string(p->kind())},
              {"arg_types", p->arg_types()}};
    if (p->classifier()) {
        const auto &c = *p->classifier();
        j["classifier"] = {{"type", c.type},
                           {"feature", c.feature},
                           {"threshold", c.threshold},
                           {"negated", c.negated}};
    }
    return j;
}

PredicateRef predicate_from_json(const Json &j, const DomainSpec *spec) {
    string name = get<string>(j, "name");
    auto arg_types = get<vector<string>>(j, "arg_types");
    PredicateKind kind;
    try {
        kind = predicate_kind_from_string(get<string>(j, "kind"));
    } catch (const Error &e) {
        bad(e.what());
    }
    switch (kind) {
    case PredicateKind::visual:
        return Predicate::visual(name, arg_types);
    case PredicateKind::feature: {
        const Json &c = field(j, "classifier");
        FeatureThreshold ft{get<string>(c, "type"), get<string>(c, "feature"),
                            get<double>(c, "threshold"), get<bool>(c, "negated")};
        PredicateRef p = Predicate::feature(ft);
        return p->name() == name ? p : p->renamed(name);
    }
    case PredicateKind::provided:
        if (spec)
            for (const auto &q : spec->init_predicates)
                if (q->name() == name && q->arg_types() == arg_types)
                    return q;
        bad("provided predicate '" + name + "' needs its domain");
    }
    bad("unreachable");
}

Json pool_to_json(const vector<PredicateRef> &pool) {
    Json arr = Json::array();
    for (const auto &p : pool)
        arr.push_back(predicate_to_json(p));
    return {{"schema_version", schema_version}, {"kind", "pool"}, {"predicates", arr}};
}

vector<PredicateRef> pool_from_json(const Json &j, const DomainSpec *spec) {
    vector<PredicateRef> out;
    for (const auto &p : field(j, "predicates"))
        out.push_back(predicate_from_json(p, spec));
    return out;
}

Json sampler_to_json(const Sampler &s) {
    return {{"mean", s.mean},
            {"variance", s.variance},
            {"points", s.points},
            {"labels", s.labels},
            {"center", s.center},
            {"scale", s.scale},
            {"k", s.k},
            {"max_attempts", s.max_attempts},
            {"variance_floor", s.variance_floor}};
}

Sampler sampler_from_json(const Json &j) {
    Sampler s;
    s.mean = get<vector<double>>(j, "mean");
    s.variance = get<vector<double>>(j, "variance");
    s.points = get<vector<vector<double>>>(j, "points");
    s.labels = get<vector<bool>>(j, "labels");
    s.center = get<vector<double>>(j, "center");
    s.scale = get<vector<double>>(j, "scale");
    s.k = get<size_t>(j, "k");
    s.max_attempts = get<int>(j, "max_attempts");
    s.variance_floor = get<double>(j, "variance_floor");
    if (s.mean.size() != s.variance.size() || s.points.size() != s.labels.size())
        bad("sampler arrays disagree in length");
    return s;
}

Json trace_to_json(const SelectionTrace &t) {
    Json steps = Json::array();
    for (const auto &s : t.steps)
        steps.push_back({{"chosen", s.chosen},
                         {"j_before", number(s.j_before)},
                         {"j_after", number(s.j_after)},
                         {"candidates", s.candidates},
                         {"kept", s.kept}});
    return {{"j_init_only", number(t.j_init_only)},
            {"steps", steps},
            {"selected", t.selected},
            {"operator_count", t.operator_count}};
}

SelectionTrace trace_from_json(const Json &j) {
    SelectionTrace t;
    t.j_init_only = number_from(field(j, "j_init_only"));
    for (const auto &s : field(j, "steps"))
        t.steps.push_back({get<string>(s, "chosen"), number_from(field(s, "j_before")),
                           number_from(field(s, "j_after")),
                           get<size_t>(s, "candidates"), get<bool>(s, "kept")});
    t.selected = get<vector<string>>(j, "selected");
    t.operator_count = get<size_t>(j, "operator_count");
    return t;
}

Json model_to_json(const ModelArtifact &a) {
    // Every predicate an operator mentions is declared, learned ones first.
    vector<PredicateRef> declared = a.model.predicates;
    set<string> seen;
    for (const auto &p : declared)
        seen.insert(p->key());
    size_t learned = declared.size();
    for (const auto &op : a.model.operators)
        for (const auto *list : {&op.preconditions, &op.add_effects,
                                 &op.delete_effects, &op.ignore_effects})
            for (const auto &at : *list)
                if (seen.insert(at.predicate->key()).second)
                    declared.push_back(at.predicate);
    Json preds = Json::array();
    for (const auto &p : declared)
        preds.push_back(predicate_to_json(p));
    Json ops = Json::array();
    for (const auto &op : a.model.operators)
        ops.push_back({{"name", op.name},
                       {"params", variables_to_json(op.params)},
                       {"preconditions", lifted_to_json(op.preconditions)},
                       {"add_effects", lifted_to_json(op.add_effects)},
                       {"delete_effects", lifted_to_json(op.delete_effects)},
                       {"ignore_effects", lifted_to_json(op.ignore_effects)},
                       {"skill", {{"name", op.skill->name},
                                  {"param_types", op.skill->param_types},
                                  {"continuous_dim", op.skill->continuous_dim}}},
                       {"skill_args", variables_to_json(op.skill_args)},
                       {"support", op.support_count}});
    Json samplers = Json::object();
    for (const auto &[name, s] : a.model.samplers)
        samplers[name] = sampler_to_json(s);
    return {{"schema_version", schema_version},
            {"kind", "model"},
            {"domain", a.domain},
            {"provenance", {{"config_digest", a.config_digest},
                            {"dataset_digest", a.dataset_digest}}},
            {"predicates", preds},
            {"learned_predicates", learned},
            {"operators", ops},
            {"samplers", samplers},
            {"trace", trace_to_json(a.trace)}};
}

ModelArtifact model_from_json(const Json &j, const DomainSpec *spec) {
    if (j.value("kind", string()) != "model")
        bad("not a model document");
    ModelArtifact a;
    a.domain = get<string>(j, "domain");
    const Json &prov = field(j, "provenance");
    a.config_digest = get<string>(prov, "config_digest");
    a.dataset_digest = get<string>(prov, "dataset_digest");
    map<string, PredicateRef> table;
    vector<PredicateRef> declared;
    for (const auto &pj : field(j, "predicates")) {
        PredicateRef p = predicate_from_json(pj, spec);
        table[p->key()] = p;
        declared.push_back(p);
    }
    size_t learned = get<size_t>(j, "learned_predicates");
    if (learned > declared.size())
        bad("learned_predicates exceeds the declared predicates");
    a.model.predicates.assign(declared.begin(), declared.begin() + learned);
    for (const auto &oj : field(j, "operators")) {
        Operator op;
        op.name = get<string>(oj, "name");
        op.params = variables_from_json(field(oj, "params"));
        op.preconditions = lifted_from_json(field(oj, "preconditions"), table);
        op.add_effects = lifted_from_json(field(oj, "add_effects"), table);
        op.delete_effects = lifted_from_json(field(oj, "delete_effects"), table);
        op.ignore_effects = lifted_from_json(field(oj, "ignore_effects"), table);
        const Json &sk = field(oj, "skill");
        string skill_name = get<string>(sk, "name");
        for (const auto &k : spec ? spec->skills : vector<SkillRef>{})
            if (k->name == skill_name)
                op.skill = k;
        if (!op.skill)
            op.skill = make_shared<Skill>(Skill{skill_name,
                                                get<vector<string>>(sk, "param_types"),
                                                get<int>(sk, "continuous_dim")});
        op.skill_args = variables_from_json(field(oj, "skill_args"));
        op.support_count = get<int>(oj, "support");
        a.model.operators.push_back(move(op));
    }
    for (const auto &[name, sj] : field(j, "samplers").items())
        a.model.samplers[name] = sampler_from_json(sj);
    a.trace = trace_from_json(field(j, "trace"));
    return a;
}

string dataset_digest(const Dataset &dataset) {
    return sha256_hex(dataset_to_json(dataset).dump());
}
}
