#include "symwm/config.hpp"
#include "symwm/digest.hpp"
#include "symwm/listing.hpp"
#include "symwm/pddl.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

using namespace std;
using namespace symwm;
namespace fs = std::filesystem;

namespace {
// Flags shared by every subcommand; unset ones leave the config alone.
struct Overrides {
    string config_file;
    string domain;
    vector<uint64_t> seeds;
    string out;
    string dataset;
    optional<double> j_thresh;
    optional<double> h_pre;
    optional<double> h_data;
    optional<int> n_demo;
    optional<int> n_tasks;
    string labeler;
    optional<double> epsilon;
    optional<uint64_t> noise_seed;
    string cache_dir;
    string audit_log;

    void attach(CLI::App *app) {
        app->add_option("--config", config_file, "run config (JSON)");
        app->add_option("--domain", domain, "simulated domain name");
        app->add_option("--seed,--seeds", seeds, "seeds");
        app->add_option("--out", out, "output directory or file");
        app->add_option("--dataset", dataset, "dataset JSON instead of generated demos");
        app->add_option("--j-thresh", j_thresh, "hill-climbing improvement threshold");
        app->add_option("--h-pre", h_pre, "soft-intersection fraction");
        app->add_option("--h-data", h_data, "low-data pruning fraction");
        app->add_option("--n-demo", n_demo, "number of demonstrations");
        app->add_option("--n-tasks", n_tasks, "test tasks per seed");
        app->add_option("--labeler", labeler, "ground_truth, noisy or vlm");
        app->add_option("--epsilon", epsilon, "flip rate of the noisy labeler");
        app->add_option("--noise-seed", noise_seed, "seed of the noisy labeler");
        app->add_option("--cache-dir", cache_dir, "VLM answer cache");
        app->add_option("--audit-log", audit_log, "NDJSON log of VLM requests");
    }

    RunConfig resolve() const {
        RunConfig c;
        if (!config_file.empty()) {
            try {
                c = config_from_json_text(read_text_file(config_file), domain);
            } catch (const SchemaError &e) {
                throw SchemaError(config_file + ": " + e.what());
            }
        } else {
            c = default_config(domain.empty() ? c.domain : domain);
        }
        if (!seeds.empty())
            c.seeds = seeds;
        if (!out.empty())
            c.output_dir = out;
        if (!dataset.empty())
            c.dataset = dataset;
        if (j_thresh)
            c.hyper.j_thresh = *j_thresh;
        if (h_pre)
            c.hyper.h_pre_frac = *h_pre;
        if (h_data)
            c.hyper.h_data_frac = *h_data;
        if (n_demo)
            c.hyper.n_demo = *n_demo;
        if (n_tasks)
            c.n_tasks = *n_tasks;
        if (!labeler.empty())
            c.labeler.kind = labeler;
        if (epsilon)
            c.labeler.epsilon = *epsilon;
        if (noise_seed)
            c.labeler.seed = *noise_seed;
        if (!cache_dir.empty())
            c.labeler.cache_dir = cache_dir;
        if (!audit_log.empty())
            c.labeler.audit_log = audit_log;
        if (c.seeds.empty())
            throw Error("at least one seed is required");
        return c;
    }
};

struct Context {
    RunConfig config;
    unique_ptr<SimDomain> domain;
    unique_ptr<Gateway> gateway;

    explicit Context(RunConfig c) : config(move(c)), domain(make_domain(config.domain)) {}

    Gateway &vlm() {
        if (!gateway)
            gateway = make_unique<Gateway>(gateway_config(config.labeler),
                                           make_shared<HttpTransport>());
        return *gateway;
    }

    shared_ptr<Labeler> labeler() {
        const auto &l = config.labeler;
        if (l.kind == "ground_truth")
            return domain->ground_truth_labeler();
        if (l.kind == "noisy")
            return make_noisy(domain->ground_truth_labeler(), l.epsilon, l.seed,
                              domain->spec().goal_predicates);
        return make_shared<VlmLabeler>(vlm(), l.double_check);
    }

    Dataset dataset(uint64_t seed) {
        if (!config.dataset.empty()) {
            Dataset d = dataset_from_json(read_json_file(config.dataset),
                                          domain->spec());
            if (d.domain != config.domain)
                throw Error("dataset is for domain " + d.domain + ", config names " +
                            config.domain);
            return d;
        }
        Dataset d{config.domain, domain->spec().types,
                  domain->generate_demos(config.hyper.n_demo, seed), {}};
        for (int i = 0; i < config.n_tasks; ++i)
            d.tasks.push_back(domain->make_task(seed, i));
        return d;
    }

    vector<string> proposals(const vector<Demonstration> &demos, uint64_t seed) {
        vector<string> texts;
        for (const auto &demo : demos) {
            if (config.proposer.kind == "vlm") {
                texts.push_back(vlm_propose(vlm(), demo, config.proposer.extra_instruction));
            } else {
                MockProposerConfig mp{config.proposer.k_synonyms,
                                      config.proposer.k_antonyms, config.proposer.junk,
                                      seed};
                texts.push_back(domain->mock_propose(demo, mp));
            }
        }
        return texts;
    }
};

fs::path out_dir(const RunConfig &c) {
    fs::create_directories(c.output_dir);
    return c.output_dir;
}

vector<PredicateRef> learned_only(const LearnedModel &m, const DomainSpec &spec) {
    set<string> base;
    for (const auto &p : spec.init_predicates)
        base.insert(p->key());
    vector<PredicateRef> out;
    for (const auto &p : m.predicates)
        if (!base.count(p->key()))
            out.push_back(p);
    return out;
}

// Model predicates plus the domain's init predicates used by a listing.
vector<PredicateRef> listing_predicates(const vector<Operator> &ops,
                                        const DomainSpec &spec) {
    vector<PredicateRef> preds = spec.init_predicates;
    set<string> seen;
    for (const auto &p : preds)
        seen.insert(p->key());
    for (const auto &op : ops)
        for (const auto *list : {&op.preconditions, &op.add_effects, &op.delete_effects})
            for (const auto &a : *list)
                if (seen.insert(a.predicate->key()).second)
                    preds.push_back(a.predicate);
    return preds;
}

int cmd_gen_demos(Context &ctx) {
    uint64_t seed = ctx.config.seeds.front();
    ctx.config.dataset.clear();
    Dataset d = ctx.dataset(seed);
    fs::path path = ctx.config.output_dir;
    if (path.extension() != ".json")
        path = out_dir(ctx.config) / "dataset.json";
    write_text_file(path, dump_json(dataset_to_json(d)));
    cout << "wrote " << path.string() << ": " << d.demos.size() << " demos, "
         << d.tasks.size() << " tasks\n";
    if (!d.demos.empty())
        cout << ctx.domain->ascii(d.demos.front().states.front(),
                                  d.demos.front().objects);
    return 0;
}

int cmd_learn(Context &ctx) {
    uint64_t seed = ctx.config.seeds.front();
    Dataset data = ctx.dataset(seed);
    if (data.demos.empty())
        throw SchemaError("dataset has no demonstrations");
    auto labeler = ctx.labeler();
    auto texts = ctx.proposals(data.demos, seed);
    LearnOutput out = learn_model(*ctx.domain, data.demos, texts, *labeler,
                                  ctx.config.pipeline());
    ModelArtifact artifact{ctx.config.domain, out.model, out.selection.trace,
                           config_digest(ctx.config), dataset_digest(data)};
    fs::path dir = out_dir(ctx.config);
    const DomainSpec &spec = ctx.domain->spec();
    write_text_file(dir / "model.json", dump_json(model_to_json(artifact)));
    write_text_file(dir / "model.txt",
                    emit_listing(make_listing(learned_only(out.model, spec),
                                              out.model.operators)));
    write_text_file(dir / "domain.pddl",
                    emit_pddl(ctx.config.domain, spec.types, out.model.predicates,
                              out.model.operators));
    Json trace = {{"schema_version", schema_version},
                  {"kind", "trace"},
                  {"config_digest", artifact.config_digest},
                  {"dataset_digest", artifact.dataset_digest},
                  {"trace", trace_to_json(out.selection.trace)}};
    write_text_file(dir / "trace.json", dump_json(trace));
    write_text_file(dir / "pool.json", dump_json(pool_to_json(out.pool)));
    cout << "pool " << out.pool.size() << " predicates, " << out.rejected.size()
         << " proposals rejected\n";
    cout << "selected " << join(out.selection.trace.selected, ", ") << "\n";
    cout << out.model.operators.size() << " operators; wrote " << dir.string() << "\n";
    return 0;
}

LearnedModel load_model(Context &ctx, const string &model_path,
                        const string &listing_path) {
    if (!listing_path.empty()) {
        auto ops = listing_operators(parse_listing(read_text_file(listing_path)),
                                     &ctx.domain->spec());
        auto labeler = ctx.labeler();
        Dataset data = ctx.dataset(ctx.config.seeds.front());
        return model_for_operators(*ctx.domain,
                                   listing_predicates(ops, ctx.domain->spec()), ops,
                                   data.demos, *labeler, ctx.config.sampler);
    }
    ModelArtifact a = model_from_json(read_json_file(model_path), &ctx.domain->spec());
    if (a.domain != ctx.config.domain)
        throw Error("model is for domain " + a.domain);
    return a.model;
}

int cmd_eval(Context &ctx, const string &model_path, const string &listing_path) {
    LearnedModel model = load_model(ctx, model_path, listing_path);
    auto labeler = ctx.labeler();
    fs::path dir = out_dir(ctx.config);
    ostringstream csv;
    csv << "seed,task,outcome,plan_status,plan_length,divergence_step\n";
    vector<double> rates;
    for (uint64_t seed : ctx.config.seeds) {
        int solved = 0;
        for (int i = 0; i < ctx.config.n_tasks; ++i) {
            Task task = ctx.domain->make_task(seed, i);
            Environment env(*ctx.domain, task);
            ExecutionReport r = plan_and_execute(
                model, env, *labeler, {ctx.config.execute_node_budget, seed});
            solved += r.outcome == Outcome::success;
            csv << seed << "," << task.name << "," << to_string(r.outcome) << ","
                << to_string(r.plan_status) << "," << r.plan_length << ","
                << r.divergence_step << "\n";
        }
        rates.push_back(static_cast<double>(solved) / max(1, ctx.config.n_tasks));
    }
    double mean = 0, var = 0;
    for (double r : rates)
        mean += r / rates.size();
    for (double r : rates)
        var += (r - mean) * (r - mean);
    double stddev = rates.size() > 1 ? sqrt(var / (rates.size() - 1)) : 0.0;

    ostringstream per_seed, summary;
    per_seed << "seed,success_rate\n";
    summary << "domain " << ctx.config.domain << "\n"
            << "config digest " << config_digest(ctx.config) << "\n";
    summary << fixed << setprecision(3);
    for (size_t i = 0; i < rates.size(); ++i) {
        per_seed << ctx.config.seeds[i] << "," << format_double(rates[i]) << "\n";
        summary << "seed " << ctx.config.seeds[i] << ": " << rates[i] << "\n";
    }
    summary << "mean " << mean << " std " << stddev << " over " << rates.size()
            << " seeds x " << ctx.config.n_tasks << " tasks\n";
    write_text_file(dir / "eval.csv", csv.str());
    write_text_file(dir / "eval_seeds.csv", per_seed.str());
    write_text_file(dir / "eval_summary.txt", summary.str());
    cout << summary.str();
    return 0;
}

int cmd_plan(Context &ctx, const string &model_path, const string &listing_path,
             int task_index, const string &problem_out) {
    LearnedModel model = load_model(ctx, model_path, listing_path);
    auto labeler = ctx.labeler();
    uint64_t seed = ctx.config.seeds.front();
    Task task = ctx.domain->make_task(seed, task_index);
    const TypeHierarchy &types = ctx.domain->spec().types;
    AtomSet init = abstract(task.init, model.predicates, task.objects, types,
                            labeler.get());
    if (!problem_out.empty())
        write_text_file(problem_out,
                        emit_pddl_problem(task.name, ctx.config.domain, task.objects,
                                          init, task.goal, model.predicates));
    cout << "task " << task.name << "\n" << ctx.domain->ascii(task.init, task.objects);
    Environment env(*ctx.domain, task);
    ExecutionReport r =
        plan_and_execute(model, env, *labeler, {ctx.config.execute_node_budget, seed});
    for (size_t i = 0; i < r.executed.size(); ++i) {
        cout << i << ": " << r.executed[i].str(task.objects);
        if (!r.executed[i].theta.empty()) {
            vector<string> th;
            for (double x : r.executed[i].theta)
                th.push_back(format_double(x));
            cout << " theta=(" << join(th, ", ") << ")";
        }
        cout << "\n";
    }
    cout << "outcome " << to_string(r.outcome) << " (" << to_string(r.plan_status)
         << ")" << (r.message.empty() ? "" : ": " + r.message) << "\n";
    return 0;
}

int cmd_label(Context &ctx, const string &pool_path) {
    uint64_t seed = ctx.config.seeds.front();
    Dataset data = ctx.dataset(seed);
    const DomainSpec &spec = ctx.domain->spec();
    vector<PredicateRef> preds = pool_from_json(read_json_file(pool_path), &spec);
    auto labeler = ctx.labeler();
    AbstractionCache cache(spec.types, labeler.get());
    // Transitions come out demo by demo, one per action.
    auto transitions = abstract_demos(data.demos, preds, cache);
    auto atoms_json = [](const AtomSet &atoms) {
        Json list = Json::array();
        for (const auto &a : atoms)
            list.push_back(a.str());
        return list;
    };
    Json demos = Json::array();
    size_t t = 0;
    for (const auto &demo : data.demos) {
        Json states = Json::array();
        for (size_t s = 0; s < demo.actions.size(); ++s)
            states.push_back(atoms_json(transitions[t + s].before));
        if (!demo.actions.empty())
            states.push_back(atoms_json(transitions[t + demo.actions.size() - 1].after));
        else
            states.push_back(atoms_json(cache.abstract(demo.states[0], preds,
                                                       demo.objects)));
        t += demo.actions.size();
        demos.push_back({{"states", states}});
    }
    Json out = {{"schema_version", schema_version},
                {"kind", "labels"},
                {"labeler", labeler->identity()},
                {"dataset_digest", dataset_digest(data)},
                {"demos", demos}};
    fs::path path = out_dir(ctx.config) / "labels.json";
    write_text_file(path, dump_json(out));
    cout << "wrote " << path.string();
    if (ctx.gateway)
        cout << " (" << ctx.gateway->network_calls() << " gateway requests)";
    cout << "\n";
    return 0;
}

int cmd_propose(Context &ctx) {
    uint64_t seed = ctx.config.seeds.front();
    Dataset data = ctx.dataset(seed);
    auto texts = ctx.proposals(data.demos, seed);
    vector<RejectedProposal> rejected;
    auto visual = visual_candidates(texts, data.demos, &rejected);
    vector<PredicateRef> grammar;
    if (ctx.config.use_grammar)
        grammar = generate_feature_grammar(data.demos);
    auto pool = assemble_pool(ctx.domain->spec().init_predicates, visual, grammar);
    fs::path dir = out_dir(ctx.config);
    Json rej = Json::array();
    for (const auto &r : rejected)
        rej.push_back({{"token", r.token}, {"reason", r.reason}});
    Json raw = {{"schema_version", schema_version},
                {"kind", "proposals"},
                {"responses", texts},
                {"rejected", rej}};
    write_text_file(dir / "proposals.json", dump_json(raw));
    write_text_file(dir / "pool.json", dump_json(pool_to_json(pool)));
    cout << "pool " << pool.size() << " predicates (" << visual.size() << " visual, "
         << grammar.size() << " grammar), " << rejected.size() << " rejected\n";
    return 0;
}

int cmd_report(const string &model_path) {
    Json j = read_json_file(model_path);
    const Json &trace = j.contains("trace") ? j["trace"] : j;
    SelectionTrace t = trace_from_json(trace);
    if (j.contains("provenance")) {
        cout << "config digest  " << j["provenance"]["config_digest"].get<string>() << "\n"
             << "dataset digest " << j["provenance"]["dataset_digest"].get<string>() << "\n";
    }
    auto num = [](double x) {return isinf(x) ? string("inf") : format_double(x);};
    cout << "J with init predicates only: " << num(t.j_init_only) << "\n";
    cout << "step,chosen,j_before,j_after,candidates,kept\n";
    for (size_t i = 0; i < t.steps.size(); ++i) {
        const auto &s = t.steps[i];
        cout << i << ",\"" << s.chosen << "\"," << num(s.j_before) << ","
             << num(s.j_after) << "," << s.candidates << ","
             << (s.kept ? "yes" : "no") << "\n";
    }
    cout << "selected: " << join(t.selected, ", ") << "\n"
         << "operators: " << t.operator_count << "\n";
    return 0;
}
}

int main(int argc, char **argv) {
    CLI::App app{"Learn symbolic world models from demonstrations and plan with them"};
    app.require_subcommand(1);
    Overrides o;
    string model_path, listing_path, pool_path, problem_out;
    int task_index = 0;

    auto *gen = app.add_subcommand("gen-demos", "write a generated dataset");
    auto *learn = app.add_subcommand("learn", "learn a model");
    auto *eval = app.add_subcommand("eval", "plan and execute on test tasks");
    auto *plan_cmd = app.add_subcommand("plan", "solve one test task");
    auto *label = app.add_subcommand("label", "label a dataset against a pool");
    auto *propose = app.add_subcommand("propose", "build a candidate predicate pool");
    auto *report = app.add_subcommand("report", "print a selection trace");
    for (auto *sub : {gen, learn, eval, plan_cmd, label, propose})
        o.attach(sub);
    for (auto *sub : {eval, plan_cmd}) {
        auto *m = sub->add_option("--model", model_path, "model JSON");
        auto *l = sub->add_option("--listing", listing_path, "operator listing text");
        m->excludes(l);
    }
    plan_cmd->add_option("--task", task_index, "test task index");
    plan_cmd->add_option("--problem-out", problem_out, "write the task as PDDL");
    label->add_option("--pool", pool_path, "pool JSON")->required();
    report->add_option("--model", model_path, "model or trace JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }
    try {
        if (report->parsed())
            return cmd_report(model_path);
        Context ctx(o.resolve());
        if (gen->parsed())
            return cmd_gen_demos(ctx);
        if (learn->parsed())
            return cmd_learn(ctx);
        if ((eval->parsed() || plan_cmd->parsed()) && model_path.empty() &&
            listing_path.empty())
            throw Error("--model or --listing is required");
        if (eval->parsed())
            return cmd_eval(ctx, model_path, listing_path);
        if (plan_cmd->parsed())
            return cmd_plan(ctx, model_path, listing_path, task_index, problem_out);
        if (label->parsed())
            return cmd_label(ctx, pool_path);
        if (propose->parsed())
            return cmd_propose(ctx);
    } catch (const exception &e) {
        cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
