#include "symwm/config.hpp"
#include "symwm/digest.hpp"

#include <set>

using namespace std;

namespace symwm {
namespace {
// Line of the first occurrence of "key" in the text, for diagnostics.
int line_of_key(const string &text, const string &key) {
    size_t at = text.find("\"" + key + "\"");
    if (at == string::npos)
        return 0;
    return 1 + static_cast<int>(count(text.begin(), text.begin() + at, '\n'));
}

struct Reader {
    const string &text;

    [[noreturn]] void fail(const string &key, const string &what) const {
        int line = line_of_key(text, key);
        throw SchemaError((line ? "line " + std::to_string(line) + ": " : string()) +
                          "'" + key + "': " + what);
    }

    void check_keys(const Json &j, const set<string> &allowed,
                    const string &where) const {
        if (!j.is_object())
            fail(where, "expected an object");
        for (const auto &[k, v] : j.items())
            if (!allowed.count(k))
                fail(k, "unknown key in " + where);
    }

    template <typename T>
    void read(const Json &j, const string &key, T &out) const {
        if (!j.contains(key))
            return;
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            fail(key, "has the wrong type (" + j.at(key).dump() + ")");
        }
    }
};
}

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.hyper = hyper;
    p.objective = objective;
    p.sampler = sampler;
    p.rollback_final = rollback_final;
    p.use_grammar = use_grammar;
    return p;
}

RunConfig default_config(const string &domain) {
    RunConfig c;
    c.domain = domain;
    c.hyper = make_domain(domain)->default_hyperparameters();
    return c;
}

RunConfig config_from_json_text(const string &text, const string &domain_override) {
    Json j = parse_json_text(text, false);
    Reader r{text};
    r.check_keys(j, {"schema_version", "domain", "hyperparameters", "objective",
                     "sampler", "rollback_final", "use_grammar",
                     "execute_node_budget", "labeler", "proposer", "seeds",
                     "n_tasks", "dataset", "output_dir"},
                 "config");
    if (j.contains("schema_version") && j["schema_version"] != schema_version)
        r.fail("schema_version", "unsupported version " + j["schema_version"].dump());
    string domain = "more_stacks";
    r.read(j, "domain", domain);
    if (!domain_override.empty())
        domain = domain_override;
    RunConfig c;
    try {
        c = default_config(domain);
    } catch (const Error &e) {
        r.fail("domain", e.what());
    }
    if (j.contains("hyperparameters")) {
        const Json &h = j["hyperparameters"];
        r.check_keys(h, {"j_thresh", "h_pre_frac", "h_data_frac", "n_demo"},
                     "hyperparameters");
        r.read(h, "j_thresh", c.hyper.j_thresh);
        r.read(h, "h_pre_frac", c.hyper.h_pre_frac);
        r.read(h, "h_data_frac", c.hyper.h_data_frac);
        r.read(h, "n_demo", c.hyper.n_demo);
        if (c.hyper.h_pre_frac <= 0 || c.hyper.h_pre_frac > 1)
            r.fail("h_pre_frac", "must lie in (0, 1]");
        if (c.hyper.h_data_frac < 0 || c.hyper.h_data_frac > 1)
            r.fail("h_data_frac", "must lie in [0, 1]");
        if (c.hyper.n_demo < 1)
            r.fail("n_demo", "must be positive");
    }
    if (j.contains("objective")) {
        const Json &o = j["objective"];
        r.check_keys(o, {"node_budget", "fail_penalty", "lambda_pred", "lambda_op",
                         "mispredict_penalty"},
                     "objective");
        r.read(o, "node_budget", c.objective.node_budget);
        r.read(o, "fail_penalty", c.objective.fail_penalty);
        r.read(o, "lambda_pred", c.objective.lambda_pred);
        r.read(o, "lambda_op", c.objective.lambda_op);
        r.read(o, "mispredict_penalty", c.objective.mispredict_penalty);
    }
    if (j.contains("sampler")) {
        const Json &s = j["sampler"];
        r.check_keys(s, {"variance_floor", "k", "max_attempts"}, "sampler");
        r.read(s, "variance_floor", c.sampler.variance_floor);
        r.read(s, "k", c.sampler.k);
        r.read(s, "max_attempts", c.sampler.max_attempts);
    }
    r.read(j, "rollback_final", c.rollback_final);
    r.read(j, "use_grammar", c.use_grammar);
    r.read(j, "execute_node_budget", c.execute_node_budget);
    if (j.contains("labeler")) {
        const Json &l = j["labeler"];
        r.check_keys(l, {"kind", "epsilon", "seed", "double_check", "endpoint",
                         "max_in_flight", "retries", "backoff_ms", "cache_dir",
                         "audit_log"},
                     "labeler");
        r.read(l, "kind", c.labeler.kind);
        if (c.labeler.kind != "ground_truth" && c.labeler.kind != "noisy" &&
            c.labeler.kind != "vlm")
            r.fail("kind", "must be ground_truth, noisy or vlm");
        r.read(l, "epsilon", c.labeler.epsilon);
        if (c.labeler.epsilon < 0 || c.labeler.epsilon > 1)
            r.fail("epsilon", "must lie in [0, 1]");
        r.read(l, "seed", c.labeler.seed);
        r.read(l, "double_check", c.labeler.double_check);
        r.read(l, "max_in_flight", c.labeler.max_in_flight);
        r.read(l, "retries", c.labeler.retries);
        r.read(l, "backoff_ms", c.labeler.backoff_ms);
        r.read(l, "cache_dir", c.labeler.cache_dir);
        r.read(l, "audit_log", c.labeler.audit_log);
        if (l.contains("endpoint")) {
            const Json &e = l["endpoint"];
            r.check_keys(e, {"base_url", "path", "model", "token_env"}, "endpoint");
            r.read(e, "base_url", c.labeler.endpoint.base_url);
            r.read(e, "path", c.labeler.endpoint.path);
            r.read(e, "model", c.labeler.endpoint.model);
            r.read(e, "token_env", c.labeler.endpoint.token_env);
        }
    }
    if (j.contains("proposer")) {
        const Json &p = j["proposer"];
        r.check_keys(p, {"kind", "k_synonyms", "k_antonyms", "junk",
                         "extra_instruction"},
                     "proposer");
        r.read(p, "kind", c.proposer.kind);
        if (c.proposer.kind != "mock" && c.proposer.kind != "vlm")
            r.fail("kind", "must be mock or vlm");
        r.read(p, "k_synonyms", c.proposer.k_synonyms);
        r.read(p, "k_antonyms", c.proposer.k_antonyms);
        r.read(p, "junk", c.proposer.junk);
        r.read(p, "extra_instruction", c.proposer.extra_instruction);
    }
    r.read(j, "seeds", c.seeds);
    r.read(j, "n_tasks", c.n_tasks);
    r.read(j, "dataset", c.dataset);
    r.read(j, "output_dir", c.output_dir);
    return c;
}

RunConfig load_config(const filesystem::path &path) {
    try {
        return config_from_json_text(read_text_file(path));
    } catch (const SchemaError &e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

Json config_to_json(const RunConfig &c) {
    return {{"schema_version", schema_version},
            {"domain", c.domain},
            {"hyperparameters", {{"j_thresh", c.hyper.j_thresh},
                                 {"h_pre_frac", c.hyper.h_pre_frac},
                                 {"h_data_frac", c.hyper.h_data_frac},
                                 {"n_demo", c.hyper.n_demo}}},
            {"objective", {{"node_budget", c.objective.node_budget},
                           {"fail_penalty", c.objective.fail_penalty},
                           {"lambda_pred", c.objective.lambda_pred},
                           {"lambda_op", c.objective.lambda_op},
                           {"mispredict_penalty", c.objective.mispredict_penalty}}},
            {"sampler", {{"variance_floor", c.sampler.variance_floor},
                         {"k", c.sampler.k},
                         {"max_attempts", c.sampler.max_attempts}}},
            {"rollback_final", c.rollback_final},
            {"use_grammar", c.use_grammar},
            {"execute_node_budget", c.execute_node_budget},
            {"labeler", {{"kind", c.labeler.kind},
                         {"epsilon", c.labeler.epsilon},
                         {"seed", c.labeler.seed},
                         {"double_check", c.labeler.double_check},
                         {"endpoint", {{"base_url", c.labeler.endpoint.base_url},
                                       {"path", c.labeler.endpoint.path},
                                       {"model", c.labeler.endpoint.model},
                                       {"token_env", c.labeler.endpoint.token_env}}},
                         {"max_in_flight", c.labeler.max_in_flight},
                         {"retries", c.labeler.retries},
                         {"backoff_ms", c.labeler.backoff_ms},
                         {"cache_dir", c.labeler.cache_dir},
                         {"audit_log", c.labeler.audit_log}}},
            {"proposer", {{"kind", c.proposer.kind},
                          {"k_synonyms", c.proposer.k_synonyms},
                          {"k_antonyms", c.proposer.k_antonyms},
                          {"junk", c.proposer.junk},
                          {"extra_instruction", c.proposer.extra_instruction}}},
            {"seeds", c.seeds},
            {"n_tasks", c.n_tasks},
            {"dataset", c.dataset},
            {"output_dir", c.output_dir}};
}

string config_digest(const RunConfig &config) {
    Json j = config_to_json(config);
    // Where results go does not change them.
    j.erase("output_dir");
    return sha256_hex(j.dump());
}

GatewayConfig gateway_config(const LabelerConfig &l) {
    GatewayConfig g;
    g.endpoint = l.endpoint;
    g.max_in_flight = l.max_in_flight;
    g.retries = l.retries;
    g.backoff = chrono::milliseconds(l.backoff_ms);
    g.cache_dir = l.cache_dir;
    g.audit_log = l.audit_log;
    return g;
}
}
