#ifndef SYMWM_CONFIG_HPP
#define SYMWM_CONFIG_HPP

#include "serialization.hpp"
#include "vlm.hpp"

namespace symwm {

struct LabelerConfig {
    std::string kind = "ground_truth";  // ground_truth, noisy or vlm
    double epsilon = 0.05;
    std::uint64_t seed = 0;
    bool double_check = false;
    EndpointConfig endpoint;
    int max_in_flight = 4;
    int retries = 3;
    int backoff_ms = 500;
    std::string cache_dir;
    std::string audit_log;
};

struct ProposerConfig {
    std::string kind = "mock";  // mock or vlm
    int k_synonyms = 2;
    int k_antonyms = 2;
    int junk = 0;
    std::string extra_instruction;
};

struct RunConfig {
    std::string domain = "more_stacks";
    Hyperparameters hyper;
    ObjectiveConfig objective;
    SamplerConfig sampler;
    bool rollback_final = true;
    bool use_grammar = true;
    std::size_t execute_node_budget = 100000;
    LabelerConfig labeler;
    ProposerConfig proposer;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    int n_tasks = 10;
    std::string dataset;  // empty: generate demos from the domain
    std::string output_dir = "out";

    PipelineConfig pipeline() const;
};

// Defaults for a named domain: its hyperparameter row, everything else
// as declared above.
RunConfig default_config(const std::string &domain);

// Unset fields fall back to default_config(domain). Unknown keys and
// ill-typed values raise SchemaError with the line of the offending key.
// A non-empty `domain` replaces the one in the text.
RunConfig config_from_json_text(const std::string &text,
                                const std::string &domain = "");
RunConfig load_config(const std::filesystem::path &path);
Json config_to_json(const RunConfig &config);
std::string config_digest(const RunConfig &config);

GatewayConfig gateway_config(const LabelerConfig &labeler);
}

#endif
