#ifndef SYMWM_SERIALIZATION_HPP
#define SYMWM_SERIALIZATION_HPP

#include "pipeline.hpp"

#include "json.hpp"

#include <filesystem>

namespace symwm {

inline constexpr int schema_version = 1;

// Carries "line:column: message" when the position is known.
class SchemaError : public Error {
public:
    using Error::Error;
};

using Json = nlohmann::ordered_json;

// Reads a JSON document, reporting syntax errors by line and column, and
// checks the schema_version field when `check_version` is set.
Json parse_json_text(const std::string &text, bool check_version = true);
Json read_json_file(const std::filesystem::path &path, bool check_version = true);
void write_text_file(const std::filesystem::path &path, const std::string &text);
std::string read_text_file(const std::filesystem::path &path);
// Pretty printed with a trailing newline; byte-stable for equal documents.
std::string dump_json(const Json &j);

struct Dataset {
    std::string domain;
    TypeHierarchy types;
    std::vector<Demonstration> demos;
    std::vector<Task> tasks;
};

Json state_to_json(const State &state);
State state_from_json(const Json &j);
Json dataset_to_json(const Dataset &dataset);
// Goal atoms and skills are resolved against `spec`.
Dataset dataset_from_json(const Json &j, const DomainSpec &spec);

Json predicate_to_json(const PredicateRef &p);
// Provided predicates must exist in `spec`.
PredicateRef predicate_from_json(const Json &j, const DomainSpec *spec);
Json pool_to_json(const std::vector<PredicateRef> &pool);
std::vector<PredicateRef> pool_from_json(const Json &j, const DomainSpec *spec);

Json sampler_to_json(const Sampler &s);
Sampler sampler_from_json(const Json &j);
Json trace_to_json(const SelectionTrace &trace);
SelectionTrace trace_from_json(const Json &j);

struct ModelArtifact {
    std::string domain;
    LearnedModel model;
    SelectionTrace trace;
    std::string config_digest;
    std::string dataset_digest;
};

Json model_to_json(const ModelArtifact &artifact);
ModelArtifact model_from_json(const Json &j, const DomainSpec *spec);

std::string dataset_digest(const Dataset &dataset);
}

#endif
