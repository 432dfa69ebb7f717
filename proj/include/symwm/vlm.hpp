#ifndef SYMWM_VLM_HPP
#define SYMWM_VLM_HPP

#include "labeling.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <semaphore>

namespace symwm {

class AuthFailure : public Error {
public:
    using Error::Error;
};

class TransientExhausted : public Error {
public:
    using Error::Error;
};

class MalformedEndpoint : public Error {
public:
    using Error::Error;
};

class IncompleteContext : public Error {
public:
    using Error::Error;
};

struct ImageRef {
    std::string heading;  // "timestep 3", "timestep 3 (crop)"
    std::string path;
};

struct Message {
    std::string role;  // user or assistant
    std::string text;
    std::vector<ImageRef> images;
};

enum class PromptKind {label_initial, label_step, double_check, proposal};
std::string to_string(PromptKind kind);

struct PromptBundle {
    PromptKind kind = PromptKind::label_initial;
    std::vector<Message> messages;
    // Atom strings the parser should look for, in request order.
    std::vector<std::string> expected_atoms;
};

extern const char *const label_initial_instructions;
extern const char *const label_step_instructions;
extern const char *const double_check_instructions;
extern const char *const proposal_instructions;

PromptBundle build_label_prompt_t0(const std::vector<std::string> &atoms,
                                   const State &state);

// `crops` are extra close-up references, appended after the full frames.
PromptBundle build_label_prompt_t(const std::vector<std::string> &atoms,
                                  const State &state,
                                  const LabelContext &context,
                                  const std::vector<std::string> &crops = {});

// Follow-up turn on an earlier labeling exchange.
PromptBundle build_double_check_prompt(const PromptBundle &asked,
                                       const std::string &answer,
                                       const std::string &previous_labels);

PromptBundle build_proposal_prompt(const Demonstration &demo,
                                   const std::string &extra_instruction = "");

// Renders labels the way a labeler answer lists them.
std::string render_labels(const std::vector<std::pair<GroundAtom, Label>> &labels);

struct ParsedLabels {
    std::vector<Label> labels;  // aligned with the expected atoms
    std::vector<std::string> remainder;
};

ParsedLabels parse_label_response(const std::string &text,
                                  const std::vector<std::string> &expected);

struct TransportReply {
    int status = 0;  // 0 means the request never got an answer
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportReply post(const std::string &base_url,
                                const std::string &path,
                                const std::map<std::string, std::string> &headers,
                                const std::string &body) = 0;
};

// Plays back a fixed list of replies and records what was sent.
class FakeTransport : public Transport {
    std::deque<TransportReply> replies_;
    std::mutex mutex_;
public:
    std::vector<std::string> sent;
    void push(TransportReply reply);
    // Wraps text as a chat-completions answer.
    void push_answer(const std::string &text);
    std::size_t calls() const {return sent.size();}
    TransportReply post(const std::string &base_url, const std::string &path,
                        const std::map<std::string, std::string> &headers,
                        const std::string &body) override;
};

class HttpTransport : public Transport {
    std::chrono::seconds timeout_;
public:
    explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(120))
        : timeout_(timeout) {}
    TransportReply post(const std::string &base_url, const std::string &path,
                        const std::map<std::string, std::string> &headers,
                        const std::string &body) override;
};

struct EndpointConfig {
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string token_env = "SYMWM_VLM_TOKEN";
};

struct GatewayConfig {
    EndpointConfig endpoint;
    int max_in_flight = 4;
    int retries = 3;
    std::chrono::milliseconds backoff{500};
    double temperature = 0.0;
    std::filesystem::path cache_dir;  // empty disables the cache
    std::filesystem::path audit_log;  // empty disables the log
};

std::string request_body(const PromptBundle &bundle, const EndpointConfig &endpoint,
                         double temperature);

class Gateway {
    GatewayConfig config_;
    std::shared_ptr<Transport> transport_;
    std::unique_ptr<DiskCache> cache_;
    std::counting_semaphore<64> slots_;
    std::mutex log_mutex_;
    std::atomic<std::size_t> network_calls_ = 0;

    void audit(const std::string &kind, const std::string &key, int attempt,
               int status, bool cached, const std::string &error);
public:
    Gateway(GatewayConfig config, std::shared_ptr<Transport> transport);
    // Raw answer text. Cache hits never reach the transport.
    std::string request(const PromptBundle &bundle);
    std::size_t network_calls() const {return network_calls_;}
    const GatewayConfig &config() const {return config_;}
};

// Labeler backed by a VLM. Visual atoms only; the answer of each labeled
// state is remembered so the next timestep can quote it.
class VlmLabeler : public Labeler {
    Gateway &gateway_;
    bool double_check_;
    std::map<std::uint64_t, std::string> answers_;
    std::mutex mutex_;
public:
    VlmLabeler(Gateway &gateway, bool double_check)
        : gateway_(gateway), double_check_(double_check) {}
    std::string identity() const override;
    std::vector<Label> label_batch(const State &state,
                                   const std::vector<GroundAtom> &atoms,
                                   const LabelContext &context) override;
};

std::string vlm_propose(Gateway &gateway, const Demonstration &demo,
                        const std::string &extra_instruction = "");
}

#endif
