#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "symwm/vlm.hpp"
#include "symwm/digest.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

using namespace std;
using json = nlohmann::json;

namespace symwm {
const char *const label_initial_instructions =
    "You are a vision system for a robot. Your job is to output the values of "
    "the following predicates based on the provided visual scene. For each "
    "predicate, output True, False, or Unknown if the relevant objects are not "
    "in the scene or the value of the predicate simply cannot be determined. "
    "Output each predicate value as a bulleted list with each predicate and "
    "value on a different line. For each output value, provide an explanation "
    "as to why you labelled this predicate as having this particular value. "
    "Use the format: <predicate>: <truth_value>. <explanation>.";

const char *const label_step_instructions =
    "You are a vision system for a robot. You are provided with two images "
    "corresponding to the states before and after a particular skill is "
    "executed. You are given a list of predicates below, and you are given the "
    "values of these predicates in the image before the skill is executed. "
    "Your job is to output the values of the following predicates in the image "
    "after the skill is executed. Pay careful attention to the visual changes "
    "between the two images to figure out which predicates change and which "
    "predicates do not change. For the predicates that change, list these "
    "separately at the end of your response. Note that in some scenes, there "
    "might be no changes. First, output a description of what changes you "
    "expect to happen based on the skill that was just run, explicitly noting "
    "the skill that was run. Second, output a description of what visual "
    "changes you see happen between the before and after images, looking "
    "specifically at the objects involved in the skill's arguments, noting "
    "what objects these are. Next, output each predicate value in the after "
    "image as a bulleted list with each predicate and value on a different "
    "line. For each predicate value, provide an explanation as to why you "
    "labeled this predicate as having this particular value. Use the format: "
    "<predicate>: <truth_value>. <explanation>.\n"
    "\n"
    "Your response should have three sections. Here is an outline of what "
    "your response should look like:\n"
    "\n"
    "[START OUTLINE]\n"
    "\n"
    "# Expected changes based on the executed skill\n"
    "\n"
    "[insert your analysis on the expected changes you will see based on the "
    "skill that was executed]\n"
    "\n"
    "# Visual changes observed between the images\n"
    "\n"
    "[insert your analysis on the visual changes observed between the images]\n"
    "\n"
    "# Predicate values in the after image\n"
    "\n"
    "[insert your bulleted list of `* <predicate>: <truth value>. "
    "<explanation>`]\n"
    "\n"
    "[END OUTLINE]";

const char *const double_check_instructions =
    "Sometimes your reasoning about the value of a predicate at the current "
    "timestep uses an incorrect value of that predicate in the previous "
    "timestep. Below, I give you give you the values of the predicates at the "
    "previous timestep once again. Please check your reasoning and provide a "
    "corrected version of your previous answer, if it needs correcting. "
    "Regardless of whether or not it needs correctly, your reply should be "
    "formatted exactly the same as the previous answer.";

const char *const proposal_instructions =
    "You are a robotic vision system whose job is to output a structured set "
    "of predicates useful for describing important concepts in the following "
    "demonstration of a task. You will be provided with a list of actions used "
    "during the task, as well as images of states before and after every "
    "action execution. Please provide predicates in terms of the following "
    "objects: {objs}. For each predicate, output it in the following format: "
    "predicate_name(obj1, obj2, obj3...). Start by generating predicates that "
    "change before and after each action. After this, generate any other "
    "predicates that perhaps do not change but are still important to "
    "describing the demonstration shown. For each predicate you generate, "
    "also generate some predicates that are synonyms and antonyms so that any "
    "predicate that is even tangentially relevant to the demonstrations is "
    "generated.";

string to_string(PromptKind kind) {
    switch (kind) {
    case PromptKind::label_initial: return "label_initial";
    case PromptKind::label_step: return "label_step";
    case PromptKind::double_check: return "double_check";
    case PromptKind::proposal: return "proposal";
    }
    return "label_initial";
}

namespace {
string lines_of(const vector<string> &items) {
    string out;
    for (const auto &s : items)
        out += s + "\n";
    return out;
}

void add_frames(vector<ImageRef> &images, const State &state,
                const string &suffix = "") {
    for (const auto &path : state.images)
        images.push_back(
            {"timestep " + std::to_string(state.timestep) + suffix, path});
}

string normalize_atom(const string &s) {
    string out;
    for (char c : s) {
        if (isspace(static_cast<unsigned char>(c)))
            continue;
        out += c == '-' ? '_' : static_cast<char>(tolower(static_cast<unsigned char>(c)));
    }
    return out;
}
}

PromptBundle build_label_prompt_t0(const vector<string> &atoms,
                                   const State &state) {
    PromptBundle b;
    b.kind = PromptKind::label_initial;
    b.expected_atoms = atoms;
    Message m{"user", string(label_initial_instructions) + "\n\nPredicates:\n" +
                          lines_of(atoms),
              {}};
    add_frames(m.images, state);
    b.messages.push_back(move(m));
    return b;
}

PromptBundle build_label_prompt_t(const vector<string> &atoms, const State &state,
                                  const LabelContext &context,
                                  const vector<string> &crops) {
    if (!context.previous_state || !context.previous_action ||
        context.previous_labels.empty() || context.objects.empty())
        throw IncompleteContext(
            "labeling after the first step needs the previous state, labels, "
            "action and objects");
    string previous = context.previous_response.empty()
                          ? render_labels(context.previous_labels)
                          : context.previous_response;
    PromptBundle b;
    b.kind = PromptKind::label_step;
    b.expected_atoms = atoms;
    Message m{"user",
              string(label_step_instructions) + "\n\nPredicates:\n" +
                  lines_of(atoms) + "\nSkill executed between states: " +
                  context.previous_action->str(context.objects) +
                  "\n\nPredicate values in the first scene, before the skill "
                  "was executed:\n" +
                  previous,
              {}};
    add_frames(m.images, *context.previous_state);
    add_frames(m.images, state);
    for (const auto &c : crops)
        m.images.push_back(
            {"timestep " + std::to_string(state.timestep) + " (crop)", c});
    b.messages.push_back(move(m));
    return b;
}

PromptBundle build_double_check_prompt(const PromptBundle &asked,
                                       const string &answer,
                                       const string &previous_labels) {
    if (answer.empty())
        throw IncompleteContext("double-check needs the earlier answer");
    PromptBundle b = asked;
    b.kind = PromptKind::double_check;
    b.messages.push_back({"assistant", answer, {}});
    b.messages.push_back(
        {"user", string(double_check_instructions) + "\n\n" + previous_labels, {}});
    return b;
}

PromptBundle build_proposal_prompt(const Demonstration &demo,
                                   const string &extra_instruction) {
    vector<string> names;
    for (const auto &o : demo.objects)
        names.push_back(o.name);
    string text = proposal_instructions;
    text.replace(text.find("{objs}"), 6, join(names, ", "));
    if (!extra_instruction.empty())
        text += " " + extra_instruction;
    vector<string> skills;
    for (const auto &a : demo.actions)
        skills.push_back(a.str(demo.objects));
    PromptBundle b;
    b.kind = PromptKind::proposal;
    Message m{"user", text + "\n\nSkills executed in trajectory:\n" + lines_of(skills),
              {}};
    for (const auto &s : demo.states)
        add_frames(m.images, s);
    b.messages.push_back(move(m));
    return b;
}

string render_labels(const vector<pair<GroundAtom, Label>> &labels) {
    string out;
    for (const auto &[atom, label] : labels)
        out += "* " + atom.str() + ": " + to_string(label) + ".\n";
    return out;
}

ParsedLabels parse_label_response(const string &text,
                                  const vector<string> &expected) {
    static const regex bullet(R"(^\s*[*\-]\s*(.+?\))\s*:\s*([A-Za-z]+)\b.*$)");
    map<string, size_t> index;
    for (size_t i = 0; i < expected.size(); ++i)
        index.emplace(normalize_atom(expected[i]), i);
    ParsedLabels out;
    out.labels.assign(expected.size(), Label::unknown);
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == string::npos)
            end = text.size();
        string line = text.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        string trimmed = line.substr(min(line.find_first_not_of(" \t"), line.size()));
        if (trimmed.empty() || (trimmed[0] != '*' && trimmed[0] != '-'))
            continue;
        smatch m;
        if (!regex_match(line, m, bullet)) {
            out.remainder.push_back(line);
            continue;
        }
        string value = to_lower(m[2]);
        auto it = index.find(normalize_atom(m[1]));
        if (it == index.end() ||
            (value != "true" && value != "false" && value != "unknown")) {
            out.remainder.push_back(line);
            continue;
        }
        // Later mentions win: answers restate changed atoms at the end.
        out.labels[it->second] = label_from_string(value);
    }
    return out;
}

void FakeTransport::push(TransportReply reply) {
    lock_guard lock(mutex_);
    replies_.push_back(move(reply));
}

void FakeTransport::push_answer(const string &text) {
    json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
    push({200, j.dump()});
}

TransportReply FakeTransport::post(const string &, const string &,
                                   const map<string, string> &, const string &body) {
    lock_guard lock(mutex_);
    sent.push_back(body);
    if (replies_.empty())
        return {0, ""};
    TransportReply r = replies_.front();
    replies_.pop_front();
    return r;
}

TransportReply HttpTransport::post(const string &base_url, const string &path,
                                   const map<string, string> &headers,
                                   const string &body) {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    httplib::Headers h;
    for (const auto &[k, v] : headers)
        if (k != "Content-Type")
            h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res)
        return {0, httplib::to_string(res.error())};
    return {res->status, res->body};
}

string request_body(const PromptBundle &bundle, const EndpointConfig &endpoint,
                    double temperature) {
    json messages = json::array();
    for (const auto &m : bundle.messages) {
        if (m.images.empty()) {
            messages.push_back({{"role", m.role}, {"content", m.text}});
            continue;
        }
        json parts = json::array();
        parts.push_back({{"type", "text"}, {"text", m.text}});
        for (const auto &img : m.images) {
            parts.push_back({{"type", "text"}, {"text", img.heading}});
            parts.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", img.path}}}});
        }
        messages.push_back({{"role", m.role}, {"content", parts}});
    }
    json j = {{"model", endpoint.model},
              {"temperature", temperature},
              {"messages", messages}};
    return j.dump();
}

Gateway::Gateway(GatewayConfig config, shared_ptr<Transport> transport)
    : config_(move(config)), transport_(move(transport)),
      slots_(max(1, min(config_.max_in_flight, 64))) {
    if (config_.retries < 0)
        throw Error("retries must be non-negative");
    if (!config_.cache_dir.empty())
        cache_ = make_unique<DiskCache>(config_.cache_dir);
}

void Gateway::audit(const string &kind, const string &key, int attempt,
                    int status, bool cached, const string &error) {
    if (config_.audit_log.empty())
        return;
    json j = {{"time", chrono::duration_cast<chrono::milliseconds>(
                           chrono::system_clock::now().time_since_epoch())
                           .count()},
              {"kind", kind},
              {"key", key},
              {"model", config_.endpoint.model},
              {"attempt", attempt},
              {"status", status},
              {"cached", cached}};
    if (!error.empty())
        j["error"] = error;
    lock_guard lock(log_mutex_);
    auto parent = config_.audit_log.parent_path();
    if (!parent.empty())
        filesystem::create_directories(parent);
    ofstream out(config_.audit_log, ios::app);
    out << j.dump() << "\n";
}

string Gateway::request(const PromptBundle &bundle) {
    string body = request_body(bundle, config_.endpoint, config_.temperature);
    string key = sha256_hex(body);
    string identity = "vlm-" + config_.endpoint.model;
    string kind = to_string(bundle.kind);
    if (cache_) {
        if (auto hit = cache_->load(identity, key)) {
            json record = json::parse(*hit, nullptr, false);
            if (!record.is_discarded() && record.contains("response")) {
                audit(kind, key, 0, 200, true, "");
                return record["response"].get<string>();
            }
        }
    }
    const string &url = config_.endpoint.base_url;
    static const regex endpoint_shape(R"(^https?://[^/\s:]+(:\d+)?/?$)");
    if (!regex_match(url, endpoint_shape))
        throw MalformedEndpoint("endpoint must look like http[s]://host[:port], got '" +
                                url + "'");
    const char *token = getenv(config_.endpoint.token_env.c_str());
    if (!token || !*token)
        throw AuthFailure("no credentials in $" + config_.endpoint.token_env);
    map<string, string> headers = {{"Authorization", string("Bearer ") + token},
                                   {"Content-Type", "application/json"}};

    slots_.acquire();
    struct Release {
        counting_semaphore<64> &s;
        ~Release() {s.release();}
    } release{slots_};
    string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0)
            this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
        ++network_calls_;
        TransportReply reply = transport_->post(url, config_.endpoint.path,
                                                headers, body);
        if (reply.status == 401 || reply.status == 403) {
            audit(kind, key, attempt, reply.status, false, "auth");
            throw AuthFailure("endpoint refused the credentials (HTTP " +
                              std::to_string(reply.status) + ")");
        }
        if (reply.status == 200) {
            json j = json::parse(reply.body, nullptr, false);
            try {
                string text = j.at("choices").at(0).at("message").at("content");
                audit(kind, key, attempt, 200, false, "");
                if (cache_) {
                    json record = {{"schema_version", 1},
                                   {"model", config_.endpoint.model},
                                   {"temperature", config_.temperature},
                                   {"request_digest", key},
                                   {"response", text}};
                    cache_->store(identity, key, record.dump());
                }
                return text;
            } catch (const json::exception &) {
                last_error = "unreadable answer body";
            }
        } else if (reply.status == 0 || reply.status == 429 || reply.status >= 500) {
            last_error = reply.status == 0 ? "no answer: " + reply.body
                                           : "HTTP " + std::to_string(reply.status);
        } else {
            audit(kind, key, attempt, reply.status, false, "rejected");
            throw Error("endpoint rejected the request (HTTP " +
                        std::to_string(reply.status) + "): " + reply.body);
        }
        audit(kind, key, attempt, reply.status, false, last_error);
    }
    throw TransientExhausted("gave up after " + std::to_string(config_.retries + 1) +
                             " attempts: " + last_error);
}

string VlmLabeler::identity() const {
    return "vlm:" + gateway_.config().endpoint.model +
           (double_check_ ? ":checked" : "");
}

vector<Label> VlmLabeler::label_batch(const State &state,
                                      const vector<GroundAtom> &atoms,
                                      const LabelContext &context) {
    context.validate();
    vector<string> names;
    for (const auto &a : atoms)
        names.push_back(a.str());
    PromptBundle bundle;
    if (context.empty()) {
        bundle = build_label_prompt_t0(names, state);
    } else {
        LabelContext ctx = context;
        if (ctx.previous_response.empty()) {
            lock_guard lock(mutex_);
            auto it = answers_.find(ctx.previous_state->digest());
            if (it != answers_.end())
                ctx.previous_response = it->second;
        }
        bundle = build_label_prompt_t(names, state, ctx);
    }
    string answer = gateway_.request(bundle);
    if (double_check_ && !context.empty()) {
        PromptBundle again = build_double_check_prompt(
            bundle, answer, render_labels(context.previous_labels));
        answer = gateway_.request(again);
    }
    {
        lock_guard lock(mutex_);
        answers_[state.digest()] = answer;
    }
    return parse_label_response(answer, names).labels;
}

string vlm_propose(Gateway &gateway, const Demonstration &demo,
                   const string &extra_instruction) {
    return gateway.request(build_proposal_prompt(demo, extra_instruction));
}
}
