#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ambigate/domain.hpp"

namespace ambigate {

// One prompt recipe for one evaluator. system_text carries {{instruction}}
// exactly once and may carry {{context}}.
struct PromptTemplate {
    EvaluatorId evaluator_id{};
    std::string system_text;
    std::vector<std::pair<std::string, std::string>> few_shot_examples;
    std::string output_schema_hint;

    void validate() const;

    // Parses the [system] / [example] / [output] template file format.
    // Throws ParseError on malformed input.
    static PromptTemplate parse(EvaluatorId id, const std::string& file_text);
};

// Holds the five prompt templates, keyed by evaluator. Immutable after load.
class TemplateRegistry {
public:
    TemplateRegistry() = default;

    // Reads <to_string(id)>.txt for all five evaluators from `dir`.
    static TemplateRegistry load(const std::filesystem::path& dir);

    const PromptTemplate& get(EvaluatorId id) const;  // throws UnknownTemplate
    void put(PromptTemplate tpl);

private:
    std::array<std::optional<PromptTemplate>, kEnsembleSize> templates_;
};

// Full prompt text: substituted system text, then the few-shot examples, then
// the output schema hint. A missing instruction context renders as an explicit
// "(no additional context provided)" marker.
std::string render_prompt(const PromptTemplate& tpl, const Instruction& instruction);

// Extracts a verdict from raw model output. The last `score:`-labeled number
// wins, clamped into [0, 10]; otherwise the last standalone number already in
// range. Bullet lines become factors and the full response is kept as the
// rationale. Throws UnparseableResponse when no usable number exists.
EvaluatorVerdict parse_verdict(EvaluatorId evaluator_id, const std::string& raw_response);

struct ChatMessage {
    std::string role;
    std::string content;
};

// One completion request against a chat endpoint or a test double. complete()
// must be safe to call from multiple threads at once.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct BackendConfig {
    std::string base_url;
    std::string model_name;
    std::optional<std::string> api_key;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 2;
    double temperature = 0.0;

    void validate() const;
};

// Chat-completions client: POST {base_url}/chat/completions with model,
// messages and temperature; the first choice's message content is returned.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(BackendConfig config);
    std::string complete(const std::vector<ChatMessage>& messages) override;

private:
    BackendConfig config_;
    std::string origin_;       // scheme://host[:port]
    std::string path_prefix_;  // optional leading path, no trailing slash
};

// Runs all five evaluators concurrently against `backend`, retrying each
// failed call up to max_retries extra attempts. Returns one verdict per
// evaluator or throws: BackendUnavailable if any evaluator died on transport,
// otherwise EvaluatorFailed for the first failing evaluator in canonical
// order. Never returns a partial ensemble.
std::vector<EvaluatorVerdict> evaluate_ensemble(const Instruction& instruction,
                                                const TemplateRegistry& templates,
                                                ChatBackend& backend, int max_retries);

// Offline deterministic ensemble: scores are a pure function of the
// instruction text, the evaluator and the seed. No network, no clock.
std::vector<EvaluatorVerdict> stub_evaluate(const Instruction& instruction, std::uint64_t seed);

}  // namespace ambigate
