#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ambigate/domain.hpp"
#include "ambigate/evaluators.hpp"

namespace ambigate {

// Input for clarification generation. decision.klass must not be
// NonAmbiguous: feedback exists to repair ambiguous or uncertain commands.
struct FeedbackRequest {
    Instruction instruction;
    std::vector<EvaluatorVerdict> verdicts;
    GateDecision decision;
};

// Per-evaluator fallback wording plus the prompt used on the LLM path.
struct FeedbackTemplates {
    struct Slot {
        std::string factor;      // e.g. "missing situational context"
        std::string suggestion;  // e.g. "the anatomical location involved"
    };

    std::string prompt_text;
    std::map<EvaluatorId, Slot> fallbacks;

    static FeedbackTemplates defaults();

    // Overlays feedback_prompt.txt and feedback_fallbacks.txt from `dir` onto
    // the defaults; either file may be absent.
    static FeedbackTemplates load(const std::filesystem::path& dir);
};

// Evaluator with the maximum score. Ties break by severity:
// CriticalSafety > Contextual > Procedural > Linguistic > CoT.
std::pair<EvaluatorId, double> dominant_factor(const std::vector<EvaluatorVerdict>& verdicts);

// At most `max_sentences` sentences of `text`, splitting on terminal
// punctuation followed by whitespace. Decimal points never end a sentence.
std::string truncate_sentences(const std::string& text, std::size_t max_sentences);

// Clarification message of at most two sentences. Uses `backend` when given;
// any backend failure, or backend == nullptr, falls back to the deterministic
// per-evaluator template. Never throws for backend reasons; throws
// std::invalid_argument when the decision is NonAmbiguous.
std::string generate_feedback(const FeedbackRequest& request, ChatBackend* backend,
                              const FeedbackTemplates& templates);

}  // namespace ambigate
