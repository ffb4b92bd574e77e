#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ambigate/conformal.hpp"
#include "ambigate/datasets.hpp"
#include "ambigate/domain.hpp"
#include "ambigate/evaluators.hpp"
#include "ambigate/feedback.hpp"
#include "app_config.hpp"

namespace ambigate {

struct ClassifyOutcome {
    Instruction instruction;
    ScoreProfile profile;
    GateDecision decision;
};

// End-to-end gate: evaluator ensemble (stub or live), aggregation, conformal
// classification, feedback. Immutable after open(); safe for concurrent
// classify() calls.
class GatePipeline {
public:
    // Loads the calibration artifact and, in live mode, the prompt templates.
    static GatePipeline open(const AppConfig& config);

    ClassifyOutcome classify_text(const std::string& id, const std::string& text,
                                  const std::optional<std::string>& context) const;

    // Scoring function for datasets, same backend selection as classify_text.
    std::vector<EvaluatorVerdict> score(const Instruction& instruction) const;

    const CalibrationSet& calibration() const { return artifact_.set; }
    const std::string& calibration_fingerprint() const { return artifact_.source_fingerprint; }
    const AppConfig& config() const { return config_; }

private:
    GatePipeline() = default;

    AppConfig config_;
    CalibrationArtifact artifact_;
    FeedbackTemplates feedback_templates_;
    TemplateRegistry templates_;                    // populated in live mode only
    std::shared_ptr<HttpChatBackend> backend_;      // null in stub mode
};

// Human-readable per-instruction report: the five scores, the aggregate, both
// nonconformity values, both p-values, the class, and any feedback.
std::string render_classification_report(const ClassifyOutcome& outcome);

}  // namespace ambigate
