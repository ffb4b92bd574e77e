#include "pipeline.hpp"

#include <cstdio>

namespace ambigate {

GatePipeline GatePipeline::open(const AppConfig& config) {
    config.conformal.validate();

    GatePipeline pipeline;
    pipeline.config_ = config;
    pipeline.artifact_ = load_calibration(config.calibration_path);
    if (config.conformal.beta != pipeline.artifact_.set.beta()) {
        throw BetaMismatch(config.conformal.beta, pipeline.artifact_.set.beta());
    }
    pipeline.feedback_templates_ = std::filesystem::is_directory(config.template_dir)
                                       ? FeedbackTemplates::load(config.template_dir)
                                       : FeedbackTemplates::defaults();
    if (!config.stub_mode) {
        pipeline.templates_ = TemplateRegistry::load(config.template_dir);
        pipeline.backend_ = std::make_shared<HttpChatBackend>(config.backend);
    }
    return pipeline;
}

std::vector<EvaluatorVerdict> GatePipeline::score(const Instruction& instruction) const {
    if (config_.stub_mode) {
        return stub_evaluate(instruction, config_.stub_seed);
    }
    return evaluate_ensemble(instruction, templates_, *backend_, config_.backend.max_retries);
}

ClassifyOutcome GatePipeline::classify_text(const std::string& id, const std::string& text,
                                            const std::optional<std::string>& context) const {
    ClassifyOutcome outcome;
    outcome.instruction = Instruction{id, text, context, std::nullopt};
    outcome.instruction.validate();
    outcome.profile = aggregate(score(outcome.instruction));
    outcome.decision = classify(outcome.profile, artifact_.set, config_.conformal);
    if (outcome.decision.klass != GateClass::NonAmbiguous) {
        FeedbackRequest request{outcome.instruction, outcome.profile.verdicts, outcome.decision};
        outcome.decision.feedback =
            generate_feedback(request, backend_.get(), feedback_templates_);
    }
    return outcome;
}

std::string render_classification_report(const ClassifyOutcome& outcome) {
    char buf[256];
    std::string out;
    out += "instruction: " + outcome.instruction.text + "\n";
    if (outcome.instruction.context) {
        out += "context: " + *outcome.instruction.context + "\n";
    }
    out += "evaluator scores:\n";
    for (const auto& v : outcome.profile.verdicts) {
        std::snprintf(buf, sizeof(buf), "  %-16s %6.3f\n", display_name(v.evaluator_id).c_str(),
                      v.score);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "mean: %.4f  variance: %.4f\n", outcome.profile.mean,
                  outcome.profile.variance);
    out += buf;
    std::snprintf(buf, sizeof(buf), "nonconformity: ambiguous=%.4f non-ambiguous=%.4f\n",
                  outcome.decision.nc_ambiguous, outcome.decision.nc_nonambiguous);
    out += buf;
    std::snprintf(buf, sizeof(buf), "p-values: ambiguous=%.4f non-ambiguous=%.4f\n",
                  outcome.decision.p_ambiguous, outcome.decision.p_nonambiguous);
    out += buf;
    out += "class: " + to_string(outcome.decision.klass) + "\n";
    if (outcome.decision.feedback) {
        out += "feedback: " + *outcome.decision.feedback + "\n";
    }
    return out;
}

}  // namespace ambigate
