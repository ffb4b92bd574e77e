#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <memory>

#include "ambigate/datasets.hpp"
#include "ambigate/errors.hpp"
#include "ambigate/hash.hpp"
#include "ambigate/metrics.hpp"
#include "pipeline.hpp"

namespace ambigate {

namespace {

ScoreFn make_score_fn(const AppConfig& config) {
    if (config.stub_mode) {
        const auto seed = config.stub_seed;
        return [seed](const Instruction& i) { return stub_evaluate(i, seed); };
    }
    auto registry = std::make_shared<TemplateRegistry>(TemplateRegistry::load(config.template_dir));
    auto backend = std::make_shared<HttpChatBackend>(config.backend);
    const int retries = config.backend.max_retries;
    return [registry, backend, retries](const Instruction& i) {
        return evaluate_ensemble(i, *registry, *backend, retries);
    };
}

int exit_code_for(GateClass klass) {
    switch (klass) {
        case GateClass::NonAmbiguous: return kExitNonAmbiguous;
        case GateClass::Ambiguous: return kExitAmbiguous;
        case GateClass::Uncertain: return kExitUncertain;
    }
    return kExitOperationalError;
}

std::filesystem::path default_cache_for(const std::filesystem::path& dataset) {
    return std::filesystem::path(dataset.string() + ".scores.jsonl");
}

}  // namespace

int cmd_calibrate(const std::filesystem::path& dataset_path,
                  const std::filesystem::path& out_path,
                  const std::optional<std::filesystem::path>& cache_path, const AppConfig& config,
                  std::ostream& out, std::ostream& err) {
    try {
        auto records = load_dataset(dataset_path);
        records = score_dataset(std::move(records), make_score_fn(config),
                                cache_path.value_or(default_cache_for(dataset_path)));
        const CalibrationSet set =
            build_calibration(to_calibration_examples(records), config.conformal);
        save_calibration(set, file_fingerprint(dataset_path), out_path);
        out << "calibration written: " << out_path.string() << " ("
            << set.examples().size() << " examples: " << set.class_size(Label::Ambiguous)
            << " ambiguous, " << set.class_size(Label::NonAmbiguous)
            << " non-ambiguous; beta " << set.beta() << ")\n";
        return kExitNonAmbiguous;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOperationalError;
    }
}

int cmd_classify(const std::string& text, const std::optional<std::string>& context,
                 const AppConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const GatePipeline pipeline = GatePipeline::open(config);
        const ClassifyOutcome outcome = pipeline.classify_text("cli", text, context);
        out << render_classification_report(outcome);
        return exit_code_for(outcome.decision.klass);
    } catch (const EvaluatorFailed& e) {
        // No complete ensemble: the safe reading of the instruction is the
        // abstaining one.
        err << "error: " << e.what() << "\n";
        out << "class: uncertain\n"
            << "feedback: The instruction could not be fully assessed; please restate it with "
               "an explicit target and explicit parameters.\n";
        return kExitUncertain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOperationalError;
    }
}

int cmd_evaluate(const std::filesystem::path& eval_path,
                 const std::optional<std::filesystem::path>& cache_path,
                 const std::optional<std::filesystem::path>& json_path, const AppConfig& config,
                 std::ostream& out, std::ostream& err) {
    try {
        const CalibrationArtifact artifact = load_calibration(config.calibration_path);
        auto records = load_dataset(eval_path);
        records = score_dataset(std::move(records), make_score_fn(config),
                                cache_path.value_or(default_cache_for(eval_path)));
        const MetricsReport report = evaluate_pipeline(records, artifact.set, config.conformal);
        out << render_metrics_table(report);
        if (json_path) {
            std::ofstream json_out(*json_path, std::ios::binary | std::ios::trunc);
            if (!json_out) {
                throw GateError("cannot write report: " + json_path->string());
            }
            json_out << metrics_to_json(report) << '\n';
        }
        return kExitNonAmbiguous;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOperationalError;
    }
}

int cmd_repl(const AppConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
    std::optional<GatePipeline> pipeline;
    try {
        pipeline = GatePipeline::open(config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOperationalError;
    }

    out << "instruction gate; enter an instruction per line, end with ctrl-d\n";
    std::string line;
    std::size_t turn = 0;
    while (true) {
        out << "instruction> " << std::flush;
        if (!std::getline(in, line)) break;
        const std::string text = trim_copy(line);
        if (text.empty()) continue;
        ++turn;
        try {
            const ClassifyOutcome outcome =
                pipeline->classify_text("repl-" + std::to_string(turn), text, std::nullopt);
            out << render_classification_report(outcome) << "\n";
        } catch (const EvaluatorFailed& e) {
            err << "error: " << e.what() << "\n";
            out << "class: uncertain\n\n";
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
        }
    }
    out << "\n";
    return kExitNonAmbiguous;
}

}  // namespace ambigate
