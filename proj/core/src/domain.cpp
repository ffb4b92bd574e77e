#include "ambigate/domain.hpp"

#include <algorithm>
#include <cctype>

namespace ambigate {

std::string to_string(Label label) {
    return label == Label::Ambiguous ? "ambiguous" : "non-ambiguous";
}

std::string to_string(AmbiguityType type) {
    switch (type) {
        case AmbiguityType::Linguistic: return "linguistic";
        case AmbiguityType::Contextual: return "contextual";
        case AmbiguityType::Procedural: return "procedural";
        case AmbiguityType::Critical: return "critical";
    }
    return "linguistic";
}

std::string to_string(EvaluatorId id) {
    switch (id) {
        case EvaluatorId::CoT: return "cot";
        case EvaluatorId::Linguistic: return "linguistic";
        case EvaluatorId::Contextual: return "contextual";
        case EvaluatorId::Procedural: return "procedural";
        case EvaluatorId::CriticalSafety: return "critical_safety";
    }
    return "cot";
}

std::string to_string(GateClass klass) {
    switch (klass) {
        case GateClass::Ambiguous: return "ambiguous";
        case GateClass::NonAmbiguous: return "non-ambiguous";
        case GateClass::Uncertain: return "uncertain";
    }
    return "uncertain";
}

std::string display_name(EvaluatorId id) {
    switch (id) {
        case EvaluatorId::CoT: return "chain-of-thought";
        case EvaluatorId::Linguistic: return "linguistic";
        case EvaluatorId::Contextual: return "contextual";
        case EvaluatorId::Procedural: return "procedural";
        case EvaluatorId::CriticalSafety: return "critical-safety";
    }
    return "chain-of-thought";
}

Label label_from_string(std::string_view s) {
    if (s == "ambiguous") return Label::Ambiguous;
    if (s == "non-ambiguous") return Label::NonAmbiguous;
    throw GateError("unknown label '" + std::string(s) + "'");
}

AmbiguityType ambiguity_type_from_string(std::string_view s) {
    if (s == "linguistic") return AmbiguityType::Linguistic;
    if (s == "contextual") return AmbiguityType::Contextual;
    if (s == "procedural") return AmbiguityType::Procedural;
    if (s == "critical") return AmbiguityType::Critical;
    throw GateError("unknown ambiguity type '" + std::string(s) + "'");
}

EvaluatorId evaluator_id_from_string(std::string_view s) {
    if (s == "cot") return EvaluatorId::CoT;
    if (s == "linguistic") return EvaluatorId::Linguistic;
    if (s == "contextual") return EvaluatorId::Contextual;
    if (s == "procedural") return EvaluatorId::Procedural;
    if (s == "critical_safety") return EvaluatorId::CriticalSafety;
    throw GateError("unknown evaluator id '" + std::string(s) + "'");
}

std::string trim_copy(std::string_view s) {
    auto begin = s.begin();
    auto end = s.end();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
    return std::string(begin, end);
}

void Instruction::validate() const {
    if (trim_copy(text).empty()) {
        throw InvariantViolation(id.empty() ? "<unnamed>" : id, "instruction text is empty");
    }
}

void ConformalConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw GateError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    if (!(beta >= 0.0)) {
        throw GateError("beta must be >= 0, got " + std::to_string(beta));
    }
}

ScoreProfile aggregate(std::vector<EvaluatorVerdict> verdicts) {
    if (verdicts.size() != kEnsembleSize) {
        throw WrongArity(verdicts.size());
    }
    std::sort(verdicts.begin(), verdicts.end(), [](const auto& a, const auto& b) {
        return static_cast<int>(a.evaluator_id) < static_cast<int>(b.evaluator_id);
    });
    for (std::size_t i = 1; i < verdicts.size(); ++i) {
        if (verdicts[i].evaluator_id == verdicts[i - 1].evaluator_id) {
            throw DuplicateEvaluator(to_string(verdicts[i].evaluator_id));
        }
    }
    for (const auto& v : verdicts) {
        if (!(v.score >= 0.0 && v.score <= 10.0)) {
            throw ScoreOutOfRange(to_string(v.evaluator_id), v.score);
        }
    }

    // Summation runs in canonical evaluator order, so any permutation of the
    // input yields bit-identical results.
    double sum = 0.0;
    for (const auto& v : verdicts) sum += v.score;
    const double mean = sum / static_cast<double>(kEnsembleSize);

    double ss = 0.0;
    for (const auto& v : verdicts) {
        const double d = v.score - mean;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(kEnsembleSize - 1);

    ScoreProfile profile;
    profile.mean = mean;
    profile.variance = variance;
    profile.verdicts = std::move(verdicts);
    return profile;
}

}  // namespace ambigate
