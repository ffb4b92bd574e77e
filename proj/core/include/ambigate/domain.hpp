#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ambigate/errors.hpp"

namespace ambigate {

inline constexpr std::size_t kEnsembleSize = 5;

// Ground-truth annotation on dataset records.
enum class Label { Ambiguous, NonAmbiguous };

enum class AmbiguityType { Linguistic, Contextual, Procedural, Critical };

enum class EvaluatorId { CoT, Linguistic, Contextual, Procedural, CriticalSafety };

// Final verdict of the gate; Uncertain means neither class could be singled out.
enum class GateClass { Ambiguous, NonAmbiguous, Uncertain };

constexpr std::array<EvaluatorId, kEnsembleSize> all_evaluators() {
    return {EvaluatorId::CoT, EvaluatorId::Linguistic, EvaluatorId::Contextual,
            EvaluatorId::Procedural, EvaluatorId::CriticalSafety};
}

std::string to_string(Label label);
std::string to_string(AmbiguityType type);
std::string to_string(EvaluatorId id);
std::string to_string(GateClass klass);

// Human-oriented name, e.g. "chain-of-thought" and "critical-safety".
std::string display_name(EvaluatorId id);

Label label_from_string(std::string_view s);
AmbiguityType ambiguity_type_from_string(std::string_view s);
EvaluatorId evaluator_id_from_string(std::string_view s);

std::string trim_copy(std::string_view s);

struct Instruction {
    std::string id;
    std::string text;
    std::optional<std::string> context;
    // Only meaningful on dataset records labeled Ambiguous.
    std::optional<AmbiguityType> ambiguity_type;

    // Throws InvariantViolation when the text is blank after trimming.
    void validate() const;
};

struct EvaluatorVerdict {
    EvaluatorId evaluator_id{};
    double score = 0.0;  // [0, 10]
    std::string rationale;
    std::vector<std::string> factors;
};

// Ensemble summary for one instruction. Verdicts are kept in canonical
// evaluator order so downstream output is stable.
struct ScoreProfile {
    double mean = 0.0;
    double variance = 0.0;  // sample variance, divisor n-1 = 4
    std::vector<EvaluatorVerdict> verdicts;
};

struct ConformalConfig {
    double alpha = 0.1;
    double beta = 0.5;

    void validate() const;  // 0 < alpha < 1, beta >= 0
};

struct GateDecision {
    GateClass klass = GateClass::Uncertain;
    double p_ambiguous = 0.0;     // in (0, 1]
    double p_nonambiguous = 0.0;  // in (0, 1]
    double nc_ambiguous = 0.0;
    double nc_nonambiguous = 0.0;
    std::optional<std::string> feedback;
};

// Mean and sample variance of the five scores. Requires exactly one verdict
// per evaluator with every score inside [0, 10]; throws WrongArity,
// DuplicateEvaluator or ScoreOutOfRange otherwise.
ScoreProfile aggregate(std::vector<EvaluatorVerdict> verdicts);

}  // namespace ambigate
