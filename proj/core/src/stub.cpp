#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ambigate/evaluators.hpp"
#include "ambigate/hash.hpp"

namespace ambigate {

namespace {

struct MarkerProfile {
    bool pronoun = false;      // bare deictic reference, no resolvable target
    bool vague = false;        // degree or manner word without a quantity
    bool generic = false;      // target noun naming no specific structure
    bool underspecified = false;  // verb that admits many concrete actions
    bool quantified = false;   // explicit number or measurement unit
    bool risky = false;        // action that can injure tissue if misread

    bool any_ambiguity() const { return pronoun || vague || generic || underspecified; }
};

bool in_list(const std::string& token, std::initializer_list<const char*> words) {
    for (const char* w : words) {
        if (token == w) return true;
    }
    return false;
}

MarkerProfile scan_markers(const std::string& text) {
    MarkerProfile m;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        if (in_list(token, {"it", "that", "this", "them", "those", "these", "there", "here"}))
            m.pronoun = true;
        if (in_list(token, {"slightly", "bit", "little", "more", "less", "gently", "somewhat",
                            "carefully", "roughly", "deeper", "closer"}))
            m.vague = true;
        if (in_list(token, {"tissue", "area", "site", "region", "spot", "target"}))
            m.generic = true;
        if (in_list(token, {"adjust", "fix", "handle", "check", "manage"})) m.underspecified = true;
        if (in_list(token, {"cm", "mm", "ml", "mmhg", "degrees", "percent", "watts", "seconds",
                            "minute", "minutes"}))
            m.quantified = true;
        if (in_list(token, {"cut", "cauterize", "clamp", "inject", "coagulate", "staple",
                            "dissect", "burn"}))
            m.risky = true;
        token.clear();
    };
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            if (std::isdigit(uc)) m.quantified = true;
            token += static_cast<char>(std::tolower(uc));
        } else {
            flush();
        }
    }
    flush();
    return m;
}

// Uniform in [-1, 1), a pure function of (text, evaluator slot, seed).
double deterministic_noise(const std::string& text, std::size_t evaluator_index,
                           std::uint64_t seed) {
    const std::uint64_t h = splitmix64(fnv1a64(text) ^ splitmix64(seed) ^
                                       (0xa0761d6478bd642full * (evaluator_index + 1)));
    return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ", ";
        out += p;
    }
    return out;
}

}  // namespace

std::vector<EvaluatorVerdict> stub_evaluate(const Instruction& instruction, std::uint64_t seed) {
    instruction.validate();
    const MarkerProfile m = scan_markers(instruction.text);
    const bool has_context = instruction.context.has_value() &&
                             !trim_copy(*instruction.context).empty();

    std::vector<EvaluatorVerdict> verdicts;
    verdicts.reserve(kEnsembleSize);
    constexpr auto ids = all_evaluators();
    for (std::size_t i = 0; i < kEnsembleSize; ++i) {
        const EvaluatorId id = ids[i];

        double score = 1.5;
        if (m.pronoun) score += 2.8;
        if (m.vague) score += 2.2;
        if (m.generic) score += 2.0;
        if (m.underspecified) score += 1.2;
        if (m.quantified) score -= 1.2;

        std::vector<std::string> factors;
        auto note = [&](bool present, const char* label) {
            if (present) factors.emplace_back(label);
        };
        switch (id) {
            case EvaluatorId::CoT:
                if (m.any_ambiguity()) score += 0.8;
                note(m.pronoun, "unresolved reference");
                note(m.vague, "vague degree term");
                note(m.generic, "generic target noun");
                note(m.underspecified, "underspecified verb");
                break;
            case EvaluatorId::Linguistic:
                if (m.pronoun) score += 1.6;
                note(m.pronoun, "unresolved reference");
                break;
            case EvaluatorId::Contextual:
                if (!has_context && (m.pronoun || m.generic)) score += 1.6;
                note(!has_context && m.pronoun, "unresolved reference");
                note(!has_context && m.generic, "generic target noun");
                break;
            case EvaluatorId::Procedural:
                if (m.vague) score += 1.6;
                note(m.vague, "vague degree term");
                note(m.underspecified, "underspecified verb");
                break;
            case EvaluatorId::CriticalSafety:
                if (m.risky && (m.pronoun || m.vague || m.generic)) {
                    score += 1.6;
                    factors.emplace_back("risk-laden action");
                }
                break;
        }

        score += deterministic_noise(instruction.text, i, seed);
        if (score < 0.0) score = 0.0;
        if (score > 10.0) score = 10.0;

        // Round-trips through the printed form so rationale and score agree
        // exactly under parse_verdict.
        char printed[32];
        std::snprintf(printed, sizeof(printed), "%.3f", score);
        score = std::strtod(printed, nullptr);

        EvaluatorVerdict v;
        v.evaluator_id = id;
        v.score = score;
        v.rationale = "Deterministic stub assessment for the " + display_name(id) +
                      " evaluator. Markers: " + (factors.empty() ? "none" : join(factors)) +
                      ". Ambiguity Score: " + printed;
        v.factors = std::move(factors);
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

}  // namespace ambigate
