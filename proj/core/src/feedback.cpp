#include "ambigate/feedback.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ambigate/errors.hpp"

namespace ambigate {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos;
         pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

int severity_rank(EvaluatorId id) {
    switch (id) {
        case EvaluatorId::CriticalSafety: return 0;
        case EvaluatorId::Contextual: return 1;
        case EvaluatorId::Procedural: return 2;
        case EvaluatorId::Linguistic: return 3;
        case EvaluatorId::CoT: return 4;
    }
    return 4;
}

std::string render_verdict_lines(const std::vector<EvaluatorVerdict>& verdicts) {
    std::string out;
    for (const auto& v : verdicts) {
        char score_buf[32];
        std::snprintf(score_buf, sizeof(score_buf), "%.1f", v.score);
        out += "- " + display_name(v.evaluator_id) + ": score " + score_buf;
        if (!v.factors.empty()) {
            out += "; factors: ";
            for (std::size_t i = 0; i < v.factors.size(); ++i) {
                if (i > 0) out += ", ";
                out += v.factors[i];
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace

FeedbackTemplates FeedbackTemplates::defaults() {
    FeedbackTemplates t;
    t.prompt_text =
        "A surgical robot received this operator instruction and the safety gate flagged it "
        "for clarification.\n"
        "Instruction: {{instruction}}\n"
        "Context: {{context}}\n"
        "The strongest concern came from the {{factor}} evaluator. Evaluator findings:\n"
        "{{verdicts}}\n"
        "Write a clarification request for the operator: at most two sentences, naming what is "
        "unclear and asking for the one concrete detail that would make the instruction safe to "
        "execute. Reply with the message only.";
    t.fallbacks = {
        {EvaluatorId::CoT,
         {"multiple plausible interpretations", "the intended action and its exact target"}},
        {EvaluatorId::Linguistic,
         {"an unresolved reference", "which structure or instrument is meant"}},
        {EvaluatorId::Contextual,
         {"missing situational context", "the anatomical location involved"}},
        {EvaluatorId::Procedural,
         {"an underspecified parameter", "the exact distance, direction, or amount"}},
        {EvaluatorId::CriticalSafety,
         {"a safety-critical reading", "the precise target and the margins to respect"}},
    };
    return t;
}

FeedbackTemplates FeedbackTemplates::load(const std::filesystem::path& dir) {
    FeedbackTemplates t = defaults();

    if (std::ifstream in{dir / "feedback_prompt.txt", std::ios::binary}) {
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string text = trim_copy(buf.str());
        if (!text.empty()) t.prompt_text = text;
    }

    const std::filesystem::path fallback_path = dir / "feedback_fallbacks.txt";
    if (std::ifstream in{fallback_path, std::ios::binary}) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::string trimmed = trim_copy(line);
            if (trimmed.empty() || trimmed[0] == '#') continue;
            const std::size_t first = trimmed.find('|');
            const std::size_t second = first == std::string::npos
                                           ? std::string::npos
                                           : trimmed.find('|', first + 1);
            if (second == std::string::npos) {
                throw ParseError(fallback_path.string() +
                                     ": expected '<evaluator>|<factor>|<suggestion>'",
                                 line_no);
            }
            const EvaluatorId id = evaluator_id_from_string(trim_copy(trimmed.substr(0, first)));
            t.fallbacks[id] = {trim_copy(trimmed.substr(first + 1, second - first - 1)),
                               trim_copy(trimmed.substr(second + 1))};
        }
    }
    return t;
}

std::pair<EvaluatorId, double> dominant_factor(const std::vector<EvaluatorVerdict>& verdicts) {
    if (verdicts.size() != kEnsembleSize) {
        throw WrongArity(verdicts.size());
    }
    const EvaluatorVerdict* best = &verdicts.front();
    for (const auto& v : verdicts) {
        if (v.score > best->score ||
            (v.score == best->score &&
             severity_rank(v.evaluator_id) < severity_rank(best->evaluator_id))) {
            best = &v;
        }
    }
    return {best->evaluator_id, best->score};
}

std::string truncate_sentences(const std::string& text, std::size_t max_sentences) {
    if (max_sentences == 0) return "";
    std::size_t seen = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_end = i + 1 == text.size();
        const bool before_space =
            !at_end && std::isspace(static_cast<unsigned char>(text[i + 1])) != 0;
        if (!at_end && !before_space) continue;
        ++seen;
        if (seen == max_sentences && !at_end) {
            return text.substr(0, i + 1);
        }
    }
    return text;
}

std::string generate_feedback(const FeedbackRequest& request, ChatBackend* backend,
                              const FeedbackTemplates& templates) {
    if (request.decision.klass == GateClass::NonAmbiguous) {
        throw std::invalid_argument("feedback is only generated for ambiguous or uncertain gates");
    }
    const auto [dominant_id, dominant_score] = dominant_factor(request.verdicts);
    (void)dominant_score;

    if (backend != nullptr) {
        try {
            std::string prompt = templates.prompt_text;
            replace_all(prompt, "{{instruction}}", request.instruction.text);
            replace_all(prompt, "{{context}}",
                        request.instruction.context ? *request.instruction.context
                                                    : "(no additional context provided)");
            replace_all(prompt, "{{factor}}", display_name(dominant_id));
            replace_all(prompt, "{{verdicts}}", render_verdict_lines(request.verdicts));

            const std::string reply = trim_copy(backend->complete({{"user", prompt}}));
            if (!reply.empty()) {
                return truncate_sentences(reply, 2);
            }
        } catch (...) {
            // Fall through: feedback must always be produced.
        }
    }

    const auto it = templates.fallbacks.find(dominant_id);
    const FeedbackTemplates::Slot slot =
        it != templates.fallbacks.end()
            ? it->second
            : FeedbackTemplates::Slot{"an ambiguity", "the missing detail"};
    return "This instruction may be ambiguous (" + slot.factor + "); please specify " +
           slot.suggestion + ".";
}

}  // namespace ambigate
