#include <algorithm>
#include <array>
#include <cctype>
#include <exception>
#include <future>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "ambigate/errors.hpp"
#include "ambigate/evaluators.hpp"

namespace ambigate {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Last number in the text that stands on its own (not part of a word, a
// version string or a signed value) and already lies inside [0, 10].
std::optional<double> last_standalone_in_range(const std::string& s) {
    std::optional<double> result;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_digit(s[i])) {
            ++i;
            continue;
        }
        const bool bad_prefix =
            i > 0 && (is_alnum(s[i - 1]) || s[i - 1] == '.' || s[i - 1] == '-' || s[i - 1] == '+');
        std::size_t j = i;
        while (j < s.size() && is_digit(s[j])) ++j;
        if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
            ++j;
            while (j < s.size() && is_digit(s[j])) ++j;
        }
        const bool bad_suffix =
            j < s.size() &&
            (is_alnum(s[j]) || (s[j] == '.' && j + 1 < s.size() && is_digit(s[j + 1])));
        if (!bad_prefix && !bad_suffix) {
            const double value = std::stod(s.substr(i, j - i));
            if (value >= 0.0 && value <= 10.0) result = value;
        }
        i = j;
        // Skip any residual run so inner digits of a rejected token are not
        // re-matched as fresh numbers.
        while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
    }
    return result;
}

std::vector<std::string> extract_factors(const std::string& s) {
    std::vector<std::string> factors;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == std::string::npos) end = s.size();
        std::string line = trim_copy(s.substr(start, end - start));
        std::string item;
        if (line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0) {
            item = line.substr(2);
        } else if (line.rfind("\xe2\x80\xa2", 0) == 0) {
            item = line.substr(3);
        }
        item = trim_copy(item);
        if (!item.empty()) factors.push_back(std::move(item));
        if (end == s.size()) break;
        start = end + 1;
    }
    return factors;
}

}  // namespace

EvaluatorVerdict parse_verdict(EvaluatorId evaluator_id, const std::string& raw_response) {
    static const std::regex labeled(R"(\bscore[ \t:=]*([-+]?\d+(?:\.\d+)?))",
                                    std::regex::icase | std::regex::optimize);

    std::optional<double> score;
    for (auto it = std::sregex_iterator(raw_response.begin(), raw_response.end(), labeled);
         it != std::sregex_iterator(); ++it) {
        score = std::stod((*it)[1].str());
    }
    if (score) {
        score = std::clamp(*score, 0.0, 10.0);
    } else {
        score = last_standalone_in_range(raw_response);
    }
    if (!score) {
        throw UnparseableResponse("no usable 0-10 score in response from evaluator '" +
                                  to_string(evaluator_id) + "'");
    }

    EvaluatorVerdict verdict;
    verdict.evaluator_id = evaluator_id;
    verdict.score = *score;
    verdict.rationale = raw_response;
    verdict.factors = extract_factors(raw_response);
    return verdict;
}

std::vector<EvaluatorVerdict> evaluate_ensemble(const Instruction& instruction,
                                                const TemplateRegistry& templates,
                                                ChatBackend& backend, int max_retries) {
    instruction.validate();
    if (max_retries < 0) {
        throw GateError("max_retries must be >= 0");
    }

    constexpr auto ids = all_evaluators();
    std::array<std::future<EvaluatorVerdict>, kEnsembleSize> futures;
    for (std::size_t i = 0; i < kEnsembleSize; ++i) {
        const EvaluatorId id = ids[i];
        futures[i] = std::async(std::launch::async, [&, id]() -> EvaluatorVerdict {
            const std::string prompt = render_prompt(templates.get(id), instruction);
            const std::vector<ChatMessage> messages{{"user", prompt}};
            std::exception_ptr last_error;
            for (int attempt = 0; attempt <= max_retries; ++attempt) {
                try {
                    return parse_verdict(id, backend.complete(messages));
                } catch (...) {
                    last_error = std::current_exception();
                }
            }
            std::rethrow_exception(last_error);
        });
    }

    std::vector<EvaluatorVerdict> verdicts;
    verdicts.reserve(kEnsembleSize);
    std::array<std::exception_ptr, kEnsembleSize> errors{};
    for (std::size_t i = 0; i < kEnsembleSize; ++i) {
        try {
            verdicts.push_back(futures[i].get());
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    // Transport failures dominate: they mean no evaluator result is
    // trustworthy, not just the one that happened to fail first.
    for (const auto& error : errors) {
        if (!error) continue;
        try {
            std::rethrow_exception(error);
        } catch (const BackendUnavailable&) {
            throw;
        } catch (...) {
        }
    }
    for (std::size_t i = 0; i < kEnsembleSize; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw EvaluatorFailed(to_string(ids[i]), e.what());
        } catch (...) {
            throw EvaluatorFailed(to_string(ids[i]), "unknown error");
        }
    }
    return verdicts;
}

}  // namespace ambigate
