#pragma once

// Shared helpers for the test binaries. Oracles here are deliberately naive
// re-implementations so the production code is checked against independent
// arithmetic, not against itself.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ambigate/conformal.hpp"
#include "ambigate/domain.hpp"
#include "ambigate/evaluators.hpp"
#include "ambigate/hash.hpp"
#include "ambigate/metrics.hpp"

namespace ambigate::testing {

inline std::filesystem::path data_dir() { return std::filesystem::path{AMBIGATE_DATA_DIR}; }

// Unique directory under the system temp root, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        std::random_device rd;
        const auto tag = std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1));
        path_ = std::filesystem::temp_directory_path() / ("ambigate-test-" + tag);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::vector<EvaluatorVerdict> make_verdicts(const std::array<double, kEnsembleSize>& scores) {
    std::vector<EvaluatorVerdict> verdicts;
    std::size_t i = 0;
    for (EvaluatorId id : all_evaluators()) {
        verdicts.push_back(EvaluatorVerdict{id, scores[i++], "", {}});
    }
    return verdicts;
}

inline ScoreProfile make_profile(const std::array<double, kEnsembleSize>& scores) {
    return aggregate(make_verdicts(scores));
}

inline CalibrationExample make_example(const std::string& id, Label label,
                                       const std::array<double, kEnsembleSize>& scores) {
    CalibrationExample ex;
    ex.instruction = Instruction{id, "synthetic instruction " + id, std::nullopt, std::nullopt};
    ex.label = label;
    ex.profile = make_profile(scores);
    return ex;
}

// Counting oracle for the smoothed p-value; quadratic on purpose.
inline double naive_p_value(double nc, const std::vector<double>& distribution) {
    std::size_t count = 0;
    for (double stored : distribution) {
        if (stored >= nc) ++count;
    }
    return static_cast<double>(count + 1) / static_cast<double>(distribution.size() + 1);
}

// Recomputes the four rates from first principles.
struct NaiveRates {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline NaiveRates naive_rates(long tp, long fn, long fp, long tn) {
    NaiveRates r;
    const double total = static_cast<double>(tp + fn + fp + tn);
    if (total > 0) r.accuracy = static_cast<double>(tp + tn) / total;
    if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (r.precision + r.recall > 0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

// Draws five per-evaluator scores around `base`, clamped into [0, 10].
class SyntheticSampler {
public:
    explicit SyntheticSampler(std::uint64_t seed) : rng_(seed) {}

    ScoreProfile profile(double base, double sigma) {
        std::normal_distribution<double> dist(base, sigma);
        std::array<double, kEnsembleSize> scores{};
        for (auto& s : scores) s = std::clamp(dist(rng_), 0.0, 10.0);
        return make_profile(scores);
    }

    std::vector<CalibrationExample> examples(const std::string& prefix, Label label, double base,
                                             double sigma, std::size_t count) {
        std::vector<CalibrationExample> out;
        for (std::size_t i = 0; i < count; ++i) {
            CalibrationExample ex;
            ex.instruction =
                Instruction{prefix + std::to_string(i), "synthetic " + prefix + std::to_string(i),
                            std::nullopt, std::nullopt};
            ex.label = label;
            ex.profile = profile(base, sigma);
            out.push_back(std::move(ex));
        }
        return out;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Scripted chat backend. Each rule maps a prompt substring to a canned
// response; the first matching rule wins. Optional failure injection burns
// down `fail_times` before letting matching prompts through.
class ReplayBackend : public ChatBackend {
public:
    void add_rule(std::string prompt_substring, std::string response) {
        rules_.emplace_back(std::move(prompt_substring), std::move(response));
    }

    void fail_first(std::string prompt_substring, int times, bool transport = false) {
        fail_substring_ = std::move(prompt_substring);
        fail_times_.store(times);
        fail_transport_ = transport;
    }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        calls_.fetch_add(1);
        const std::string& prompt = messages.back().content;
        if (!fail_substring_.empty() && prompt.find(fail_substring_) != std::string::npos) {
            if (fail_times_.fetch_sub(1) > 0) {
                if (fail_transport_) throw BackendUnavailable("injected transport failure");
                throw GateError("injected evaluator failure");
            }
        }
        for (const auto& [needle, response] : rules_) {
            if (prompt.find(needle) != std::string::npos) return response;
        }
        throw GateError("no replay rule matches the prompt");
    }

    int calls() const { return calls_.load(); }

private:
    std::vector<std::pair<std::string, std::string>> rules_;
    std::string fail_substring_;
    std::atomic<int> fail_times_{0};
    bool fail_transport_ = false;
    std::atomic<int> calls_{0};
};

// Five minimal valid templates whose prompts carry a per-evaluator routing
// tag, so ReplayBackend rules can address one evaluator at a time.
inline TemplateRegistry tagged_registry() {
    TemplateRegistry registry;
    for (EvaluatorId id : all_evaluators()) {
        PromptTemplate tpl;
        tpl.evaluator_id = id;
        tpl.system_text = "[tag:" + to_string(id) + "] Rate the instruction: {{instruction}}\n" +
                          "Context: {{context}}";
        tpl.output_schema_hint = "Reply with 'Ambiguity Score: <number>' between 0 and 10.";
        tpl.validate();
        registry.put(std::move(tpl));
    }
    return registry;
}

}  // namespace ambigate::testing
