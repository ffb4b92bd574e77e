#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ambigate {

// Base class for every failure surfaced by the gate pipeline.
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// aggregate() was handed something other than one verdict per evaluator.
struct WrongArity : GateError {
    explicit WrongArity(std::size_t got)
        : GateError("expected exactly 5 evaluator verdicts, got " + std::to_string(got)) {}
};

struct DuplicateEvaluator : GateError {
    explicit DuplicateEvaluator(const std::string& evaluator)
        : GateError("duplicate verdict for evaluator '" + evaluator + "'") {}
};

struct ScoreOutOfRange : GateError {
    ScoreOutOfRange(const std::string& evaluator, double score)
        : GateError("score " + std::to_string(score) + " from evaluator '" + evaluator +
                    "' is outside [0, 10]") {}
};

struct UnknownTemplate : GateError {
    explicit UnknownTemplate(const std::string& what) : GateError(what) {}
};

// No usable score could be extracted from a model response.
struct UnparseableResponse : GateError {
    explicit UnparseableResponse(const std::string& what) : GateError(what) {}
};

// Transport-level failure talking to the model endpoint, after retries.
struct BackendUnavailable : GateError {
    explicit BackendUnavailable(const std::string& what) : GateError(what) {}
};

// One evaluator could not produce a verdict even though the transport works.
struct EvaluatorFailed : GateError {
    EvaluatorFailed(const std::string& evaluator, const std::string& cause)
        : GateError("evaluator '" + evaluator + "' failed: " + cause), evaluator_name(evaluator) {}
    std::string evaluator_name;
};

struct MissingClass : GateError {
    explicit MissingClass(const std::string& label)
        : GateError("calibration requires at least one example of class '" + label + "'") {}
};

struct BetaMismatch : GateError {
    BetaMismatch(double config_beta, double calibration_beta)
        : GateError("beta mismatch: config uses " + std::to_string(config_beta) +
                    " but the calibration set was built with " + std::to_string(calibration_beta)) {}
};

// Malformed dataset or artifact file; line is 1-based, 0 when not line-addressable.
struct ParseError : GateError {
    ParseError(const std::string& what, std::size_t line_number)
        : GateError(line_number > 0 ? what + " (line " + std::to_string(line_number) + ")" : what),
          line(line_number) {}
    std::size_t line = 0;
};

struct InvariantViolation : GateError {
    InvariantViolation(const std::string& record_id, const std::string& what)
        : GateError("record '" + record_id + "': " + what), record_id(record_id) {}
    std::string record_id;
};

// Evaluation and calibration sets share an instruction id.
struct OverlapError : GateError {
    explicit OverlapError(const std::string& id)
        : GateError("instruction id '" + id + "' appears in both the evaluation and calibration sets") {}
};

}  // namespace ambigate
