#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ambigate/conformal.hpp"
#include "ambigate/domain.hpp"
#include "ambigate/metrics.hpp"

namespace ambigate {

// One line of a dataset file. ambiguity_type lives on the instruction;
// pair_id links an ambiguous instruction to its clarified counterpart.
struct DatasetRecord {
    Instruction instruction;
    Label label = Label::Ambiguous;
    std::optional<std::string> pair_id;
    std::optional<ScoreProfile> cached_profile;

    void validate() const;
};

// Line-delimited records with keys id, text, context, label, ambiguity_type,
// pair_id, scores. Throws ParseError (with 1-based line) on malformed lines
// and InvariantViolation (with record id) on semantic violations.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

// Inverse of load_dataset: load_dataset(save_dataset(r)) == r.
void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

using ScoreFn = std::function<std::vector<EvaluatorVerdict>(const Instruction&)>;

// Fills cached_profile on every record, reusing cache_path entries matched by
// (id, text) and appending newly scored records line by line, so an
// interrupted run resumes where it stopped.
std::vector<DatasetRecord> score_dataset(std::vector<DatasetRecord> records, const ScoreFn& score,
                                         const std::filesystem::path& cache_path);

// Records with scores, converted for build_calibration. Throws
// InvariantViolation when a record lacks a cached profile.
std::vector<CalibrationExample> to_calibration_examples(const std::vector<DatasetRecord>& records);

// Classifies every evaluation record against `cal` and tallies metrics with
// Ambiguous as the positive class. Uncertain verdicts count against the true
// class and are also reported in uncertain_count. Per-type rows cover the
// ambiguous records of that type plus their pair partners. The evaluation set
// must not share an instruction id with the calibration set.
MetricsReport evaluate_pipeline(const std::vector<DatasetRecord>& eval_records,
                                const CalibrationSet& cal, const ConformalConfig& config);

// Calibration artifact persistence. The artifact stores beta, a fingerprint
// of the source dataset, the per-class statistics and the full examples; load
// rebuilds the statistics from the examples and rejects an artifact whose
// stored statistics disagree with the rebuilt ones.
struct CalibrationArtifact {
    CalibrationSet set;
    std::string source_fingerprint;
};

void save_calibration(const CalibrationSet& cal, const std::string& source_fingerprint,
                      const std::filesystem::path& path);
CalibrationArtifact load_calibration(const std::filesystem::path& path);

}  // namespace ambigate
