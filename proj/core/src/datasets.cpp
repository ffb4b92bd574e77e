#include "ambigate/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ambigate/errors.hpp"

namespace ambigate {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string>& allowed_keys() {
    static const std::set<std::string> keys{"id",             "text",    "context", "label",
                                            "ambiguity_type", "pair_id", "scores"};
    return keys;
}

std::string require_string(const ordered_json& j, const char* key, std::size_t line) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw ParseError(std::string("missing or non-string field '") + key + "'", line);
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& j, const char* key,
                                           std::size_t line) {
    const auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_string()) {
        throw ParseError(std::string("field '") + key + "' must be a string", line);
    }
    return it->get<std::string>();
}

DatasetRecord record_from_json(const ordered_json& j, std::size_t line) {
    if (!j.is_object()) {
        throw ParseError("record is not a JSON object", line);
    }
    for (const auto& item : j.items()) {
        if (allowed_keys().count(item.key()) == 0) {
            throw ParseError("unknown field '" + item.key() + "'", line);
        }
    }

    DatasetRecord rec;
    rec.instruction.id = require_string(j, "id", line);
    if (trim_copy(rec.instruction.id).empty()) {
        throw ParseError("field 'id' must be non-empty", line);
    }
    rec.instruction.text = require_string(j, "text", line);
    rec.instruction.context = optional_string(j, "context", line);
    try {
        rec.label = label_from_string(require_string(j, "label", line));
        if (const auto type = optional_string(j, "ambiguity_type", line)) {
            rec.instruction.ambiguity_type = ambiguity_type_from_string(*type);
        }
    } catch (const ParseError&) {
        throw;
    } catch (const GateError& e) {
        throw ParseError(e.what(), line);
    }
    rec.pair_id = optional_string(j, "pair_id", line);

    if (const auto it = j.find("scores"); it != j.end()) {
        if (!it->is_array() || it->size() != kEnsembleSize) {
            throw ParseError("field 'scores' must be an array of 5 numbers", line);
        }
        std::vector<EvaluatorVerdict> verdicts;
        verdicts.reserve(kEnsembleSize);
        constexpr auto ids = all_evaluators();
        for (std::size_t i = 0; i < kEnsembleSize; ++i) {
            const auto& cell = (*it)[i];
            if (!cell.is_number()) {
                throw ParseError("field 'scores' must be an array of 5 numbers", line);
            }
            EvaluatorVerdict v;
            v.evaluator_id = ids[i];
            v.score = cell.get<double>();
            verdicts.push_back(std::move(v));
        }
        try {
            rec.cached_profile = aggregate(std::move(verdicts));
        } catch (const GateError& e) {
            throw InvariantViolation(rec.instruction.id, e.what());
        }
    }

    rec.validate();
    return rec;
}

ordered_json record_to_json(const DatasetRecord& rec) {
    ordered_json j;
    j["id"] = rec.instruction.id;
    j["text"] = rec.instruction.text;
    if (rec.instruction.context) j["context"] = *rec.instruction.context;
    j["label"] = to_string(rec.label);
    if (rec.instruction.ambiguity_type) j["ambiguity_type"] = to_string(*rec.instruction.ambiguity_type);
    if (rec.pair_id) j["pair_id"] = *rec.pair_id;
    if (rec.cached_profile) {
        ordered_json scores = ordered_json::array();
        for (const auto& v : rec.cached_profile->verdicts) scores.push_back(v.score);
        j["scores"] = std::move(scores);
    }
    return j;
}

ordered_json parse_json_line(const std::string& line, std::size_t line_no) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("invalid JSON", line_no);
    }
    return j;
}

}  // namespace

void DatasetRecord::validate() const {
    instruction.validate();
    if (instruction.ambiguity_type && label != Label::Ambiguous) {
        throw InvariantViolation(instruction.id,
                                 "ambiguity_type is only valid on ambiguous records");
    }
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open dataset: " + path.string(), 0);
    }
    std::vector<DatasetRecord> records;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_copy(line).empty()) continue;
        DatasetRecord rec = record_from_json(parse_json_line(line, line_no), line_no);
        if (!seen_ids.insert(rec.instruction.id).second) {
            throw InvariantViolation(rec.instruction.id, "duplicate record id");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) {
        throw ParseError("dataset contains no records: " + path.string(), 0);
    }
    return records;
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw GateError("cannot write dataset: " + path.string());
    }
    for (const auto& rec : records) {
        rec.validate();
        out << record_to_json(rec).dump() << '\n';
    }
    if (!out) {
        throw GateError("failed while writing dataset: " + path.string());
    }
}

std::vector<DatasetRecord> score_dataset(std::vector<DatasetRecord> records, const ScoreFn& score,
                                         const std::filesystem::path& cache_path) {
    std::map<std::string, ScoreProfile> cache;
    std::error_code ec;
    if (std::filesystem::exists(cache_path, ec) &&
        std::filesystem::file_size(cache_path, ec) > 0) {
        for (auto& rec : load_dataset(cache_path)) {
            if (rec.cached_profile) {
                cache.emplace(rec.instruction.id + '\n' + rec.instruction.text,
                              std::move(*rec.cached_profile));
            }
        }
    }

    std::optional<std::ofstream> out;
    for (auto& rec : records) {
        if (rec.cached_profile) continue;
        const std::string key = rec.instruction.id + '\n' + rec.instruction.text;
        if (const auto it = cache.find(key); it != cache.end()) {
            rec.cached_profile = it->second;
            continue;
        }
        rec.cached_profile = aggregate(score(rec.instruction));
        if (!out) {
            out.emplace(cache_path, std::ios::binary | std::ios::app);
            if (!*out) {
                throw GateError("cannot open score cache for writing: " + cache_path.string());
            }
        }
        // One flushed line per record: an interrupted run leaves a loadable
        // cache prefix behind.
        *out << record_to_json(rec).dump() << '\n';
        out->flush();
        if (!*out) {
            throw GateError("failed while writing score cache: " + cache_path.string());
        }
    }
    return records;
}

std::vector<CalibrationExample> to_calibration_examples(
    const std::vector<DatasetRecord>& records) {
    std::vector<CalibrationExample> examples;
    examples.reserve(records.size());
    for (const auto& rec : records) {
        rec.validate();
        if (!rec.cached_profile) {
            throw InvariantViolation(rec.instruction.id,
                                     "record lacks scores; run scoring before calibrating");
        }
        examples.push_back({rec.instruction, rec.label, *rec.cached_profile});
    }
    return examples;
}

MetricsReport evaluate_pipeline(const std::vector<DatasetRecord>& eval_records,
                                const CalibrationSet& cal, const ConformalConfig& config) {
    config.validate();

    std::set<std::string> calibration_ids;
    for (const auto& ex : cal.examples()) calibration_ids.insert(ex.instruction.id);
    for (const auto& rec : eval_records) {
        if (calibration_ids.count(rec.instruction.id) > 0) {
            throw OverlapError(rec.instruction.id);
        }
    }

    struct Row {
        const DatasetRecord* rec;
        GateClass klass;
    };
    std::vector<Row> rows;
    rows.reserve(eval_records.size());
    for (const auto& rec : eval_records) {
        rec.validate();
        if (!rec.cached_profile) {
            throw InvariantViolation(rec.instruction.id,
                                     "record lacks scores; run scoring before evaluating");
        }
        if (rec.label == Label::Ambiguous) {
            if (!rec.instruction.ambiguity_type) {
                throw InvariantViolation(rec.instruction.id,
                                         "ambiguous evaluation record lacks ambiguity_type");
            }
            if (!rec.pair_id) {
                throw InvariantViolation(rec.instruction.id,
                                         "ambiguous evaluation record lacks pair_id");
            }
        }
        rows.push_back({&rec, classify(*rec.cached_profile, cal, config).klass});
    }

    std::map<std::string, const Row*> partner_by_pair;
    std::set<std::string> ambiguous_pairs;
    for (const auto& row : rows) {
        if (!row.rec->pair_id) continue;
        if (row.rec->label == Label::NonAmbiguous) {
            if (!partner_by_pair.emplace(*row.rec->pair_id, &row).second) {
                throw InvariantViolation(row.rec->instruction.id,
                                         "pair_id '" + *row.rec->pair_id +
                                             "' is shared by two non-ambiguous records");
            }
        } else if (!ambiguous_pairs.insert(*row.rec->pair_id).second) {
            throw InvariantViolation(row.rec->instruction.id,
                                     "pair_id '" + *row.rec->pair_id +
                                         "' is shared by two ambiguous records");
        }
    }

    const auto tally = [](ConfusionCounts& c, const Row& row) {
        if (row.rec->label == Label::Ambiguous) {
            if (row.klass == GateClass::Ambiguous) {
                ++c.tp;
            } else {
                ++c.fn;
            }
        } else {
            if (row.klass == GateClass::NonAmbiguous) {
                ++c.tn;
            } else {
                ++c.fp;
            }
        }
    };

    MetricsReport report;
    for (const auto& row : rows) {
        tally(report.confusion, row);
        if (row.klass == GateClass::Uncertain) ++report.uncertain_count;
    }

    std::map<AmbiguityType, ConfusionCounts> per_type_counts;
    for (const auto& row : rows) {
        if (row.rec->label != Label::Ambiguous) continue;
        const auto partner = partner_by_pair.find(*row.rec->pair_id);
        if (partner == partner_by_pair.end()) {
            throw InvariantViolation(row.rec->instruction.id,
                                     "no non-ambiguous partner for pair_id '" +
                                         *row.rec->pair_id + "'");
        }
        ConfusionCounts& counts = per_type_counts[*row.rec->instruction.ambiguity_type];
        tally(counts, row);
        tally(counts, *partner->second);
    }
    for (const auto& [type, counts] : per_type_counts) {
        report.per_type.emplace(type, compute_metrics(counts));
    }

    const ClassMetrics total = compute_metrics(report.confusion);
    report.accuracy = total.accuracy;
    report.precision = total.precision;
    report.recall = total.recall;
    report.f1 = total.f1;
    return report;
}

void save_calibration(const CalibrationSet& cal, const std::string& source_fingerprint,
                      const std::filesystem::path& path) {
    ordered_json j;
    j["version"] = 1;
    j["beta"] = cal.beta();
    j["source_fingerprint"] = source_fingerprint;
    for (Label label : {Label::Ambiguous, Label::NonAmbiguous}) {
        ordered_json stats;
        stats["mean"] = cal.class_mean(label);
        stats["nc"] = cal.nc_distribution(label);
        j["class_stats"][to_string(label)] = std::move(stats);
    }
    ordered_json examples = ordered_json::array();
    for (const auto& ex : cal.examples()) {
        DatasetRecord rec;
        rec.instruction = ex.instruction;
        rec.label = ex.label;
        rec.cached_profile = ex.profile;
        examples.push_back(record_to_json(rec));
    }
    j["examples"] = std::move(examples);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw GateError("cannot write calibration artifact: " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw GateError("failed while writing calibration artifact: " + path.string());
    }
}

CalibrationArtifact load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open calibration artifact: " + path.string(), 0);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ordered_json j = ordered_json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("calibration artifact is not valid JSON: " + path.string(), 0);
    }

    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1) {
        throw ParseError("unsupported calibration artifact version", 0);
    }
    if (!j.contains("beta") || !j["beta"].is_number()) {
        throw ParseError("calibration artifact lacks beta", 0);
    }
    if (!j.contains("examples") || !j["examples"].is_array() || j["examples"].empty()) {
        throw ParseError("calibration artifact lacks examples", 0);
    }

    CalibrationArtifact artifact;
    artifact.source_fingerprint =
        j.contains("source_fingerprint") && j["source_fingerprint"].is_string()
            ? j["source_fingerprint"].get<std::string>()
            : "";

    std::vector<DatasetRecord> records;
    records.reserve(j["examples"].size());
    for (const auto& item : j["examples"]) {
        records.push_back(record_from_json(item, 0));
    }

    ConformalConfig config;
    config.beta = j["beta"].get<double>();
    artifact.set = build_calibration(to_calibration_examples(records), config);

    // The stored statistics are redundant with the examples; a disagreement
    // means the artifact was edited or corrupted.
    if (j.contains("class_stats")) {
        for (Label label : {Label::Ambiguous, Label::NonAmbiguous}) {
            const auto& stats = j["class_stats"][to_string(label)];
            const double stored_mean = stats.at("mean").get<double>();
            const auto stored_nc = stats.at("nc").get<std::vector<double>>();
            const auto& rebuilt_nc = artifact.set.nc_distribution(label);
            bool consistent = std::abs(stored_mean - artifact.set.class_mean(label)) <= 1e-12 &&
                              stored_nc.size() == rebuilt_nc.size();
            for (std::size_t i = 0; consistent && i < stored_nc.size(); ++i) {
                consistent = std::abs(stored_nc[i] - rebuilt_nc[i]) <= 1e-12;
            }
            if (!consistent) {
                throw ParseError(
                    "calibration artifact statistics do not match its examples: " + path.string(),
                    0);
            }
        }
    }
    return artifact;
}

}  // namespace ambigate
