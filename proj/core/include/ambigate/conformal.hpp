#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ambigate/domain.hpp"

namespace ambigate {

struct CalibrationExample {
    Instruction instruction;
    Label label = Label::Ambiguous;
    ScoreProfile profile;

    void validate() const;
};

// Labeled examples plus per-class statistics. Nonconformity distributions are
// kept sorted ascending so p-values reduce to a binary search.
class CalibrationSet {
public:
    CalibrationSet() = default;

    double beta() const { return beta_; }
    double class_mean(Label label) const { return class_mean_[index_of(label)]; }
    const std::vector<double>& nc_distribution(Label label) const {
        return nc_distribution_[index_of(label)];
    }
    std::size_t class_size(Label label) const { return nc_distribution_[index_of(label)].size(); }
    const std::vector<CalibrationExample>& examples() const { return examples_; }

    static std::size_t index_of(Label label) {
        return label == Label::Ambiguous ? 0 : 1;
    }

private:
    friend CalibrationSet build_calibration(std::vector<CalibrationExample> examples,
                                            const ConformalConfig& config);

    std::vector<CalibrationExample> examples_;
    std::array<double, 2> class_mean_{0.0, 0.0};
    std::array<std::vector<double>, 2> nc_distribution_;
    double beta_ = 0.0;
};

// Builds per-class means and sorted nonconformity distributions with
// config.beta. Every label must be represented at least once. The result does
// not depend on the input order of `examples`.
CalibrationSet build_calibration(std::vector<CalibrationExample> examples,
                                 const ConformalConfig& config);

// |profile.mean - class mean| + config.beta * profile.variance. config.beta
// must equal the beta the calibration set was built with.
double nonconformity(const ScoreProfile& profile, Label hypothesis, const CalibrationSet& cal,
                     const ConformalConfig& config);

// Smoothed empirical p-value: (#{stored nc >= nc} + 1) / (class size + 1).
// Always in (0, 1].
double p_value(double nc, Label hypothesis, const CalibrationSet& cal);

// Two-sided decision rule. A class is rejected when its p-value is <= alpha;
// exactly one surviving class yields that class, anything else is Uncertain.
GateClass decide(double p_ambiguous, double p_nonambiguous, const ConformalConfig& config);

// Full conformal classification of one score profile. Feedback is left unset.
GateDecision classify(const ScoreProfile& profile, const CalibrationSet& cal,
                      const ConformalConfig& config);

}  // namespace ambigate
