#include "ambigate/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "ambigate/errors.hpp"

namespace ambigate {

void CalibrationExample::validate() const {
    instruction.validate();
    if (profile.verdicts.size() != kEnsembleSize) {
        throw InvariantViolation(instruction.id, "calibration example lacks a full score profile");
    }
}

CalibrationSet build_calibration(std::vector<CalibrationExample> examples,
                                 const ConformalConfig& config) {
    config.validate();
    for (const auto& ex : examples) {
        ex.validate();
    }

    CalibrationSet cal;
    cal.beta_ = config.beta;

    std::array<std::vector<double>, 2> means_by_class;
    for (const auto& ex : examples) {
        means_by_class[CalibrationSet::index_of(ex.label)].push_back(ex.profile.mean);
    }
    for (Label label : {Label::Ambiguous, Label::NonAmbiguous}) {
        auto& means = means_by_class[CalibrationSet::index_of(label)];
        if (means.empty()) {
            throw MissingClass(to_string(label));
        }
        // Summing in sorted order keeps the class mean bit-identical across
        // permutations of the calibration file.
        std::sort(means.begin(), means.end());
        double sum = 0.0;
        for (double m : means) sum += m;
        cal.class_mean_[CalibrationSet::index_of(label)] =
            sum / static_cast<double>(means.size());
    }

    std::stable_sort(examples.begin(), examples.end(),
                     [](const CalibrationExample& a, const CalibrationExample& b) {
                         return a.instruction.id < b.instruction.id;
                     });
    for (const auto& ex : examples) {
        const std::size_t idx = CalibrationSet::index_of(ex.label);
        const double nc = std::abs(ex.profile.mean - cal.class_mean_[idx]) +
                          config.beta * ex.profile.variance;
        cal.nc_distribution_[idx].push_back(nc);
    }
    for (auto& dist : cal.nc_distribution_) {
        std::sort(dist.begin(), dist.end());
    }

    cal.examples_ = std::move(examples);
    return cal;
}

double nonconformity(const ScoreProfile& profile, Label hypothesis, const CalibrationSet& cal,
                     const ConformalConfig& config) {
    if (config.beta != cal.beta()) {
        throw BetaMismatch(config.beta, cal.beta());
    }
    return std::abs(profile.mean - cal.class_mean(hypothesis)) + config.beta * profile.variance;
}

double p_value(double nc, Label hypothesis, const CalibrationSet& cal) {
    const auto& dist = cal.nc_distribution(hypothesis);
    if (dist.empty()) {
        throw MissingClass(to_string(hypothesis));
    }
    // Inclusive comparison: stored values equal to nc count toward the tail.
    const auto first_ge = std::lower_bound(dist.begin(), dist.end(), nc);
    const auto count_ge = static_cast<double>(dist.end() - first_ge);
    return (count_ge + 1.0) / (static_cast<double>(dist.size()) + 1.0);
}

GateClass decide(double p_ambiguous, double p_nonambiguous, const ConformalConfig& config) {
    const bool amb_rejected = p_ambiguous <= config.alpha;
    const bool nonamb_rejected = p_nonambiguous <= config.alpha;
    if (!amb_rejected && nonamb_rejected) return GateClass::Ambiguous;
    if (amb_rejected && !nonamb_rejected) return GateClass::NonAmbiguous;
    return GateClass::Uncertain;
}

GateDecision classify(const ScoreProfile& profile, const CalibrationSet& cal,
                      const ConformalConfig& config) {
    config.validate();
    GateDecision decision;
    decision.nc_ambiguous = nonconformity(profile, Label::Ambiguous, cal, config);
    decision.nc_nonambiguous = nonconformity(profile, Label::NonAmbiguous, cal, config);
    decision.p_ambiguous = p_value(decision.nc_ambiguous, Label::Ambiguous, cal);
    decision.p_nonambiguous = p_value(decision.nc_nonambiguous, Label::NonAmbiguous, cal);
    decision.klass = decide(decision.p_ambiguous, decision.p_nonambiguous, config);
    return decision;
}

}  // namespace ambigate
