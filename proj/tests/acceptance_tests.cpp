#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ambigate/conformal.hpp"
#include "ambigate/datasets.hpp"
#include "ambigate/hash.hpp"
#include "ambigate/metrics.hpp"
#include "commands.hpp"
#include "support.hpp"

using namespace ambigate;
using namespace ambigate::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("[acceptance] %d %s: %s (%s)\n", number, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(pass, name << ": " << detail);
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("acceptance 1: metric algebra on published confusion totals") {
    const auto start = Clock::now();

    ConfusionCounts strong{17, 3, 4, 16};
    ConfusionCounts weak{16, 4, 8, 12};
    bool pass = true;
    pass &= close(accuracy(strong), 0.825, 0.005);
    pass &= close(precision(strong), 0.81, 0.005);
    pass &= close(recall(strong), 0.85, 0.005);
    pass &= close(f1(strong), 0.83, 0.005);
    pass &= close(accuracy(weak), 0.70, 0.005);
    pass &= close(precision(weak), 0.67, 0.005);
    pass &= close(recall(weak), 0.80, 0.005);
    pass &= close(f1(weak), 0.73, 0.005);

    const double elapsed = seconds_since(start);
    pass &= elapsed < 1.0;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "acc/prec/rec/f1 = %.4f/%.4f/%.4f/%.4f and %.4f/%.4f/%.4f/%.4f, %.3fs",
                  accuracy(strong), precision(strong), recall(strong), f1(strong), accuracy(weak),
                  precision(weak), recall(weak), f1(weak), elapsed);
    report(1, "metric-algebra", pass, detail);
}

TEST_CASE("acceptance 2: conformal p-values keep their false-rejection rate") {
    const auto start = Clock::now();

    constexpr int kTrials = 200;
    constexpr int kCalibrationPerClass = 20;
    constexpr int kDrawsPerTrial = 500;
    const double threshold = 0.1 + 3.0 * std::sqrt(0.1 * 0.9 / kDrawsPerTrial);

    std::mt19937_64 rng(20260816);
    const ConformalConfig config;
    int passing_trials = 0;

    for (int trial = 0; trial < kTrials; ++trial) {
        SyntheticSampler sampler(rng());
        int rejected = 0;
        for (int draw = 0; draw < kDrawsPerTrial; ++draw) {
            // fresh calibration per draw: the coverage bound is over the joint
            // randomness of calibration and test, and the binomial threshold
            // below assumes independent draws
            auto examples =
                sampler.examples("a", Label::Ambiguous, 6.5, 1.0, kCalibrationPerClass);
            auto non =
                sampler.examples("n", Label::NonAmbiguous, 3.5, 1.0, kCalibrationPerClass);
            examples.insert(examples.end(), std::make_move_iterator(non.begin()),
                            std::make_move_iterator(non.end()));
            const CalibrationSet cal = build_calibration(std::move(examples), config);

            const Label truth = draw % 2 == 0 ? Label::Ambiguous : Label::NonAmbiguous;
            const double base = truth == Label::Ambiguous ? 6.5 : 3.5;
            const ScoreProfile profile = sampler.profile(base, 1.0);
            const double nc = nonconformity(profile, truth, cal, config);
            if (p_value(nc, truth, cal) <= config.alpha) ++rejected;
        }
        const double rate = static_cast<double>(rejected) / kDrawsPerTrial;
        if (rate < threshold) ++passing_trials;
    }

    const double elapsed = seconds_since(start);
    const bool pass = passing_trials >= static_cast<int>(0.95 * kTrials) && elapsed < 30.0;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "%d/%d trials under rate threshold %.5f, %.2fs", passing_trials, kTrials,
                  threshold, elapsed);
    report(2, "conformal-validity", pass, detail);
}

TEST_CASE("acceptance 3: binary-search p-values equal naive counting") {
    const auto start = Clock::now();

    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> size_dist(1, 200);
    std::uniform_int_distribution<int> lattice(0, 40);
    const ConformalConfig config;

    long cases = 0;
    long mismatches = 0;
    while (cases < 10000) {
        const int n = size_dist(rng);
        std::vector<CalibrationExample> examples;
        for (int i = 0; i < n; ++i) {
            const double s = lattice(rng) / 8.0;  // eighth-integer lattice forces ties
            examples.push_back(
                make_example("a" + std::to_string(i), Label::Ambiguous, {s, s, s, s, s}));
        }
        examples.push_back(make_example("n0", Label::NonAmbiguous, {0, 0, 0, 0, 0}));
        const CalibrationSet cal = build_calibration(std::move(examples), config);
        const auto& dist = cal.nc_distribution(Label::Ambiguous);

        for (int probe = 0; probe < 20 && cases < 10000; ++probe, ++cases) {
            double nc;
            switch (probe % 4) {
                case 0: nc = dist[static_cast<std::size_t>(lattice(rng)) % dist.size()]; break;
                case 1: nc = lattice(rng) / 8.0; break;
                case 2: nc = 0.0; break;
                default: nc = 100.0; break;
            }
            if (p_value(nc, Label::Ambiguous, cal) != naive_p_value(nc, dist)) ++mismatches;
        }
    }

    const double elapsed = seconds_since(start);
    const bool pass = mismatches == 0 && cases >= 10000 && elapsed < 5.0;

    char detail[120];
    std::snprintf(detail, sizeof(detail), "%ld cases, %ld mismatches, %.2fs", cases, mismatches,
                  elapsed);
    report(3, "p-value-oracle-equivalence", pass, detail);
}

TEST_CASE("acceptance 4: score aggregation and conformal unit examples") {
    const double tol = 1e-9;
    bool pass = true;

    const ScoreProfile flat5 = make_profile({5, 5, 5, 5, 5});
    pass &= close(flat5.mean, 5.0, tol) && close(flat5.variance, 0.0, tol);
    const ScoreProfile outlier = make_profile({0, 0, 0, 0, 10});
    pass &= close(outlier.mean, 2.0, tol) && close(outlier.variance, 20.0, tol);
    const ScoreProfile spread = make_profile({2, 3, 4, 3, 3});
    pass &= close(spread.mean, 3.0, tol) && close(spread.variance, 0.5, tol);

    const ConformalConfig config;

    // constant-score classes: exact means, all-zero nonconformity
    std::vector<CalibrationExample> constant;
    constant.push_back(make_example("a1", Label::Ambiguous, {8, 8, 8, 8, 8}));
    constant.push_back(make_example("a2", Label::Ambiguous, {8, 8, 8, 8, 8}));
    constant.push_back(make_example("n1", Label::NonAmbiguous, {2, 2, 2, 2, 2}));
    constant.push_back(make_example("n2", Label::NonAmbiguous, {2, 2, 2, 2, 2}));
    const CalibrationSet constant_cal = build_calibration(constant, config);
    pass &= close(constant_cal.class_mean(Label::Ambiguous), 8.0, tol);
    pass &= close(constant_cal.class_mean(Label::NonAmbiguous), 2.0, tol);
    for (Label label : {Label::Ambiguous, Label::NonAmbiguous}) {
        for (double nc : constant_cal.nc_distribution(label)) pass &= close(nc, 0.0, tol);
    }

    // a lone example scores its own class: distance 0, variance term only
    std::vector<CalibrationExample> lone;
    lone.push_back(make_example("n1", Label::NonAmbiguous, {0, 0, 0, 2, 3}));  // mean 1, var 2
    lone.push_back(make_example("a1", Label::Ambiguous, {8, 8, 8, 8, 8}));
    const CalibrationSet lone_cal = build_calibration(lone, config);
    pass &= close(lone_cal.nc_distribution(Label::NonAmbiguous).at(0), 1.0, tol);

    const ScoreProfile seven = make_profile({6, 6, 6, 8, 9});  // mean 7, var 2
    std::vector<CalibrationExample> six;
    six.push_back(make_example("a1", Label::Ambiguous, {6, 6, 6, 6, 6}));
    six.push_back(make_example("n1", Label::NonAmbiguous, {0, 0, 0, 0, 0}));
    const CalibrationSet six_cal = build_calibration(six, config);
    pass &= close(nonconformity(seven, Label::Ambiguous, six_cal, config), 2.0, tol);
    pass &= close(nonconformity(make_profile({6, 6, 6, 6, 6}), Label::Ambiguous, six_cal, config),
                  0.0, tol);
    ConformalConfig no_variance_term;
    no_variance_term.beta = 0.0;
    const CalibrationSet six_flat = build_calibration(six, no_variance_term);
    pass &= close(nonconformity(seven, Label::Ambiguous, six_flat, no_variance_term), 1.0, tol);

    // ambiguous nonconformity distribution {1, 2, 3} via means {8, 4, 3}
    std::vector<CalibrationExample> lattice;
    lattice.push_back(make_example("a1", Label::Ambiguous, {8, 8, 8, 8, 8}));
    lattice.push_back(make_example("a2", Label::Ambiguous, {4, 4, 4, 4, 4}));
    lattice.push_back(make_example("a3", Label::Ambiguous, {3, 3, 3, 3, 3}));
    lattice.push_back(make_example("n1", Label::NonAmbiguous, {0, 0, 0, 0, 0}));
    const CalibrationSet lattice_cal = build_calibration(lattice, config);
    pass &= close(p_value(0.0, Label::Ambiguous, lattice_cal), 1.0, tol);
    pass &= close(p_value(2.5, Label::Ambiguous, lattice_cal), 0.5, tol);
    pass &= close(p_value(10.0, Label::Ambiguous, lattice_cal), 0.25, tol);

    pass &= decide(0.5, 0.05, config) == GateClass::Ambiguous;
    pass &= decide(0.05, 0.5, config) == GateClass::NonAmbiguous;
    pass &= decide(0.05, 0.05, config) == GateClass::Uncertain;
    pass &= decide(0.5, 0.5, config) == GateClass::Uncertain;

    // classify at a class centroid: that class's p-value is exactly 1
    const GateDecision centroid =
        classify(make_profile({2, 2, 2, 2, 2}), constant_cal, config);
    pass &= close(centroid.p_nonambiguous, 1.0, tol);
    pass &= centroid.klass == GateClass::NonAmbiguous || centroid.klass == GateClass::Uncertain;

    report(4, "conformal-unit-examples", pass, pass ? "all spot values at 1e-9" : "spot value drift");
}

TEST_CASE("acceptance 5: stub runs are byte-identical end to end") {
    TempDir tmp;
    AppConfig config;
    config.stub_mode = true;
    config.stub_seed = 42;
    config.template_dir = data_dir() / "templates";

    bool pass = true;
    std::string artifacts[2];
    std::string tables[2];
    std::string reports[2];

    for (int run = 0; run < 2; ++run) {
        const std::string tag = std::to_string(run);
        config.calibration_path = tmp.file("calibration-" + tag + ".json");

        std::ostringstream cal_out, cal_err;
        pass &= cmd_calibrate(data_dir() / "calibration.jsonl", config.calibration_path,
                              tmp.file("cal-scores-" + tag + ".jsonl"), config, cal_out,
                              cal_err) == kExitNonAmbiguous;

        std::ostringstream eval_out, eval_err;
        pass &= cmd_evaluate(data_dir() / "evaluation.jsonl",
                             tmp.file("eval-scores-" + tag + ".jsonl"),
                             tmp.file("report-" + tag + ".json"), config, eval_out,
                             eval_err) == kExitNonAmbiguous;

        artifacts[run] = read_file(config.calibration_path);
        tables[run] = eval_out.str();
        reports[run] = read_file(tmp.file("report-" + tag + ".json"));
    }

    pass &= !artifacts[0].empty() && artifacts[0] == artifacts[1];
    pass &= !tables[0].empty() && tables[0] == tables[1];
    pass &= !reports[0].empty() && reports[0] == reports[1];

    char detail[160];
    std::snprintf(detail, sizeof(detail), "artifact %zu bytes, table %zu bytes, report %zu bytes",
                  artifacts[0].size(), tables[0].size(), reports[0].size());
    report(5, "stub-determinism", pass, detail);
}

TEST_CASE("acceptance 6: separated synthetic classes classify accurately") {
    const ConformalConfig config;
    SyntheticSampler sampler(2026);

    // gap 5.0 between class centers, per-evaluator noise sigma 0.8
    auto examples = sampler.examples("amb-", Label::Ambiguous, 7.5, 0.8, 18);
    auto non = sampler.examples("non-", Label::NonAmbiguous, 2.5, 0.8, 18);
    examples.insert(examples.end(), non.begin(), non.end());
    const CalibrationSet cal = build_calibration(std::move(examples), config);

    int correct = 0;
    constexpr int kHeldOutPerClass = 20;
    for (int i = 0; i < kHeldOutPerClass; ++i) {
        if (classify(sampler.profile(7.5, 0.8), cal, config).klass == GateClass::Ambiguous) {
            ++correct;
        }
        if (classify(sampler.profile(2.5, 0.8), cal, config).klass == GateClass::NonAmbiguous) {
            ++correct;
        }
    }
    const double accuracy = static_cast<double>(correct) / (2.0 * kHeldOutPerClass);
    const bool pass = accuracy >= 0.9;

    char detail[120];
    std::snprintf(detail, sizeof(detail), "%d/%d held-out correct (accuracy %.3f)", correct,
                  2 * kHeldOutPerClass, accuracy);
    report(6, "synthetic-separation", pass, detail);
}

TEST_CASE("acceptance 7: the decision rule is total over its four cells") {
    const ConformalConfig config;
    bool pass = true;
    bool saw_ambiguous = false, saw_nonambiguous = false, saw_uncertain_low = false,
         saw_uncertain_high = false;

    for (int i = 1; i <= 20; ++i) {
        for (int j = 1; j <= 20; ++j) {
            const double p_amb = i / 20.0;
            const double p_non = j / 20.0;
            const GateClass got = decide(p_amb, p_non, config);
            const bool amb_rejected = p_amb <= config.alpha;
            const bool non_rejected = p_non <= config.alpha;
            GateClass expected;
            if (!amb_rejected && non_rejected) {
                expected = GateClass::Ambiguous;
                saw_ambiguous = true;
            } else if (amb_rejected && !non_rejected) {
                expected = GateClass::NonAmbiguous;
                saw_nonambiguous = true;
            } else if (amb_rejected) {
                expected = GateClass::Uncertain;
                saw_uncertain_low = true;
            } else {
                expected = GateClass::Uncertain;
                saw_uncertain_high = true;
            }
            pass &= got == expected;
        }
    }
    pass &= saw_ambiguous && saw_nonambiguous && saw_uncertain_low && saw_uncertain_high;

    report(7, "decision-totality", pass,
           pass ? "400 grid points across all four cells" : "cell mismatch");
}

TEST_CASE("acceptance 8: the shipped calibration dataset round-trips intact") {
    TempDir tmp;
    bool pass = true;

    const auto shipped = data_dir() / "calibration.jsonl";
    const std::vector<DatasetRecord> records = load_dataset(shipped);
    pass &= records.size() == 40;

    long ambiguous = 0;
    for (const auto& rec : records) {
        if (rec.label == Label::Ambiguous) ++ambiguous;
    }
    pass &= ambiguous == 20;
    pass &= records.size() - ambiguous == 20;

    const auto resaved = tmp.file("resaved.jsonl");
    save_dataset(records, resaved);
    pass &= read_file(resaved) == read_file(shipped);

    const std::vector<DatasetRecord> reloaded = load_dataset(resaved);
    pass &= reloaded.size() == records.size();
    for (std::size_t i = 0; pass && i < records.size(); ++i) {
        pass &= reloaded[i].instruction.id == records[i].instruction.id &&
                reloaded[i].instruction.text == records[i].instruction.text &&
                reloaded[i].label == records[i].label &&
                reloaded[i].instruction.ambiguity_type == records[i].instruction.ambiguity_type;
    }

    // score with the stub, then recompute the class statistics independently
    const ConformalConfig config;
    auto scored = score_dataset(records, [](const Instruction& i) { return stub_evaluate(i, 42); },
                                tmp.file("scores.jsonl"));
    const CalibrationSet cal = build_calibration(to_calibration_examples(scored), config);
    pass &= cal.class_size(Label::Ambiguous) == 20;
    pass &= cal.class_size(Label::NonAmbiguous) == 20;

    for (Label label : {Label::Ambiguous, Label::NonAmbiguous}) {
        double sum = 0.0;
        long count = 0;
        for (const auto& rec : scored) {
            if (rec.label != label) continue;
            sum += rec.cached_profile->mean;
            ++count;
        }
        const double naive_mean = sum / static_cast<double>(count);
        pass &= close(cal.class_mean(label), naive_mean, 1e-9);
        pass &= cal.class_mean(label) >= 0.0 && cal.class_mean(label) <= 10.0;

        std::vector<double> naive_nc;
        for (const auto& rec : scored) {
            if (rec.label != label) continue;
            naive_nc.push_back(std::abs(rec.cached_profile->mean - naive_mean) +
                               config.beta * rec.cached_profile->variance);
        }
        std::sort(naive_nc.begin(), naive_nc.end());
        const auto& dist = cal.nc_distribution(label);
        pass &= dist.size() == naive_nc.size();
        for (std::size_t i = 0; pass && i < dist.size(); ++i) {
            pass &= close(dist[i], naive_nc[i], 1e-9);
        }
    }

    // persisted artifact reproduces the in-memory statistics bit for bit
    const auto artifact_path = tmp.file("calibration.json");
    save_calibration(cal, file_fingerprint(shipped), artifact_path);
    const CalibrationArtifact artifact = load_calibration(artifact_path);
    pass &= artifact.set.class_mean(Label::Ambiguous) == cal.class_mean(Label::Ambiguous);
    pass &= artifact.set.class_mean(Label::NonAmbiguous) == cal.class_mean(Label::NonAmbiguous);
    pass &= artifact.set.nc_distribution(Label::Ambiguous) == cal.nc_distribution(Label::Ambiguous);
    pass &= artifact.set.nc_distribution(Label::NonAmbiguous) ==
            cal.nc_distribution(Label::NonAmbiguous);

    report(8, "calibration-round-trip", pass,
           pass ? "40 records, 20/20 balance, stats match the naive recount"
                : "round-trip mismatch");
}
