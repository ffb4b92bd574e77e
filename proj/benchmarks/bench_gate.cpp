#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ambigate/conformal.hpp"
#include "ambigate/domain.hpp"
#include "ambigate/evaluators.hpp"

using namespace ambigate;

namespace {

std::vector<EvaluatorVerdict> sample_verdicts() {
    std::vector<EvaluatorVerdict> verdicts;
    const double scores[] = {6.2, 7.1, 5.8, 6.9, 7.4};
    std::size_t i = 0;
    for (EvaluatorId id : all_evaluators()) {
        verdicts.push_back({id, scores[i++], "bench rationale", {}});
    }
    return verdicts;
}

CalibrationExample constant_example(std::string id, Label label, double score) {
    CalibrationExample example;
    example.instruction = {std::move(id), "benchmark instruction", std::nullopt, std::nullopt};
    example.label = label;
    std::vector<EvaluatorVerdict> verdicts;
    for (EvaluatorId eid : all_evaluators()) {
        verdicts.push_back({eid, score, "", {}});
    }
    example.profile = aggregate(std::move(verdicts));
    return example;
}

// Per-class size n with means spread over an eighth-integer lattice.
CalibrationSet lattice_calibration(int n) {
    std::vector<CalibrationExample> examples;
    examples.reserve(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        const double high = 5.0 + (i % 40) / 8.0;
        const double low = 0.5 + (i % 32) / 8.0;
        examples.push_back(constant_example("a" + std::to_string(i), Label::Ambiguous, high));
        examples.push_back(constant_example("n" + std::to_string(i), Label::NonAmbiguous, low));
    }
    return build_calibration(std::move(examples), ConformalConfig{});
}

double naive_p_value(double nc, const std::vector<double>& distribution) {
    long at_least = 0;
    for (double d : distribution) {
        if (d >= nc) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(distribution.size() + 1);
}

void BM_p_value_binary_search(benchmark::State& state) {
    const CalibrationSet cal = lattice_calibration(static_cast<int>(state.range(0)));
    const ConformalConfig config;
    double nc = 0.0;
    for (auto _ : state) {
        nc = nc >= 5.0 ? 0.0 : nc + 0.37;
        benchmark::DoNotOptimize(p_value(nc, Label::Ambiguous, cal));
    }
}
BENCHMARK(BM_p_value_binary_search)->Arg(8)->Arg(64)->Arg(512)->Arg(4096);

void BM_p_value_naive_scan(benchmark::State& state) {
    const CalibrationSet cal = lattice_calibration(static_cast<int>(state.range(0)));
    const std::vector<double>& dist = cal.nc_distribution(Label::Ambiguous);
    double nc = 0.0;
    for (auto _ : state) {
        nc = nc >= 5.0 ? 0.0 : nc + 0.37;
        benchmark::DoNotOptimize(naive_p_value(nc, dist));
    }
}
BENCHMARK(BM_p_value_naive_scan)->Arg(8)->Arg(64)->Arg(512)->Arg(4096);

void BM_aggregate(benchmark::State& state) {
    const std::vector<EvaluatorVerdict> verdicts = sample_verdicts();
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate(verdicts));
    }
}
BENCHMARK(BM_aggregate);

void BM_parse_verdict(benchmark::State& state) {
    const std::string response =
        "The instruction names a pronoun target without a referent.\n"
        "- unresolved reference\n"
        "- missing quantity\n"
        "Ambiguity Score: 7.5\n";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_verdict(EvaluatorId::Linguistic, response));
    }
}
BENCHMARK(BM_parse_verdict);

void BM_stub_evaluate(benchmark::State& state) {
    const Instruction instruction{"bench-1", "Cauterize near that bleeder.", std::nullopt,
                                  std::nullopt};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stub_evaluate(instruction, seed++));
    }
}
BENCHMARK(BM_stub_evaluate);

void BM_build_calibration(benchmark::State& state) {
    std::vector<CalibrationExample> examples;
    for (int i = 0; i < 64; ++i) {
        examples.push_back(
            constant_example("a" + std::to_string(i), Label::Ambiguous, 5.0 + (i % 40) / 8.0));
        examples.push_back(
            constant_example("n" + std::to_string(i), Label::NonAmbiguous, 0.5 + (i % 32) / 8.0));
    }
    const ConformalConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_calibration(examples, config));
    }
}
BENCHMARK(BM_build_calibration);

void BM_classify(benchmark::State& state) {
    const CalibrationSet cal = lattice_calibration(20);
    const ConformalConfig config;
    const ScoreProfile profile = aggregate(sample_verdicts());
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify(profile, cal, config));
    }
}
BENCHMARK(BM_classify);

}  // namespace

BENCHMARK_MAIN();
