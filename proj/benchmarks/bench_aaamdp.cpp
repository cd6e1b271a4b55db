#include <filesystem>

#include <benchmark/benchmark.h>

#include "aaamdp/analysis.hpp"

namespace {

using namespace aaamdp;

const ParameterSet& shipped_params() {
    static const ParameterSet p = load_parameters(
        std::filesystem::path(AAAMDP_DATA_DIR) / "aaa_default_params.json");
    return p;
}

void BM_BuildProcess(benchmark::State& state) {
    const ParameterSet& p = shipped_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_process(p));
    }
}
BENCHMARK(BM_BuildProcess);

void BM_Solve(benchmark::State& state) {
    const DecisionProcess process = build_process(shipped_params());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_backward_induction(process));
    }
}
BENCHMARK(BM_Solve);

void BM_EvaluateBaseline(benchmark::State& state) {
    const ParameterSet& p = shipped_params();
    const DecisionProcess process = build_process(p);
    const Policy baseline = clinical_policy_55(p.horizon);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_policy(process, baseline));
    }
}
BENCHMARK(BM_EvaluateBaseline);

// One sensitivity replicate: draw a perturbed set, rebuild, resolve.
void BM_SensitivityReplicate(benchmark::State& state) {
    const ParameterSet& p = shipped_params();
    PerturbationSpec spec;
    spec.replicates = 1u << 30;
    spec.widths["rupture_prob"] = 0.25;
    spec.widths["elective_mortality"] = 0.25;
    int replicate = 0;
    for (auto _ : state) {
        const ParameterSet drawn = perturb_parameters(p, spec, replicate++);
        benchmark::DoNotOptimize(solve_backward_induction(build_process(drawn)));
    }
}
BENCHMARK(BM_SensitivityReplicate);

}  // namespace

BENCHMARK_MAIN();
