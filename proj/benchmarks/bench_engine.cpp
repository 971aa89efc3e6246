#include <benchmark/benchmark.h>

#include "homethreat/engine.hpp"
#include "homethreat/report.hpp"

using namespace homethreat;

namespace {

ModelInput input_with(std::size_t devices) {
    const Catalog& c = default_catalog();
    ModelInput in;
    for (std::size_t i = 0; i < devices && i < c.devices.size(); ++i) in.devices.push_back(c.devices[i].id);
    for (std::size_t i = 0; i < c.risk_factors.size(); i += 2) in.selected_risk_factors.push_back(c.risk_factors[i].id);
    return in;
}

void BM_ScoreModel(benchmark::State& state) {
    const ModelInput in = input_with(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(score_model(in, default_catalog()));
}
BENCHMARK(BM_ScoreModel)->Arg(1)->Arg(4)->Arg(12);

void BM_Render(benchmark::State& state) {
    const Report r = score_model(input_with(12), default_catalog());
    const auto format = static_cast<ReportFormat>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(render(r, format));
}
BENCHMARK(BM_Render)
    ->Arg(static_cast<int>(ReportFormat::Text))
    ->Arg(static_cast<int>(ReportFormat::Markdown))
    ->Arg(static_cast<int>(ReportFormat::Machine));

void BM_MachineRoundTrip(benchmark::State& state) {
    const std::string body = render(score_model(input_with(12), default_catalog()), ReportFormat::Machine).body;
    for (auto _ : state) benchmark::DoNotOptimize(parse_machine_report(body));
}
BENCHMARK(BM_MachineRoundTrip);

}  // namespace

BENCHMARK_MAIN();
