#include <benchmark/benchmark.h>

#include "homethreat/catalog.hpp"
#include "homethreat/cvss.hpp"

using namespace homethreat;

namespace {

constexpr const char* kVector = "CVSS:3.1/AV:L/AC:H/PR:H/UI:N/S:C/C:H/I:H/A:H/E:P/RL:W/RC:C/CR:H/IR:H/AR:H";

void BM_Parse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(cvss::parse_vector(kVector));
}
BENCHMARK(BM_Parse);

void BM_Score(benchmark::State& state) {
    const auto v = cvss::parse_vector(kVector);
    for (auto _ : state) benchmark::DoNotOptimize(cvss::score(v));
}
BENCHMARK(BM_Score);

void BM_CanonicalString(benchmark::State& state) {
    const auto v = cvss::parse_vector(kVector);
    for (auto _ : state) benchmark::DoNotOptimize(cvss::canonical_string(v));
}
BENCHMARK(BM_CanonicalString);

void BM_LoadCatalog(benchmark::State& state) {
    const auto doc = default_catalog_document();
    for (auto _ : state) benchmark::DoNotOptimize(load_catalog(doc));
}
BENCHMARK(BM_LoadCatalog);

}  // namespace

BENCHMARK_MAIN();
