#include "ncfib/spectral.hpp"
#include "ncfib/suites.hpp"

#include <benchmark/benchmark.h>

using namespace ncfib;

namespace {

void BM_NormalForm(benchmark::State& state)
{
    auto c = build_3d();
    const auto& alg = c->algebra();
    for (auto _ : state)
        benchmark::DoNotOptimize(NcElement::parse(alg, "d*d*c*b*a*a*d*c"));
}
BENCHMARK(BM_NormalForm);

void BM_ExteriorD(benchmark::State& state)
{
    auto c = build_3d();
    FormElement x = c->parse("d*c*b*a*w0");
    for (auto _ : state)
        benchmark::DoNotOptimize(c->d(x));
}
BENCHMARK(BM_ExteriorD);

void BM_ParseCalculus3d(benchmark::State& state)
{
    const std::string text = calculus_text_3d();
    for (auto _ : state)
        benchmark::DoNotOptimize(parse_calculus(text));
}
BENCHMARK(BM_ParseCalculus3d)->Unit(benchmark::kMillisecond);

void BM_FilteredComplex(benchmark::State& state)
{
    auto f = fibration_3d();
    for (auto _ : state)
        benchmark::DoNotOptimize(make_filtered_complex(f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FilteredComplex)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SpectralSequence(benchmark::State& state)
{
    FilteredComplex fc = make_filtered_complex(fibration_3d(), static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(spectral_sequence(fc, fc.filt.pmax + 1));
}
BENCHMARK(BM_SpectralSequence)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Suite(benchmark::State& state, const char* name)
{
    SuiteConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_suite(name, cfg));
}
BENCHMARK_CAPTURE(BM_Suite, fibration, "fibration")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Suite, lemma, "lemma")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
