#include "fixtures.hpp"

#include <wsc/composer.hpp>
#include <wsc/generator.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace wsc;

void BM_ComposeTravel(benchmark::State& state) {
  const auto problem = bench::travel();
  for (auto _ : state) benchmark::DoNotOptimize(compose(problem));
}

// range(0) services, depth 8, the shape of the desk-scale acceptance runs.
void BM_ComposeGenerated(benchmark::State& state) {
  GeneratorParams p;
  p.services = static_cast<std::size_t>(state.range(0));
  p.concepts = std::max<std::size_t>(20, p.services / 5);
  p.subtype_edges = p.concepts * 3 / 4;
  p.relations = 20;
  p.rules = 5;
  p.depth = 8;
  p.max_arity = 3;
  p.seed = 1;
  const auto problem = generate_instance(p);
  for (auto _ : state) benchmark::DoNotOptimize(compose(problem));
}

void BM_ObjectsSimilar(benchmark::State& state) {
  const auto problem = bench::travel();
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ks = bench::random_state(problem.ontology, n, n, 11);
  std::uint32_t a = 0;
  for (auto _ : state) {
    const ObjectId x{a % static_cast<std::uint32_t>(n)};
    const ObjectId y{(a * 7 + 3) % static_cast<std::uint32_t>(n)};
    benchmark::DoNotOptimize(objects_similar(ks, x, y));
    ++a;
  }
}

}  // namespace

BENCHMARK(BM_ComposeTravel);
BENCHMARK(BM_ComposeGenerated)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObjectsSimilar)->RangeMultiplier(4)->Range(16, 1024);
