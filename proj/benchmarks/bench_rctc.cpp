#include <benchmark/benchmark.h>

#include <string>

#include "rctc/laws.hpp"
#include "rctc/syntax.hpp"

using namespace rctc;

namespace {

// n independent components a_i.b_i.nil
Process chains(int n) {
  std::string src;
  for (int i = 0; i < n; ++i) {
    if (i) src += " | ";
    src += "a" + std::to_string(i) + ".b" + std::to_string(i) + ".nil";
  }
  return parse(src);
}

Bounds wide(int n) {
  Bounds b;
  b.max_depth = static_cast<std::size_t>(2 * n);
  b.max_width = 2;
  b.max_states = 200000;
  return b;
}

void BM_Parse(benchmark::State& st) {
  GenConfig cfg;
  cfg.max_actions = 8;
  cfg.include_tau = true;
  std::vector<std::string> texts;
  for (const auto& p : gen_terms(cfg, 256)) texts.push_back(render(p));
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(parse(texts[i++ % texts.size()]));
}
BENCHMARK(BM_Parse);

void BM_ForwardSteps(benchmark::State& st) {
  auto p = chains(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(forward_steps(p, {}, 3));
}
BENCHMARK(BM_ForwardSteps)->DenseRange(2, 5);

void BM_Explore(benchmark::State& st) {
  int n = static_cast<int>(st.range(0));
  auto p = chains(n);
  std::size_t states = 0;
  for (auto _ : st) states = explore(p, {}, wide(n)).states.size();
  st.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_Explore)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Check(benchmark::State& st) {
  int n = static_cast<int>(st.range(1));
  auto p = chains(n);
  std::string q = "(" + render(p) + ") + nil";
  auto rhs = parse(q);
  CheckOptions o;
  o.flavor = static_cast<Flavor>(st.range(0));
  o.bounds = wide(n);
  for (auto _ : st) benchmark::DoNotOptimize(check(p, rhs, {}, o).related);
  st.SetLabel(to_string(o.flavor));
}
BENCHMARK(BM_Check)->ArgsProduct({{0, 1, 2, 3}, {1, 2, 3}})->Unit(benchmark::kMillisecond);

void BM_LawSuite(benchmark::State& st) {
  GenConfig cfg;
  Bounds b;
  b.max_depth = 4;
  b.max_width = 2;
  auto laws = select_laws(law_registry(), "static.");
  for (auto _ : st) benchmark::DoNotOptimize(run_law_suite(cfg, laws, b, 20).ok());
}
BENCHMARK(BM_LawSuite)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
