// Dense serial reference kernels against the CSR kernels, serial and
// OpenMP-parallel, on a 30x30 maze and a random dense-ish MDP.

#include <benchmark/benchmark.h>

#include <vector>

#include "softclip/bounds.hpp"
#include "softclip/kernels.hpp"
#include "softclip/maze.hpp"
#include "softclip/mdp.hpp"
#include "softclip/rng.hpp"

using namespace softclip;

namespace {

struct Problem {
  TabularMdp mdp;
  SoftConfig cfg;
  QTable q;
};

Problem make_problem(int which) {
  Rng rng(2024, "bench", static_cast<std::uint64_t>(which));
  TabularMdp mdp = which == 0 ? maze_to_mdp(generate_maze(30, 30, 0.2, 7), 0.98)
                              : make_random_mdp(300, 4, 0.98, rng);
  SoftConfig cfg = SoftConfig::uniform(mdp.n_states(), mdp.n_actions(), 5.0);
  QTable q(mdp.n_states(), mdp.n_actions());
  for (double& x : q.values()) x = rng.uniform(-10.0, 0.0);
  return {std::move(mdp), std::move(cfg), std::move(q)};
}

const Problem& problem(int which) {
  static const Problem maze = make_problem(0);
  static const Problem random = make_problem(1);
  return which == 0 ? maze : random;
}

void label(benchmark::State& state, const Problem& p) {
  state.SetLabel(std::to_string(p.mdp.n_states()) + "x" + std::to_string(p.mdp.n_actions()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.q.size()));
}

void BM_BackupReference(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::soft_backup(p.q, p.mdp, p.cfg));
  label(state, p);
}

void BM_Backup(benchmark::State& state, Exec exec) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(soft_backup(p.q, p.mdp, p.cfg, exec));
  label(state, p);
}

void BM_ExpectedNextReference(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  std::vector<double> v(p.mdp.n_states()), next(p.q.size()), live(p.q.size());
  kernels::reference::state_values(p.q, p.cfg, v);
  for (auto _ : state) {
    kernels::reference::expected_next(p.mdp, v, next, live);
    benchmark::DoNotOptimize(next.data());
  }
  label(state, p);
}

void BM_ExpectedNext(benchmark::State& state, Exec exec) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  std::vector<double> v(p.mdp.n_states()), next(p.q.size()), live(p.q.size());
  kernels::state_values(p.q, p.cfg, v, Exec::Serial);
  for (auto _ : state) {
    kernels::expected_next(p.mdp.sparse(), v, next, live, exec);
    benchmark::DoNotOptimize(next.data());
  }
  label(state, p);
}

void BM_StateValues(benchmark::State& state, Exec exec) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  std::vector<double> v(p.mdp.n_states());
  for (auto _ : state) {
    kernels::state_values(p.q, p.cfg, v, exec);
    benchmark::DoNotOptimize(v.data());
  }
  label(state, p);
}

void BM_Theorem1Bounds(benchmark::State& state, Exec exec) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  BoundPair out;
  BoundWorkspace ws;
  for (auto _ : state) {
    theorem1_bounds(p.q, p.mdp.sparse(), p.cfg, out, ws, exec);
    benchmark::DoNotOptimize(out.upper.values().data());
  }
  label(state, p);
}

}  // namespace

BENCHMARK(BM_BackupReference)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Backup, serial, Exec::Serial)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Backup, parallel, Exec::Parallel)->Arg(0)->Arg(1);
BENCHMARK(BM_ExpectedNextReference)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_ExpectedNext, serial, Exec::Serial)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_ExpectedNext, parallel, Exec::Parallel)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_StateValues, serial, Exec::Serial)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_StateValues, parallel, Exec::Parallel)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Theorem1Bounds, serial, Exec::Serial)->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Theorem1Bounds, parallel, Exec::Parallel)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
