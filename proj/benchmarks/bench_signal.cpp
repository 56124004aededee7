#include <benchmark/benchmark.h>

#include "avatarforge/frame_stats.hpp"
#include "avatarforge/grpo.hpp"
#include "avatarforge/rng.hpp"

namespace {

using namespace avatarforge;

void BM_PerFrameAdvantage(benchmark::State& state) {
  Rng rng(9);
  RewardTensor r;
  r.samples = state.range(0);
  r.rewards = 4;
  r.partitions = state.range(1);
  r.values.resize(static_cast<std::size_t>(r.samples * r.rewards * r.partitions));
  for (double& v : r.values) v = rng.next_range(-1.0, 1.0);
  r.weights.assign(4, 0.25);

  for (auto _ : state) {
    AdvantageTensor adv = per_frame_advantage(r, 1e-6);
    auto totals = total_advantage(adv, r.weights);
    benchmark::DoNotOptimize(totals);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.values.size()));
}

void BM_FrameStats(benchmark::State& state) {
  Rng rng(10);
  LumaFrames frames;
  frames.frames = state.range(0);
  frames.height = 90;
  frames.width = 160;
  frames.data.resize(static_cast<std::size_t>(frames.frames * frames.height * frames.width));
  for (float& v : frames.data) v = static_cast<float>(rng.next_unit());

  for (auto _ : state) {
    FrameStats stats = compute_frame_stats(frames, 0.06, 0.94, 1e-4);
    benchmark::DoNotOptimize(stats);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.data.size()));
}

void BM_DetectFrameJump(benchmark::State& state) {
  Rng rng(11);
  std::vector<double> diffs(static_cast<std::size_t>(state.range(0)));
  for (double& d : diffs) d = rng.next_range(0.01, 0.05);
  diffs[diffs.size() / 2] = 0.9;

  for (auto _ : state) {
    auto jumps = detect_frame_jump(diffs, 6.0);
    benchmark::DoNotOptimize(jumps);
  }
}

}  // namespace

BENCHMARK(BM_PerFrameAdvantage)->Args({16, 24})->Args({64, 96});
BENCHMARK(BM_FrameStats)->Arg(40)->Arg(250)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectFrameJump)->Arg(100)->Arg(10000);
