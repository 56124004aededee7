#include <benchmark/benchmark.h>

#include "avatarforge/audio_align.hpp"

namespace {

using namespace avatarforge;

void BM_GroupPool(benchmark::State& state) {
  const std::int64_t frames = state.range(0);
  const Tensor stack = stub_encode(frames, 1, 0, state.range(1));
  for (auto _ : state) {
    Tensor pooled = group_pool(stack);
    benchmark::DoNotOptimize(pooled);
  }
  state.SetItemsProcessed(state.iterations() * stack.size());
}

void BM_AlignPipeline(benchmark::State& state) {
  // The 93-frame training bucket: 3.72 s of audio at 50 Hz.
  const std::int64_t dim = state.range(0);
  for (auto _ : state) {
    AlignedAudio out = align_audio(
        186, 93, [&](const WindowSpan& w, std::int64_t index) {
          return stub_encode(w.length, 7, index, dim);
        });
    benchmark::DoNotOptimize(out);
  }
}

void BM_ResampleLinear(benchmark::State& state) {
  const Tensor pooled = group_pool(stub_encode(3000, 1, 0, 1280));
  for (auto _ : state) {
    Tensor aligned = resample_linear(pooled, 1500);
    benchmark::DoNotOptimize(aligned);
  }
}

}  // namespace

BENCHMARK(BM_GroupPool)->Args({186, 1280})->Args({1500, 1280});
BENCHMARK(BM_AlignPipeline)->Arg(128)->Arg(1280)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResampleLinear)->Unit(benchmark::kMillisecond);
