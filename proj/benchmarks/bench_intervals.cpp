#include <benchmark/benchmark.h>

#include "avatarforge/multiperson.hpp"
#include "avatarforge/rng.hpp"

namespace {

using namespace avatarforge;

std::vector<PersonTrack> make_tracks(std::size_t tracks, std::size_t intervals) {
  Rng rng(42);
  std::vector<PersonTrack> out(tracks);
  for (std::size_t t = 0; t < tracks; ++t) {
    out[t].track_id = "t" + std::to_string(t);
    for (std::size_t i = 0; i < intervals; ++i) {
      const double a = rng.next_range(0.0, 590.0);
      out[t].speaking_intervals.push_back({a, a + rng.next_range(0.5, 10.0)});
    }
  }
  return out;
}

void BM_SingleSpeakerSegments(benchmark::State& state) {
  const auto tracks = make_tracks(static_cast<std::size_t>(state.range(0)),
                                  static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    auto segments = derive_single_speaker_segments(tracks, 1.0);
    benchmark::DoNotOptimize(segments);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_ClassifyTracks(benchmark::State& state) {
  Rng rng(7);
  PersonTrack track;
  track.track_id = "t";
  for (std::int64_t f = 0; f < state.range(0); ++f) {
    track.frames.push_back(f);
    track.boxes.push_back({rng.next_range(0.0, 1200.0), rng.next_range(0.0, 600.0), 80, 120});
  }
  for (auto _ : state) {
    auto cls = classify_track_dynamic(track, 1280, 720, 0.03, 25);
    benchmark::DoNotOptimize(cls);
  }
}

}  // namespace

BENCHMARK(BM_SingleSpeakerSegments)->Args({2, 8})->Args({6, 8})->Args({16, 32})->Args({64, 64});
BENCHMARK(BM_ClassifyTracks)->Arg(100)->Arg(10000);
