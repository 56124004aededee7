#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "avatarforge/multiperson.hpp"
#include "support/generators.hpp"

using namespace avatarforge;
using avatarforge::testing::random_tracks_centis;

namespace {

PersonTrack stationary_track(const std::string& id, std::int64_t frames, double cx, double cy) {
  PersonTrack t;
  t.track_id = id;
  for (std::int64_t f = 0; f < frames; ++f) {
    t.frames.push_back(f);
    t.boxes.push_back({cx - 50, cy - 50, 100, 100});
  }
  return t;
}

struct CentiSegment {
  std::string track_id;
  std::int64_t start = 0;
  std::int64_t end = 0;
  bool operator==(const CentiSegment&) const = default;
  auto operator<=>(const CentiSegment&) const = default;
};

std::vector<CentiSegment> to_centis(const std::vector<SpeakerSegment>& segments) {
  std::vector<CentiSegment> out;
  for (const SpeakerSegment& s : segments)
    out.push_back({s.track_id, std::llround(s.start_s * 100.0), std::llround(s.end_s * 100.0)});
  return out;
}

// Brute-force oracle on a 10 ms grid: mark each cell with the set of speaking
// tracks, keep cells owned by exactly one track, coalesce runs, trim short
// pieces. Entirely integer arithmetic.
std::vector<CentiSegment> grid_oracle(const std::vector<PersonTrack>& tracks,
                                      std::int64_t horizon_centis, std::int64_t min_len_centis) {
  std::vector<std::vector<int>> owners(static_cast<std::size_t>(horizon_centis));
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    std::vector<bool> active(static_cast<std::size_t>(horizon_centis), false);
    for (const SpeakingInterval& iv : tracks[t].speaking_intervals) {
      const std::int64_t a = std::llround(iv.start_s * 100.0);
      const std::int64_t b = std::llround(iv.end_s * 100.0);
      for (std::int64_t c = a; c < b && c < horizon_centis; ++c)
        active[static_cast<std::size_t>(c)] = true;
    }
    for (std::int64_t c = 0; c < horizon_centis; ++c)
      if (active[static_cast<std::size_t>(c)]) owners[static_cast<std::size_t>(c)].push_back(static_cast<int>(t));
  }

  std::vector<CentiSegment> out;
  for (std::int64_t c = 0; c < horizon_centis; ++c) {
    const auto& own = owners[static_cast<std::size_t>(c)];
    if (own.size() != 1) continue;
    const std::string& id = tracks[static_cast<std::size_t>(own[0])].track_id;
    if (!out.empty() && out.back().track_id == id && out.back().end == c) {
      out.back().end = c + 1;
    } else {
      out.push_back({id, c, c + 1});
    }
  }
  std::vector<CentiSegment> kept;
  for (const CentiSegment& s : out)
    if (s.end - s.start >= min_len_centis) kept.push_back(s);
  return kept;
}

}  // namespace

TEST_CASE("classify_track_dynamic") {
  SUBCASE("identical box across 100 frames is static") {
    const PersonTrack t = stationary_track("t", 100, 400, 300);
    CHECK(classify_track_dynamic(t, 1280, 720, 0.03, 25) == TrackClass::Static);
  }
  SUBCASE("box translating 20% of the diagonal is dynamic at a 5% threshold") {
    PersonTrack t;
    t.track_id = "mover";
    const double diagonal = std::hypot(1280.0, 720.0);
    for (std::int64_t f = 0; f < 50; ++f) {
      t.frames.push_back(f);
      const double offset = 0.20 * diagonal * static_cast<double>(f) / 49.0;
      t.boxes.push_back({100 + offset, 100, 80, 80});
    }
    CHECK(classify_track_dynamic(t, 1280, 720, 0.05, 25) == TrackClass::Dynamic);
  }
  SUBCASE("short tracks are static regardless of motion") {
    PersonTrack t;
    t.track_id = "short";
    t.frames = {0, 1, 2};
    t.boxes = {{0, 0, 10, 10}, {500, 500, 10, 10}, {1000, 600, 10, 10}};
    CHECK(classify_track_dynamic(t, 1280, 720, 0.03, 10) == TrackClass::Static);
  }
}

TEST_CASE("partition_person_count") {
  auto moving = [](const std::string& id) {
    PersonTrack t;
    t.track_id = id;
    for (std::int64_t f = 0; f < 40; ++f) {
      t.frames.push_back(f);
      t.boxes.push_back({100.0 + 10.0 * static_cast<double>(f), 100, 80, 80});
    }
    return t;
  };

  RecordTracks one_dynamic{"single", 1280, 720, 30.0, {moving("m0"), stationary_track("s0", 40, 200, 200), stationary_track("s1", 40, 900, 300)}};
  RecordTracks none_dynamic{"poster", 1280, 720, 30.0, {stationary_track("s2", 40, 200, 200)}};
  RecordTracks two_dynamic{"duo", 1280, 720, 30.0, {moving("m1"), moving("m2")}};

  const PersonPartition p = partition_person_count({one_dynamic, none_dynamic, two_dynamic});
  CHECK(p.single == std::vector<std::string>{"single"});
  CHECK(p.excluded == std::vector<std::string>{"poster"});
  CHECK(p.multi == std::vector<std::string>{"duo"});
}

TEST_CASE("single-speaker segment derivation on hand-checked inputs") {
  auto track = [](const std::string& id, std::vector<SpeakingInterval> ivs) {
    PersonTrack t;
    t.track_id = id;
    t.speaking_intervals = std::move(ivs);
    return t;
  };

  SUBCASE("overlap is cut from both speakers") {
    const auto segments =
        derive_single_speaker_segments({track("A", {{0, 5}}), track("B", {{3, 8}})}, 0.0);
    REQUIRE(segments.size() == 2);
    CHECK(segments[0].track_id == "A");
    CHECK(segments[0].start_s == 0.0);
    CHECK(segments[0].end_s == 3.0);
    CHECK(segments[1].track_id == "B");
    CHECK(segments[1].start_s == 5.0);
    CHECK(segments[1].end_s == 8.0);
  }
  SUBCASE("a lone track is kept whole") {
    const auto segments = derive_single_speaker_segments({track("A", {{0, 10}})}, 0.0);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0] == SpeakerSegment{"A", 0.0, 10.0});
  }
  SUBCASE("full concurrency removes everything") {
    CHECK(derive_single_speaker_segments({track("A", {{0, 4}}), track("B", {{0, 4}})}, 0.0).empty());
  }
  SUBCASE("touching intervals are not concurrent") {
    const auto segments =
        derive_single_speaker_segments({track("A", {{0, 2}}), track("B", {{2, 4}})}, 0.0);
    REQUIRE(segments.size() == 2);
    CHECK(segments[0] == SpeakerSegment{"A", 0.0, 2.0});
    CHECK(segments[1] == SpeakerSegment{"B", 2.0, 4.0});
  }
  SUBCASE("min length trims short leftovers") {
    const auto segments =
        derive_single_speaker_segments({track("A", {{0.0, 1.5}}), track("B", {{0.9, 3.0}})}, 0.995);
    // A keeps [0, 0.9) = 0.9 s -> trimmed; B keeps [1.5, 3.0) = 1.5 s -> kept
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].track_id == "B");
  }
  SUBCASE("self-overlapping intervals of one track are unioned, not excluded") {
    const auto segments = derive_single_speaker_segments({track("A", {{0, 3}, {2, 5}})}, 0.0);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0] == SpeakerSegment{"A", 0.0, 5.0});
  }
}

TEST_CASE("sweep line equals the 10 ms grid oracle on random interval sets") {
  Rng rng(404);
  const std::int64_t horizon = 2000;  // 20 s
  for (int trial = 0; trial < 200; ++trial) {
    const auto tracks = random_tracks_centis(rng, 6, 8, horizon);
    const double min_seg = trial % 2 == 0 ? 0.0 : 0.995;
    const std::int64_t min_centis = trial % 2 == 0 ? 0 : 100;

    const auto got = to_centis(derive_single_speaker_segments(tracks, min_seg));
    const auto want = grid_oracle(tracks, horizon, min_centis);
    CHECK(got == want);
  }
}

TEST_CASE("segment outputs never overlap and never exceed the input duration") {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tracks = random_tracks_centis(rng, 5, 6, 1500);
    const auto segments = derive_single_speaker_segments(tracks, 0.0);

    double output_total = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      CHECK(segments[i].start_s < segments[i].end_s);
      output_total += segments[i].end_s - segments[i].start_s;
      if (i > 0) CHECK(segments[i].start_s >= segments[i - 1].end_s);  // sorted, disjoint
    }
    double input_total = 0;
    for (const PersonTrack& t : tracks)
      for (const SpeakingInterval& iv : t.speaking_intervals) input_total += iv.end_s - iv.start_s;
    CHECK(output_total <= input_total + 1e-9);
  }
}

TEST_CASE("condition binding maps targets to streams and background to silent") {
  std::vector<PersonTrack> tracks(4);
  for (int i = 0; i < 4; ++i) tracks[static_cast<std::size_t>(i)].track_id = "t" + std::to_string(i);

  SUBCASE("two targets, two background") {
    const ConditionBinding b = build_condition_binding(tracks, {"t0", "t1"});
    REQUIRE(b.entries.size() == 4);
    CHECK(b.entries[0].track_id == "t0");
    CHECK(b.entries[0].role == BindingRole::TargetSpeakerA);
    CHECK(b.entries[0].audio_stream == AudioStream::StreamA);
    CHECK(b.entries[1].track_id == "t1");
    CHECK(b.entries[1].role == BindingRole::TargetSpeakerB);
    CHECK(b.entries[1].audio_stream == AudioStream::StreamB);
    for (std::size_t i = 2; i < 4; ++i) {
      CHECK(b.entries[i].role == BindingRole::Background);
      CHECK(b.entries[i].audio_stream == AudioStream::Silent);
    }
    for (std::int64_t i = 0; i < 4; ++i) CHECK(b.entries[static_cast<std::size_t>(i)].label_id == i);
  }
  SUBCASE("target order decides stream assignment") {
    const ConditionBinding b = build_condition_binding(tracks, {"t2", "t0"});
    CHECK(b.entries[0].track_id == "t2");
    CHECK(b.entries[0].audio_stream == AudioStream::StreamA);
    CHECK(b.entries[1].track_id == "t0");
    CHECK(b.entries[1].audio_stream == AudioStream::StreamB);
    // background sorted by track id after the targets
    CHECK(b.entries[2].track_id == "t1");
    CHECK(b.entries[3].track_id == "t3");
  }
  SUBCASE("single target has no silent entries") {
    const ConditionBinding b = build_condition_binding({tracks[0]}, {"t0"});
    REQUIRE(b.entries.size() == 1);
    CHECK(b.entries[0].audio_stream == AudioStream::StreamA);
  }
  SUBCASE("unknown target") {
    try {
      build_condition_binding(tracks, {"ghost"});
      FAIL("expected UnknownTrack");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownTrack);
    }
  }
  SUBCASE("too many targets") {
    try {
      build_condition_binding(tracks, {"t0", "t1", "t2"});
      FAIL("expected TooManyTargets");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TooManyTargets);
    }
  }
  SUBCASE("deterministic and total over valid inputs") {
    const ConditionBinding a = build_condition_binding(tracks, {"t0", "t1"});
    const ConditionBinding b = build_condition_binding(tracks, {"t0", "t1"});
    CHECK(a == b);
  }
}

TEST_CASE("record tracks JSON round trip validates intervals") {
  RecordTracks rt;
  rt.video_id = "v";
  rt.width = 1280;
  rt.height = 720;
  rt.duration_s = 12.0;
  PersonTrack t;
  t.track_id = "t0";
  t.frames = {0, 1, 2};
  t.boxes = {{1, 2, 3, 4}, {2, 3, 4, 5}, {3, 4, 5, 6}};
  t.speaking_intervals = {{0.5, 2.5}};
  rt.tracks.push_back(t);

  const RecordTracks back = record_tracks_from_json(record_tracks_to_json(rt));
  CHECK(back.video_id == rt.video_id);
  REQUIRE(back.tracks.size() == 1);
  CHECK(back.tracks[0] == rt.tracks[0]);

  SUBCASE("interval beyond duration is rejected") {
    nlohmann::json j = record_tracks_to_json(rt);
    j["tracks"][0]["speaking_intervals"][0]["end_s"] = 99.0;
    CHECK_THROWS_AS(record_tracks_from_json(j), Error);
  }
  SUBCASE("non-increasing frames are rejected") {
    nlohmann::json j = record_tracks_to_json(rt);
    j["tracks"][0]["frames"] = {0, 0, 1};
    CHECK_THROWS_AS(record_tracks_from_json(j), Error);
  }
}
