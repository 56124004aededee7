#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "avatarforge/errors.hpp"
#include "avatarforge/rng.hpp"
#include "avatarforge/silent.hpp"

using namespace avatarforge;

namespace {

ClipVerdict verdict(SpeakingVerdict a, SpeakingVerdict b) {
  ClipVerdict v;
  v.clip = {"v", 0, 100, 25.0};
  v.model_a = a;
  v.model_b = b;
  return v;
}

constexpr SpeakingVerdict kAll[] = {SpeakingVerdict::Speaking, SpeakingVerdict::NotSpeaking,
                                    SpeakingVerdict::Uncertain};

}  // namespace

TEST_CASE("decompose_clips window arithmetic") {
  SUBCASE("duration 10, len 4, stride 3 at unit fps") {
    const auto clips = decompose_clips(10, 4, 3, 1.0, "v");
    REQUIRE(clips.size() == 3);
    CHECK(clips[0].start_frame == 0);
    CHECK(clips[0].end_frame == 4);
    CHECK(clips[1].start_frame == 3);
    CHECK(clips[1].end_frame == 7);
    CHECK(clips[2].start_frame == 6);
    CHECK(clips[2].end_frame == 10);
  }
  SUBCASE("short video yields one covering window") {
    const auto clips = decompose_clips(2, 4, 4, 1.0);
    REQUIRE(clips.size() == 1);
    CHECK(clips[0].start_frame == 0);
    CHECK(clips[0].end_frame == 2);
  }
  SUBCASE("duration equal to clip length yields exactly one window") {
    CHECK(decompose_clips(4, 4, 4, 25.0).size() == 1);
  }
  SUBCASE("at 25 fps boundaries land on frames") {
    const auto clips = decompose_clips(10, 4, 3, 25.0);
    CHECK(clips[1].start_frame == 75);
    CHECK(clips[1].end_frame == 175);
  }
  SUBCASE("neighbor windows overlap by exactly clip_len minus stride") {
    const auto clips = decompose_clips(60, kDefaultClipLenS, 3.0, 1.0);
    for (std::size_t i = 1; i < clips.size(); ++i)
      CHECK(clips[i - 1].end_frame - clips[i].start_frame ==
            static_cast<std::int64_t>(kDefaultClipLenS - 3.0));
  }
  SUBCASE("bad parameters throw") {
    CHECK_THROWS_AS(decompose_clips(10, 0, 1), Error);
    CHECK_THROWS_AS(decompose_clips(10, 4, 0), Error);
    CHECK_THROWS_AS(decompose_clips(10, 4, 5), Error);  // stride > len
  }
}

TEST_CASE("agree_silent has exactly one true cell out of nine") {
  int trues = 0;
  for (SpeakingVerdict a : kAll) {
    for (SpeakingVerdict b : kAll) {
      const bool agreed = agree_silent(verdict(a, b));
      if (agreed) ++trues;
      CHECK(agreed == (a == SpeakingVerdict::NotSpeaking && b == SpeakingVerdict::NotSpeaking));
    }
  }
  CHECK(trues == 1);
}

TEST_CASE("aggregate_video strict rule") {
  const ClipVerdict silent = verdict(SpeakingVerdict::NotSpeaking, SpeakingVerdict::NotSpeaking);

  SUBCASE("all doubly NotSpeaking is Silent") {
    const auto label = aggregate_video("v", {silent, silent, silent, silent, silent});
    CHECK(label.label == SilenceLabel::Silent);
  }
  SUBCASE("one Speaking verdict excludes the video") {
    const auto label = aggregate_video(
        "v", {silent, silent, verdict(SpeakingVerdict::Speaking, SpeakingVerdict::NotSpeaking),
              silent, silent});
    CHECK(label.label == SilenceLabel::Excluded);
  }
  SUBCASE("an Uncertain verdict fails agreement") {
    const auto label =
        aggregate_video("v", {verdict(SpeakingVerdict::Uncertain, SpeakingVerdict::NotSpeaking)});
    CHECK(label.label == SilenceLabel::Excluded);
  }
  SUBCASE("empty verdict list throws") {
    CHECK_THROWS_AS(aggregate_video("v", {}), Error);
  }
}

TEST_CASE("adding verdicts can only keep or exclude, never re-silence") {
  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ClipVerdict> verdicts;
    const std::size_t n = 1 + rng.next_below(10);
    for (std::size_t i = 0; i < n; ++i)
      verdicts.push_back(verdict(kAll[rng.next_below(3)], kAll[rng.next_below(3)]));

    const SilenceLabel before = aggregate_video("v", verdicts).label;
    verdicts.push_back(verdict(kAll[rng.next_below(3)], kAll[rng.next_below(3)]));
    const SilenceLabel after = aggregate_video("v", verdicts).label;
    if (before == SilenceLabel::Excluded) CHECK(after == SilenceLabel::Excluded);
  }
}

TEST_CASE("any Speaking verdict anywhere forces Excluded on 1000 random lists") {
  Rng rng(62);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ClipVerdict> verdicts;
    const std::size_t n = 1 + rng.next_below(12);
    bool any_speaking = false;
    bool all_agree = true;
    for (std::size_t i = 0; i < n; ++i) {
      const ClipVerdict v = verdict(kAll[rng.next_below(3)], kAll[rng.next_below(3)]);
      any_speaking = any_speaking || v.model_a == SpeakingVerdict::Speaking ||
                     v.model_b == SpeakingVerdict::Speaking;
      all_agree = all_agree && agree_silent(v);
      verdicts.push_back(v);
    }
    const SilenceLabel label = aggregate_video("v", verdicts).label;
    if (any_speaking) CHECK(label == SilenceLabel::Excluded);
    CHECK((label == SilenceLabel::Silent) == all_agree);
  }
}

TEST_CASE("verdict JSON round trip") {
  const ClipVerdict v = verdict(SpeakingVerdict::NotSpeaking, SpeakingVerdict::Uncertain);
  const auto [id, back] = clip_verdict_from_json(clip_verdict_to_json("vid", v));
  CHECK(id == "vid");
  CHECK(back.model_a == v.model_a);
  CHECK(back.model_b == v.model_b);
  CHECK(back.clip == v.clip);
}
