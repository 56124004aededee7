#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "avatarforge/emotion.hpp"
#include "avatarforge/errors.hpp"
#include "avatarforge/rng.hpp"

using namespace avatarforge;

namespace {

FrameEmotionMatrix matrix(std::vector<std::string> names, std::vector<std::vector<double>> rows) {
  FrameEmotionMatrix m;
  m.class_names = std::move(names);
  m.frames = std::move(rows);
  return m;
}

// Sort-and-mean oracle, column by column.
std::pair<std::string, double> score_oracle(const FrameEmotionMatrix& m, std::size_t n) {
  std::vector<double> scores;
  for (std::size_t c = 0; c < m.class_count(); ++c) {
    std::vector<double> col;
    for (const auto& row : m.frames) col.push_back(row[c]);
    std::sort(col.rbegin(), col.rend());
    const std::size_t take = std::min(n, col.size());
    double sum = 0;
    for (std::size_t i = 0; i < take; ++i) sum += col[i];
    scores.push_back(sum / static_cast<double>(take));
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  if (m.class_names[best] == "Neutral") {
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t c = 0; c < scores.size(); ++c)
      if (c != best && scores[c] > scores[second]) second = c;
    return {m.class_names[second], scores[second]};
  }
  return {m.class_names[best], scores[best]};
}

}  // namespace

TEST_CASE("hard exclusion rules") {
  ExclusionFlags clean;
  clean.subject_count = 1;
  clean.subject_area_fraction = 0.4;

  CHECK_FALSE(apply_hard_exclusions(clean, 0.1));

  SUBCASE("more than two subjects") {
    ExclusionFlags f = clean;
    f.subject_count = 3;
    CHECK(apply_hard_exclusions(f, 0.1));
    f.subject_count = 2;
    CHECK_FALSE(apply_hard_exclusions(f, 0.1));
  }
  SUBCASE("synthetic content excludes regardless of everything else") {
    ExclusionFlags f = clean;
    f.synthetic = true;
    CHECK(apply_hard_exclusions(f, 0.1));
  }
  SUBCASE("identity switch") {
    ExclusionFlags f = clean;
    f.identity_switch = true;
    CHECK(apply_hard_exclusions(f, 0.1));
  }
  SUBCASE("small subject area") {
    ExclusionFlags f = clean;
    f.subject_area_fraction = 0.05;
    CHECK(apply_hard_exclusions(f, 0.1));
  }
}

TEST_CASE("priority hierarchy 6 > 5 > 4 > 2 > 1 > 3") {
  CHECK(assign_priority_category({1, 3}).value == 1);
  CHECK(assign_priority_category({2, 4}).value == 4);
  CHECK(assign_priority_category({3}).value == 3);
  CHECK(assign_priority_category({1, 2, 3, 4, 5, 6}).value == 6);

  SUBCASE("all 63 non-empty subsets match the rank-permutation oracle") {
    const int rank_order[] = {3, 1, 2, 4, 5, 6};  // ascending priority
    for (int mask = 1; mask < 64; ++mask) {
      std::set<int> candidates;
      for (int c = 1; c <= 6; ++c)
        if (mask & (1 << (c - 1))) candidates.insert(c);

      int expected = 0;
      for (int c : rank_order)
        if (candidates.contains(c)) expected = c;  // last hit = highest rank
      CHECK(assign_priority_category(candidates).value == expected);
    }
  }
  SUBCASE("empty and out-of-range candidates throw") {
    CHECK_THROWS_AS(assign_priority_category({}), Error);
    CHECK_THROWS_AS(assign_priority_category({0}), Error);
    CHECK_THROWS_AS(assign_priority_category({7}), Error);
  }
}

TEST_CASE("top-N emotion scoring") {
  SUBCASE("single frame argmax") {
    const auto s = score_emotion(matrix({"Happy", "Neutral"}, {{0.9, 0.1}}), 1);
    CHECK(s.dominant_class == "Happy");
    CHECK(s.score == doctest::Approx(0.9));
  }
  SUBCASE("neutral bias correction returns the second-highest class") {
    const auto s = score_emotion(matrix({"Neutral", "Sad", "Happy"}, {{0.9, 0.6, 0.2}}), 1);
    CHECK(s.dominant_class == "Sad");
    CHECK(s.score == doctest::Approx(0.6));
  }
  SUBCASE("linear ramp, mean of the top 10 of 20") {
    std::vector<std::vector<double>> rows;
    for (int f = 0; f < 20; ++f)
      rows.push_back({0.95 * static_cast<double>(f) / 19.0, 0.0});
    const auto s = score_emotion(matrix({"Happy", "Neutral"}, rows), 10);
    double expected = 0;
    for (int f = 10; f < 20; ++f) expected += 0.95 * static_cast<double>(f) / 19.0;
    expected /= 10.0;
    CHECK(s.dominant_class == "Happy");
    CHECK(s.score == doctest::Approx(expected));
  }
  SUBCASE("n larger than the frame count uses all frames") {
    const auto s = score_emotion(matrix({"Happy", "Neutral"}, {{0.4, 0.0}, {0.8, 0.0}}), 99);
    CHECK(s.score == doctest::Approx(0.6));
  }
  SUBCASE("argmax ties break to the lower class index") {
    const auto s = score_emotion(matrix({"Angry", "Happy", "Neutral"}, {{0.7, 0.7, 0.1}}), 1);
    CHECK(s.dominant_class == "Angry");
  }
  SUBCASE("200 random matrices match the sort-and-mean oracle") {
    Rng rng(303);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t frames = 1 + rng.next_below(30);
      const std::size_t classes = 2 + rng.next_below(6);
      std::vector<std::string> names;
      for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
      names[rng.next_below(classes)] = "Neutral";
      std::vector<std::vector<double>> rows(frames, std::vector<double>(classes));
      for (auto& row : rows)
        for (double& v : row) v = rng.next_unit();
      const FrameEmotionMatrix m = matrix(names, rows);
      const std::size_t n = 1 + rng.next_below(frames + 4);

      const auto got = score_emotion(m, n);
      const auto [want_class, want_score] = score_oracle(m, n);
      CHECK(got.dominant_class == want_class);
      CHECK(got.score == doctest::Approx(want_score));
      CHECK(got.dominant_class != "Neutral");
    }
  }
  SUBCASE("score is monotone non-increasing in n") {
    Rng rng(304);
    std::vector<std::vector<double>> rows(15, std::vector<double>(2));
    for (auto& row : rows) {
      row[0] = rng.next_unit();
      row[1] = 0.0;
    }
    const FrameEmotionMatrix m = matrix({"Happy", "Neutral"}, rows);
    double prev = 1.0;
    for (std::size_t n = 1; n <= 15; ++n) {
      const double s = score_emotion(m, n).score;
      CHECK(s <= prev + 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("threshold verdict is strict at 0.7") {
  SUBCASE("category 5 below threshold is re-classified non-emotional") {
    const EmotionVerdict v = threshold_verdict({5}, "Sad", 0.65);
    CHECK_FALSE(v.retained);
    CHECK(v.reclassified_nonemotional);
    CHECK_FALSE(v.priority);
  }
  SUBCASE("category 1 keeps its priority flag") {
    const EmotionVerdict v = threshold_verdict({1}, "Happy", 0.9);
    CHECK(v.retained);
    CHECK(v.priority);
    CHECK_FALSE(v.reclassified_nonemotional);
  }
  SUBCASE("category 1 is priority even when dropped") {
    const EmotionVerdict v = threshold_verdict({1}, "Happy", 0.1);
    CHECK_FALSE(v.retained);
    CHECK(v.priority);
  }
  SUBCASE("exactly 0.7 drops, epsilon above retains") {
    CHECK_FALSE(threshold_verdict({2}, "Happy", 0.7).retained);
    CHECK(threshold_verdict({2}, "Happy", 0.700001).retained);
  }
  SUBCASE("category 6 below threshold is also re-classified") {
    CHECK(threshold_verdict({6}, "Angry", 0.3).reclassified_nonemotional);
    CHECK_FALSE(threshold_verdict({4}, "Angry", 0.3).reclassified_nonemotional);
  }
}

TEST_CASE("emotion caption scaffold") {
  EmotionContext ctx{"a dim restaurant", "two old friends", "an argument builds"};
  EmotionMotion motion;
  motion.facial = {"brows furrow", "gaze drops"};
  motion.head = {"slow shake"};
  motion.body = {"leans back", "arms cross"};

  const std::string caption = compose_emotion_caption(ctx, motion);

  SUBCASE("all six labeled sections appear in fixed order") {
    const char* labels[] = {"Environment:", "Relationships:", "Plot:",
                            "Facial:",      "Head:",          "Body:"};
    std::size_t pos = 0;
    for (const char* label : labels) {
      const std::size_t at = caption.find(label, pos);
      REQUIRE(at != std::string::npos);
      pos = at;
    }
    CHECK(caption.find("Context:") < caption.find("Motion:"));
  }
  SUBCASE("chronological order inside a motion dimension is preserved") {
    CHECK(caption.find("brows furrow") < caption.find("gaze drops"));
  }
  SUBCASE("empty relationships section is omitted, others intact") {
    EmotionContext partial = ctx;
    partial.relationships.clear();
    const std::string c = compose_emotion_caption(partial, motion);
    CHECK(c.find("Relationships:") == std::string::npos);
    CHECK(c.find("Environment:") != std::string::npos);
    CHECK(c.find("Plot:") != std::string::npos);
  }
  SUBCASE("identical inputs give identical strings") {
    CHECK(compose_emotion_caption(ctx, motion) == caption);
  }
  SUBCASE("all motion dimensions empty throws") {
    CHECK_THROWS_AS(compose_emotion_caption(ctx, EmotionMotion{}), Error);
  }
  SUBCASE("fields pass through verbatim") {
    CHECK(caption.find("a dim restaurant") != std::string::npos);
    CHECK(caption.find("arms cross") != std::string::npos);
  }
}
