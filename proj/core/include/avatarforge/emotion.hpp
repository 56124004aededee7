#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace avatarforge {

// Emotion taxonomy value: 0 = excluded/null, 1..6 are the content categories.
// The priority hierarchy over 1..6 is 6 > 5 > 4 > 2 > 1 > 3.
struct EmotionCategory {
  int value = 0;
};

inline constexpr int kEmotionCategoryCount = 6;

struct FrameEmotionMatrix {
  std::vector<std::string> class_names;       // includes "Neutral"
  std::vector<std::vector<double>> frames;    // F rows of C confidences in [0,1]

  std::size_t frame_count() const { return frames.size(); }
  std::size_t class_count() const { return class_names.size(); }
};

struct ExclusionFlags {
  bool synthetic = false;
  std::int64_t subject_count = 0;
  bool identity_switch = false;
  double subject_area_fraction = 0;  // [0,1]
};

inline constexpr double kDefaultMinSubjectAreaFraction = 0.10;

struct EmotionVerdict {
  EmotionCategory category;
  std::string dominant_class;
  double score = 0;  // [0,1]
  bool retained = false;
  bool reclassified_nonemotional = false;
  bool priority = false;  // category-1 videos are prioritized regardless
};

// exclude iff synthetic, more than two subjects, an identity switch, or a
// subject area below min_area_fraction.
bool apply_hard_exclusions(const ExclusionFlags& flags,
                           double min_area_fraction = kDefaultMinSubjectAreaFraction);

// Maximal candidate under the 6 > 5 > 4 > 2 > 1 > 3 total order. Throws
// Error(EmptyCandidates) on an empty set and rejects values outside 1..6.
EmotionCategory assign_priority_category(const std::set<int>& candidates);

struct EmotionScore {
  std::string dominant_class;
  double score = 0;
};

// Per class: mean of the n largest per-frame confidences (all frames when
// n > F). The argmax class wins, ties broken by lower class index; when the
// winner is Neutral the second-highest class is returned instead, so the
// result is never Neutral.
EmotionScore score_emotion(const FrameEmotionMatrix& matrix, std::size_t n);

inline constexpr double kDefaultEmotionThreshold = 0.7;

// retained iff score > threshold (strict). Categories 5 and 6 that fail the
// threshold are re-classified as non-emotional.
EmotionVerdict threshold_verdict(EmotionCategory category, const std::string& dominant_class,
                                 double score, double threshold = kDefaultEmotionThreshold);

struct EmotionContext {
  std::string environment;
  std::string relationships;
  std::string plot;
};

struct EmotionMotion {
  std::vector<std::string> facial;  // chronological
  std::vector<std::string> head;
  std::vector<std::string> body;
};

// Structured caption scaffold with labeled Context / Motion sections; empty
// sub-fields are omitted. Throws Error(AllMotionEmpty) when no motion
// dimension has content. Fields are passed through verbatim.
std::string compose_emotion_caption(const EmotionContext& context, const EmotionMotion& motion);

nlohmann::json emotion_verdict_to_json(const std::string& video_id, const EmotionVerdict& v);

}  // namespace avatarforge
