#include "avatarforge/emotion.hpp"

#include <algorithm>

#include "avatarforge/errors.hpp"

namespace avatarforge {

namespace {

// Rank under the priority hierarchy 6 > 5 > 4 > 2 > 1 > 3 (higher wins).
int priority_rank(int category) {
  switch (category) {
    case 3: return 0;
    case 1: return 1;
    case 2: return 2;
    case 4: return 3;
    case 5: return 4;
    case 6: return 5;
  }
  return -1;
}

// Mean of the n largest values of column c.
double top_n_mean(const FrameEmotionMatrix& m, std::size_t c, std::size_t n) {
  std::vector<double> column;
  column.reserve(m.frame_count());
  for (const auto& row : m.frames) column.push_back(row[c]);
  std::sort(column.begin(), column.end(), std::greater<>());
  const std::size_t take = std::min(n, column.size());
  double sum = 0;
  for (std::size_t i = 0; i < take; ++i) sum += column[i];
  return take == 0 ? 0 : sum / static_cast<double>(take);
}

void append_section(std::string& out, const char* label, const std::string& text) {
  if (text.empty()) return;
  out += "  ";
  out += label;
  out += ": ";
  out += text;
  out += '\n';
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

bool apply_hard_exclusions(const ExclusionFlags& flags, double min_area_fraction) {
  if (flags.synthetic) return true;
  if (flags.subject_count > 2) return true;
  if (flags.identity_switch) return true;
  if (flags.subject_area_fraction < min_area_fraction) return true;
  return false;
}

EmotionCategory assign_priority_category(const std::set<int>& candidates) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "no candidate categories");
  int best = 0, best_rank = -1;
  for (int c : candidates) {
    const int rank = priority_rank(c);
    if (rank < 0)
      throw Error(Errc::SchemaViolation, "category " + std::to_string(c) + " outside 1..6");
    if (rank > best_rank) {
      best_rank = rank;
      best = c;
    }
  }
  return {best};
}

EmotionScore score_emotion(const FrameEmotionMatrix& matrix, std::size_t n) {
  if (matrix.frame_count() < 1 || matrix.class_count() < 2)
    throw Error(Errc::EmptyInput, "emotion matrix needs >= 1 frame and >= 2 classes");
  if (n < 1) throw Error(Errc::ConfigIncomplete, "top-n must be >= 1");

  std::vector<double> scores(matrix.class_count());
  for (std::size_t c = 0; c < matrix.class_count(); ++c) scores[c] = top_n_mean(matrix, c, n);

  // argmax, ties to the lower class index
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;

  if (matrix.class_names[best] == "Neutral") {
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      if (c == best) continue;
      if (scores[c] > scores[second]) second = c;
    }
    return {matrix.class_names[second], scores[second]};
  }
  return {matrix.class_names[best], scores[best]};
}

EmotionVerdict threshold_verdict(EmotionCategory category, const std::string& dominant_class,
                                 double score, double threshold) {
  EmotionVerdict v;
  v.category = category;
  v.dominant_class = dominant_class;
  v.score = score;
  v.retained = score > threshold;
  v.reclassified_nonemotional = (category.value == 5 || category.value == 6) && !v.retained;
  v.priority = category.value == 1;
  return v;
}

std::string compose_emotion_caption(const EmotionContext& context, const EmotionMotion& motion) {
  if (motion.facial.empty() && motion.head.empty() && motion.body.empty())
    throw Error(Errc::AllMotionEmpty, "at least one motion dimension must be non-empty");

  std::string out;
  std::string ctx;
  append_section(ctx, "Environment", context.environment);
  append_section(ctx, "Relationships", context.relationships);
  append_section(ctx, "Plot", context.plot);
  if (!ctx.empty()) {
    out += "Context:\n";
    out += ctx;
  }
  out += "Motion:\n";
  append_section(out, "Facial", join(motion.facial));
  append_section(out, "Head", join(motion.head));
  append_section(out, "Body", join(motion.body));
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

nlohmann::json emotion_verdict_to_json(const std::string& video_id, const EmotionVerdict& v) {
  return {{"video_id", video_id},
          {"category", v.category.value},
          {"dominant_class", v.dominant_class},
          {"score", v.score},
          {"retained", v.retained},
          {"reclassified_nonemotional", v.reclassified_nonemotional},
          {"priority", v.priority}};
}

}  // namespace avatarforge
