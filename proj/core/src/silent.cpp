#include "avatarforge/silent.hpp"

#include <cmath>

#include "avatarforge/errors.hpp"
#include "avatarforge/json_io.hpp"

namespace avatarforge {

std::string to_string(SpeakingVerdict v) {
  switch (v) {
    case SpeakingVerdict::Speaking: return "Speaking";
    case SpeakingVerdict::NotSpeaking: return "NotSpeaking";
    case SpeakingVerdict::Uncertain: return "Uncertain";
  }
  return "?";
}

SpeakingVerdict speaking_verdict_from_string(const std::string& s) {
  if (s == "Speaking") return SpeakingVerdict::Speaking;
  if (s == "NotSpeaking") return SpeakingVerdict::NotSpeaking;
  if (s == "Uncertain") return SpeakingVerdict::Uncertain;
  throw Error(Errc::SchemaViolation, "unknown speaking verdict '" + s + "'");
}

std::vector<ClipWindow> decompose_clips(double duration_s, double clip_len_s, double stride_s,
                                        double fps, const std::string& video_id) {
  if (!(clip_len_s > 0) || !(stride_s > 0) || stride_s > clip_len_s)
    throw Error(Errc::ConfigIncomplete, "need clip_len_s > 0 and 0 < stride_s <= clip_len_s");

  auto to_frame = [fps](double seconds) { return static_cast<std::int64_t>(std::llround(seconds * fps)); };

  std::vector<ClipWindow> out;
  if (duration_s < clip_len_s) {
    out.push_back({video_id, 0, std::max<std::int64_t>(1, to_frame(duration_s)), fps});
    return out;
  }
  for (std::int64_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * stride_s;
    if (start + clip_len_s > duration_s) break;
    out.push_back({video_id, to_frame(start), to_frame(start + clip_len_s), fps});
  }
  return out;
}

bool agree_silent(const ClipVerdict& v) {
  return v.model_a == SpeakingVerdict::NotSpeaking && v.model_b == SpeakingVerdict::NotSpeaking;
}

VideoSilenceLabel aggregate_video(const std::string& video_id,
                                  const std::vector<ClipVerdict>& verdicts) {
  if (verdicts.empty()) throw Error(Errc::EmptyVerdicts, "no clip verdicts for " + video_id);
  for (const ClipVerdict& v : verdicts)
    if (!agree_silent(v)) return {video_id, SilenceLabel::Excluded};
  return {video_id, SilenceLabel::Silent};
}

nlohmann::json clip_verdict_to_json(const std::string& video_id, const ClipVerdict& v) {
  return {{"video_id", video_id},
          {"clip", clip_window_to_json(v.clip)},
          {"model_a", to_string(v.model_a)},
          {"model_b", to_string(v.model_b)}};
}

std::pair<std::string, ClipVerdict> clip_verdict_from_json(const nlohmann::json& j) {
  ClipVerdict v;
  v.clip = clip_window_from_json(j.at("clip"));
  v.model_a = speaking_verdict_from_string(j.at("model_a").get<std::string>());
  v.model_b = speaking_verdict_from_string(j.at("model_b").get<std::string>());
  return {j.value("video_id", std::string()), v};
}

}  // namespace avatarforge
