#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/record.hpp"

namespace avatarforge {

enum class SpeakingVerdict { Speaking, NotSpeaking, Uncertain };

std::string to_string(SpeakingVerdict v);
SpeakingVerdict speaking_verdict_from_string(const std::string& s);

// Two independent model passes over the same clip.
struct ClipVerdict {
  ClipWindow clip;
  SpeakingVerdict model_a = SpeakingVerdict::Uncertain;
  SpeakingVerdict model_b = SpeakingVerdict::Uncertain;
};

enum class SilenceLabel { Silent, Excluded };

struct VideoSilenceLabel {
  std::string video_id;
  SilenceLabel label = SilenceLabel::Excluded;
};

// Clip starts at 0, stride, 2*stride, ... while start + clip_len <= duration;
// a video shorter than clip_len yields a single window covering all of it.
// fps converts second boundaries into frame indices.
std::vector<ClipWindow> decompose_clips(double duration_s, double clip_len_s, double stride_s,
                                        double fps = 25.0, const std::string& video_id = {});

inline constexpr double kDefaultClipLenS = 4.0;
inline constexpr double kDefaultStrideS = 4.0;

// true iff both models said NotSpeaking; Uncertain never agrees.
bool agree_silent(const ClipVerdict& verdict);

// Silent iff every clip agrees silent; anything else excludes the video.
// Throws Error(EmptyVerdicts) on an empty list.
VideoSilenceLabel aggregate_video(const std::string& video_id,
                                  const std::vector<ClipVerdict>& verdicts);

nlohmann::json clip_verdict_to_json(const std::string& video_id, const ClipVerdict& v);
std::pair<std::string, ClipVerdict> clip_verdict_from_json(const nlohmann::json& j);

}  // namespace avatarforge
