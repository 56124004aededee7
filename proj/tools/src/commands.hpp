#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace avatarforge::cli {

// Exit codes: 0 success, 1 input/schema errors, 2 config errors. All
// diagnostics go to stderr; data goes to files or stdout.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitConfigError = 2;

struct AnnotateOptions {
  std::string in_path;
  std::string out_path;
  std::string graph_path;  // empty: default nine-annotator graph
  std::string report_path; // empty: <out>.report.jsonl
  unsigned parallelism = 1;
  std::uint64_t seed = 0;
};
int run_annotate(const AnnotateOptions& opt);

struct ValidateOptions {
  std::string in_path;
  std::string clips_path;
  std::string config_path;  // empty: defaults (or AVATAR_FORGE_CONFIG)
  std::string report_path;
  std::string out_path;
};
int run_validate(const ValidateOptions& opt);

struct SampleOptions {
  std::string in_path;
  std::string profile = "closeup";  // closeup|body|complex|music
  std::string profiles_file;        // optional JSON profile definition
  std::int64_t frames = 93;
  std::uint64_t seed = 0;
  std::string out_path;
};
int run_sample(const SampleOptions& opt);

struct MultipersonOptions {
  std::string tracks_path;
  double min_segment_s = 1.0;
  double min_displacement_frac = 0.03;
  std::int64_t min_frames = 25;
  std::string out_path;
  // bind mode
  bool bind = false;
  bool partition = false;
  std::vector<std::string> targets;
};
int run_multiperson(const MultipersonOptions& opt);

struct SilentOptions {
  std::string verdicts_path;
  std::string out_path;
};
int run_silent(const SilentOptions& opt);

struct EmotionOptions {
  std::string matrix_path;
  std::string flags_path;
  std::size_t top_n = 10;
  double threshold = 0.7;
  double min_area_fraction = 0.10;
  std::string out_path;
};
int run_emotion(const EmotionOptions& opt);

struct AudioAlignOptions {
  double duration_s = 0;
  std::uint64_t seed = 0;
  std::string dump;        // "shapes" prints every intermediate shape
  std::string out_prefix;  // writes <prefix>.aligned / <prefix>.latent tensors
  std::int64_t dim = 1280;
  std::int64_t window_frames = 1500;
};
int run_audio_align(const AudioAlignOptions& opt);

struct GrpoAdvantageOptions {
  std::string rewards_path;
  std::string weights_path;
  std::string sigma_mode = "max";  // max|per
  double eps_floor = 1e-6;
  std::string out_path;
  std::string totals_out_path;
};
int run_grpo_advantage(const GrpoAdvantageOptions& opt);

struct GrpoRolloutOptions {
  std::int64_t max_clips = 5;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string out_path;  // empty: stdout
};
int run_grpo_rollout(const GrpoRolloutOptions& opt);

struct StatsMergeOptions {
  std::vector<std::string> report_paths;
  std::string out_path;  // empty: print only
};
int run_stats_merge(const StatsMergeOptions& opt);

struct GenFixtureOptions {
  std::uint64_t seed = 0;
  std::size_t count = 20;
  std::string out_dir;
};
int run_gen_fixture(const GenFixtureOptions& opt);

// Flag value if set, else $AVATAR_FORGE_CONFIG, else empty.
std::string config_fallback(const std::string& flag_value);

}  // namespace avatarforge::cli
