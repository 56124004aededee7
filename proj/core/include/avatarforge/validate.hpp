#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/frame_stats.hpp"
#include "avatarforge/record.hpp"

namespace avatarforge {

// Online clip-level validation chain. Stages run in exactly this order;
// a candidate dropped at stage i is never examined by stage j > i. Order
// affects only drop attribution, never the accepted set.
enum class FilterStageName {
  AudioSync,
  CameraSuitability,
  TextVisualQuality,
  Duration,
  VisualDefects,
  MotionConsistency,
  MaskArea,
};

const std::vector<FilterStageName>& filter_stage_order();
std::string to_string(FilterStageName s);
FilterStageName filter_stage_from_string(const std::string& s);

// A stage that needs an absent annotation drops with this reason, recorded
// distinctly from quality failures.
inline constexpr const char* kMissingAnnotation = "MissingAnnotation";

// All threshold comparisons are closed on the passing side.
struct FilterChainConfig {
  double max_offset_ms = 120.0;
  double min_sync_confidence = 0.5;

  std::set<CameraMotion> forbidden_camera_motions = {CameraMotion::Shake};
  std::set<CameraType> forbidden_camera_types;

  double min_perceptual_score = 0.3;
  std::set<ArtifactFlag> forbidden_artifacts = {ArtifactFlag::TextCoverage, ArtifactFlag::Subtitle,
                                                ArtifactFlag::WhiteFlash, ArtifactFlag::Transition};

  double min_duration_s = 3.0;
  double max_duration_s = 120.0;

  double max_black_ratio = 0.30;
  double max_white_ratio = 0.30;
  std::int64_t max_border_px = 8;
  double jump_k = 6.0;

  std::set<MotionSpeed> allowed_motion_speeds = {MotionSpeed::Natural};
  double max_motion_intensity = 8.0;

  double min_mask_fraction = 0.05;

  // Throws Error(ConfigIncomplete) when a threshold is non-finite or
  // inconsistent.
  void check() const;
};

struct FilterCandidate {
  ClipWindow clip;
  VideoRecord record;
  std::optional<FrameStats> stats;
};

struct StageReport {
  FilterStageName name = FilterStageName::AudioSync;
  std::int64_t entered = 0;
  std::int64_t dropped = 0;
  std::map<std::string, std::int64_t> drop_reasons;
  bool operator==(const StageReport&) const = default;
};

// Per-stage accept/drop accounting. Invariants: entered[0] equals the number
// of candidates, entered[i+1] = entered[i] - dropped[i], and
// accepted = entered[last] - dropped[last].
struct FilterReport {
  std::vector<StageReport> stages;
  std::int64_t accepted = 0;
  bool operator==(const FilterReport&) const = default;
};

struct SyncCheck {
  bool passed = true;
  std::string reason;  // "offset" or "confidence" when failed
};

// pass iff |av_offset_ms| <= max_offset_ms and sync_confidence >= min_confidence.
SyncCheck check_sync(const SyncAnnotation& sync, double max_offset_ms, double min_confidence);

// pass iff mask_fraction >= min_fraction (closed bound).
bool check_mask_area(double mask_fraction, double min_fraction);

// Mean per-frame fraction of the frame covered by face boxes; the default
// mask source when no external mask is configured.
double face_mask_fraction(const VideoRecord& record);

// One stage evaluated in isolation: nullopt = pass, otherwise the drop reason.
std::optional<std::string> evaluate_stage(FilterStageName stage, const FilterCandidate& candidate,
                                          const FilterChainConfig& config);

struct FilterChainResult {
  std::vector<FilterCandidate> accepted;
  FilterReport report;
};

FilterChainResult run_filter_chain(const std::vector<FilterCandidate>& candidates,
                                   const FilterChainConfig& config);

// Commutative, associative shard merge; sharded reports combine to the exact
// serial result. Throws Error(IncompatibleSchemaVersion) on version mismatch
// when merging parsed reports.
FilterReport merge_filter_reports(const std::vector<FilterReport>& shards);

nlohmann::json filter_report_to_json(const FilterReport& r);
FilterReport filter_report_from_json(const nlohmann::json& j);

// Threshold overrides from a config tree (flat keys); fail-closed on unknown
// keys. Missing keys keep their defaults.
FilterChainConfig filter_config_from_json(const nlohmann::json& config);

nlohmann::json filter_candidate_to_json(const FilterCandidate& c);
FilterCandidate filter_candidate_from_json(const nlohmann::json& j);

}  // namespace avatarforge
