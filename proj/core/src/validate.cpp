#include "avatarforge/validate.hpp"

#include <cmath>

#include "avatarforge/config.hpp"
#include "avatarforge/json_io.hpp"

namespace avatarforge {

namespace {

const std::vector<FilterStageName> kStageOrder = {
    FilterStageName::AudioSync,        FilterStageName::CameraSuitability,
    FilterStageName::TextVisualQuality, FilterStageName::Duration,
    FilterStageName::VisualDefects,    FilterStageName::MotionConsistency,
    FilterStageName::MaskArea,
};

const std::vector<std::pair<FilterStageName, const char*>> kStageNames = {
    {FilterStageName::AudioSync, "AudioSync"},
    {FilterStageName::CameraSuitability, "CameraSuitability"},
    {FilterStageName::TextVisualQuality, "TextVisualQuality"},
    {FilterStageName::Duration, "Duration"},
    {FilterStageName::VisualDefects, "VisualDefects"},
    {FilterStageName::MotionConsistency, "MotionConsistency"},
    {FilterStageName::MaskArea, "MaskArea"},
};

void require_finite(double v, const char* name) {
  if (!std::isfinite(v))
    throw Error(Errc::ConfigIncomplete, std::string("threshold ") + name + " is not finite");
}

}  // namespace

const std::vector<FilterStageName>& filter_stage_order() { return kStageOrder; }

std::string to_string(FilterStageName s) {
  for (const auto& [v, n] : kStageNames)
    if (v == s) return n;
  return "?";
}

FilterStageName filter_stage_from_string(const std::string& s) {
  for (const auto& [v, n] : kStageNames)
    if (s == n) return v;
  throw Error(Errc::MalformedRecord, "unknown filter stage '" + s + "'");
}

void FilterChainConfig::check() const {
  require_finite(max_offset_ms, "max_offset_ms");
  require_finite(min_sync_confidence, "min_sync_confidence");
  require_finite(min_perceptual_score, "min_perceptual_score");
  require_finite(min_duration_s, "min_duration_s");
  require_finite(max_duration_s, "max_duration_s");
  require_finite(max_black_ratio, "max_black_ratio");
  require_finite(max_white_ratio, "max_white_ratio");
  require_finite(jump_k, "jump_k");
  require_finite(max_motion_intensity, "max_motion_intensity");
  require_finite(min_mask_fraction, "min_mask_fraction");
  if (min_duration_s > max_duration_s)
    throw Error(Errc::ConfigIncomplete, "duration window is empty");
  if (!(jump_k > 1)) throw Error(Errc::ConfigIncomplete, "jump_k must be > 1");
}

SyncCheck check_sync(const SyncAnnotation& sync, double max_offset_ms, double min_confidence) {
  if (std::abs(sync.av_offset_ms) > max_offset_ms) return {false, "offset"};
  if (sync.sync_confidence < min_confidence) return {false, "confidence"};
  return {true, {}};
}

bool check_mask_area(double mask_fraction, double min_fraction) {
  return mask_fraction >= min_fraction;
}

double face_mask_fraction(const VideoRecord& record) {
  if (!record.annotations.face || record.width <= 0 || record.height <= 0) return 0;
  const double frame_area = static_cast<double>(record.width) * static_cast<double>(record.height);
  std::map<std::int64_t, double> per_frame;
  for (const FaceBox& b : record.annotations.face->boxes) per_frame[b.frame] += b.w * b.h;
  if (per_frame.empty()) return 0;
  double sum = 0;
  for (const auto& [frame, area] : per_frame) sum += area / frame_area;
  return sum / static_cast<double>(per_frame.size());
}

std::optional<std::string> evaluate_stage(FilterStageName stage, const FilterCandidate& c,
                                          const FilterChainConfig& cfg) {
  const AnnotationSet& a = c.record.annotations;
  switch (stage) {
    case FilterStageName::AudioSync: {
      if (!a.sync) return kMissingAnnotation;
      const SyncCheck r = check_sync(*a.sync, cfg.max_offset_ms, cfg.min_sync_confidence);
      if (r.passed) return std::nullopt;
      return r.reason == "offset" ? "sync_offset_above_max" : "sync_confidence_below_min";
    }
    case FilterStageName::CameraSuitability: {
      if (!a.camera) return kMissingAnnotation;
      if (cfg.forbidden_camera_types.contains(a.camera->camera_type))
        return "camera_type_unsuitable";
      if (cfg.forbidden_camera_motions.contains(a.camera->camera_motion))
        return "camera_motion_unsuitable";
      return std::nullopt;
    }
    case FilterStageName::TextVisualQuality: {
      if (!a.quality) return kMissingAnnotation;
      if (a.quality->perceptual_score < cfg.min_perceptual_score)
        return "perceptual_score_below_min";
      for (ArtifactFlag f : a.quality->artifact_flags)
        if (cfg.forbidden_artifacts.contains(f)) return "artifact_" + to_string(f);
      return std::nullopt;
    }
    case FilterStageName::Duration: {
      const double dur = static_cast<double>(c.clip.length()) / c.clip.fps;
      if (dur < cfg.min_duration_s) return "duration_below_min";
      if (dur > cfg.max_duration_s) return "duration_above_max";
      return std::nullopt;
    }
    case FilterStageName::VisualDefects: {
      if (!c.stats) return kMissingAnnotation;
      if (c.stats->black_ratio > cfg.max_black_ratio) return "black_ratio_above_max";
      if (c.stats->white_ratio > cfg.max_white_ratio) return "white_ratio_above_max";
      for (std::int64_t width : c.stats->border)
        if (width > cfg.max_border_px) return "border_above_max";
      if (!c.stats->interframe_diff.empty() &&
          !detect_frame_jump(c.stats->interframe_diff, cfg.jump_k).empty())
        return "frame_jump";
      return std::nullopt;
    }
    case FilterStageName::MotionConsistency: {
      if (!a.motion) return kMissingAnnotation;
      if (!cfg.allowed_motion_speeds.contains(a.motion->motion_speed))
        return "motion_speed_unsuitable";
      if (a.motion->motion_intensity > cfg.max_motion_intensity)
        return "motion_intensity_above_max";
      return std::nullopt;
    }
    case FilterStageName::MaskArea: {
      if (!a.face) return kMissingAnnotation;
      if (!check_mask_area(face_mask_fraction(c.record), cfg.min_mask_fraction))
        return "mask_fraction_below_min";
      return std::nullopt;
    }
  }
  return std::nullopt;
}

FilterChainResult run_filter_chain(const std::vector<FilterCandidate>& candidates,
                                   const FilterChainConfig& config) {
  config.check();

  FilterChainResult result;
  for (FilterStageName stage : kStageOrder) result.report.stages.push_back({stage, 0, 0, {}});

  for (const FilterCandidate& candidate : candidates) {
    bool alive = true;
    for (std::size_t i = 0; i < kStageOrder.size() && alive; ++i) {
      StageReport& sr = result.report.stages[i];
      ++sr.entered;
      if (auto reason = evaluate_stage(kStageOrder[i], candidate, config)) {
        ++sr.dropped;
        ++sr.drop_reasons[*reason];
        alive = false;
      }
    }
    if (alive) result.accepted.push_back(candidate);
  }
  result.report.accepted = static_cast<std::int64_t>(result.accepted.size());
  return result;
}

FilterReport merge_filter_reports(const std::vector<FilterReport>& shards) {
  FilterReport merged;
  for (FilterStageName stage : kStageOrder) merged.stages.push_back({stage, 0, 0, {}});
  for (const FilterReport& shard : shards) {
    if (shard.stages.size() != merged.stages.size())
      throw Error(Errc::MalformedRecord, "filter report has wrong stage count");
    for (std::size_t i = 0; i < merged.stages.size(); ++i) {
      if (shard.stages[i].name != merged.stages[i].name)
        throw Error(Errc::MalformedRecord, "filter report stage order mismatch");
      merged.stages[i].entered += shard.stages[i].entered;
      merged.stages[i].dropped += shard.stages[i].dropped;
      for (const auto& [reason, count] : shard.stages[i].drop_reasons)
        merged.stages[i].drop_reasons[reason] += count;
    }
    merged.accepted += shard.accepted;
  }
  return merged;
}

nlohmann::json filter_report_to_json(const FilterReport& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageReport& s : r.stages) {
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [reason, count] : s.drop_reasons) reasons[reason] = count;
    stages.push_back({{"name", to_string(s.name)},
                      {"entered", s.entered},
                      {"dropped", s.dropped},
                      {"drop_reasons", std::move(reasons)}});
  }
  return {{"schema_version", kSchemaVersion}, {"stages", std::move(stages)}, {"accepted", r.accepted}};
}

FilterReport filter_report_from_json(const nlohmann::json& j) {
  const std::int64_t version = j.value("schema_version", std::int64_t{kSchemaVersion});
  if (version != kSchemaVersion)
    throw Error(Errc::IncompatibleSchemaVersion,
                "filter report schema_version " + std::to_string(version));
  FilterReport r;
  for (const auto& sj : j.at("stages")) {
    StageReport s;
    s.name = filter_stage_from_string(sj.at("name").get<std::string>());
    s.entered = sj.value("entered", std::int64_t{0});
    s.dropped = sj.value("dropped", std::int64_t{0});
    if (auto it = sj.find("drop_reasons"); it != sj.end())
      for (const auto& [reason, count] : it->items())
        s.drop_reasons[reason] = count.get<std::int64_t>();
    r.stages.push_back(std::move(s));
  }
  r.accepted = j.value("accepted", std::int64_t{0});
  return r;
}

nlohmann::json filter_candidate_to_json(const FilterCandidate& c) {
  nlohmann::json j = {{"clip", clip_window_to_json(c.clip)}, {"record", record_to_json(c.record)}};
  if (c.stats) j["frame_stats"] = frame_stats_to_json(*c.stats);
  return j;
}

FilterCandidate filter_candidate_from_json(const nlohmann::json& j) {
  FilterCandidate c;
  c.clip = clip_window_from_json(j.at("clip"));
  c.record = record_from_json(j.at("record"));
  if (auto it = j.find("frame_stats"); it != j.end() && !it->is_null())
    c.stats = frame_stats_from_json(*it);
  return c;
}

FilterChainConfig filter_config_from_json(const nlohmann::json& config) {
  require_known_keys(config,
                     {"max_offset_ms", "min_sync_confidence", "forbidden_camera_motions",
                      "forbidden_camera_types", "min_perceptual_score", "forbidden_artifacts",
                      "min_duration_s", "max_duration_s", "max_black_ratio", "max_white_ratio",
                      "max_border_px", "jump_k", "allowed_motion_speeds", "max_motion_intensity",
                      "min_mask_fraction"},
                     "filter config");
  FilterChainConfig out;
  try {
    out.max_offset_ms = config.value("max_offset_ms", out.max_offset_ms);
    out.min_sync_confidence = config.value("min_sync_confidence", out.min_sync_confidence);
    out.min_perceptual_score = config.value("min_perceptual_score", out.min_perceptual_score);
    out.min_duration_s = config.value("min_duration_s", out.min_duration_s);
    out.max_duration_s = config.value("max_duration_s", out.max_duration_s);
    out.max_black_ratio = config.value("max_black_ratio", out.max_black_ratio);
    out.max_white_ratio = config.value("max_white_ratio", out.max_white_ratio);
    out.max_border_px = config.value("max_border_px", out.max_border_px);
    out.jump_k = config.value("jump_k", out.jump_k);
    out.max_motion_intensity = config.value("max_motion_intensity", out.max_motion_intensity);
    out.min_mask_fraction = config.value("min_mask_fraction", out.min_mask_fraction);
    if (auto it = config.find("forbidden_camera_motions"); it != config.end()) {
      out.forbidden_camera_motions.clear();
      for (const auto& v : *it) out.forbidden_camera_motions.insert(camera_motion_from_string(v));
    }
    if (auto it = config.find("forbidden_camera_types"); it != config.end()) {
      out.forbidden_camera_types.clear();
      for (const auto& v : *it) out.forbidden_camera_types.insert(camera_type_from_string(v));
    }
    if (auto it = config.find("forbidden_artifacts"); it != config.end()) {
      out.forbidden_artifacts.clear();
      for (const auto& v : *it) out.forbidden_artifacts.insert(artifact_flag_from_string(v));
    }
    if (auto it = config.find("allowed_motion_speeds"); it != config.end()) {
      out.allowed_motion_speeds.clear();
      for (const auto& v : *it) out.allowed_motion_speeds.insert(motion_speed_from_string(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("filter config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaViolation)
      throw Error(Errc::ConfigError, std::string("filter config: ") + e.what());
    throw;
  }
  out.check();
  return out;
}

}  // namespace avatarforge
