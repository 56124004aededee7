#include "avatarforge/sample.hpp"

#include <algorithm>
#include <cmath>

#include "avatarforge/errors.hpp"
#include "avatarforge/json_io.hpp"
#include "avatarforge/rng.hpp"

namespace avatarforge {

namespace {

const std::vector<std::pair<PredicateOp, const char*>> kOpNames = {
    {PredicateOp::Present, "present"}, {PredicateOp::Eq, "eq"}, {PredicateOp::Ne, "ne"},
    {PredicateOp::Lt, "lt"},           {PredicateOp::Le, "le"}, {PredicateOp::Gt, "gt"},
    {PredicateOp::Ge, "ge"},           {PredicateOp::In, "in"},
};

std::string op_name(PredicateOp op) {
  for (const auto& [v, n] : kOpNames)
    if (v == op) return n;
  return "?";
}

PredicateOp op_from_string(const std::string& s) {
  for (const auto& [v, n] : kOpNames)
    if (s == n) return v;
  throw Error(Errc::ConfigError, "unknown predicate op '" + s + "'");
}

// Union length of [start,end) spans clamped to [0, duration].
double span_coverage(const CaptionSet& captions, double duration_s) {
  if (duration_s <= 0) return 0;
  std::vector<std::pair<double, double>> spans;
  for (const TemporalSpan& s : captions.temporal_spans)
    spans.emplace_back(std::max(0.0, s.start_s), std::min(duration_s, s.end_s));
  std::sort(spans.begin(), spans.end());
  double covered = 0, cursor = 0;
  for (const auto& [lo, hi] : spans) {
    if (hi <= cursor) continue;
    covered += hi - std::max(lo, cursor);
    cursor = hi;
  }
  return covered / duration_s;
}

}  // namespace

std::optional<json> resolve_field(const VideoRecord& r, const std::string& field) {
  const AnnotationSet& a = r.annotations;

  if (field == "video_id") return json(r.video_id);
  if (field == "source_category") return json(to_string(r.source_category));
  if (field == "duration_s") return json(r.duration_s);
  if (field == "fps") return json(r.fps);
  if (field == "width") return json(r.width);
  if (field == "height") return json(r.height);

  if (field == "annotations.face") return a.face ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.face.person_count")
    return a.face ? std::optional<json>(json(a.face->person_count)) : std::nullopt;
  if (field == "annotations.face.max_abs_yaw") {
    if (!a.face || a.face->head_pose.empty()) return std::nullopt;
    double m = 0;
    for (const HeadPose& p : a.face->head_pose) m = std::max(m, std::abs(p.yaw));
    return json(m);
  }

  if (field == "annotations.body") return a.body ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.body.composition")
    return a.body ? std::optional<json>(json(to_string(a.body->composition))) : std::nullopt;
  if (field == "annotations.body.hand_visibility")
    return a.body ? std::optional<json>(json(a.body->hand_visibility)) : std::nullopt;

  if (field == "annotations.audio") return a.audio ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.audio.has_speech")
    return a.audio ? std::optional<json>(json(a.audio->has_speech)) : std::nullopt;
  if (field == "annotations.audio.vocal_track_available")
    return a.audio ? std::optional<json>(json(a.audio->vocal_track_available)) : std::nullopt;

  if (field == "annotations.sync") return a.sync ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.sync.av_offset_ms")
    return a.sync ? std::optional<json>(json(a.sync->av_offset_ms)) : std::nullopt;
  if (field == "annotations.sync.abs_offset_ms")
    return a.sync ? std::optional<json>(json(std::abs(a.sync->av_offset_ms))) : std::nullopt;
  if (field == "annotations.sync.sync_confidence")
    return a.sync ? std::optional<json>(json(a.sync->sync_confidence)) : std::nullopt;

  if (field == "annotations.quality") return a.quality ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.quality.perceptual_score")
    return a.quality ? std::optional<json>(json(a.quality->perceptual_score)) : std::nullopt;

  if (field == "annotations.camera") return a.camera ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.camera.camera_type")
    return a.camera ? std::optional<json>(json(to_string(a.camera->camera_type))) : std::nullopt;
  if (field == "annotations.camera.camera_motion")
    return a.camera ? std::optional<json>(json(to_string(a.camera->camera_motion))) : std::nullopt;
  if (field == "annotations.camera.shot_size")
    return a.camera ? std::optional<json>(json(to_string(a.camera->shot_size))) : std::nullopt;

  if (field == "annotations.motion") return a.motion ? std::optional<json>(json(true)) : std::nullopt;
  if (field == "annotations.motion.motion_speed")
    return a.motion ? std::optional<json>(json(to_string(a.motion->motion_speed))) : std::nullopt;
  if (field == "annotations.motion.motion_intensity")
    return a.motion ? std::optional<json>(json(a.motion->motion_intensity)) : std::nullopt;

  if (field == "annotations.captions.summary")
    return a.captions.summary ? std::optional<json>(json(*a.captions.summary)) : std::nullopt;
  if (field == "annotations.captions.detailed")
    return a.captions.detailed ? std::optional<json>(json(*a.captions.detailed)) : std::nullopt;
  if (field == "annotations.captions.span_coverage")
    return json(span_coverage(a.captions, r.duration_s));

  throw Error(Errc::UnknownField, "no such predicate field '" + field + "'");
}

bool predicate_holds(const VideoRecord& record, const Predicate& p) {
  const std::optional<json> v = resolve_field(record, p.field);
  if (!v) return false;
  switch (p.op) {
    case PredicateOp::Present: return true;
    case PredicateOp::Eq: return *v == p.value;
    case PredicateOp::Ne: return *v != p.value;
    case PredicateOp::Lt: return v->is_number() && p.value.is_number() &&
                                 v->get<double>() < p.value.get<double>();
    case PredicateOp::Le: return v->is_number() && p.value.is_number() &&
                                 v->get<double>() <= p.value.get<double>();
    case PredicateOp::Gt: return v->is_number() && p.value.is_number() &&
                                 v->get<double>() > p.value.get<double>();
    case PredicateOp::Ge: return v->is_number() && p.value.is_number() &&
                                 v->get<double>() >= p.value.get<double>();
    case PredicateOp::In:
      if (!p.value.is_array()) return false;
      for (const auto& item : p.value)
        if (*v == item) return true;
      return false;
  }
  return false;
}

TaskProfile default_profile(TaskProfileName name) {
  TaskProfile p;
  p.name = name;
  switch (name) {
    case TaskProfileName::CloseUpFace:
      p.predicates = {
          {"annotations.face", PredicateOp::Present, {}},
          {"annotations.face.max_abs_yaw", PredicateOp::Le, json(30.0)},
          {"annotations.sync.abs_offset_ms", PredicateOp::Le, json(120.0)},
          {"annotations.sync.sync_confidence", PredicateOp::Ge, json(0.5)},
      };
      break;
    case TaskProfileName::Body:
      p.predicates = {
          {"annotations.body.composition", PredicateOp::In, json::array({"HalfBody", "FullBody"})},
          {"annotations.body.hand_visibility", PredicateOp::Ge, json(0.5)},
          {"annotations.camera.camera_type", PredicateOp::Eq, json("Static")},
      };
      break;
    case TaskProfileName::ComplexScene:
      p.predicates = {
          {"annotations.captions.span_coverage", PredicateOp::Ge, json(0.8)},
          {"annotations.quality.perceptual_score", PredicateOp::Ge, json(0.5)},
      };
      break;
    case TaskProfileName::MusicInteraction:
      p.predicates = {
          {"source_category", PredicateOp::In, json::array({"MusicVideo", "Interaction"})},
      };
      break;
    default:
      break;
  }
  return p;
}

std::vector<VideoRecord> select_task_subset(const std::vector<VideoRecord>& records,
                                            const TaskProfile& profile) {
  std::vector<VideoRecord> out;
  for (const VideoRecord& r : records) {
    bool keep = true;
    for (const Predicate& p : profile.predicates)
      if (!predicate_holds(r, p)) {
        keep = false;
        break;
      }
    if (keep) out.push_back(r);
  }
  return out;
}

ClipWindow sample_window(const VideoRecord& record, std::int64_t length_frames, std::uint64_t seed) {
  const std::int64_t total = record.total_frames();
  if (total < length_frames)
    throw Error(Errc::TooShort, record.video_id + " has " + std::to_string(total) +
                                    " frames, need " + std::to_string(length_frames));
  Rng rng(mix_seed(seed, record.video_id));
  const std::int64_t start =
      static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total - length_frames + 1)));
  return {record.video_id, start, start + length_frames, record.fps};
}

std::string to_string(CaptionSource s) {
  switch (s) {
    case CaptionSource::Span: return "span";
    case CaptionSource::Summary: return "summary";
    case CaptionSource::Detailed: return "detailed";
    case CaptionSource::None: return "none";
  }
  return "?";
}

LocalCaption select_local_caption(const CaptionSet& captions, const ClipWindow& window) {
  const double w_start = window.start_s();
  const double w_end = window.end_s();
  double best_overlap = 0;
  const TemporalSpan* best = nullptr;
  for (const TemporalSpan& s : captions.temporal_spans) {
    const double overlap = std::min(s.end_s, w_end) - std::max(s.start_s, w_start);
    if (overlap <= 0) continue;
    if (overlap > best_overlap || (overlap == best_overlap && best && s.start_s < best->start_s)) {
      best_overlap = overlap;
      best = &s;
    }
  }
  if (best) return {best->caption, CaptionSource::Span};
  if (captions.summary) return {*captions.summary, CaptionSource::Summary};
  if (captions.detailed) return {*captions.detailed, CaptionSource::Detailed};
  return {"", CaptionSource::None};
}

std::string compose_condition(const std::string& caption,
                              const std::optional<CameraAnnotation>& camera,
                              const std::optional<std::string>& style) {
  std::vector<std::string> parts;
  if (!caption.empty()) parts.push_back(caption);

  if (camera) {
    std::string group = "camera: " + to_string(camera->camera_motion) +
                        "; shot: " + to_string(camera->shot_size);
    if (!camera->lens_type.empty()) group += "; lens: " + camera->lens_type;
    parts.push_back("[" + group + "]");
  }

  std::string style_text;
  if (style && !style->empty()) style_text = *style;
  else if (camera && !camera->visual_style.empty()) style_text = camera->visual_style;
  if (!style_text.empty()) parts.push_back("[style: " + style_text + "]");

  std::string out;
  for (const std::string& part : parts) {
    if (!out.empty()) out += ' ';
    out += part;
  }
  return out;
}

TrainingSample make_training_sample(const VideoRecord& record, const ClipWindow& clip,
                                    TaskProfileName profile, std::vector<std::string> provenance) {
  TrainingSample s;
  s.clip = clip;
  s.task_profile = profile;
  const LocalCaption caption = select_local_caption(record.annotations.captions, clip);
  s.text_condition = compose_condition(caption.text, record.annotations.camera, std::nullopt);
  if (record.annotations.audio && record.annotations.audio->has_speech)
    s.audio_ref = "audio:" + record.video_id;
  s.provenance = std::move(provenance);
  return s;
}

std::size_t emit_manifest(const std::vector<TrainingSample>& samples, const std::string& path) {
  std::vector<json> lines;
  lines.reserve(samples.size());
  for (const TrainingSample& s : samples) lines.push_back(training_sample_to_json(s));
  write_jsonl(path, lines);
  return lines.size();
}

json task_profile_to_json(const TaskProfile& p) {
  json preds = json::array();
  for (const Predicate& pr : p.predicates) {
    json pj = {{"field", pr.field}, {"op", op_name(pr.op)}};
    if (pr.op != PredicateOp::Present) pj["value"] = pr.value;
    preds.push_back(std::move(pj));
  }
  return {{"name", to_string(p.name)}, {"predicates", std::move(preds)}};
}

TaskProfile task_profile_from_json(const json& j) {
  TaskProfile p;
  p.name = task_profile_from_string(j.at("name").get<std::string>());
  if (auto it = j.find("predicates"); it != j.end()) {
    for (const auto& pj : *it) {
      Predicate pr;
      pr.field = pj.at("field").get<std::string>();
      pr.op = op_from_string(pj.at("op").get<std::string>());
      if (auto vit = pj.find("value"); vit != pj.end()) pr.value = *vit;
      p.predicates.push_back(std::move(pr));
    }
  }
  return p;
}

}  // namespace avatarforge
