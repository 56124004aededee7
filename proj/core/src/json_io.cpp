#include "avatarforge/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace avatarforge {

namespace {

template <typename Enum>
struct EnumTable {
  std::vector<std::pair<Enum, const char*>> entries;

  std::string name(Enum v) const {
    for (const auto& [e, n] : entries)
      if (e == v) return n;
    return "?";
  }
  Enum value(const std::string& s, const char* what) const {
    for (const auto& [e, n] : entries)
      if (s == n) return e;
    throw Error(Errc::SchemaViolation, "unknown " + std::string(what) + " '" + s + "'");
  }
};

const EnumTable<SourceCategory> kSourceCategory{{
    {SourceCategory::CloseUpFace, "CloseUpFace"},
    {SourceCategory::Interview, "Interview"},
    {SourceCategory::ActedPerformance, "ActedPerformance"},
    {SourceCategory::Interaction, "Interaction"},
    {SourceCategory::MusicVideo, "MusicVideo"},
    {SourceCategory::AnimationStylized, "AnimationStylized"},
}};

const EnumTable<BodyComposition> kBodyComposition{{
    {BodyComposition::Head, "Head"},
    {BodyComposition::HalfBody, "HalfBody"},
    {BodyComposition::FullBody, "FullBody"},
}};

const EnumTable<CameraType> kCameraType{{
    {CameraType::Static, "Static"},
    {CameraType::Handheld, "Handheld"},
    {CameraType::Tracking, "Tracking"},
    {CameraType::Other, "Other"},
}};

const EnumTable<CameraMotion> kCameraMotion{{
    {CameraMotion::None, "None"},
    {CameraMotion::Pan, "Pan"},
    {CameraMotion::Zoom, "Zoom"},
    {CameraMotion::Track, "Track"},
    {CameraMotion::Shake, "Shake"},
}};

const EnumTable<ShotSize> kShotSize{{
    {ShotSize::CloseUp, "CloseUp"},
    {ShotSize::Medium, "Medium"},
    {ShotSize::Full, "Full"},
    {ShotSize::Wide, "Wide"},
}};

const EnumTable<MotionSpeed> kMotionSpeed{{
    {MotionSpeed::Slow, "Slow"},
    {MotionSpeed::Natural, "Natural"},
    {MotionSpeed::Fast, "Fast"},
    {MotionSpeed::Abnormal, "Abnormal"},
}};

const EnumTable<ArtifactFlag> kArtifactFlag{{
    {ArtifactFlag::TextCoverage, "TextCoverage"},
    {ArtifactFlag::Border, "Border"},
    {ArtifactFlag::BlackBorder, "BlackBorder"},
    {ArtifactFlag::AbnormalBrightness, "AbnormalBrightness"},
    {ArtifactFlag::PixelDegradation, "PixelDegradation"},
    {ArtifactFlag::Subtitle, "Subtitle"},
    {ArtifactFlag::WhiteFlash, "WhiteFlash"},
    {ArtifactFlag::Transition, "Transition"},
}};

const EnumTable<TaskProfileName> kTaskProfile{{
    {TaskProfileName::CloseUpFace, "CloseUpFace"},
    {TaskProfileName::Body, "Body"},
    {TaskProfileName::ComplexScene, "ComplexScene"},
    {TaskProfileName::MusicInteraction, "MusicInteraction"},
    {TaskProfileName::MultiPerson, "MultiPerson"},
    {TaskProfileName::Silent, "Silent"},
    {TaskProfileName::Emotion, "Emotion"},
}};

const EnumTable<BindingRole> kBindingRole{{
    {BindingRole::TargetSpeakerA, "TargetSpeakerA"},
    {BindingRole::TargetSpeakerB, "TargetSpeakerB"},
    {BindingRole::Background, "Background"},
}};

const EnumTable<AudioStream> kAudioStream{{
    {AudioStream::StreamA, "StreamA"},
    {AudioStream::StreamB, "StreamB"},
    {AudioStream::Silent, "Silent"},
}};

double get_number(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw Error(Errc::MalformedRecord, std::string(key) + " is not a number");
  return it->get<double>();
}

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    throw Error(Errc::MalformedRecord, std::string(key) + " is not an integer");
  return it->get<std::int64_t>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw Error(Errc::MalformedRecord, std::string(key) + " is not a string");
  return it->get<std::string>();
}

json face_to_json(const FaceAnnotation& f) {
  json j = json::object();
  json boxes = json::array();
  for (const auto& b : f.boxes)
    boxes.push_back({{"frame", b.frame},
                     {"x", b.x},
                     {"y", b.y},
                     {"w", b.w},
                     {"h", b.h},
                     {"confidence", b.confidence}});
  j["boxes"] = std::move(boxes);
  if (f.landmarks) {
    json lms = json::array();
    for (const auto& lm : *f.landmarks) {
      json pts = json::array();
      for (const auto& [x, y] : lm.points) pts.push_back({x, y});
      lms.push_back({{"frame", lm.frame}, {"points", std::move(pts)}});
    }
    j["landmarks"] = std::move(lms);
  }
  j["person_count"] = f.person_count;
  json poses = json::array();
  for (const auto& p : f.head_pose)
    poses.push_back({{"frame", p.frame}, {"yaw", p.yaw}, {"pitch", p.pitch}, {"roll", p.roll}});
  j["head_pose"] = std::move(poses);
  return j;
}

FaceAnnotation face_from_json(const json& j) {
  FaceAnnotation f;
  if (auto it = j.find("boxes"); it != j.end()) {
    for (const auto& b : *it) {
      FaceBox box;
      box.frame = get_int(b, "frame", 0);
      box.x = get_number(b, "x", 0);
      box.y = get_number(b, "y", 0);
      box.w = get_number(b, "w", 0);
      box.h = get_number(b, "h", 0);
      box.confidence = get_number(b, "confidence", 0);
      f.boxes.push_back(box);
    }
  }
  if (auto it = j.find("landmarks"); it != j.end() && !it->is_null()) {
    std::vector<FrameLandmarks> lms;
    for (const auto& lj : *it) {
      FrameLandmarks lm;
      lm.frame = get_int(lj, "frame", 0);
      if (auto pit = lj.find("points"); pit != lj.end())
        for (const auto& p : *pit) lm.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      lms.push_back(std::move(lm));
    }
    f.landmarks = std::move(lms);
  }
  f.person_count = get_int(j, "person_count", 0);
  if (auto it = j.find("head_pose"); it != j.end()) {
    for (const auto& pj : *it) {
      HeadPose p;
      p.frame = get_int(pj, "frame", 0);
      p.yaw = get_number(pj, "yaw", 0);
      p.pitch = get_number(pj, "pitch", 0);
      p.roll = get_number(pj, "roll", 0);
      f.head_pose.push_back(p);
    }
  }
  return f;
}

json body_to_json(const BodyAnnotation& b) {
  json j = json::object();
  j["composition"] = kBodyComposition.name(b.composition);
  if (b.hand_visible) j["hand_visible"] = *b.hand_visible;
  j["hand_visibility"] = b.hand_visibility;
  return j;
}

BodyAnnotation body_from_json(const json& j) {
  BodyAnnotation b;
  b.composition = kBodyComposition.value(get_string(j, "composition", "Head"), "composition");
  if (auto it = j.find("hand_visible"); it != j.end() && !it->is_null())
    b.hand_visible = it->get<std::vector<bool>>();
  if (j.contains("hand_visibility")) {
    b.hand_visibility = get_number(j, "hand_visibility", 0);
  } else if (b.hand_visible && !b.hand_visible->empty()) {
    std::size_t n = 0;
    for (bool v : *b.hand_visible) n += v ? 1 : 0;
    b.hand_visibility = static_cast<double>(n) / static_cast<double>(b.hand_visible->size());
  }
  return b;
}

json audio_to_json(const AudioAnnotation& a) {
  json j = json::object();
  j["has_speech"] = a.has_speech;
  j["vocal_track_available"] = a.vocal_track_available;
  if (a.language) j["language"] = *a.language;
  return j;
}

AudioAnnotation audio_from_json(const json& j) {
  AudioAnnotation a;
  a.has_speech = j.value("has_speech", false);
  a.vocal_track_available = j.value("vocal_track_available", false);
  if (auto it = j.find("language"); it != j.end() && !it->is_null()) a.language = it->get<std::string>();
  return a;
}

json sync_to_json(const SyncAnnotation& s) {
  return {{"av_offset_ms", s.av_offset_ms}, {"sync_confidence", s.sync_confidence}};
}

SyncAnnotation sync_from_json(const json& j) {
  SyncAnnotation s;
  s.av_offset_ms = get_number(j, "av_offset_ms", 0);
  s.sync_confidence = get_number(j, "sync_confidence", 0);
  return s;
}

json quality_to_json(const QualityAnnotation& q) {
  json flags = json::array();
  for (ArtifactFlag f : q.artifact_flags) flags.push_back(kArtifactFlag.name(f));
  return {{"perceptual_score", q.perceptual_score}, {"artifact_flags", std::move(flags)}};
}

QualityAnnotation quality_from_json(const json& j) {
  QualityAnnotation q;
  q.perceptual_score = get_number(j, "perceptual_score", 0);
  if (auto it = j.find("artifact_flags"); it != j.end()) {
    for (const auto& f : *it) {
      ArtifactFlag flag = kArtifactFlag.value(f.get<std::string>(), "artifact flag");
      if (!q.artifact_flags.insert(flag).second)
        throw Error(Errc::SchemaViolation, "duplicate artifact flag", "annotations.quality.artifact_flags");
    }
  }
  return q;
}

json camera_to_json(const CameraAnnotation& c) {
  return {{"camera_type", kCameraType.name(c.camera_type)},
          {"camera_motion", kCameraMotion.name(c.camera_motion)},
          {"shot_size", kShotSize.name(c.shot_size)},
          {"lens_type", c.lens_type},
          {"visual_style", c.visual_style}};
}

CameraAnnotation camera_from_json(const json& j) {
  CameraAnnotation c;
  c.camera_type = kCameraType.value(get_string(j, "camera_type", "Static"), "camera type");
  c.camera_motion = kCameraMotion.value(get_string(j, "camera_motion", "None"), "camera motion");
  c.shot_size = kShotSize.value(get_string(j, "shot_size", "Medium"), "shot size");
  c.lens_type = get_string(j, "lens_type", "");
  c.visual_style = get_string(j, "visual_style", "");
  return c;
}

json motion_to_json(const MotionAnnotation& m) {
  return {{"motion_speed", kMotionSpeed.name(m.motion_speed)}, {"motion_intensity", m.motion_intensity}};
}

MotionAnnotation motion_from_json(const json& j) {
  MotionAnnotation m;
  m.motion_speed = kMotionSpeed.value(get_string(j, "motion_speed", "Natural"), "motion speed");
  m.motion_intensity = get_number(j, "motion_intensity", 0);
  return m;
}

json captions_to_json(const CaptionSet& c) {
  json j = json::object();
  if (c.detailed) j["detailed"] = *c.detailed;
  if (c.summary) j["summary"] = *c.summary;
  json spans = json::array();
  for (const auto& s : c.temporal_spans)
    spans.push_back({{"start_s", s.start_s}, {"end_s", s.end_s}, {"caption", s.caption}});
  j["temporal_spans"] = std::move(spans);
  return j;
}

CaptionSet captions_from_json(const json& j) {
  CaptionSet c;
  if (auto it = j.find("detailed"); it != j.end() && !it->is_null()) c.detailed = it->get<std::string>();
  if (auto it = j.find("summary"); it != j.end() && !it->is_null()) c.summary = it->get<std::string>();
  if (auto it = j.find("temporal_spans"); it != j.end()) {
    for (const auto& sj : *it) {
      TemporalSpan s;
      s.start_s = get_number(sj, "start_s", 0);
      s.end_s = get_number(sj, "end_s", 0);
      s.caption = get_string(sj, "caption", "");
      c.temporal_spans.push_back(std::move(s));
    }
  }
  return c;
}

const std::vector<std::string> kAnnotationFields = {"face",    "body",   "audio",  "sync",
                                                    "quality", "camera", "motion", "captions"};

void check_range(std::vector<Violation>& out, double v, double lo, double hi, const std::string& path) {
  if (!(v >= lo && v <= hi))
    out.push_back({path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + "," +
                             std::to_string(hi) + "]"});
}

}  // namespace

std::string to_string(SourceCategory v) { return kSourceCategory.name(v); }
std::string to_string(BodyComposition v) { return kBodyComposition.name(v); }
std::string to_string(CameraType v) { return kCameraType.name(v); }
std::string to_string(CameraMotion v) { return kCameraMotion.name(v); }
std::string to_string(ShotSize v) { return kShotSize.name(v); }
std::string to_string(MotionSpeed v) { return kMotionSpeed.name(v); }
std::string to_string(ArtifactFlag v) { return kArtifactFlag.name(v); }
std::string to_string(TaskProfileName v) { return kTaskProfile.name(v); }
std::string to_string(BindingRole v) { return kBindingRole.name(v); }
std::string to_string(AudioStream v) { return kAudioStream.name(v); }

SourceCategory source_category_from_string(const std::string& s) { return kSourceCategory.value(s, "source category"); }
BodyComposition body_composition_from_string(const std::string& s) { return kBodyComposition.value(s, "body composition"); }
CameraType camera_type_from_string(const std::string& s) { return kCameraType.value(s, "camera type"); }
CameraMotion camera_motion_from_string(const std::string& s) { return kCameraMotion.value(s, "camera motion"); }
ShotSize shot_size_from_string(const std::string& s) { return kShotSize.value(s, "shot size"); }
MotionSpeed motion_speed_from_string(const std::string& s) { return kMotionSpeed.value(s, "motion speed"); }
ArtifactFlag artifact_flag_from_string(const std::string& s) { return kArtifactFlag.value(s, "artifact flag"); }
TaskProfileName task_profile_from_string(const std::string& s) { return kTaskProfile.value(s, "task profile"); }
BindingRole binding_role_from_string(const std::string& s) { return kBindingRole.value(s, "binding role"); }
AudioStream audio_stream_from_string(const std::string& s) { return kAudioStream.value(s, "audio stream"); }

const std::vector<std::string>& annotation_field_names() { return kAnnotationFields; }

json annotation_set_to_json(const AnnotationSet& a) {
  json j = json::object();
  if (a.face) j["face"] = face_to_json(*a.face);
  if (a.body) j["body"] = body_to_json(*a.body);
  if (a.audio) j["audio"] = audio_to_json(*a.audio);
  if (a.sync) j["sync"] = sync_to_json(*a.sync);
  if (a.quality) j["quality"] = quality_to_json(*a.quality);
  if (a.camera) j["camera"] = camera_to_json(*a.camera);
  if (a.motion) j["motion"] = motion_to_json(*a.motion);
  j["captions"] = captions_to_json(a.captions);
  for (const auto& [k, v] : a.extras.items()) j[k] = v;
  return j;
}

AnnotationSet annotation_set_from_json(const json& j) {
  AnnotationSet a;
  for (const auto& [key, value] : j.items()) {
    if (key == "face") a.face = face_from_json(value);
    else if (key == "body") a.body = body_from_json(value);
    else if (key == "audio") a.audio = audio_from_json(value);
    else if (key == "sync") a.sync = sync_from_json(value);
    else if (key == "quality") a.quality = quality_from_json(value);
    else if (key == "camera") a.camera = camera_from_json(value);
    else if (key == "motion") a.motion = motion_from_json(value);
    else if (key == "captions") a.captions = captions_from_json(value);
    else a.extras[key] = value;
  }
  return a;
}

json annotation_field_to_json(const AnnotationSet& a, const std::string& field) {
  if (field == "face" && a.face) return face_to_json(*a.face);
  if (field == "body" && a.body) return body_to_json(*a.body);
  if (field == "audio" && a.audio) return audio_to_json(*a.audio);
  if (field == "sync" && a.sync) return sync_to_json(*a.sync);
  if (field == "quality" && a.quality) return quality_to_json(*a.quality);
  if (field == "camera" && a.camera) return camera_to_json(*a.camera);
  if (field == "motion" && a.motion) return motion_to_json(*a.motion);
  if (field == "captions") return captions_to_json(a.captions);
  if (a.extras.contains(field)) return a.extras.at(field);
  return json();
}

void annotation_field_from_json(AnnotationSet& a, const std::string& field, const json& value) {
  if (field == "face") a.face = face_from_json(value);
  else if (field == "body") a.body = body_from_json(value);
  else if (field == "audio") a.audio = audio_from_json(value);
  else if (field == "sync") a.sync = sync_from_json(value);
  else if (field == "quality") a.quality = quality_from_json(value);
  else if (field == "motion") a.motion = motion_from_json(value);
  else if (field == "camera") a.camera = camera_from_json(value);
  else if (field == "captions") a.captions = captions_from_json(value);
  else a.extras[field] = value;
}

bool annotation_field_present(const AnnotationSet& a, const std::string& field) {
  if (field == "face") return a.face.has_value();
  if (field == "body") return a.body.has_value();
  if (field == "audio") return a.audio.has_value();
  if (field == "sync") return a.sync.has_value();
  if (field == "quality") return a.quality.has_value();
  if (field == "camera") return a.camera.has_value();
  if (field == "motion") return a.motion.has_value();
  if (field == "captions")
    return a.captions.detailed || a.captions.summary || !a.captions.temporal_spans.empty();
  return a.extras.contains(field);
}

std::vector<Violation> validate_record(const VideoRecord& r) {
  std::vector<Violation> out;
  if (r.video_id.empty()) out.push_back({"video_id", "must be non-empty"});
  if (!(r.duration_s > 0)) out.push_back({"duration_s", "must be > 0"});
  if (!(r.fps > 0)) out.push_back({"fps", "must be > 0"});
  if (r.duration_s > 0 && r.fps > 0 && r.duration_s * r.fps < 1.0)
    out.push_back({"duration_s", "duration_s * fps must cover at least one frame"});

  const AnnotationSet& a = r.annotations;
  if (a.sync && !a.audio)
    out.push_back({"annotations.sync", "sync requires audio"});

  if (a.face) {
    if (a.face->person_count < 0)
      out.push_back({"annotations.face.person_count", "must be >= 0"});
    std::map<std::int64_t, std::int64_t> per_frame;
    for (std::size_t i = 0; i < a.face->boxes.size(); ++i) {
      const FaceBox& b = a.face->boxes[i];
      const std::string path = "annotations.face.boxes[" + std::to_string(i) + "]";
      check_range(out, b.confidence, 0, 1, path + ".confidence");
      if (b.w < 0 || b.h < 0) out.push_back({path, "box size must be non-negative"});
      if (r.width > 0 && r.height > 0) {
        if (b.x < 0 || b.y < 0 || b.x + b.w > static_cast<double>(r.width) ||
            b.y + b.h > static_cast<double>(r.height))
          out.push_back({path, "box outside frame bounds"});
      }
      ++per_frame[b.frame];
    }
    std::int64_t max_concurrent = 0;
    for (const auto& [frame, n] : per_frame) max_concurrent = std::max(max_concurrent, n);
    if (a.face->person_count < max_concurrent)
      out.push_back({"annotations.face.person_count",
                     "must be >= max concurrent boxes (" + std::to_string(max_concurrent) + ")"});
  }
  if (a.body) check_range(out, a.body->hand_visibility, 0, 1, "annotations.body.hand_visibility");
  if (a.audio && a.audio->vocal_track_available && !a.audio->has_speech)
    out.push_back({"annotations.audio.vocal_track_available", "vocal track requires has_speech"});
  if (a.sync) check_range(out, a.sync->sync_confidence, 0, 1, "annotations.sync.sync_confidence");
  if (a.quality) check_range(out, a.quality->perceptual_score, 0, 1, "annotations.quality.perceptual_score");
  if (a.camera && a.camera->camera_type == CameraType::Static &&
      a.camera->camera_motion != CameraMotion::None)
    out.push_back({"annotations.camera.camera_motion", "static camera must have motion None"});
  if (a.motion && !(a.motion->motion_intensity >= 0))
    out.push_back({"annotations.motion.motion_intensity", "must be >= 0"});

  for (std::size_t i = 0; i < a.captions.temporal_spans.size(); ++i) {
    const TemporalSpan& s = a.captions.temporal_spans[i];
    const std::string path = "annotations.captions.temporal_spans[" + std::to_string(i) + "]";
    if (!(s.start_s >= 0 && s.start_s < s.end_s))
      out.push_back({path, "span must satisfy 0 <= start < end"});
    else if (r.duration_s > 0 && s.end_s > r.duration_s)
      out.push_back({path, "span end exceeds duration"});
  }
  return out;
}

json record_to_json(const VideoRecord& r) {
  json j = json::object();
  j["schema_version"] = kSchemaVersion;
  j["video_id"] = r.video_id;
  j["source_category"] = kSourceCategory.name(r.source_category);
  j["duration_s"] = r.duration_s;
  j["fps"] = r.fps;
  j["width"] = r.width;
  j["height"] = r.height;
  j["annotations"] = annotation_set_to_json(r.annotations);
  for (const auto& [k, v] : r.extras.items()) j[k] = v;
  return j;
}

VideoRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::MalformedRecord, "record is not a JSON object");
  const std::int64_t version = get_int(j, "schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw Error(Errc::IncompatibleSchemaVersion,
                "record schema_version " + std::to_string(version) + ", expected " +
                    std::to_string(kSchemaVersion));

  VideoRecord r;
  static const std::set<std::string> known = {"schema_version", "video_id", "source_category",
                                              "duration_s",     "fps",      "width",
                                              "height",         "annotations"};
  try {
    r.video_id = get_string(j, "video_id", "");
    r.source_category = kSourceCategory.value(get_string(j, "source_category", "Interview"),
                                              "source category");
    r.duration_s = get_number(j, "duration_s", 0);
    r.fps = get_number(j, "fps", 0);
    r.width = get_int(j, "width", 0);
    r.height = get_int(j, "height", 0);
    if (auto it = j.find("annotations"); it != j.end()) {
      if (!it->is_object()) throw Error(Errc::MalformedRecord, "annotations is not an object");
      r.annotations = annotation_set_from_json(*it);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedRecord, e.what());
  }
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) r.extras[k] = v;

  if (auto violations = validate_record(r); !violations.empty())
    throw Error(Errc::SchemaViolation, violations.front().message, violations.front().path);
  return r;
}

VideoRecord parse_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedRecord, e.what());
  }
  return record_from_json(j);
}

std::string serialize_record(const VideoRecord& r) { return record_to_json(r).dump(); }

json clip_window_to_json(const ClipWindow& w) {
  return {{"video_id", w.video_id},
          {"start_frame", w.start_frame},
          {"end_frame", w.end_frame},
          {"fps", w.fps}};
}

ClipWindow clip_window_from_json(const json& j) {
  ClipWindow w;
  w.video_id = get_string(j, "video_id", "");
  w.start_frame = get_int(j, "start_frame", 0);
  w.end_frame = get_int(j, "end_frame", 0);
  w.fps = get_number(j, "fps", 0);
  if (!(w.start_frame >= 0 && w.start_frame < w.end_frame))
    throw Error(Errc::SchemaViolation, "clip window must satisfy 0 <= start < end", "start_frame");
  return w;
}

json condition_binding_to_json(const ConditionBinding& b) {
  json entries = json::array();
  for (const auto& e : b.entries)
    entries.push_back({{"track_id", e.track_id},
                       {"role", kBindingRole.name(e.role)},
                       {"audio_stream", kAudioStream.name(e.audio_stream)},
                       {"label_id", e.label_id}});
  return {{"entries", std::move(entries)}};
}

ConditionBinding condition_binding_from_json(const json& j) {
  ConditionBinding b;
  if (auto it = j.find("entries"); it != j.end()) {
    for (const auto& ej : *it) {
      BindingEntry e;
      e.track_id = get_string(ej, "track_id", "");
      e.role = kBindingRole.value(get_string(ej, "role", "Background"), "binding role");
      e.audio_stream = kAudioStream.value(get_string(ej, "audio_stream", "Silent"), "audio stream");
      e.label_id = get_int(ej, "label_id", 0);
      b.entries.push_back(std::move(e));
    }
  }
  return b;
}

json training_sample_to_json(const TrainingSample& s) {
  json j = json::object();
  j["schema_version"] = kSchemaVersion;
  j["clip"] = clip_window_to_json(s.clip);
  j["task_profile"] = kTaskProfile.name(s.task_profile);
  j["text_condition"] = s.text_condition;
  if (s.audio_ref) j["audio_ref"] = *s.audio_ref;
  if (s.binding) j["binding"] = condition_binding_to_json(*s.binding);
  j["provenance"] = s.provenance;
  return j;
}

TrainingSample training_sample_from_json(const json& j) {
  TrainingSample s;
  s.clip = clip_window_from_json(j.at("clip"));
  s.task_profile = kTaskProfile.value(get_string(j, "task_profile", "CloseUpFace"), "task profile");
  s.text_condition = get_string(j, "text_condition", "");
  if (auto it = j.find("audio_ref"); it != j.end() && !it->is_null()) s.audio_ref = it->get<std::string>();
  if (auto it = j.find("binding"); it != j.end() && !it->is_null())
    s.binding = condition_binding_from_json(*it);
  if (auto it = j.find("provenance"); it != j.end()) s.provenance = it->get<std::vector<std::string>>();
  if (s.provenance.empty())
    throw Error(Errc::SchemaViolation, "provenance must be non-empty", "provenance");
  return s;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(Errc::MalformedRecord, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path, const std::vector<json>& lines) {
  std::string buf;
  for (const auto& j : lines) {
    buf += j.dump();
    buf += '\n';
  }
  write_file_atomic(path, buf);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(Errc::IoFailure, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoFailure, "rename " + tmp + " -> " + path + ": " + ec.message());
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::UnknownDependency: return "UnknownDependency";
    case Errc::Timeout: return "Timeout";
    case Errc::MalformedOutput: return "MalformedOutput";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::Conflict: return "Conflict";
    case Errc::ConfigIncomplete: return "ConfigIncomplete";
    case Errc::ConfigError: return "ConfigError";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooShort: return "TooShort";
    case Errc::UnknownField: return "UnknownField";
    case Errc::UnknownTrack: return "UnknownTrack";
    case Errc::TooManyTargets: return "TooManyTargets";
    case Errc::EmptyVerdicts: return "EmptyVerdicts";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::AllMotionEmpty: return "AllMotionEmpty";
    case Errc::WrongLayerCount: return "WrongLayerCount";
    case Errc::NonFiniteReward: return "NonFiniteReward";
    case Errc::WeightLengthMismatch: return "WeightLengthMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IoFailure: return "IoFailure";
    case Errc::IncompatibleSchemaVersion: return "IncompatibleSchemaVersion";
  }
  return "UnknownError";
}

}  // namespace avatarforge
