#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace avatarforge {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Unified annotation schema. Every offline annotator writes into one of the
// optional slots below; downstream filters treat a missing slot as an
// automatic drop (reason MissingAnnotation), never as a quality failure.
// All types are immutable-by-convention plain values, safe to share across
// worker threads. Confidences and scores are normalized to [0,1] at ingest.
// ---------------------------------------------------------------------------

enum class SourceCategory {
  CloseUpFace,
  Interview,
  ActedPerformance,
  Interaction,
  MusicVideo,
  AnimationStylized,
};

enum class BodyComposition { Head, HalfBody, FullBody };
enum class CameraType { Static, Handheld, Tracking, Other };
enum class CameraMotion { None, Pan, Zoom, Track, Shake };
enum class ShotSize { CloseUp, Medium, Full, Wide };
enum class MotionSpeed { Slow, Natural, Fast, Abnormal };

enum class ArtifactFlag {
  TextCoverage,
  Border,
  BlackBorder,
  AbnormalBrightness,
  PixelDegradation,
  Subtitle,
  WhiteFlash,
  Transition,
};

struct FaceBox {
  std::int64_t frame = 0;
  double x = 0, y = 0, w = 0, h = 0;
  double confidence = 0;  // [0,1]
  bool operator==(const FaceBox&) const = default;
};

struct FrameLandmarks {
  std::int64_t frame = 0;
  std::vector<std::pair<double, double>> points;
  bool operator==(const FrameLandmarks&) const = default;
};

struct HeadPose {
  std::int64_t frame = 0;
  double yaw = 0, pitch = 0, roll = 0;  // degrees
  bool operator==(const HeadPose&) const = default;
};

struct FaceAnnotation {
  std::vector<FaceBox> boxes;
  std::optional<std::vector<FrameLandmarks>> landmarks;
  std::int64_t person_count = 0;
  std::vector<HeadPose> head_pose;
  bool operator==(const FaceAnnotation&) const = default;
};

struct BodyAnnotation {
  BodyComposition composition = BodyComposition::Head;
  std::optional<std::vector<bool>> hand_visible;  // per frame, when available
  double hand_visibility = 0;                     // fraction in [0,1]
  bool operator==(const BodyAnnotation&) const = default;
};

struct AudioAnnotation {
  bool has_speech = false;
  bool vocal_track_available = false;
  std::optional<std::string> language;
  bool operator==(const AudioAnnotation&) const = default;
};

struct SyncAnnotation {
  double av_offset_ms = 0;     // signed
  double sync_confidence = 0;  // [0,1]
  bool operator==(const SyncAnnotation&) const = default;
};

struct QualityAnnotation {
  double perceptual_score = 0;  // [0,1]
  std::set<ArtifactFlag> artifact_flags;
  bool operator==(const QualityAnnotation&) const = default;
};

struct CameraAnnotation {
  CameraType camera_type = CameraType::Static;
  CameraMotion camera_motion = CameraMotion::None;
  ShotSize shot_size = ShotSize::Medium;
  std::string lens_type;     // free-form, empty means unknown
  std::string visual_style;  // free-form, empty means unknown
  bool operator==(const CameraAnnotation&) const = default;
};

struct MotionAnnotation {
  MotionSpeed motion_speed = MotionSpeed::Natural;
  double motion_intensity = 0;  // >= 0
  bool operator==(const MotionAnnotation&) const = default;
};

struct TemporalSpan {
  double start_s = 0;
  double end_s = 0;
  std::string caption;
  bool operator==(const TemporalSpan&) const = default;
};

struct CaptionSet {
  std::optional<std::string> detailed;
  std::optional<std::string> summary;
  std::vector<TemporalSpan> temporal_spans;  // may overlap
  bool operator==(const CaptionSet&) const = default;
};

struct AnnotationSet {
  std::optional<FaceAnnotation> face;
  std::optional<BodyAnnotation> body;
  std::optional<AudioAnnotation> audio;
  std::optional<SyncAnnotation> sync;  // requires audio (computed from vocals)
  std::optional<QualityAnnotation> quality;
  std::optional<CameraAnnotation> camera;
  std::optional<MotionAnnotation> motion;
  CaptionSet captions;
  // Non-schema annotator outputs (e.g. separated-vocals metadata) land here.
  json extras = json::object();
  bool operator==(const AnnotationSet&) const = default;
};

struct VideoRecord {
  std::string video_id;
  SourceCategory source_category = SourceCategory::Interview;
  double duration_s = 0;  // > 0
  double fps = 0;         // > 0
  std::int64_t width = 0;
  std::int64_t height = 0;
  AnnotationSet annotations;
  // Unknown top-level keys are preserved verbatim and re-emitted on
  // serialization so foreign metadata survives a round trip.
  json extras = json::object();

  std::int64_t total_frames() const {
    return static_cast<std::int64_t>(duration_s * fps + 0.5);
  }
  bool operator==(const VideoRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Sampled windows and training samples.
// ---------------------------------------------------------------------------

struct ClipWindow {
  std::string video_id;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // exclusive
  double fps = 0;

  std::int64_t length() const { return end_frame - start_frame; }
  double start_s() const { return static_cast<double>(start_frame) / fps; }
  double end_s() const { return static_cast<double>(end_frame) / fps; }
  bool operator==(const ClipWindow&) const = default;
};

enum class TaskProfileName {
  CloseUpFace,
  Body,
  ComplexScene,
  MusicInteraction,
  MultiPerson,
  Silent,
  Emotion,
};

enum class BindingRole { TargetSpeakerA, TargetSpeakerB, Background };
enum class AudioStream { StreamA, StreamB, Silent };

struct BindingEntry {
  std::string track_id;
  BindingRole role = BindingRole::Background;
  AudioStream audio_stream = AudioStream::Silent;
  std::int64_t label_id = 0;  // integer category for attention labeling
  bool operator==(const BindingEntry&) const = default;
};

// Target/background audio-condition mapping for multi-person samples. All
// background entries share the single silent stream.
struct ConditionBinding {
  std::vector<BindingEntry> entries;
  bool operator==(const ConditionBinding&) const = default;
};

struct TrainingSample {
  ClipWindow clip;
  TaskProfileName task_profile = TaskProfileName::CloseUpFace;
  std::string text_condition;
  std::optional<std::string> audio_ref;
  std::optional<ConditionBinding> binding;
  std::vector<std::string> provenance;  // non-empty, ends with accepting stage
  bool operator==(const TrainingSample&) const = default;
};

}  // namespace avatarforge
