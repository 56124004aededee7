#pragma once

#include <string>
#include <vector>

#include "avatarforge/errors.hpp"
#include "avatarforge/record.hpp"

namespace avatarforge {

// One schema-invariant failure; `path` is the dotted field path
// (e.g. "annotations.sync.sync_confidence").
struct Violation {
  std::string path;
  std::string message;
  bool operator==(const Violation&) const = default;
};

// Empty result means every type invariant holds.
std::vector<Violation> validate_record(const VideoRecord& record);

// Parses one JSONL line. Unknown keys are kept in the extras maps. Throws
// Error(MalformedRecord) on bad JSON and Error(SchemaViolation) when an
// invariant is broken.
VideoRecord parse_record(const std::string& line);

// Single line, canonical (lexicographic) key order, no raw newlines.
// Byte-deterministic for equal inputs.
std::string serialize_record(const VideoRecord& record);

// Enum names as they appear on disk.
std::string to_string(SourceCategory v);
std::string to_string(BodyComposition v);
std::string to_string(CameraType v);
std::string to_string(CameraMotion v);
std::string to_string(ShotSize v);
std::string to_string(MotionSpeed v);
std::string to_string(ArtifactFlag v);
std::string to_string(TaskProfileName v);
std::string to_string(BindingRole v);
std::string to_string(AudioStream v);

SourceCategory source_category_from_string(const std::string& s);
BodyComposition body_composition_from_string(const std::string& s);
CameraType camera_type_from_string(const std::string& s);
CameraMotion camera_motion_from_string(const std::string& s);
ShotSize shot_size_from_string(const std::string& s);
MotionSpeed motion_speed_from_string(const std::string& s);
ArtifactFlag artifact_flag_from_string(const std::string& s);
TaskProfileName task_profile_from_string(const std::string& s);
BindingRole binding_role_from_string(const std::string& s);
AudioStream audio_stream_from_string(const std::string& s);

// JSON forms of the shared domain types (same shapes the wire format and
// manifest files use).
json record_to_json(const VideoRecord& record);
VideoRecord record_from_json(const json& j);

json annotation_set_to_json(const AnnotationSet& a);
AnnotationSet annotation_set_from_json(const json& j);

json clip_window_to_json(const ClipWindow& w);
ClipWindow clip_window_from_json(const json& j);

json condition_binding_to_json(const ConditionBinding& b);
ConditionBinding condition_binding_from_json(const json& j);

json training_sample_to_json(const TrainingSample& s);
TrainingSample training_sample_from_json(const json& j);

// Per-slot annotation (de)serialization, used by annotator backends whose
// replies carry single schema fields.
json annotation_field_to_json(const AnnotationSet& a, const std::string& field);
void annotation_field_from_json(AnnotationSet& a, const std::string& field, const json& value);
bool annotation_field_present(const AnnotationSet& a, const std::string& field);
const std::vector<std::string>& annotation_field_names();

// JSONL helpers: one JSON value per line, LF endings.
std::vector<json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<json>& lines);

// Atomic full-file write (temp + rename).
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace avatarforge
