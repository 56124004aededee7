#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/record.hpp"

namespace avatarforge {

// Task profiles are data, not code: a profile is the conjunction of
// declarative predicates over schema fields, so new training stages need no
// recompilation.
enum class PredicateOp { Present, Eq, Ne, Lt, Le, Gt, Ge, In };

struct Predicate {
  std::string field;           // dotted schema path, e.g. "annotations.body.hand_visibility"
  PredicateOp op = PredicateOp::Present;
  json value;                  // number, string or array (for In); ignored by Present
};

struct TaskProfile {
  TaskProfileName name = TaskProfileName::CloseUpFace;
  std::vector<Predicate> predicates;
};

// Shipped default profiles for the four general-pipeline training subsets.
TaskProfile default_profile(TaskProfileName name);

// Field resolver used by predicates. Besides raw schema fields it exposes a
// few derived values: annotations.face.max_abs_yaw,
// annotations.sync.abs_offset_ms, annotations.captions.span_coverage.
// Unknown paths throw Error(UnknownField); known-but-absent fields resolve
// to nullopt and fail every predicate, including Present.
std::optional<json> resolve_field(const VideoRecord& record, const std::string& field);

bool predicate_holds(const VideoRecord& record, const Predicate& predicate);

// Records satisfying every profile predicate, input order preserved.
std::vector<VideoRecord> select_task_subset(const std::vector<VideoRecord>& records,
                                            const TaskProfile& profile);

// Uniformly random window start over the valid range, deterministic in
// (seed, video_id). Throws Error(TooShort) when the record has fewer than
// length_frames frames.
ClipWindow sample_window(const VideoRecord& record, std::int64_t length_frames, std::uint64_t seed);

enum class CaptionSource { Span, Summary, Detailed, None };
std::string to_string(CaptionSource s);

struct LocalCaption {
  std::string text;
  CaptionSource source = CaptionSource::None;
};

// The temporal-span caption with maximal overlap with the window when any
// overlap exists (ties: earliest span), else summary, else detailed, else "".
LocalCaption select_local_caption(const CaptionSet& captions, const ClipWindow& window);

// Deterministic text condition:
//   {caption} [camera: {motion}; shot: {shot}; lens: {lens}] [style: {style}]
// Bracket groups whose fields are all absent are omitted; the caption text is
// never altered, only suffixed. No trailing whitespace.
std::string compose_condition(const std::string& caption,
                              const std::optional<CameraAnnotation>& camera,
                              const std::optional<std::string>& style = std::nullopt);

// Caption selection + condition composition for one accepted clip.
TrainingSample make_training_sample(const VideoRecord& record, const ClipWindow& clip,
                                    TaskProfileName profile, std::vector<std::string> provenance);

// JSONL manifest, one sample per line, canonical key order, input order
// preserved (duplicates included). Returns the number of lines written.
std::size_t emit_manifest(const std::vector<TrainingSample>& samples, const std::string& path);

// Declarative profile (de)serialization for profile files.
json task_profile_to_json(const TaskProfile& p);
TaskProfile task_profile_from_json(const json& j);

}  // namespace avatarforge
