#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/record.hpp"

namespace avatarforge {

struct TrackBox {
  double x = 0, y = 0, w = 0, h = 0;
  bool operator==(const TrackBox&) const = default;
};

// Interval boundaries are half-open [start, end) everywhere in this module;
// touching intervals do not count as concurrent.
struct SpeakingInterval {
  double start_s = 0;
  double end_s = 0;
  bool operator==(const SpeakingInterval&) const = default;
};

// One person-level spatio-temporal trajectory plus the speaking intervals
// the ASD backend predicted for it.
struct PersonTrack {
  std::string track_id;
  std::vector<std::int64_t> frames;  // strictly increasing
  std::vector<TrackBox> boxes;       // parallel to frames
  std::vector<SpeakingInterval> speaking_intervals;
  bool operator==(const PersonTrack&) const = default;
};

struct SpeakerSegment {
  std::string track_id;
  double start_s = 0;
  double end_s = 0;
  bool operator==(const SpeakerSegment&) const = default;
};

enum class TrackClass { Dynamic, Static };

// Tracks of one video together with the frame geometry needed to scale
// displacement thresholds.
struct RecordTracks {
  std::string video_id;
  std::int64_t width = 0;
  std::int64_t height = 0;
  double duration_s = 0;
  std::vector<PersonTrack> tracks;
};

struct PersonPartition {
  std::vector<std::string> single;    // exactly one dynamic track
  std::vector<std::string> multi;     // two or more
  std::vector<std::string> excluded;  // zero dynamic tracks (posters, portraits)
};

// Dynamic iff the track spans at least min_frames frames and its box center
// moves at least min_center_displacement_frac of the frame diagonal away
// from its first position.
TrackClass classify_track_dynamic(const PersonTrack& track, std::int64_t frame_width,
                                  std::int64_t frame_height, double min_center_displacement_frac,
                                  std::int64_t min_frames);

inline constexpr double kDefaultMinCenterDisplacementFrac = 0.03;
inline constexpr std::int64_t kDefaultMinTrackFrames = 25;

PersonPartition partition_person_count(const std::vector<RecordTracks>& records,
                                       double min_center_displacement_frac = kDefaultMinCenterDisplacementFrac,
                                       std::int64_t min_frames = kDefaultMinTrackFrames);

// For each track: its speaking intervals minus the union of all other
// tracks' speaking intervals, keeping only pieces of length >= min_segment_s.
// Event sweep over all interval endpoints; output sorted by start time and
// mutually non-overlapping.
std::vector<SpeakerSegment> derive_single_speaker_segments(const std::vector<PersonTrack>& tracks,
                                                           double min_segment_s);

// StreamA/StreamB for the targets in target_ids order, Background/Silent for
// every other dynamic track. label_ids are 0..n-1, targets first, then
// background tracks by ascending track_id. Throws Error(UnknownTrack) or
// Error(TooManyTargets).
ConditionBinding build_condition_binding(const std::vector<PersonTrack>& dynamic_tracks,
                                         const std::vector<std::string>& target_ids);

nlohmann::json record_tracks_to_json(const RecordTracks& rt);
RecordTracks record_tracks_from_json(const nlohmann::json& j);

}  // namespace avatarforge
