#include "avatarforge/multiperson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "avatarforge/errors.hpp"

namespace avatarforge {

namespace {

// Union of one track's intervals as a sorted, disjoint list. ASD backends may
// emit overlapping or touching intervals for the same person.
std::vector<SpeakingInterval> normalized(const std::vector<SpeakingInterval>& intervals) {
  std::vector<SpeakingInterval> sorted = intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const SpeakingInterval& a, const SpeakingInterval& b) { return a.start_s < b.start_s; });
  std::vector<SpeakingInterval> out;
  for (const SpeakingInterval& iv : sorted) {
    if (!(iv.start_s < iv.end_s)) continue;
    if (!out.empty() && iv.start_s <= out.back().end_s)
      out.back().end_s = std::max(out.back().end_s, iv.end_s);
    else
      out.push_back(iv);
  }
  return out;
}

}  // namespace

TrackClass classify_track_dynamic(const PersonTrack& track, std::int64_t frame_width,
                                  std::int64_t frame_height, double min_center_displacement_frac,
                                  std::int64_t min_frames) {
  if (static_cast<std::int64_t>(track.frames.size()) < min_frames) return TrackClass::Static;
  if (track.boxes.empty()) return TrackClass::Static;

  const double diagonal = std::hypot(static_cast<double>(frame_width), static_cast<double>(frame_height));
  if (diagonal <= 0) return TrackClass::Static;

  const double cx0 = track.boxes.front().x + track.boxes.front().w / 2;
  const double cy0 = track.boxes.front().y + track.boxes.front().h / 2;
  double max_displacement = 0;
  for (const TrackBox& b : track.boxes) {
    const double cx = b.x + b.w / 2;
    const double cy = b.y + b.h / 2;
    max_displacement = std::max(max_displacement, std::hypot(cx - cx0, cy - cy0));
  }
  return max_displacement >= min_center_displacement_frac * diagonal ? TrackClass::Dynamic
                                                                     : TrackClass::Static;
}

PersonPartition partition_person_count(const std::vector<RecordTracks>& records,
                                       double min_center_displacement_frac, std::int64_t min_frames) {
  PersonPartition out;
  for (const RecordTracks& rt : records) {
    std::int64_t dynamic = 0;
    for (const PersonTrack& t : rt.tracks)
      if (classify_track_dynamic(t, rt.width, rt.height, min_center_displacement_frac, min_frames) ==
          TrackClass::Dynamic)
        ++dynamic;
    if (dynamic == 0) out.excluded.push_back(rt.video_id);
    else if (dynamic == 1) out.single.push_back(rt.video_id);
    else out.multi.push_back(rt.video_id);
  }
  return out;
}

std::vector<SpeakerSegment> derive_single_speaker_segments(const std::vector<PersonTrack>& tracks,
                                                           double min_segment_s) {
  // Endpoint events over all tracks' normalized intervals; +1 opens a track,
  // -1 closes it. Between consecutive event times exactly zero, one, or more
  // tracks are active; spans with exactly one active track survive.
  struct Event {
    double time;
    int delta;
    std::size_t track;
  };
  std::vector<Event> events;
  std::vector<std::vector<SpeakingInterval>> norm(tracks.size());
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    norm[t] = normalized(tracks[t].speaking_intervals);
    for (const SpeakingInterval& iv : norm[t]) {
      events.push_back({iv.start_s, +1, t});
      events.push_back({iv.end_s, -1, t});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.delta < b.delta;  // close before open at equal times
  });

  std::vector<int> active(tracks.size(), 0);
  int active_tracks = 0;
  std::vector<SpeakerSegment> out;

  std::size_t i = 0;
  while (i < events.size()) {
    const double t0 = events[i].time;
    while (i < events.size() && events[i].time == t0) {
      active[events[i].track] += events[i].delta;
      active_tracks += events[i].delta > 0 ? (active[events[i].track] == 1 ? 1 : 0)
                                           : (active[events[i].track] == 0 ? -1 : 0);
      ++i;
    }
    if (i == events.size()) break;
    const double t1 = events[i].time;
    if (active_tracks == 1 && t1 > t0) {
      std::size_t owner = 0;
      for (std::size_t t = 0; t < active.size(); ++t)
        if (active[t] > 0) owner = t;
      // Coalesce with the previous span when the same speaker stays alone
      // across an event boundary.
      if (!out.empty() && out.back().track_id == tracks[owner].track_id && out.back().end_s == t0)
        out.back().end_s = t1;
      else
        out.push_back({tracks[owner].track_id, t0, t1});
    }
  }

  std::vector<SpeakerSegment> kept;
  for (const SpeakerSegment& s : out)
    if (s.end_s - s.start_s >= min_segment_s) kept.push_back(s);
  return kept;
}

ConditionBinding build_condition_binding(const std::vector<PersonTrack>& dynamic_tracks,
                                         const std::vector<std::string>& target_ids) {
  if (target_ids.empty() || target_ids.size() > 2)
    throw Error(Errc::TooManyTargets, "need 1 or 2 target track ids, got " +
                                          std::to_string(target_ids.size()));
  std::set<std::string> known;
  for (const PersonTrack& t : dynamic_tracks) known.insert(t.track_id);
  for (const std::string& id : target_ids)
    if (!known.contains(id)) throw Error(Errc::UnknownTrack, "target '" + id + "' not among tracks");

  ConditionBinding binding;
  std::int64_t next_label = 0;
  for (std::size_t i = 0; i < target_ids.size(); ++i) {
    BindingEntry e;
    e.track_id = target_ids[i];
    e.role = i == 0 ? BindingRole::TargetSpeakerA : BindingRole::TargetSpeakerB;
    e.audio_stream = i == 0 ? AudioStream::StreamA : AudioStream::StreamB;
    e.label_id = next_label++;
    binding.entries.push_back(std::move(e));
  }

  std::vector<std::string> background;
  for (const std::string& id : known)
    if (std::find(target_ids.begin(), target_ids.end(), id) == target_ids.end())
      background.push_back(id);
  // std::set iteration is already ascending, kept explicit for the contract.
  std::sort(background.begin(), background.end());
  for (const std::string& id : background) {
    BindingEntry e;
    e.track_id = id;
    e.role = BindingRole::Background;
    e.audio_stream = AudioStream::Silent;
    e.label_id = next_label++;
    binding.entries.push_back(std::move(e));
  }
  return binding;
}

nlohmann::json record_tracks_to_json(const RecordTracks& rt) {
  nlohmann::json tracks = nlohmann::json::array();
  for (const PersonTrack& t : rt.tracks) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const TrackBox& b : t.boxes) boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    nlohmann::json intervals = nlohmann::json::array();
    for (const SpeakingInterval& iv : t.speaking_intervals)
      intervals.push_back({{"start_s", iv.start_s}, {"end_s", iv.end_s}});
    tracks.push_back({{"track_id", t.track_id},
                      {"frames", t.frames},
                      {"boxes", std::move(boxes)},
                      {"speaking_intervals", std::move(intervals)}});
  }
  return {{"video_id", rt.video_id},
          {"width", rt.width},
          {"height", rt.height},
          {"duration_s", rt.duration_s},
          {"tracks", std::move(tracks)}};
}

RecordTracks record_tracks_from_json(const nlohmann::json& j) {
  RecordTracks rt;
  rt.video_id = j.value("video_id", std::string());
  rt.width = j.value("width", std::int64_t{0});
  rt.height = j.value("height", std::int64_t{0});
  rt.duration_s = j.value("duration_s", 0.0);
  if (auto it = j.find("tracks"); it != j.end()) {
    for (const auto& tj : *it) {
      PersonTrack t;
      t.track_id = tj.value("track_id", std::string());
      if (auto fit = tj.find("frames"); fit != tj.end())
        t.frames = fit->get<std::vector<std::int64_t>>();
      for (std::size_t i = 1; i < t.frames.size(); ++i)
        if (t.frames[i] <= t.frames[i - 1])
          throw Error(Errc::SchemaViolation, "track frames must be strictly increasing",
                      "tracks.frames");
      if (auto bit = tj.find("boxes"); bit != tj.end())
        for (const auto& bj : *bit)
          t.boxes.push_back({bj.value("x", 0.0), bj.value("y", 0.0), bj.value("w", 0.0),
                             bj.value("h", 0.0)});
      if (auto iit = tj.find("speaking_intervals"); iit != tj.end()) {
        for (const auto& ij : *iit) {
          SpeakingInterval iv{ij.value("start_s", 0.0), ij.value("end_s", 0.0)};
          if (!(iv.start_s < iv.end_s))
            throw Error(Errc::SchemaViolation, "interval start must precede end",
                        "tracks.speaking_intervals");
          if (rt.duration_s > 0 && (iv.start_s < 0 || iv.end_s > rt.duration_s))
            throw Error(Errc::SchemaViolation, "interval outside video duration",
                        "tracks.speaking_intervals");
          t.speaking_intervals.push_back(iv);
        }
      }
      rt.tracks.push_back(std::move(t));
    }
  }
  return rt;
}

}  // namespace avatarforge
