#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "avatarforge/annotate.hpp"
#include "avatarforge/audio_align.hpp"
#include "avatarforge/config.hpp"
#include "avatarforge/emotion.hpp"
#include "avatarforge/errors.hpp"
#include "avatarforge/fixture.hpp"
#include "avatarforge/grpo.hpp"
#include "avatarforge/json_io.hpp"
#include "avatarforge/multiperson.hpp"
#include "avatarforge/sample.hpp"
#include "avatarforge/silent.hpp"
#include "avatarforge/tensor.hpp"
#include "avatarforge/validate.hpp"

namespace avatarforge::cli {

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ConfigError:
    case Errc::ConfigIncomplete:
      return kExitConfigError;
    default:
      return kExitInputError;
  }
}

// Every command funnels through this so diagnostics land on stderr and exit
// codes stay consistent.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
}

std::vector<VideoRecord> read_records(const std::string& path) {
  std::vector<VideoRecord> records;
  for (const json& j : read_jsonl(path)) records.push_back(record_from_json(j));
  return records;
}

std::map<std::string, VideoRecord> records_by_id(const std::vector<VideoRecord>& records) {
  std::map<std::string, VideoRecord> out;
  for (const VideoRecord& r : records)
    if (!out.emplace(r.video_id, r).second)
      throw Error(Errc::SchemaViolation, "duplicate video_id '" + r.video_id + "'", "video_id");
  return out;
}

}  // namespace

std::string config_fallback(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("AVATAR_FORGE_CONFIG")) return env;
  return {};
}

int run_annotate(const AnnotateOptions& opt) {
  return guarded([&] {
    const std::vector<VideoRecord> records = read_records(opt.in_path);

    std::vector<AnnotatorSpec> specs;
    const std::string graph_path = config_fallback(opt.graph_path);
    if (graph_path.empty()) specs = default_annotator_specs(opt.seed);
    else specs = annotator_specs_from_config(load_config_file(graph_path), opt.seed);
    const TaskGraph graph = build_task_graph(specs);

    AnnotationRunResult result = run_offline_annotation(records, graph, opt.parallelism);

    std::string out;
    for (const VideoRecord& r : result.records) {
      out += serialize_record(r);
      out += '\n';
    }
    write_file_atomic(opt.out_path, out);

    // RunReport lands next to the output as JSONL, one entry per line.
    const std::string report_path =
        opt.report_path.empty() ? opt.out_path + ".report.jsonl" : opt.report_path;
    std::vector<json> report_lines;
    const json report = run_report_to_json(result.report);
    for (const auto& f : report.at("failures")) {
      json line = f;
      line["type"] = "failure";
      report_lines.push_back(std::move(line));
    }
    for (const auto& t : report.at("traces")) {
      json line = t;
      line["type"] = "trace";
      report_lines.push_back(std::move(line));
    }
    write_jsonl(report_path, report_lines);

    std::fprintf(stderr, "annotated %zu records, %zu failures\n", result.records.size(),
                 result.report.failures.size());
  });
}

int run_validate(const ValidateOptions& opt) {
  return guarded([&] {
    const auto records = records_by_id(read_records(opt.in_path));

    FilterChainConfig config;
    const std::string config_path = config_fallback(opt.config_path);
    if (!config_path.empty()) config = filter_config_from_json(load_config_file(config_path));

    std::vector<FilterCandidate> candidates;
    for (const json& line : read_jsonl(opt.clips_path)) {
      FilterCandidate c;
      c.clip = clip_window_from_json(line);
      const auto it = records.find(c.clip.video_id);
      if (it == records.end())
        throw Error(Errc::MalformedRecord, "clip references unknown video '" + c.clip.video_id + "'");
      c.record = it->second;
      if (auto sit = line.find("frame_stats"); sit != line.end() && !sit->is_null())
        c.stats = frame_stats_from_json(*sit);
      candidates.push_back(std::move(c));
    }

    const FilterChainResult result = run_filter_chain(candidates, config);

    std::vector<json> accepted;
    for (const FilterCandidate& c : result.accepted) accepted.push_back(filter_candidate_to_json(c));
    write_jsonl(opt.out_path, accepted);
    if (!opt.report_path.empty())
      write_file_atomic(opt.report_path, filter_report_to_json(result.report).dump() + "\n");

    std::fprintf(stderr, "accepted %lld of %zu candidates\n",
                 static_cast<long long>(result.report.accepted), candidates.size());
  });
}

int run_sample(const SampleOptions& opt) {
  return guarded([&] {
    TaskProfile profile;
    if (!opt.profiles_file.empty()) {
      std::ifstream in(opt.profiles_file);
      if (!in) throw Error(Errc::ConfigError, "cannot open profiles file " + opt.profiles_file);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigError, opt.profiles_file + ": " + e.what());
      }
      profile = task_profile_from_json(j);
    } else {
      static const std::map<std::string, TaskProfileName> kNames = {
          {"closeup", TaskProfileName::CloseUpFace},
          {"body", TaskProfileName::Body},
          {"complex", TaskProfileName::ComplexScene},
          {"music", TaskProfileName::MusicInteraction},
      };
      const auto it = kNames.find(opt.profile);
      if (it == kNames.end())
        throw Error(Errc::ConfigError, "unknown profile '" + opt.profile +
                                           "' (want closeup|body|complex|music)");
      profile = default_profile(it->second);
    }

    // Accepted candidates may repeat a record (one entry per accepted clip);
    // sampling operates per record, first occurrence wins.
    std::vector<VideoRecord> records;
    std::set<std::string> seen;
    for (const json& line : read_jsonl(opt.in_path)) {
      VideoRecord r = record_from_json(line.at("record"));
      if (seen.insert(r.video_id).second) records.push_back(std::move(r));
    }

    const std::vector<VideoRecord> selected = select_task_subset(records, profile);

    std::vector<TrainingSample> samples;
    std::size_t too_short = 0;
    for (const VideoRecord& r : selected) {
      try {
        const ClipWindow window = sample_window(r, opt.frames, opt.seed);
        samples.push_back(
            make_training_sample(r, window, profile.name, {"annotate", "validate", "sample"}));
      } catch (const Error& e) {
        if (e.code() != Errc::TooShort) throw;
        ++too_short;
      }
    }

    const std::size_t written = emit_manifest(samples, opt.out_path);
    std::fprintf(stderr, "selected %zu of %zu records, wrote %zu samples (%zu too short)\n",
                 selected.size(), records.size(), written, too_short);
  });
}

int run_multiperson(const MultipersonOptions& opt) {
  return guarded([&] {
    std::vector<RecordTracks> all;
    for (const json& line : read_jsonl(opt.tracks_path))
      all.push_back(record_tracks_from_json(line));

    if (opt.partition) {
      const PersonPartition p =
          partition_person_count(all, opt.min_displacement_frac, opt.min_frames);
      const json out = {{"single", p.single}, {"multi", p.multi}, {"excluded", p.excluded}};
      write_file_atomic(opt.out_path, out.dump() + "\n");
      std::fprintf(stderr, "partitioned %zu records: %zu single, %zu multi, %zu excluded\n",
                   all.size(), p.single.size(), p.multi.size(), p.excluded.size());
      return;
    }

    if (opt.bind) {
      std::vector<json> lines;
      for (const RecordTracks& rt : all) {
        std::vector<PersonTrack> dynamic;
        for (const PersonTrack& t : rt.tracks)
          if (classify_track_dynamic(t, rt.width, rt.height, opt.min_displacement_frac,
                                     opt.min_frames) == TrackClass::Dynamic)
            dynamic.push_back(t);
        const ConditionBinding binding = build_condition_binding(dynamic, opt.targets);
        json line = condition_binding_to_json(binding);
        line["video_id"] = rt.video_id;
        lines.push_back(std::move(line));
      }
      write_jsonl(opt.out_path, lines);
      std::fprintf(stderr, "bound %zu records\n", lines.size());
      return;
    }

    std::vector<json> lines;
    std::size_t total_segments = 0;
    for (const RecordTracks& rt : all) {
      const std::vector<SpeakerSegment> segments =
          derive_single_speaker_segments(rt.tracks, opt.min_segment_s);
      json segs = json::array();
      for (const SpeakerSegment& s : segments)
        segs.push_back({{"track_id", s.track_id}, {"start_s", s.start_s}, {"end_s", s.end_s}});
      lines.push_back({{"video_id", rt.video_id}, {"segments", std::move(segs)}});
      total_segments += segments.size();
    }
    write_jsonl(opt.out_path, lines);
    std::fprintf(stderr, "derived %zu segments across %zu records\n", total_segments, all.size());
  });
}

int run_silent(const SilentOptions& opt) {
  return guarded([&] {
    // Group clip verdicts by video, preserving first-seen order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<ClipVerdict>> by_video;
    for (const json& line : read_jsonl(opt.verdicts_path)) {
      auto [video_id, verdict] = clip_verdict_from_json(line);
      if (!by_video.contains(video_id)) order.push_back(video_id);
      by_video[video_id].push_back(verdict);
    }

    std::vector<json> lines;
    std::size_t silent = 0;
    for (const std::string& id : order) {
      const VideoSilenceLabel label = aggregate_video(id, by_video.at(id));
      if (label.label == SilenceLabel::Silent) ++silent;
      lines.push_back({{"video_id", id},
                       {"label", label.label == SilenceLabel::Silent ? "Silent" : "Excluded"}});
    }
    write_jsonl(opt.out_path, lines);
    std::fprintf(stderr, "%zu of %zu videos labeled Silent\n", silent, order.size());
  });
}

int run_emotion(const EmotionOptions& opt) {
  return guarded([&] {
    struct FlagsEntry {
      ExclusionFlags flags;
      std::set<int> categories;
    };
    std::map<std::string, FlagsEntry> flags_by_id;
    for (const json& line : read_jsonl(opt.flags_path)) {
      FlagsEntry e;
      e.flags.synthetic = line.value("synthetic", false);
      e.flags.subject_count = line.value("subject_count", std::int64_t{1});
      e.flags.identity_switch = line.value("identity_switch", false);
      e.flags.subject_area_fraction = line.value("subject_area_fraction", 0.0);
      if (auto it = line.find("categories"); it != line.end())
        for (const auto& c : *it) e.categories.insert(c.get<int>());
      flags_by_id[line.at("video_id").get<std::string>()] = std::move(e);
    }

    std::vector<json> lines;
    for (const json& line : read_jsonl(opt.matrix_path)) {
      const std::string video_id = line.at("video_id").get<std::string>();
      const auto fit = flags_by_id.find(video_id);
      if (fit == flags_by_id.end())
        throw Error(Errc::MalformedRecord, "no exclusion flags for video '" + video_id + "'");

      if (apply_hard_exclusions(fit->second.flags, opt.min_area_fraction) ||
          fit->second.categories.empty()) {
        EmotionVerdict v;
        v.category = {0};
        lines.push_back(emotion_verdict_to_json(video_id, v));
        continue;
      }

      FrameEmotionMatrix matrix;
      matrix.class_names = line.at("class_names").get<std::vector<std::string>>();
      matrix.frames = line.at("frames").get<std::vector<std::vector<double>>>();
      for (const auto& row : matrix.frames)
        if (row.size() != matrix.class_names.size())
          throw Error(Errc::MalformedRecord, "matrix row width mismatch for '" + video_id + "'");

      const EmotionCategory category = assign_priority_category(fit->second.categories);
      const EmotionScore score = score_emotion(matrix, opt.top_n);
      const EmotionVerdict verdict =
          threshold_verdict(category, score.dominant_class, score.score, opt.threshold);
      lines.push_back(emotion_verdict_to_json(video_id, verdict));
    }
    write_jsonl(opt.out_path, lines);
    std::fprintf(stderr, "wrote %zu emotion verdicts\n", lines.size());
  });
}

int run_audio_align(const AudioAlignOptions& opt) {
  return guarded([&] {
    if (!(opt.duration_s > 0)) throw Error(Errc::ConfigError, "--duration must be > 0");
    const std::int64_t encoder_frames = encoder_frames_for_duration(opt.duration_s);
    const std::int64_t video_frames = video_frames_for_duration(opt.duration_s);
    const std::vector<WindowSpan> windows = split_windows(encoder_frames, opt.window_frames);

    const AlignedAudio aligned = align_audio(
        encoder_frames, video_frames,
        [&](const WindowSpan& w, std::int64_t index) {
          return stub_encode(w.length, opt.seed, index, opt.dim);
        },
        opt.window_frames);

    if (opt.dump == "shapes" || opt.dump.empty()) {
      std::printf("duration_s: %.6g\n", opt.duration_s);
      std::printf("windows: %zu of %lld frames at 50 Hz\n", windows.size(),
                  static_cast<long long>(opt.window_frames));
      std::printf("hidden: %lld x %lld x %lld per window\n",
                  static_cast<long long>(kEncoderLayerCount),
                  static_cast<long long>(windows.front().length), static_cast<long long>(opt.dim));
      std::printf("pooled: %lld x %lld x %lld\n", static_cast<long long>(aligned.pooled.dim(0)),
                  static_cast<long long>(aligned.pooled.dim(1)),
                  static_cast<long long>(aligned.pooled.dim(2)));
      std::printf("aligned: %lld x %lld x %lld\n", static_cast<long long>(aligned.aligned.dim(0)),
                  static_cast<long long>(aligned.aligned.dim(1)),
                  static_cast<long long>(aligned.aligned.dim(2)));
      std::printf("latent: %lld x %lld x %lld\n", static_cast<long long>(aligned.latent.dim(0)),
                  static_cast<long long>(aligned.latent.dim(1)),
                  static_cast<long long>(aligned.latent.dim(2)));
    }
    if (!opt.out_prefix.empty()) {
      save_tensor(aligned.aligned, opt.out_prefix + ".aligned");
      save_tensor(aligned.latent, opt.out_prefix + ".latent");
    }
  });
}

int run_grpo_advantage(const GrpoAdvantageOptions& opt) {
  return guarded([&] {
    const Tensor raw = load_tensor(opt.rewards_path);
    if (raw.shape().size() != 3)
      throw Error(Errc::ShapeMismatch, "rewards tensor must have shape (G, K, J)");

    RewardTensor rewards;
    rewards.samples = raw.dim(0);
    rewards.rewards = raw.dim(1);
    rewards.partitions = raw.dim(2);
    rewards.values.assign(raw.data().begin(), raw.data().end());

    std::ifstream win(opt.weights_path);
    if (!win) throw Error(Errc::IoFailure, "cannot open " + opt.weights_path);
    json wj;
    try {
      win >> wj;
    } catch (const json::parse_error& e) {
      throw Error(Errc::MalformedRecord, opt.weights_path + ": " + e.what());
    }
    if (wj.is_object() && wj.contains("weights")) wj = wj.at("weights");
    rewards.weights = wj.get<std::vector<double>>();

    SigmaMode mode;
    if (opt.sigma_mode == "max") mode = SigmaMode::MaxOverPartitions;
    else if (opt.sigma_mode == "per") mode = SigmaMode::PerPartition;
    else throw Error(Errc::ConfigError, "--sigma-mode must be max or per");

    const AdvantageTensor adv = per_frame_advantage(rewards, opt.eps_floor, mode);

    Tensor per_reward({adv.samples, adv.rewards, adv.partitions});
    for (std::size_t i = 0; i < adv.per_reward.size(); ++i)
      per_reward.data()[i] = static_cast<float>(adv.per_reward[i]);
    save_tensor(per_reward, opt.out_path);

    if (!opt.totals_out_path.empty()) {
      const std::vector<double> totals = total_advantage(adv, rewards.weights);
      Tensor t({adv.samples, adv.partitions});
      for (std::size_t i = 0; i < totals.size(); ++i) t.data()[i] = static_cast<float>(totals[i]);
      save_tensor(t, opt.totals_out_path);
    }
  });
}

int run_grpo_rollout(const GrpoRolloutOptions& opt) {
  return guarded([&] {
    std::vector<json> lines;
    for (std::size_t i = 0; i < opt.count; ++i) {
      const RolloutPlan plan =
          plan_multiclip_rollout(opt.max_clips, opt.seed + static_cast<std::uint64_t>(i));
      lines.push_back({{"clip_count", plan.clip_count},
                       {"optimized_clip_index", plan.optimized_clip_index},
                       {"context_clip_indices", plan.context_clip_indices}});
    }
    if (opt.out_path.empty()) {
      for (const json& l : lines) std::printf("%s\n", l.dump().c_str());
    } else {
      write_jsonl(opt.out_path, lines);
    }
  });
}

int run_stats_merge(const StatsMergeOptions& opt) {
  return guarded([&] {
    std::vector<FilterReport> shards;
    for (const std::string& path : opt.report_paths) {
      std::ifstream in(path);
      if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedRecord, path + ": " + e.what());
      }
      shards.push_back(filter_report_from_json(j));
    }
    const FilterReport merged = merge_filter_reports(shards);

    std::printf("%-18s %10s %10s %8s  %s\n", "stage", "entered", "dropped", "drop%", "top reason");
    for (const StageReport& s : merged.stages) {
      const double pct = s.entered > 0 ? 100.0 * static_cast<double>(s.dropped) /
                                             static_cast<double>(s.entered)
                                       : 0.0;
      std::string top;
      std::int64_t top_count = 0;
      for (const auto& [reason, count] : s.drop_reasons)
        if (count > top_count) {
          top = reason;
          top_count = count;
        }
      std::printf("%-18s %10lld %10lld %7.1f%%  %s\n", to_string(s.name).c_str(),
                  static_cast<long long>(s.entered), static_cast<long long>(s.dropped), pct,
                  top.c_str());
    }
    std::printf("accepted: %lld\n", static_cast<long long>(merged.accepted));

    if (!opt.out_path.empty())
      write_file_atomic(opt.out_path, filter_report_to_json(merged).dump() + "\n");
  });
}

int run_gen_fixture(const GenFixtureOptions& opt) {
  return guarded([&] {
    std::filesystem::create_directories(opt.out_dir);
    const FixtureBundle bundle = generate_fixture(opt.seed, opt.count);

    std::string records;
    for (const VideoRecord& r : bundle.records) {
      records += serialize_record(r);
      records += '\n';
    }
    write_file_atomic(opt.out_dir + "/records.jsonl", records);
    write_jsonl(opt.out_dir + "/clips.jsonl", bundle.clip_lines);

    std::fprintf(stderr, "wrote %zu records and %zu clips to %s\n", bundle.records.size(),
                 bundle.clip_lines.size(), opt.out_dir.c_str());
  });
}

}  // namespace avatarforge::cli
