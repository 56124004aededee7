#include "avatarforge/fixture.hpp"

#include <algorithm>
#include <cmath>

#include "avatarforge/frame_stats.hpp"
#include "avatarforge/json_io.hpp"
#include "avatarforge/rng.hpp"

namespace avatarforge {

namespace {

// Small luma planes with injectable defects; enough pixels for stable
// statistics, cheap enough to regenerate on every CI run.
LumaFrames synth_frames(Rng& rng, std::int64_t count) {
  LumaFrames fr;
  fr.frames = std::min<std::int64_t>(count, 40);
  fr.height = 24;
  fr.width = 32;
  fr.data.resize(static_cast<std::size_t>(fr.frames * fr.height * fr.width));

  const double roll = rng.next_unit();
  double base = 0.5;
  if (roll < 0.12) base = 0.02;        // near-black video
  else if (roll < 0.20) base = 0.97;   // blown-out video
  const bool with_border = rng.next_unit() < 0.12;
  const std::int64_t jump_at = rng.next_unit() < 0.15 ? 1 + static_cast<std::int64_t>(
                                                                rng.next_below(static_cast<std::uint64_t>(
                                                                    std::max<std::int64_t>(fr.frames - 1, 1))))
                                                      : -1;

  // Jumps move toward mid-gray so saturated planes never freeze into
  // identical frames; borders are constant letterbox gray, dark enough to
  // look like a border but above the black threshold.
  const double jump_shift = base > 0.7 ? -0.35 : 0.35;
  for (std::int64_t f = 0; f < fr.frames; ++f) {
    const double shift = (jump_at >= 0 && f >= jump_at) ? jump_shift : 0.0;
    for (std::int64_t y = 0; y < fr.height; ++y) {
      for (std::int64_t x = 0; x < fr.width; ++x) {
        double v = base + shift + rng.next_range(-0.02, 0.02);
        if (with_border && y < 9) v = 0.2;
        fr.data[static_cast<std::size_t>((f * fr.height + y) * fr.width + x)] =
            static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return fr;
}

}  // namespace

FixtureBundle generate_fixture(std::uint64_t seed, std::size_t record_count) {
  static const SourceCategory kCategories[] = {
      SourceCategory::CloseUpFace,   SourceCategory::Interview,
      SourceCategory::ActedPerformance, SourceCategory::Interaction,
      SourceCategory::MusicVideo,    SourceCategory::AnimationStylized,
  };
  static const std::pair<std::int64_t, std::int64_t> kResolutions[] = {
      {640, 360}, {1280, 720}, {1920, 1080}};

  FixtureBundle bundle;
  for (std::size_t i = 0; i < record_count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "vid_%03zu", i);
    Rng rng(mix_seed(seed, id));

    VideoRecord r;
    r.video_id = id;
    r.source_category = kCategories[rng.next_below(6)];
    r.duration_s = rng.next_range(4.0, 60.0);
    r.fps = 25.0;
    const auto [w, h] = kResolutions[rng.next_below(3)];
    r.width = w;
    r.height = h;
    bundle.records.push_back(std::move(r));

    const std::int64_t total = bundle.records.back().total_frames();
    const std::size_t clips = 2 + rng.next_below(3);
    for (std::size_t c = 0; c < clips; ++c) {
      const std::int64_t length = std::min<std::int64_t>(
          total, static_cast<std::int64_t>(std::llround(25.0 * rng.next_range(2.0, 8.0))));
      const std::int64_t start =
          static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total - length + 1)));

      json line = {{"video_id", std::string(id)},
                   {"start_frame", start},
                   {"end_frame", start + length},
                   {"fps", 25.0}};
      if (rng.next_unit() < 0.9) {
        const LumaFrames frames = synth_frames(rng, length);
        line["frame_stats"] = frame_stats_to_json(compute_frame_stats(frames, 0.06, 0.94, 1e-4));
      }
      bundle.clip_lines.push_back(std::move(line));
    }
  }
  return bundle;
}

}  // namespace avatarforge
