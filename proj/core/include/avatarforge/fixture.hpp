#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/record.hpp"

namespace avatarforge {

// Bundled synthetic corpus: bare records for the annotation stage plus
// candidate clips with pixel statistics computed from generated luma planes.
// Deterministic in seed and sized so every filter stage and task profile sees
// both passing and failing inputs. CI never needs real video.
struct FixtureBundle {
  std::vector<VideoRecord> records;
  std::vector<json> clip_lines;  // {"video_id", "start_frame", "end_frame", "fps", "frame_stats"?}
};

FixtureBundle generate_fixture(std::uint64_t seed, std::size_t record_count = 20);

}  // namespace avatarforge
