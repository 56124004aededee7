#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/errors.hpp"

namespace avatarforge {

// Decoded luma plane sequence, values in [0,1], row-major F x H x W.
// Decoding itself is delegated to an external tool; the engine only ever
// sees pre-decoded planes.
struct LumaFrames {
  std::vector<float> data;
  std::int64_t frames = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;

  float at(std::int64_t f, std::int64_t y, std::int64_t x) const {
    return data[static_cast<std::size_t>((f * height + y) * width + x)];
  }
};

struct FrameStats {
  std::vector<double> luma_mean;  // per frame, in [0,1]
  std::vector<double> luma_std;   // per frame, population std
  double black_ratio = 0;         // fraction of all pixels < black_thr
  double white_ratio = 0;         // fraction of all pixels > white_thr
  std::array<std::int64_t, 4> border = {0, 0, 0, 0};  // top, bottom, left, right
  std::vector<double> interframe_diff;                // length frames-1

  bool operator==(const FrameStats&) const = default;
};

// Fills the luma/ratio parts of FrameStats. Requires F >= 1 and
// 0 <= black_thr < white_thr <= 1; throws Error(EmptyInput) otherwise.
FrameStats compute_luma_stats(const LumaFrames& frames, double black_thr, double white_thr);

// Widths of the maximal edge runs whose combined temporal-and-spatial luma
// variance stays below variance_eps, walking inward from each edge.
// Each width is capped at floor(dim/2) - 1 (so degenerate planes yield 0).
std::array<std::int64_t, 4> detect_border(const LumaFrames& frames, double variance_eps);

// Mean absolute pixel difference between consecutive frames, length F-1.
std::vector<double> compute_interframe_diff(const LumaFrames& frames);

// Index i is a jump iff diff[i] > k * median(diff); the median of an
// even-length list is the mean of its two central values. Requires k > 1.
std::vector<std::size_t> detect_frame_jump(const std::vector<double>& interframe_diff, double k);

// Full FrameStats for a decoded clip.
FrameStats compute_frame_stats(const LumaFrames& frames, double black_thr, double white_thr,
                               double variance_eps);

nlohmann::json frame_stats_to_json(const FrameStats& s);
FrameStats frame_stats_from_json(const nlohmann::json& j);

}  // namespace avatarforge
