#include "avatarforge/frame_stats.hpp"

#include <algorithm>
#include <cmath>

namespace avatarforge {

namespace {

// Population variance of the pixels selected by `next`, which yields
// values until it returns false.
template <typename NextFn>
double variance_of(NextFn&& next) {
  double sum = 0, sum2 = 0;
  std::int64_t n = 0;
  double v;
  while (next(v)) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  if (n == 0) return 0;
  const double mean = sum / static_cast<double>(n);
  return std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
}

double row_variance(const LumaFrames& fr, std::int64_t y) {
  std::int64_t f = 0, x = 0;
  return variance_of([&](double& v) {
    if (f >= fr.frames) return false;
    v = fr.at(f, y, x);
    if (++x == fr.width) {
      x = 0;
      ++f;
    }
    return true;
  });
}

double col_variance(const LumaFrames& fr, std::int64_t x) {
  std::int64_t f = 0, y = 0;
  return variance_of([&](double& v) {
    if (f >= fr.frames) return false;
    v = fr.at(f, y, x);
    if (++y == fr.height) {
      y = 0;
      ++f;
    }
    return true;
  });
}

}  // namespace

FrameStats compute_luma_stats(const LumaFrames& frames, double black_thr, double white_thr) {
  if (frames.frames < 1 || frames.height < 1 || frames.width < 1)
    throw Error(Errc::EmptyInput, "luma stats need at least one frame with pixels");
  if (!(black_thr >= 0 && black_thr < white_thr && white_thr <= 1))
    throw Error(Errc::ConfigIncomplete, "need 0 <= black_thr < white_thr <= 1");

  FrameStats out;
  const std::int64_t pixels = frames.height * frames.width;
  std::int64_t black = 0, white = 0;
  for (std::int64_t f = 0; f < frames.frames; ++f) {
    double sum = 0, sum2 = 0;
    for (std::int64_t y = 0; y < frames.height; ++y) {
      for (std::int64_t x = 0; x < frames.width; ++x) {
        const double v = frames.at(f, y, x);
        sum += v;
        sum2 += v * v;
        if (v < black_thr) ++black;
        if (v > white_thr) ++white;
      }
    }
    const double mean = sum / static_cast<double>(pixels);
    out.luma_mean.push_back(mean);
    out.luma_std.push_back(std::sqrt(std::max(0.0, sum2 / static_cast<double>(pixels) - mean * mean)));
  }
  const double total = static_cast<double>(pixels * frames.frames);
  out.black_ratio = static_cast<double>(black) / total;
  out.white_ratio = static_cast<double>(white) / total;
  return out;
}

std::array<std::int64_t, 4> detect_border(const LumaFrames& frames, double variance_eps) {
  std::array<std::int64_t, 4> border = {0, 0, 0, 0};
  if (frames.frames < 1 || frames.height < 1 || frames.width < 1) return border;

  const std::int64_t cap_rows = std::max<std::int64_t>(0, frames.height / 2 - 1);
  const std::int64_t cap_cols = std::max<std::int64_t>(0, frames.width / 2 - 1);

  while (border[0] < cap_rows && row_variance(frames, border[0]) < variance_eps) ++border[0];
  while (border[1] < cap_rows && row_variance(frames, frames.height - 1 - border[1]) < variance_eps)
    ++border[1];
  while (border[2] < cap_cols && col_variance(frames, border[2]) < variance_eps) ++border[2];
  while (border[3] < cap_cols && col_variance(frames, frames.width - 1 - border[3]) < variance_eps)
    ++border[3];
  return border;
}

std::vector<double> compute_interframe_diff(const LumaFrames& frames) {
  std::vector<double> out;
  const std::int64_t pixels = frames.height * frames.width;
  for (std::int64_t f = 1; f < frames.frames; ++f) {
    double sum = 0;
    for (std::int64_t y = 0; y < frames.height; ++y)
      for (std::int64_t x = 0; x < frames.width; ++x)
        sum += std::abs(static_cast<double>(frames.at(f, y, x)) - frames.at(f - 1, y, x));
    out.push_back(sum / static_cast<double>(pixels));
  }
  return out;
}

std::vector<std::size_t> detect_frame_jump(const std::vector<double>& diff, double k) {
  if (diff.empty()) return {};
  if (!(k > 1)) throw Error(Errc::ConfigIncomplete, "jump factor k must be > 1");

  std::vector<double> sorted = diff;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median =
      (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  std::vector<std::size_t> jumps;
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (diff[i] > k * median) jumps.push_back(i);
  return jumps;
}

FrameStats compute_frame_stats(const LumaFrames& frames, double black_thr, double white_thr,
                               double variance_eps) {
  FrameStats s = compute_luma_stats(frames, black_thr, white_thr);
  s.border = detect_border(frames, variance_eps);
  s.interframe_diff = compute_interframe_diff(frames);
  return s;
}

nlohmann::json frame_stats_to_json(const FrameStats& s) {
  return {{"luma_mean", s.luma_mean},
          {"luma_std", s.luma_std},
          {"black_ratio", s.black_ratio},
          {"white_ratio", s.white_ratio},
          {"border", s.border},
          {"interframe_diff", s.interframe_diff}};
}

FrameStats frame_stats_from_json(const nlohmann::json& j) {
  FrameStats s;
  if (auto it = j.find("luma_mean"); it != j.end()) s.luma_mean = it->get<std::vector<double>>();
  if (auto it = j.find("luma_std"); it != j.end()) s.luma_std = it->get<std::vector<double>>();
  s.black_ratio = j.value("black_ratio", 0.0);
  s.white_ratio = j.value("white_ratio", 0.0);
  if (auto it = j.find("border"); it != j.end()) {
    auto v = it->get<std::vector<std::int64_t>>();
    for (std::size_t i = 0; i < 4 && i < v.size(); ++i) s.border[i] = v[i];
  }
  if (auto it = j.find("interframe_diff"); it != j.end())
    s.interframe_diff = it->get<std::vector<double>>();
  return s;
}

}  // namespace avatarforge
