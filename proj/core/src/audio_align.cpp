#include "avatarforge/audio_align.hpp"

#include <cmath>

#include "avatarforge/rng.hpp"

namespace avatarforge {

std::vector<WindowSpan> split_windows(std::int64_t total_frames_50hz, std::int64_t window_frames) {
  if (total_frames_50hz < 1 || window_frames < 1)
    throw Error(Errc::EmptyInput, "need at least one frame and a positive window");
  std::vector<WindowSpan> out;
  for (std::int64_t start = 0; start < total_frames_50hz; start += window_frames)
    out.push_back({start, std::min(window_frames, total_frames_50hz - start)});
  return out;
}

Tensor group_pool(const Tensor& stack) {
  if (stack.shape().size() != 3 || stack.dim(0) != kEncoderLayerCount)
    throw Error(Errc::WrongLayerCount,
                "expected a (33, F, D) stack, got rank " + std::to_string(stack.shape().size()));
  const std::int64_t frames = stack.dim(1);
  const std::int64_t dim = stack.dim(2);

  Tensor pooled({frames, kPooledChannels, dim});
  for (std::int64_t f = 0; f < frames; ++f) {
    for (std::int64_t d = 0; d < dim; ++d) {
      for (std::int64_t g = 0; g < 4; ++g) {
        double sum = 0;
        for (std::int64_t layer = 8 * g; layer < 8 * g + 8; ++layer) sum += stack.at3(layer, f, d);
        pooled.at3(f, g, d) = static_cast<float>(sum / 8.0);
      }
      pooled.at3(f, 4, d) = stack.at3(kEncoderLayerCount - 1, f, d);
    }
  }
  return pooled;
}

Tensor resample_linear(const Tensor& features, std::int64_t target_frames) {
  if (features.shape().size() != 3)
    throw Error(Errc::ShapeMismatch, "resample expects a (F, C, D) tensor");
  if (target_frames < 1) throw Error(Errc::EmptyInput, "target frame count must be >= 1");
  const std::int64_t source_frames = features.dim(0);
  const std::int64_t channels = features.dim(1);
  const std::int64_t dim = features.dim(2);

  Tensor out({target_frames, channels, dim});
  for (std::int64_t t = 0; t < target_frames; ++t) {
    double pos = 0;
    if (target_frames > 1 && source_frames > 1)
      pos = static_cast<double>(t) * static_cast<double>(source_frames - 1) /
            static_cast<double>(target_frames - 1);
    const std::int64_t lo = static_cast<std::int64_t>(std::floor(pos));
    const std::int64_t hi = std::min(lo + 1, source_frames - 1);
    const double frac = pos - static_cast<double>(lo);
    for (std::int64_t c = 0; c < channels; ++c)
      for (std::int64_t d = 0; d < dim; ++d)
        out.at3(t, c, d) = static_cast<float>((1.0 - frac) * features.at3(lo, c, d) +
                                              frac * features.at3(hi, c, d));
  }
  return out;
}

std::int64_t latent_length(std::int64_t target_frames) {
  if (target_frames < 1) throw Error(Errc::EmptyInput, "target frame count must be >= 1");
  return 1 + (target_frames - 1 + kLatentTemporalFactor - 1) / kLatentTemporalFactor;
}

Tensor compress_to_latent(const Tensor& embedding) {
  if (embedding.shape().size() != 3)
    throw Error(Errc::ShapeMismatch, "latent compression expects a (T, C, D) tensor");
  const std::int64_t frames = embedding.dim(0);
  const std::int64_t channels = embedding.dim(1);
  const std::int64_t dim = embedding.dim(2);
  const std::int64_t latent_len = latent_length(frames);

  Tensor out({latent_len, channels, dim});
  for (std::int64_t c = 0; c < channels; ++c)
    for (std::int64_t d = 0; d < dim; ++d) out.at3(0, c, d) = embedding.at3(0, c, d);

  for (std::int64_t j = 1; j < latent_len; ++j) {
    const std::int64_t first = kLatentTemporalFactor * (j - 1) + 1;
    const std::int64_t last = std::min(kLatentTemporalFactor * j, frames - 1);
    const double count = static_cast<double>(last - first + 1);
    for (std::int64_t c = 0; c < channels; ++c) {
      for (std::int64_t d = 0; d < dim; ++d) {
        double sum = 0;
        for (std::int64_t f = first; f <= last; ++f) sum += embedding.at3(f, c, d);
        out.at3(j, c, d) = static_cast<float>(sum / count);
      }
    }
  }
  return out;
}

Tensor stub_encode(std::int64_t window_length, std::uint64_t seed, std::int64_t window_index,
                   std::int64_t dim) {
  if (window_length < 1) throw Error(Errc::EmptyInput, "window length must be >= 1");
  Tensor stack({kEncoderLayerCount, window_length, dim});
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(window_index)));
  for (float& v : stack.data()) v = static_cast<float>(rng.next_range(-1.0, 1.0));
  return stack;
}

AlignedAudio align_audio(std::int64_t total_frames_50hz, std::int64_t target_frames,
                         const WindowEncoder& encoder, std::int64_t window_frames) {
  const std::vector<WindowSpan> windows = split_windows(total_frames_50hz, window_frames);

  // Encode per window, pool per window (pooling is per-frame, so pooling
  // before or after concatenation is equivalent), then concatenate at 50 Hz.
  std::int64_t dim = -1;
  std::vector<Tensor> pooled_windows;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    Tensor stack = encoder(windows[i], static_cast<std::int64_t>(i));
    if (stack.dim(1) != windows[i].length)
      throw Error(Errc::ShapeMismatch, "encoder returned wrong frame count for window");
    if (dim < 0) dim = stack.dim(2);
    else if (stack.dim(2) != dim)
      throw Error(Errc::ShapeMismatch, "encoder dim changed between windows");
    pooled_windows.push_back(group_pool(stack));
  }

  AlignedAudio out;
  out.pooled = Tensor({total_frames_50hz, kPooledChannels, dim});
  std::int64_t cursor = 0;
  for (const Tensor& w : pooled_windows) {
    std::copy(w.data().begin(), w.data().end(),
              out.pooled.data().begin() + static_cast<std::ptrdiff_t>(cursor * kPooledChannels * dim));
    cursor += w.dim(0);
  }

  out.aligned = resample_linear(out.pooled, target_frames);
  out.latent = compress_to_latent(out.aligned);
  return out;
}

std::int64_t encoder_frames_for_duration(double duration_s) {
  return static_cast<std::int64_t>(std::llround(kEncoderFrameRateHz * duration_s));
}

std::int64_t video_frames_for_duration(double duration_s) {
  return static_cast<std::int64_t>(std::llround(kVideoFrameRateFps * duration_s));
}

}  // namespace avatarforge
