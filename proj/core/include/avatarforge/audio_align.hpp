#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "avatarforge/tensor.hpp"

namespace avatarforge {

// Deterministic tensor math that aligns encoder hidden states to video
// frames: sliding-window partitioning, grouped mean pooling of the 33
// hidden-state layers, 50 Hz -> 25 fps linear resampling, and 4x latent-rate
// compression. The neural encoder itself is pluggable; stub_encode stands in
// for it during tests.

inline constexpr std::int64_t kEncoderLayerCount = 33;  // embedding + 32 transformer layers
inline constexpr std::int64_t kPooledChannels = 5;      // four 8-layer groups + final layer
inline constexpr std::int64_t kEncoderDim = 1280;
inline constexpr double kEncoderFrameRateHz = 50.0;
inline constexpr double kVideoFrameRateFps = 25.0;
inline constexpr std::int64_t kDefaultWindowFrames = 1500;  // 30 s at 50 Hz
inline constexpr std::int64_t kLatentTemporalFactor = 4;

struct WindowSpan {
  std::int64_t start = 0;
  std::int64_t length = 0;
  bool operator==(const WindowSpan&) const = default;
};

// Contiguous non-overlapping windows covering [0, total); the last window may
// be shorter.
std::vector<WindowSpan> split_windows(std::int64_t total_frames_50hz,
                                      std::int64_t window_frames = kDefaultWindowFrames);

// stack: (33, F, D) -> pooled (F, 5, D). Channel g in 0..3 is the mean of
// layers [8g, 8g+8); channel 4 is layer 32 alone. Throws WrongLayerCount.
Tensor group_pool(const Tensor& stack);

// (F, 5, D) -> (T, 5, D) by endpoint-aligned linear interpolation: output
// frame t reads source position t*(F-1)/(T-1) (T = 1 takes frame 0; F = 1
// broadcasts the single frame).
Tensor resample_linear(const Tensor& features, std::int64_t target_frames);

// Latent frame count for T aligned video frames: 1 + ceil((T-1)/4).
std::int64_t latent_length(std::int64_t target_frames);

// (T, 5, D) -> (latent_length(T), 5, D). Latent frame 0 is video frame 0;
// latent frame j >= 1 is the mean over video frames [4(j-1)+1, min(4j, T-1)].
Tensor compress_to_latent(const Tensor& embedding);

// Deterministic pseudo-random stand-in for the external encoder: a
// (33, window_length, dim) stack seeded by (seed, window_index).
Tensor stub_encode(std::int64_t window_length, std::uint64_t seed, std::int64_t window_index = 0,
                   std::int64_t dim = kEncoderDim);

using WindowEncoder = std::function<Tensor(const WindowSpan&, std::int64_t window_index)>;

struct AlignedAudio {
  Tensor pooled;    // (F, 5, D) at 50 Hz
  Tensor aligned;   // (T, 5, D) at 25 fps
  Tensor latent;    // (latent_length(T), 5, D)
};

// Full pipeline: window split, per-window encoding, concatenation at 50 Hz,
// grouped pooling, one global resample to target_frames, latent compression.
AlignedAudio align_audio(std::int64_t total_frames_50hz, std::int64_t target_frames,
                         const WindowEncoder& encoder,
                         std::int64_t window_frames = kDefaultWindowFrames);

// Frame counts for a given duration: F = round(50 d), T = round(25 d).
std::int64_t encoder_frames_for_duration(double duration_s);
std::int64_t video_frames_for_duration(double duration_s);

}  // namespace avatarforge
