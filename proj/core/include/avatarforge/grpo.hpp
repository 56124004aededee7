#pragma once

#include <cstdint>
#include <vector>

#include "avatarforge/tensor.hpp"

namespace avatarforge {

// Per-frame group-relative advantage math. Rewards are decomposed along
// temporal partitions: r[i][k][j] is the reward of partition j of sample i
// under reward model k. Advantages normalize each (k, j) group across the
// sample axis by the per-reward maximum partition std.

// How the normalizing std is chosen. MaxOverPartitions divides every
// partition of reward k by max_j sigma_{k,j}; PerPartition divides partition
// j by its own sigma_{k,j}. Both floored at eps.
enum class SigmaMode { MaxOverPartitions, PerPartition };

inline constexpr double kDefaultEpsFloor = 1e-6;

struct RewardTensor {
  std::int64_t samples = 0;     // G
  std::int64_t rewards = 0;     // K
  std::int64_t partitions = 0;  // J
  std::vector<double> values;   // row-major G x K x J
  std::vector<double> weights;  // length K

  double& at(std::int64_t i, std::int64_t k, std::int64_t j) {
    return values[static_cast<std::size_t>((i * rewards + k) * partitions + j)];
  }
  double at(std::int64_t i, std::int64_t k, std::int64_t j) const {
    return values[static_cast<std::size_t>((i * rewards + k) * partitions + j)];
  }
};

struct AdvantageTensor {
  std::int64_t samples = 0;
  std::int64_t rewards = 0;
  std::int64_t partitions = 0;
  std::vector<double> per_reward;  // G x K x J
  std::vector<double> totals;      // G x J, weighted sum over k

  double at(std::int64_t i, std::int64_t k, std::int64_t j) const {
    return per_reward[static_cast<std::size_t>((i * rewards + k) * partitions + j)];
  }
  double total_at(std::int64_t i, std::int64_t j) const {
    return totals[static_cast<std::size_t>(i * partitions + j)];
  }
};

// A_hat[i][k][j] = (r[i][k][j] - mu_{k,j}) / max(sigma, eps_floor), with
// sigma per SigmaMode and mu/sigma the population statistics over samples.
// G = 1 yields all-zero advantages by convention. Throws
// Error(NonFiniteReward) when any reward is not finite.
AdvantageTensor per_frame_advantage(const RewardTensor& rewards,
                                    double eps_floor = kDefaultEpsFloor,
                                    SigmaMode sigma_mode = SigmaMode::MaxOverPartitions);

// totals[i][j] = sum_k weights[k] * per_reward[i][k][j]. Throws
// Error(WeightLengthMismatch) unless weights has length K.
std::vector<double> total_advantage(const AdvantageTensor& per_reward,
                                    const std::vector<double>& weights);

struct HandPresence {
  bool hands_found = false;
  double confidence = 0;  // [0,1]
};

// First-frame hand-presence gate: samples whose conditioning frame shows
// hands at or above min_conf are prioritized. The detector is an external
// backend; only its verdict enters here.
bool hand_presence_gate(const HandPresence& detection, double min_conf);

struct RolloutPlan {
  std::int64_t clip_count = 1;
  std::int64_t optimized_clip_index = 0;             // always the final clip
  std::vector<std::int64_t> context_clip_indices;    // 0..clip_count-2
};

inline constexpr std::int64_t kDefaultMaxRolloutClips = 5;

// clip_count uniform on {1..max_clips}, deterministic in seed; earlier clips
// build temporal context, only the final one is optimized.
RolloutPlan plan_multiclip_rollout(std::int64_t max_clips, std::uint64_t seed);

struct LatentPair {
  Tensor x0;   // clean latent
  Tensor eps;  // noise, identical shape
  double t = 0;  // [0,1]
};

// x_t = (1 - t) * x0 + t * eps, elementwise.
Tensor flow_interpolate(const LatentPair& pair);

// v = x0 - eps, elementwise; d/dt flow_interpolate = -v.
Tensor velocity_target(const LatentPair& pair);

}  // namespace avatarforge
