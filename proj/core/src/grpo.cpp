#include "avatarforge/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "avatarforge/rng.hpp"

namespace avatarforge {

AdvantageTensor per_frame_advantage(const RewardTensor& rewards, double eps_floor,
                                    SigmaMode sigma_mode) {
  if (rewards.samples < 1 || rewards.rewards < 1 || rewards.partitions < 1)
    throw Error(Errc::EmptyInput, "reward tensor must have G, K, J >= 1");
  if (!(eps_floor > 0)) throw Error(Errc::ConfigIncomplete, "eps_floor must be > 0");
  for (double v : rewards.values)
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteReward, "reward value is not finite");

  const std::int64_t G = rewards.samples, K = rewards.rewards, J = rewards.partitions;
  AdvantageTensor adv;
  adv.samples = G;
  adv.rewards = K;
  adv.partitions = J;
  adv.per_reward.assign(static_cast<std::size_t>(G * K * J), 0.0);

  if (G == 1) return adv;  // no group statistics from a single sample

  std::vector<double> mu(static_cast<std::size_t>(K * J));
  std::vector<double> sigma(static_cast<std::size_t>(K * J));
  for (std::int64_t k = 0; k < K; ++k) {
    for (std::int64_t j = 0; j < J; ++j) {
      double sum = 0;
      for (std::int64_t i = 0; i < G; ++i) sum += rewards.at(i, k, j);
      const double mean = sum / static_cast<double>(G);
      double var = 0;
      for (std::int64_t i = 0; i < G; ++i) {
        const double d = rewards.at(i, k, j) - mean;
        var += d * d;
      }
      mu[static_cast<std::size_t>(k * J + j)] = mean;
      sigma[static_cast<std::size_t>(k * J + j)] = std::sqrt(var / static_cast<double>(G));
    }
  }

  for (std::int64_t k = 0; k < K; ++k) {
    double sigma_max = 0;
    for (std::int64_t j = 0; j < J; ++j)
      sigma_max = std::max(sigma_max, sigma[static_cast<std::size_t>(k * J + j)]);
    for (std::int64_t j = 0; j < J; ++j) {
      const double s = sigma_mode == SigmaMode::MaxOverPartitions
                           ? sigma_max
                           : sigma[static_cast<std::size_t>(k * J + j)];
      const double denom = std::max(s, eps_floor);
      const double mean = mu[static_cast<std::size_t>(k * J + j)];
      for (std::int64_t i = 0; i < G; ++i)
        adv.per_reward[static_cast<std::size_t>((i * K + k) * J + j)] =
            (rewards.at(i, k, j) - mean) / denom;
    }
  }
  return adv;
}

std::vector<double> total_advantage(const AdvantageTensor& adv, const std::vector<double>& weights) {
  if (static_cast<std::int64_t>(weights.size()) != adv.rewards)
    throw Error(Errc::WeightLengthMismatch,
                "got " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(adv.rewards) + " rewards");
  std::vector<double> totals(static_cast<std::size_t>(adv.samples * adv.partitions), 0.0);
  for (std::int64_t i = 0; i < adv.samples; ++i)
    for (std::int64_t j = 0; j < adv.partitions; ++j) {
      double sum = 0;
      for (std::int64_t k = 0; k < adv.rewards; ++k)
        sum += weights[static_cast<std::size_t>(k)] * adv.at(i, k, j);
      totals[static_cast<std::size_t>(i * adv.partitions + j)] = sum;
    }
  return totals;
}

bool hand_presence_gate(const HandPresence& detection, double min_conf) {
  return detection.hands_found && detection.confidence >= min_conf;
}

RolloutPlan plan_multiclip_rollout(std::int64_t max_clips, std::uint64_t seed) {
  if (max_clips < 1) throw Error(Errc::ConfigIncomplete, "max_clips must be >= 1");
  Rng rng(seed);
  RolloutPlan plan;
  plan.clip_count = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(max_clips)));
  plan.optimized_clip_index = plan.clip_count - 1;
  for (std::int64_t i = 0; i + 1 < plan.clip_count; ++i) plan.context_clip_indices.push_back(i);
  return plan;
}

Tensor flow_interpolate(const LatentPair& pair) {
  if (!pair.x0.same_shape(pair.eps))
    throw Error(Errc::ShapeMismatch, "x0 and eps shapes differ");
  Tensor out(pair.x0.shape());
  const double t = pair.t;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = static_cast<float>((1.0 - t) * pair.x0.data()[i] + t * pair.eps.data()[i]);
  return out;
}

Tensor velocity_target(const LatentPair& pair) {
  if (!pair.x0.same_shape(pair.eps))
    throw Error(Errc::ShapeMismatch, "x0 and eps shapes differ");
  Tensor out(pair.x0.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = pair.x0.data()[i] - pair.eps.data()[i];
  return out;
}

}  // namespace avatarforge
