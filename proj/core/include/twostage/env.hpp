#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "twostage/belief.hpp"
#include "twostage/rng.hpp"

namespace twostage {

using ActionId = std::size_t;

/// Stochastic linear bandit with static per-action embeddings.
///
/// Embedding lookups take the round index so a per-round context provider can
/// be substituted later; the stationary provider implemented here ignores it.
class LinearEnv {
 public:
  LinearEnv(Vector theta_star, std::vector<Vector> ranker_embed,
            std::vector<std::vector<Vector>> nominator_embeds, double reward_noise_sd);

  std::size_t num_actions() const noexcept { return ranker_embed_.size(); }
  std::size_t num_nominators() const noexcept { return nominator_embeds_.size(); }
  int ranker_dim() const noexcept { return static_cast<int>(theta_star_.size()); }
  int nominator_dim(std::size_t n) const;

  const Vector& theta_star() const noexcept { return theta_star_; }
  double reward_noise_sd() const noexcept { return reward_noise_sd_; }

  const Vector& ranker_embedding(ActionId a, std::uint64_t round = 0) const;
  const Vector& nominator_embedding(std::size_t n, ActionId a, std::uint64_t round = 0) const;
  const std::vector<Vector>& ranker_table() const noexcept { return ranker_embed_; }
  const std::vector<Vector>& nominator_table(std::size_t n) const;

  /// <theta_star, phi(a)>.
  double expected_reward(ActionId a) const;

  /// argmax of the expected reward, lowest index on ties.
  ActionId optimal_action() const noexcept { return optimal_; }

 private:
  void check_action(ActionId a, const char* what) const;

  Vector theta_star_;
  std::vector<Vector> ranker_embed_;
  std::vector<std::vector<Vector>> nominator_embeds_;
  double reward_noise_sd_;
  std::vector<double> expected_;
  ActionId optimal_ = 0;
};

/// Pre-drawn standard normals indexed by (round, action), shared between policy
/// variants of one run so they face identical reward realizations.
class NoiseTable {
 public:
  NoiseTable(std::size_t rounds, std::size_t actions, const RandomStream& stream);

  static NoiseTable zeros(std::size_t rounds, std::size_t actions);
  static NoiseTable constant(std::size_t rounds, std::size_t actions, double value);

  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t actions() const noexcept { return actions_; }
  double at(std::uint64_t round, ActionId a) const;

 private:
  NoiseTable(std::size_t rounds, std::size_t actions, std::vector<double> values);

  std::size_t rounds_;
  std::size_t actions_;
  std::vector<double> values_;
};

/// The three-action, two-nominator toy problem with one-hot embeddings.
struct ToySetup {
  LinearEnv env;
  std::vector<std::vector<ActionId>> pools;
};

inline constexpr double kToyRewardNoiseSd = 0.1;

ToySetup build_toy_env(double reward_noise_sd = kToyRewardNoiseSd);

/// <theta_star, phi(a)> + sd * noise(round, a).
double sample_reward(const LinearEnv& env, ActionId a, std::uint64_t round, const NoiseTable& noise);

/// Expected-reward gap to the optimal action; zero iff a is optimal.
double pseudo_regret(const LinearEnv& env, ActionId a);

}  // namespace twostage
