#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "twostage/belief.hpp"
#include "twostage/env.hpp"
#include "twostage/rng.hpp"

namespace twostage {

enum class SyncMode { naive, sync_post, sync_pre };
enum class UpdateTarget { recommended, nominated };
enum class TieBreak { seeded_uniform, lowest_index };

std::string_view to_string(SyncMode mode) noexcept;
std::string_view to_string(UpdateTarget target) noexcept;
std::string_view to_string(TieBreak tie_break) noexcept;

/// Scores within this absolute distance of the maximum count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// A LinUCB learner: posterior, confidence schedule, embedding table indexed by
/// action id, and the pool of actions it may select.
class LinUCBAgent {
 public:
  LinUCBAgent(GaussianBelief belief, BetaSchedule schedule, std::vector<Vector> embed,
              std::vector<ActionId> pool);

  const GaussianBelief& belief() const noexcept { return belief_; }
  GaussianBelief& belief() noexcept { return belief_; }
  const BetaSchedule& schedule() const noexcept { return schedule_; }
  const std::vector<ActionId>& pool() const noexcept { return pool_; }
  std::size_t num_embedded() const noexcept { return embed_.size(); }
  bool embeds(ActionId a) const noexcept { return a < embed_.size(); }
  const Vector& embedding(ActionId a) const;

 private:
  GaussianBelief belief_;
  BetaSchedule schedule_;
  std::vector<Vector> embed_;
  std::vector<ActionId> pool_;
};

/// argmax of the UCB score over candidates using beta(schedule, t).
ActionId select_action(const LinUCBAgent& agent, std::span<const ActionId> candidates,
                       std::uint64_t t, TieBreak tie_break, RandomStream& rng);

/// True iff the nominator's reward std for a strictly exceeds the ranker's.
bool sync_condition(const LinUCBAgent& nominator, const LinUCBAgent& ranker, ActionId a);

struct RoundOutcome {
  std::vector<ActionId> nominations;
  ActionId recommended = 0;
  double reward = 0.0;
  double instant_regret = 0.0;
  std::vector<std::size_t> sync_events;
};

struct SystemOptions {
  SyncMode mode = SyncMode::naive;
  UpdateTarget update_target = UpdateTarget::recommended;
  TieBreak tie_break = TieBreak::seeded_uniform;
};

/// Ranker plus N nominators run as a two-stage LinUCB recommender.
///
/// round() counts completed rounds; round t = round() + 1 selects with
/// beta_{t-1} (clamped at 1), the schedule value computed from the data
/// available before that round.
class TwoStageSystem {
 public:
  TwoStageSystem(LinUCBAgent ranker, std::vector<LinUCBAgent> nominators, SystemOptions options);

  std::vector<ActionId> nominate(RandomStream& rng) const;
  ActionId recommend(std::span<const ActionId> nominations, RandomStream& rng) const;

  /// Applies the belief updates and synchronization steps of one round given
  /// its nominations, served action and reward; returns the synchronized
  /// nominator indices and advances the round counter.
  std::vector<std::size_t> update(std::span<const ActionId> nominations, ActionId recommended,
                                  double reward);

  RoundOutcome step(const LinearEnv& env, const NoiseTable& noise, RandomStream& rng);

  const LinUCBAgent& ranker() const noexcept { return ranker_; }
  const std::vector<LinUCBAgent>& nominators() const noexcept { return nominators_; }
  const SystemOptions& options() const noexcept { return options_; }
  std::uint64_t round() const noexcept { return round_; }

 private:
  bool try_sync(LinUCBAgent& nominator, const LinUCBAgent& ranker, ActionId a);

  LinUCBAgent ranker_;
  std::vector<LinUCBAgent> nominators_;
  SystemOptions options_;
  std::uint64_t round_ = 0;
};

/// One LinUCB agent choosing directly among its whole pool.
class SingleStageSystem {
 public:
  SingleStageSystem(LinUCBAgent agent, TieBreak tie_break);

  RoundOutcome step(const LinearEnv& env, const NoiseTable& noise, RandomStream& rng);

  const LinUCBAgent& agent() const noexcept { return agent_; }
  std::uint64_t round() const noexcept { return round_; }

 private:
  LinUCBAgent agent_;
  TieBreak tie_break_;
  std::uint64_t round_ = 0;
};

}  // namespace twostage
