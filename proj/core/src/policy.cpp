#include "twostage/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "twostage/errors.hpp"

namespace twostage {

std::string_view to_string(SyncMode mode) noexcept {
  switch (mode) {
    case SyncMode::naive: return "naive";
    case SyncMode::sync_post: return "sync_post";
    case SyncMode::sync_pre: return "sync_pre";
  }
  return "?";
}

std::string_view to_string(UpdateTarget target) noexcept {
  switch (target) {
    case UpdateTarget::recommended: return "recommended";
    case UpdateTarget::nominated: return "nominated";
  }
  return "?";
}

std::string_view to_string(TieBreak tie_break) noexcept {
  switch (tie_break) {
    case TieBreak::seeded_uniform: return "seeded_uniform";
    case TieBreak::lowest_index: return "lowest_index";
  }
  return "?";
}

LinUCBAgent::LinUCBAgent(GaussianBelief belief, BetaSchedule schedule, std::vector<Vector> embed,
                         std::vector<ActionId> pool)
    : belief_(std::move(belief)),
      schedule_(schedule),
      embed_(std::move(embed)),
      pool_(std::move(pool)) {
  if (pool_.empty()) {
    throw std::invalid_argument("LinUCBAgent: action pool is empty");
  }
  std::sort(pool_.begin(), pool_.end());
  pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());
  for (ActionId a : pool_) {
    if (a >= embed_.size()) {
      throw std::invalid_argument("LinUCBAgent: pool action " + std::to_string(a) +
                                  " has no embedding");
    }
  }
  for (const Vector& phi : embed_) {
    if (phi.size() != belief_.dim()) {
      throw std::invalid_argument("LinUCBAgent: embedding length " + std::to_string(phi.size()) +
                                  " differs from belief dimension " +
                                  std::to_string(belief_.dim()));
    }
  }
}

const Vector& LinUCBAgent::embedding(ActionId a) const {
  if (a >= embed_.size()) {
    throw std::invalid_argument("LinUCBAgent: no embedding for action " + std::to_string(a));
  }
  return embed_[a];
}

ActionId select_action(const LinUCBAgent& agent, std::span<const ActionId> candidates,
                       std::uint64_t t, TieBreak tie_break, RandomStream& rng) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_action: empty candidate set");
  }
  const double root_beta = std::sqrt(beta(agent.schedule(), t));
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (ActionId a : candidates) {
    const RewardMoments m = agent.belief().reward_moments(agent.embedding(a));
    scores.push_back(m.mean + root_beta * std::sqrt(m.var));
    best = std::max(best, scores.back());
  }
  std::vector<ActionId> tied;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i] >= best - kTieTolerance) {
      tied.push_back(candidates[i]);
    }
  }
  std::sort(tied.begin(), tied.end());
  if (tied.size() == 1 || tie_break == TieBreak::lowest_index) {
    return tied.front();
  }
  return tied[rng.index(tied.size())];
}

bool sync_condition(const LinUCBAgent& nominator, const LinUCBAgent& ranker, ActionId a) {
  const double nominator_sd = std::sqrt(nominator.belief().reward_moments(nominator.embedding(a)).var);
  const double ranker_sd = std::sqrt(ranker.belief().reward_moments(ranker.embedding(a)).var);
  return nominator_sd > ranker_sd;
}

TwoStageSystem::TwoStageSystem(LinUCBAgent ranker, std::vector<LinUCBAgent> nominators,
                               SystemOptions options)
    : ranker_(std::move(ranker)), nominators_(std::move(nominators)), options_(options) {
  if (nominators_.empty()) {
    throw std::invalid_argument("TwoStageSystem: at least one nominator is required");
  }
  std::vector<ActionId> nominable;
  for (const LinUCBAgent& nom : nominators_) {
    nominable.insert(nominable.end(), nom.pool().begin(), nom.pool().end());
  }
  std::sort(nominable.begin(), nominable.end());
  nominable.erase(std::unique(nominable.begin(), nominable.end()), nominable.end());
  for (ActionId a : nominable) {
    if (!std::binary_search(ranker_.pool().begin(), ranker_.pool().end(), a)) {
      throw std::invalid_argument("TwoStageSystem: nominator pool action " + std::to_string(a) +
                                  " is outside the ranker pool");
    }
    for (std::size_t n = 0; n < nominators_.size(); ++n) {
      if (!nominators_[n].embeds(a)) {
        throw std::invalid_argument("TwoStageSystem: nominator " + std::to_string(n) +
                                    " cannot embed recommendable action " + std::to_string(a));
      }
    }
  }
}

std::vector<ActionId> TwoStageSystem::nominate(RandomStream& rng) const {
  std::vector<ActionId> out;
  out.reserve(nominators_.size());
  for (const LinUCBAgent& nom : nominators_) {
    out.push_back(select_action(nom, nom.pool(), round_, options_.tie_break, rng));
  }
  return out;
}

ActionId TwoStageSystem::recommend(std::span<const ActionId> nominations, RandomStream& rng) const {
  if (nominations.empty()) {
    throw std::invalid_argument("recommend: no nominations");
  }
  std::vector<ActionId> candidates(nominations.begin(), nominations.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (ActionId a : candidates) {
    if (!std::binary_search(ranker_.pool().begin(), ranker_.pool().end(), a)) {
      throw InvariantError("recommend: nominated action " + std::to_string(a) +
                           " is outside the ranker pool");
    }
  }
  return select_action(ranker_, candidates, round_, options_.tie_break, rng);
}

bool TwoStageSystem::try_sync(LinUCBAgent& nominator, const LinUCBAgent& ranker, ActionId a) {
  if (!sync_condition(nominator, ranker, a)) {
    return false;
  }
  const RewardMoments target = ranker.belief().reward_moments(ranker.embedding(a));
  nominator.belief().synchronize(nominator.embedding(a), SyncTarget{target.mean, target.var});
  return true;
}

std::vector<std::size_t> TwoStageSystem::update(std::span<const ActionId> nominations,
                                                ActionId recommended, double reward) {
  if (nominations.size() != nominators_.size()) {
    throw std::invalid_argument("update: expected one nomination per nominator");
  }
  std::vector<std::size_t> synced;
  if (options_.mode == SyncMode::sync_pre) {
    for (std::size_t n = 0; n < nominators_.size(); ++n) {
      if (try_sync(nominators_[n], ranker_, nominations[n])) {
        synced.push_back(n);
      }
    }
  }
  ranker_.belief().update(ranker_.embedding(recommended), reward);
  for (std::size_t n = 0; n < nominators_.size(); ++n) {
    LinUCBAgent& nom = nominators_[n];
    const ActionId observed =
        options_.update_target == UpdateTarget::recommended ? recommended : nominations[n];
    nom.belief().update(nom.embedding(observed), reward);
    if (options_.mode == SyncMode::sync_post && try_sync(nom, ranker_, nominations[n])) {
      synced.push_back(n);
    }
  }
  ++round_;
  return synced;
}

RoundOutcome TwoStageSystem::step(const LinearEnv& env, const NoiseTable& noise, RandomStream& rng) {
  RoundOutcome out;
  out.nominations = nominate(rng);
  out.recommended = recommend(out.nominations, rng);
  out.reward = sample_reward(env, out.recommended, round_, noise);
  out.sync_events = update(out.nominations, out.recommended, out.reward);
  out.instant_regret = pseudo_regret(env, out.recommended);
  return out;
}

SingleStageSystem::SingleStageSystem(LinUCBAgent agent, TieBreak tie_break)
    : agent_(std::move(agent)), tie_break_(tie_break) {}

RoundOutcome SingleStageSystem::step(const LinearEnv& env, const NoiseTable& noise,
                                     RandomStream& rng) {
  RoundOutcome out;
  out.recommended = select_action(agent_, agent_.pool(), round_, tie_break_, rng);
  out.nominations = {out.recommended};
  out.reward = sample_reward(env, out.recommended, round_, noise);
  agent_.belief().update(agent_.embedding(out.recommended), out.reward);
  out.instant_regret = pseudo_regret(env, out.recommended);
  ++round_;
  return out;
}

}  // namespace twostage
