#include "twostage/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace twostage {

LinearEnv::LinearEnv(Vector theta_star, std::vector<Vector> ranker_embed,
                     std::vector<std::vector<Vector>> nominator_embeds, double reward_noise_sd)
    : theta_star_(std::move(theta_star)),
      ranker_embed_(std::move(ranker_embed)),
      nominator_embeds_(std::move(nominator_embeds)),
      reward_noise_sd_(reward_noise_sd) {
  if (theta_star_.size() < 1) {
    throw std::invalid_argument("LinearEnv: theta_star is empty");
  }
  if (ranker_embed_.empty()) {
    throw std::invalid_argument("LinearEnv: action set is empty");
  }
  if (!(reward_noise_sd_ >= 0.0)) {
    throw std::invalid_argument("LinearEnv: reward_noise_sd must be nonnegative");
  }
  for (const Vector& phi : ranker_embed_) {
    if (phi.size() != theta_star_.size()) {
      throw std::invalid_argument("LinearEnv: ranker embedding length differs from theta_star");
    }
  }
  for (std::size_t n = 0; n < nominator_embeds_.size(); ++n) {
    const auto& table = nominator_embeds_[n];
    if (table.size() != ranker_embed_.size()) {
      throw std::invalid_argument("LinearEnv: nominator " + std::to_string(n) +
                                  " does not embed every action");
    }
    for (const Vector& phi : table) {
      if (phi.size() != table.front().size() || phi.size() < 1) {
        throw std::invalid_argument("LinearEnv: nominator " + std::to_string(n) +
                                    " has inconsistent embedding lengths");
      }
    }
  }
  expected_.reserve(ranker_embed_.size());
  for (ActionId a = 0; a < ranker_embed_.size(); ++a) {
    expected_.push_back(theta_star_.dot(ranker_embed_[a]));
    if (expected_[a] > expected_[optimal_]) {
      optimal_ = a;
    }
  }
}

void LinearEnv::check_action(ActionId a, const char* what) const {
  if (a >= ranker_embed_.size()) {
    throw std::invalid_argument(std::string(what) + ": unknown action " + std::to_string(a));
  }
}

int LinearEnv::nominator_dim(std::size_t n) const {
  return static_cast<int>(nominator_table(n).front().size());
}

const Vector& LinearEnv::ranker_embedding(ActionId a, std::uint64_t) const {
  check_action(a, "ranker_embedding");
  return ranker_embed_[a];
}

const Vector& LinearEnv::nominator_embedding(std::size_t n, ActionId a, std::uint64_t) const {
  check_action(a, "nominator_embedding");
  return nominator_table(n)[a];
}

const std::vector<Vector>& LinearEnv::nominator_table(std::size_t n) const {
  if (n >= nominator_embeds_.size()) {
    throw std::invalid_argument("LinearEnv: unknown nominator " + std::to_string(n));
  }
  return nominator_embeds_[n];
}

double LinearEnv::expected_reward(ActionId a) const {
  check_action(a, "expected_reward");
  return expected_[a];
}

NoiseTable::NoiseTable(std::size_t rounds, std::size_t actions, std::vector<double> values)
    : rounds_(rounds), actions_(actions), values_(std::move(values)) {}

NoiseTable::NoiseTable(std::size_t rounds, std::size_t actions, const RandomStream& stream)
    : rounds_(rounds), actions_(actions), values_(rounds * actions) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = RandomStream::normal_at(stream.key(), i);
  }
}

NoiseTable NoiseTable::zeros(std::size_t rounds, std::size_t actions) {
  return constant(rounds, actions, 0.0);
}

NoiseTable NoiseTable::constant(std::size_t rounds, std::size_t actions, double value) {
  return NoiseTable(rounds, actions, std::vector<double>(rounds * actions, value));
}

double NoiseTable::at(std::uint64_t round, ActionId a) const {
  if (round >= rounds_ || a >= actions_) {
    throw std::invalid_argument("NoiseTable: index (" + std::to_string(round) + ", " +
                                std::to_string(a) + ") outside " + std::to_string(rounds_) + "x" +
                                std::to_string(actions_));
  }
  return values_[round * actions_ + a];
}

ToySetup build_toy_env(double reward_noise_sd) {
  constexpr int kDim = 3;
  Vector theta(kDim);
  theta << 0.5, 0.25, 0.75;
  std::vector<Vector> one_hot;
  for (int a = 0; a < kDim; ++a) {
    one_hot.push_back(Vector::Unit(kDim, a));
  }
  std::vector<std::vector<Vector>> nominators(2, one_hot);
  return ToySetup{LinearEnv(std::move(theta), one_hot, std::move(nominators), reward_noise_sd),
                  {{0}, {1, 2}}};
}

double sample_reward(const LinearEnv& env, ActionId a, std::uint64_t round, const NoiseTable& noise) {
  return env.expected_reward(a) + env.reward_noise_sd() * noise.at(round, a);
}

double pseudo_regret(const LinearEnv& env, ActionId a) {
  return env.expected_reward(env.optimal_action()) - env.expected_reward(a);
}

}  // namespace twostage
