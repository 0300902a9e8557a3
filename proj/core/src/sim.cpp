#include "twostage/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "twostage/env.hpp"

namespace twostage {
namespace {

LinUCBAgent toy_agent(GaussianBelief belief, double reg, const std::vector<Vector>& embed,
                      std::vector<ActionId> pool) {
  const int dim = belief.dim();
  return LinUCBAgent(std::move(belief), BetaSchedule(reg, dim), embed, std::move(pool));
}

std::vector<ActionId> all_actions(std::size_t n) {
  std::vector<ActionId> out(n);
  for (std::size_t a = 0; a < n; ++a) out[a] = a;
  return out;
}

SyncMode mode_of(Variant v) {
  switch (v) {
    case Variant::sync_post: return SyncMode::sync_post;
    case Variant::sync_pre: return SyncMode::sync_pre;
    default: return SyncMode::naive;
  }
}

template <typename System>
void play(System& system, const LinearEnv& env, const NoiseTable& noise, RandomStream& ties,
          RunRecord& rec, std::uint64_t horizon) {
  double cum = 0.0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    RoundOutcome out;
    try {
      out = system.step(env, noise, ties);
    } catch (const std::exception& e) {
      throw RunAbortedError(rec.run_id, t + 1,
                            std::string(to_string(rec.variant)) + ": " + e.what());
    }
    cum += out.instant_regret;
    rec.instant_regret.push_back(out.instant_regret);
    rec.cumulative_regret.push_back(cum);
    rec.sync_counts.push_back(static_cast<std::uint32_t>(out.sync_events.size()));
    rec.actions.push_back(out.recommended);
  }
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::single_stage: return "single_stage";
    case Variant::naive: return "naive";
    case Variant::sync_post: return "sync_post";
    case Variant::sync_pre: return "sync_pre";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  for (Variant v : {Variant::single_stage, Variant::naive, Variant::sync_post, Variant::sync_pre}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
  };
  if (horizon < 1) fail("horizon", "must be >= 1");
  if (runs < 1) fail("runs", "must be >= 1");
  if (variants.empty()) fail("variants", "must not be empty");
  if (gamma_list.empty()) fail("gamma_list", "must not be empty");
  if (sigma_list.empty()) fail("sigma_list", "must not be empty");
  for (double g : gamma_list) {
    if (!(g >= 0.0) || !std::isfinite(g)) fail("gamma_list", "entries must be finite and >= 0");
  }
  for (double s : sigma_list) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("sigma_list", "entries must be finite and >= 0");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda", "must be positive");
  if (!(lambda_n > 0.0) || !std::isfinite(lambda_n)) fail("lambda_n", "must be positive");
  if (!(reward_noise_sd >= 0.0) || !std::isfinite(reward_noise_sd)) {
    fail("reward_noise_sd", "must be finite and >= 0");
  }
}

RunAbortedError::RunAbortedError(std::uint64_t run_id, std::uint64_t round, const std::string& detail)
    : std::runtime_error("run " + std::to_string(run_id) + " aborted at t=" +
                         std::to_string(round) + ": " + detail),
      run_id_(run_id),
      round_(round) {}

ExperimentError::ExperimentError(const std::string& what, std::vector<std::string> failures)
    : std::runtime_error(what), failures_(std::move(failures)) {}

RunRecord run_episode(const ExperimentConfig& config, Variant variant, double gamma, double sigma,
                      std::uint64_t run_index) {
  const ToySetup toy = build_toy_env(config.reward_noise_sd);
  const LinearEnv& env = toy.env;
  const NoiseTable noise(config.horizon, env.num_actions(),
                         RandomStream::derive(config.master_seed, run_index, StreamPurpose::reward_noise));
  RandomStream init = RandomStream::derive(config.master_seed, run_index, StreamPurpose::prior_init);
  RandomStream ties = RandomStream::derive(config.master_seed, run_index, StreamPurpose::tie_break);

  RunRecord rec;
  rec.run_id = run_index;
  rec.variant = variant;
  rec.gamma = gamma;
  rec.sigma = sigma;
  rec.instant_regret.reserve(config.horizon);
  rec.cumulative_regret.reserve(config.horizon);
  rec.sync_counts.reserve(config.horizon);
  rec.actions.reserve(config.horizon);

  LinUCBAgent ranker = toy_agent(
      pretrained_prior(env.theta_star(), config.lambda, gamma, sigma, init), config.lambda,
      env.ranker_table(), all_actions(env.num_actions()));

  if (variant == Variant::single_stage) {
    SingleStageSystem system(std::move(ranker), config.tie_break);
    play(system, env, noise, ties, rec, config.horizon);
    return rec;
  }

  std::vector<LinUCBAgent> nominators;
  for (std::size_t n = 0; n < env.num_nominators(); ++n) {
    nominators.push_back(toy_agent(init_prior(env.nominator_dim(n), config.lambda_n),
                                   config.lambda_n, env.nominator_table(n), toy.pools[n]));
  }
  TwoStageSystem system(std::move(ranker), std::move(nominators),
                        SystemOptions{mode_of(variant), config.update_target, config.tie_break});
  play(system, env, noise, ties, rec, config.horizon);
  return rec;
}

Aggregate aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: no records");
  }
  const RunRecord& first = records.front();
  const std::size_t horizon = first.cumulative_regret.size();
  for (const RunRecord& r : records) {
    if (r.variant != first.variant || r.gamma != first.gamma || r.sigma != first.sigma ||
        r.cumulative_regret.size() != horizon) {
      throw std::invalid_argument("aggregate: records disagree on (variant, gamma, sigma, T)");
    }
  }
  Aggregate agg;
  agg.variant = first.variant;
  agg.gamma = first.gamma;
  agg.sigma = first.sigma;
  agg.n_runs = records.size();
  agg.degenerate = records.size() == 1;
  agg.mean_cum_regret.assign(horizon, 0.0);
  agg.sd.assign(horizon, 0.0);
  agg.ci_halfwidth.assign(horizon, 0.0);
  const double n = static_cast<double>(records.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (const RunRecord& r : records) sum += r.cumulative_regret[t];
    const double mean = sum / n;
    agg.mean_cum_regret[t] = mean;
    if (records.size() > 1) {
      double ss = 0.0;
      for (const RunRecord& r : records) {
        const double dev = r.cumulative_regret[t] - mean;
        ss += dev * dev;
      }
      agg.sd[t] = std::sqrt(ss / (n - 1.0));
      agg.ci_halfwidth[t] = 2.0 * agg.sd[t] / std::sqrt(n);
    }
  }
  return agg;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  std::vector<std::string> failures;
  const unsigned jobs = std::max(1u, options.jobs);

  for (Variant variant : config.variants) {
    for (double gamma : config.gamma_list) {
      for (double sigma : config.sigma_list) {
        std::vector<RunRecord> records(config.runs);
        std::vector<std::string> errors(config.runs);
        std::atomic<std::uint64_t> next{0};
        auto worker = [&] {
          for (std::uint64_t i = next++; i < config.runs; i = next++) {
            try {
              records[i] = run_episode(config, variant, gamma, sigma, i);
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          }
        };
        if (jobs == 1) {
          worker();
        } else {
          std::vector<std::jthread> pool;
          const unsigned n_threads = static_cast<unsigned>(
              std::min<std::uint64_t>(jobs, config.runs));
          for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        }
        bool failed = false;
        for (std::string& e : errors) {
          if (!e.empty()) {
            failures.push_back(std::move(e));
            failed = true;
          }
        }
        if (failed) continue;
        result.aggregates.push_back(aggregate(records));
        if (options.keep_records) {
          std::move(records.begin(), records.end(), std::back_inserter(result.records));
        }
      }
    }
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << failures.size() << " run(s) aborted; first: " << failures.front();
    throw ExperimentError(msg.str(), std::move(failures));
  }
  return result;
}

std::string_view code_version() noexcept { return TWOSTAGE_VERSION; }

}  // namespace twostage
