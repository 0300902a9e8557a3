#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twostage/policy.hpp"

namespace twostage {

enum class Variant { single_stage, naive, sync_post, sync_pre };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view name) noexcept;

/// Fully resolved Monte-Carlo experiment over the toy environment.
struct ExperimentConfig {
  std::uint64_t horizon = 2000;
  std::uint64_t runs = 400;
  std::vector<Variant> variants{Variant::naive, Variant::sync_post};
  std::vector<double> gamma_list{1.0, 10.0, 25.0, 50.0};
  std::vector<double> sigma_list{0.1, 0.2};
  double lambda = 1e-3;
  double lambda_n = 1e-3;
  double reward_noise_sd = 0.1;
  std::uint64_t master_seed = 1;
  TieBreak tie_break = TieBreak::seeded_uniform;
  UpdateTarget update_target = UpdateTarget::recommended;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct RunRecord {
  std::uint64_t run_id = 0;
  Variant variant = Variant::naive;
  double gamma = 0.0;
  double sigma = 0.0;
  std::vector<double> instant_regret;
  std::vector<double> cumulative_regret;
  std::vector<std::uint32_t> sync_counts;
  std::vector<ActionId> actions;
};

/// Cross-run statistics of cumulative regret, one entry per round.
struct Aggregate {
  Variant variant = Variant::naive;
  double gamma = 0.0;
  double sigma = 0.0;
  std::vector<double> mean_cum_regret;
  std::vector<double> sd;
  std::vector<double> ci_halfwidth;  // 2 sd / sqrt(n)
  std::uint64_t n_runs = 0;
  bool degenerate = false;  // n_runs == 1: sd and half-width reported as zero
};

/// A single episode failed; carries the run and round at which it stopped.
class RunAbortedError : public std::runtime_error {
 public:
  RunAbortedError(std::uint64_t run_id, std::uint64_t round, const std::string& detail);

  std::uint64_t run_id() const noexcept { return run_id_; }
  std::uint64_t round() const noexcept { return round_; }

 private:
  std::uint64_t run_id_;
  std::uint64_t round_;
};

class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::vector<std::string> failures);

  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

class OutputExistsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one seeded episode of the toy problem. Reward noise, the ranker's
/// initial mean draw and tie-breaking use disjoint substreams keyed by
/// (master_seed, run_index), so all variants, gammas and sigmas of the same
/// run index share common random numbers.
RunRecord run_episode(const ExperimentConfig& config, Variant variant, double gamma, double sigma,
                      std::uint64_t run_index);

struct RunOptions {
  unsigned jobs = 1;
  bool keep_records = false;
};

struct ExperimentResult {
  std::vector<Aggregate> aggregates;
  std::vector<RunRecord> records;  // empty unless RunOptions::keep_records
};

/// Every (variant, gamma, sigma) combination in config order, each over
/// config.runs episodes. Aggregation folds in run-index order, so results do
/// not depend on jobs.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

Aggregate aggregate(const std::vector<RunRecord>& records);

struct WriteOptions {
  bool force = false;
  std::string config_text;  // serialized config echoed into the manifest
  std::string command;
};

/// Writes aggregates.csv, runs.csv and manifest.json into out_dir.
void write_results(const std::filesystem::path& out_dir, const std::vector<Aggregate>& aggregates,
                   const std::vector<RunRecord>& records, const ExperimentConfig& config,
                   const WriteOptions& options = {});

inline constexpr std::string_view kAggregatesHeader =
    "variant,gamma,sigma,t,mean_cum_regret,sd,ci_halfwidth,n_runs";
inline constexpr std::string_view kRunsHeader =
    "run_id,variant,gamma,sigma,t,action,instant_regret,cum_regret,sync_count";

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

std::string_view code_version() noexcept;

}  // namespace twostage
