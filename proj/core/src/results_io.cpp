#include <charconv>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "twostage/sim.hpp"

namespace twostage {
namespace {

namespace fs = std::filesystem;

constexpr const char* kAggregatesFile = "aggregates.csv";
constexpr const char* kRunsFile = "runs.csv";
constexpr const char* kManifestFile = "manifest.json";

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["horizon"] = c.horizon;
  j["runs"] = c.runs;
  std::vector<std::string> variants;
  for (Variant v : c.variants) variants.emplace_back(to_string(v));
  j["variants"] = variants;
  j["gamma_list"] = c.gamma_list;
  j["sigma_list"] = c.sigma_list;
  j["lambda"] = c.lambda;
  j["lambda_n"] = c.lambda_n;
  j["reward_noise_sd"] = c.reward_noise_sd;
  j["master_seed"] = c.master_seed;
  j["tie_break"] = std::string(to_string(c.tie_break));
  j["update_target"] = std::string(to_string(c.update_target));
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_results(const fs::path& out_dir, const std::vector<Aggregate>& aggregates,
                   const std::vector<RunRecord>& records, const ExperimentConfig& config,
                   const WriteOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  }
  const fs::path agg_path = out_dir / kAggregatesFile;
  const fs::path runs_path = out_dir / kRunsFile;
  const fs::path manifest_path = out_dir / kManifestFile;
  if (!options.force) {
    for (const fs::path& p : {agg_path, runs_path, manifest_path}) {
      if (fs::exists(p)) {
        throw OutputExistsError(p.string() + " already exists (use --force to overwrite)");
      }
    }
  }

  {
    std::ofstream out = open_output(agg_path);
    out << kAggregatesHeader << '\n';
    for (const Aggregate& a : aggregates) {
      const std::string prefix = std::string(to_string(a.variant)) + ',' + format_double(a.gamma) +
                                 ',' + format_double(a.sigma) + ',';
      for (std::size_t t = 0; t < a.mean_cum_regret.size(); ++t) {
        out << prefix << (t + 1) << ',' << format_double(a.mean_cum_regret[t]) << ','
            << format_double(a.sd[t]) << ',' << format_double(a.ci_halfwidth[t]) << ','
            << a.n_runs << '\n';
      }
    }
    finish(out, agg_path);
  }

  {
    std::ofstream out = open_output(runs_path);
    out << kRunsHeader << '\n';
    for (const RunRecord& r : records) {
      const std::string prefix = std::to_string(r.run_id) + ',' + std::string(to_string(r.variant)) +
                                 ',' + format_double(r.gamma) + ',' + format_double(r.sigma) + ',';
      for (std::size_t t = 0; t < r.instant_regret.size(); ++t) {
        out << prefix << (t + 1) << ',' << r.actions[t] << ',' << format_double(r.instant_regret[t])
            << ',' << format_double(r.cumulative_regret[t]) << ',' << r.sync_counts[t] << '\n';
      }
    }
    finish(out, runs_path);
  }

  nlohmann::json manifest;
  manifest["config"] = config_json(config);
  manifest["config_text"] = options.config_text;
  manifest["command"] = options.command;
  manifest["generator"] = std::string(kGeneratorName);
  manifest["seeds"] = {
      {"master_seed", config.master_seed},
      {"run_indices", {0, config.runs - 1}},
      {"streams",
       {{"reward_noise", static_cast<std::uint64_t>(StreamPurpose::reward_noise)},
        {"prior_init", static_cast<std::uint64_t>(StreamPurpose::prior_init)},
        {"tie_break", static_cast<std::uint64_t>(StreamPurpose::tie_break)}}},
  };
  manifest["code_version"] = std::string(code_version());
  manifest["files"] = {{"aggregates", kAggregatesFile}, {"runs", kRunsFile}};
  manifest["n_aggregates"] = aggregates.size();
  manifest["n_run_records"] = records.size();

  std::ofstream out = open_output(manifest_path);
  out << manifest.dump(2) << '\n';
  finish(out, manifest_path);
}

}  // namespace twostage
