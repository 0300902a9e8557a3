#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"

namespace twostage::cli {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool force = false;
  unsigned jobs = 0;
  bool aggregates_only = false;
  bool with_runs = false;
  std::string figure;
  std::string sweep_over;
};

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return "results";
}

unsigned resolve_jobs(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (const std::string& a : args) s += (s.empty() ? "" : " ") + a;
  return s;
}

void print_summary(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  for (const Aggregate& a : aggregates) {
    const std::size_t last = a.mean_cum_regret.size() - 1;
    out << to_string(a.variant) << " gamma=" << format_double(a.gamma)
        << " sigma=" << format_double(a.sigma) << " T=" << a.mean_cum_regret.size()
        << ": final mean cumulative regret " << std::fixed << std::setprecision(3)
        << a.mean_cum_regret[last] << " +/- " << a.ci_halfwidth[last] << std::defaultfloat
        << " (n=" << a.n_runs << (a.degenerate ? ", degenerate CI" : "") << ")\n";
  }
}

int execute(const ExperimentConfig& config, const fs::path& out_dir, bool write_runs, bool force,
            unsigned jobs, const std::string& command, std::ostream& out) {
  const ExperimentResult result =
      run_experiment(config, RunOptions{resolve_jobs(jobs), write_runs});
  write_results(out_dir, result.aggregates, result.records, config,
                WriteOptions{force, serialize_config(config), command});
  print_summary(out, result.aggregates);
  return kExitOk;
}

ExperimentConfig load_config(const Invocation& inv) {
  if (inv.config_path.empty()) {
    return parse_config_text("", inv.overrides);
  }
  if (!fs::exists(inv.config_path)) {
    throw ConfigError("", "config file not found: " + inv.config_path);
  }
  return parse_config(inv.config_path, inv.overrides);
}

int cmd_run(const Invocation& inv, const std::string& command, std::ostream& out) {
  const ExperimentConfig config = load_config(inv);
  return execute(config, inv.out_dir, !inv.aggregates_only, inv.force, inv.jobs, command, out);
}

int cmd_sweep(const Invocation& inv, const std::string& command, std::ostream& out) {
  const std::size_t eq = inv.sweep_over.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("", "--over expects key=v1,v2,...");
  }
  const std::string key = inv.sweep_over.substr(0, eq);
  if (key == "variants" || key == "gamma_list" || key == "sigma_list") {
    throw ConfigError(key, "list-valued keys are swept by the experiment itself; use --set");
  }
  std::vector<std::string> values;
  std::stringstream ss(inv.sweep_over.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');) {
    if (!v.empty()) values.push_back(v);
  }
  if (values.empty()) {
    throw ConfigError(key, "--over lists no values");
  }
  // Resolve every point first so a bad value fails before any run starts.
  std::vector<ExperimentConfig> points;
  for (const std::string& v : values) {
    Invocation point = inv;
    point.overrides.push_back(key + "=" + v);
    points.push_back(load_config(point));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const fs::path dir = fs::path(inv.out_dir) / (key + "=" + values[i]);
    out << "[" << key << "=" << values[i] << "] -> " << dir.string() << '\n';
    execute(points[i], dir, !inv.aggregates_only, inv.force, inv.jobs, command, out);
  }
  return kExitOk;
}

int cmd_report(const Invocation& inv, std::ostream& out) {
  const fs::path path = fs::path(inv.out_dir) / "aggregates.csv";
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot read " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != kAggregatesHeader) {
    throw ConfigError("", path.string() + " does not have the aggregates.csv header");
  }
  // variant,gamma,sigma -> last row seen
  std::vector<std::pair<std::string, std::vector<std::string>>> series;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 8) {
      throw ConfigError("", path.string() + ": malformed row '" + line + "'");
    }
    const std::string key = cols[0] + " gamma=" + cols[1] + " sigma=" + cols[2];
    if (series.empty() || series.back().first != key) {
      series.emplace_back(key, cols);
    } else {
      series.back().second = cols;
    }
  }
  for (const auto& [key, cols] : series) {
    out << key << " T=" << cols[3] << ": final mean cumulative regret " << cols[4] << " +/- "
        << cols[6] << " (n=" << cols[7] << ")\n";
  }
  return kExitOk;
}

}  // namespace

ExperimentConfig figure_preset(const std::string& figure) {
  ExperimentConfig c;
  c.runs = 400;
  if (figure == "fig2") {
    c.variants = {Variant::naive, Variant::sync_post};
    c.gamma_list = {1.0, 10.0, 25.0, 50.0};
    c.sigma_list = {0.1, 0.2};
  } else if (figure == "fig3") {
    c.variants = {Variant::naive, Variant::sync_post, Variant::sync_pre};
    c.gamma_list = {50.0};
    c.sigma_list = {0.2};
  } else {
    throw ConfigError("figure", "unknown figure id '" + figure + "' (valid: fig2, fig3)");
  }
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage LinUCB bandit simulator", "twostage"};
  app.require_subcommand(1);
  Invocation inv;
  inv.out_dir = default_out_dir();

  auto add_common = [&inv](CLI::App* sub) {
    sub->add_option("--out,-o", inv.out_dir, "Output directory (default $TWOSTAGE_OUT_DIR or ./results)");
    sub->add_option("--set", inv.overrides, "Override a config key: key=value")->take_all();
    sub->add_flag("--force", inv.force, "Overwrite existing result files");
    sub->add_option("--jobs,-j", inv.jobs, "Worker threads (default: hardware concurrency)");
  };

  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("--config,-c", inv.config_path, "Config file (flat key = value)");
  run->add_flag("--aggregates-only", inv.aggregates_only, "Write runs.csv with a header only");
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "Repeat the experiment over values of one scalar key");
  sweep->add_option("--config,-c", inv.config_path, "Config file")->required();
  sweep->add_option("--over", inv.sweep_over, "key=v1,v2,...")->required();
  sweep->add_flag("--aggregates-only", inv.aggregates_only, "Write runs.csv with a header only");
  add_common(sweep);

  CLI::App* report = app.add_subcommand("report", "Summarize an existing aggregates.csv");
  report->add_option("--out,-o", inv.out_dir, "Results directory");

  CLI::App* figure = app.add_subcommand("reproduce-figure", "Run a preset figure grid (fig2, fig3)");
  figure->add_option("figure", inv.figure, "Figure id")->required();
  figure->add_flag("--with-runs", inv.with_runs, "Also write per-round runs.csv rows");
  add_common(figure);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string command = "twostage " + join_args(args);
  try {
    if (run->parsed()) return cmd_run(inv, command, out);
    if (sweep->parsed()) return cmd_sweep(inv, command, out);
    if (report->parsed()) return cmd_report(inv, out);
    ExperimentConfig config = figure_preset(inv.figure);
    config = parse_config_text(serialize_config(config), inv.overrides);
    return execute(config, inv.out_dir, inv.with_runs, inv.force, inv.jobs, command, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutputExistsError& e) {
    err << "refusing to overwrite: " << e.what() << '\n';
    return kExitRefusedOverwrite;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace twostage::cli
