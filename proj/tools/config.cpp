#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace twostage::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' || line[i] == '\'') {
      if (quote == 0) {
        quote = line[i];
      } else if (quote == line[i]) {
        quote = 0;
      }
    }
    if (line[i] == '#' && quote == 0) return line.substr(0, i);
  }
  return line;
}

std::string parse_string(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  } else if (v.find_first_of("\"'[],= ") != std::string_view::npos || v.empty()) {
    throw ConfigError(key, "expected a string, got '" + std::string(v) + "'");
  }
  return std::string(v);
}

double parse_real(const std::string& key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a real number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string_view> parse_list(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError(key, "expected a bracketed list, got '" + std::string(v) + "'");
  }
  v = trim(v.substr(1, v.size() - 2));
  std::vector<std::string_view> items;
  if (v.empty()) return items;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = v.find(',', start);
    items.push_back(trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start)));
    if (items.back().empty()) throw ConfigError(key, "empty list element");
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

template <typename Enum>
Enum parse_enum(const std::string& key, std::string_view v,
                std::initializer_list<Enum> choices) {
  const std::string name = parse_string(key, v);
  for (Enum e : choices) {
    if (to_string(e) == name) return e;
  }
  std::string valid;
  for (Enum e : choices) {
    valid += (valid.empty() ? "" : ", ") + std::string(to_string(e));
  }
  throw ConfigError(key, "unknown value '" + name + "' (valid: " + valid + ")");
}

void assign(ExperimentConfig& c, const std::string& key, std::string_view value) {
  if (key == "horizon") {
    c.horizon = parse_uint(key, value);
  } else if (key == "runs") {
    c.runs = parse_uint(key, value);
  } else if (key == "variants") {
    c.variants.clear();
    for (std::string_view item : parse_list(key, value)) {
      const std::string name = parse_string(key, item);
      const auto v = parse_variant(name);
      if (!v) {
        throw ConfigError(key, "unknown variant '" + name +
                                   "' (valid: single_stage, naive, sync_post, sync_pre)");
      }
      c.variants.push_back(*v);
    }
  } else if (key == "gamma_list" || key == "sigma_list") {
    std::vector<double> out;
    for (std::string_view item : parse_list(key, value)) out.push_back(parse_real(key, item));
    (key == "gamma_list" ? c.gamma_list : c.sigma_list) = std::move(out);
  } else if (key == "lambda") {
    c.lambda = parse_real(key, value);
  } else if (key == "lambda_n") {
    c.lambda_n = parse_real(key, value);
  } else if (key == "reward_noise_sd") {
    c.reward_noise_sd = parse_real(key, value);
  } else if (key == "master_seed") {
    c.master_seed = parse_uint(key, value);
  } else if (key == "tie_break") {
    c.tie_break = parse_enum(key, value, {TieBreak::seeded_uniform, TieBreak::lowest_index});
  } else if (key == "update_target") {
    c.update_target =
        parse_enum(key, value, {UpdateTarget::recommended, UpdateTarget::nominated});
  } else {
    throw ConfigError(key, "unknown key");
  }
}

std::pair<std::string, std::string_view> split_assignment(std::string_view line,
                                                          const std::string& where) {
  const std::size_t eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("", where + ": expected 'key = value', got '" + std::string(line) + "'");
  }
  std::string key(trim(line.substr(0, eq)));
  if (key.empty()) {
    throw ConfigError("", where + ": missing key");
  }
  return {key, trim(line.substr(eq + 1))};
}

void validate(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(':')), msg);
  }
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys{
      "horizon",         "runs",        "variants",  "gamma_list",    "sigma_list", "lambda",
      "lambda_n",        "reward_noise_sd", "master_seed", "tie_break", "update_target"};
  return keys;
}

ExperimentConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    auto [key, value] = split_assignment(line, "line " + std::to_string(line_no));
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(key, line_no);
    assign(config, key, value);
  }
  for (const std::string& ov : overrides) {
    auto [key, value] = split_assignment(ov, "override '" + ov + "'");
    assign(config, key, value);
  }
  validate(config);
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("", "cannot read config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string serialize_config(const ExperimentConfig& c) {
  auto list = [](const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_double(xs[i]);
    return s + "]";
  };
  std::string variants = "[";
  for (std::size_t i = 0; i < c.variants.size(); ++i) {
    variants += (i ? ", \"" : "\"") + std::string(to_string(c.variants[i])) + "\"";
  }
  variants += "]";
  std::ostringstream out;
  out << "horizon = " << c.horizon << '\n'
      << "runs = " << c.runs << '\n'
      << "variants = " << variants << '\n'
      << "gamma_list = " << list(c.gamma_list) << '\n'
      << "sigma_list = " << list(c.sigma_list) << '\n'
      << "lambda = " << format_double(c.lambda) << '\n'
      << "lambda_n = " << format_double(c.lambda_n) << '\n'
      << "reward_noise_sd = " << format_double(c.reward_noise_sd) << '\n'
      << "master_seed = " << c.master_seed << '\n'
      << "tie_break = \"" << to_string(c.tie_break) << "\"\n"
      << "update_target = \"" << to_string(c.update_target) << "\"\n";
  return out.str();
}

}  // namespace twostage::cli
