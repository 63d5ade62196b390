#include "myopic/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "myopic/errors.hpp"

#ifndef MYOPIC_BUILD_ID
#define MYOPIC_BUILD_ID "unknown"
#endif

namespace myopic {

namespace {

struct KeySpec {
  enum class Type { real, integer, text, choice };
  std::string name;
  Type type = Type::real;
  std::optional<std::string> fallback;  // default; empty optional plus !required means "may be absent"
  bool required = false;
  double lo = -HUGE_VAL, hi = HUGE_VAL;
  bool lo_open = false, hi_open = false;
  std::vector<std::string> choices;
};

using T = KeySpec::Type;

KeySpec real(std::string name, std::optional<std::string> def, double lo, bool lo_open, double hi = HUGE_VAL,
             bool hi_open = false) {
  KeySpec k;
  k.name = std::move(name);
  k.type = T::real;
  k.fallback = std::move(def);
  k.lo = lo;
  k.lo_open = lo_open;
  k.hi = hi;
  k.hi_open = hi_open;
  return k;
}

KeySpec required_real(std::string name, double lo, bool lo_open, double hi = HUGE_VAL) {
  KeySpec k = real(std::move(name), std::nullopt, lo, lo_open, hi);
  k.required = true;
  return k;
}

KeySpec integer(std::string name, std::optional<std::string> def, double lo, double hi, bool required = false) {
  KeySpec k;
  k.name = std::move(name);
  k.type = T::integer;
  k.fallback = std::move(def);
  k.required = required;
  k.lo = lo;
  k.hi = hi;
  return k;
}

KeySpec choice(std::string name, std::string def, std::vector<std::string> choices) {
  KeySpec k;
  k.name = std::move(name);
  k.type = T::choice;
  k.fallback = std::move(def);
  k.choices = std::move(choices);
  return k;
}

KeySpec text(std::string name) {
  KeySpec k;
  k.name = std::move(name);
  k.type = T::text;
  return k;
}

const std::vector<std::string> kAttacks = {"none",
                                           "oblivious",
                                           "scale_and_babble",
                                           "symmetrize_z_aware",
                                           "symmetrize_z_agnostic",
                                           "push_to_origin",
                                           "push_to_origin_omniscient"};

std::vector<KeySpec> attack_keys() {
  return {choice("attack", "none", kAttacks), real("alpha", std::nullopt, 0.0, true),
          real("babble_eps", "0.05", 0.0, true, 1.0, true), real("backoff", "0.01", 0.0, false, 1.0, true)};
}

std::vector<KeySpec> schema(Command c) {
  std::vector<KeySpec> keys;
  auto append = [&](std::vector<KeySpec> more) { keys.insert(keys.end(), more.begin(), more.end()); };
  auto channel = [&](bool n_required_positive, bool sigma_positive) {
    append({real("P", "1", 0.0, true), real("N", "1", 0.0, n_required_positive),
            real("sigma2", "1", 0.0, sigma_positive)});
  };
  auto code = [&]() {
    append({integer("n", std::nullopt, 1, 100000, true), required_real("rate", 0.0, false),
            real("key_rate", "0", 0.0, false), integer("budget_log2", "22", 1, 30)});
  };
  auto strips = [&]() {
    append({real("strip_epsilon", "0.2", 0.0, true), real("strip_delta", "0.1", 0.0, true),
            real("ogs_epsilon", "0.25", 0.0, true)});
  };
  switch (c) {
    case Command::region:
      append({real("sigma2_over_p_min", "0.05", 0.0, true), real("sigma2_over_p_max", "4", 0.0, true),
              integer("sigma2_over_p_steps", "5", 1, 100000), real("n_over_p_min", "0.05", 0.0, true),
              real("n_over_p_max", "2", 0.0, true), integer("n_over_p_steps", "5", 1, 100000),
              choice("spacing", "linear", {"linear", "log"}),
              choice("regime", "none", {"none", "log_n", "linear", "infinite", "all"}),
              real("r_key", "0.2", 0.0, true)});
      break;
    case Command::simulate:
      channel(false, false);
      code();
      append(attack_keys());
      append({integer("trials", std::nullopt, 1, 1e9, true), choice("decoder", "min_distance", {"min_distance", "list"}),
              real("list_radius", std::nullopt, 0.0, false),
              choice("codebook_mode", "auto", {"auto", "fixed", "ensemble"}), integer("threads", "1", 1, 256),
              text("codebook_out")});
      break;
    case Command::listdec:
      channel(true, false);
      code();
      append(attack_keys());
      append({integer("centers", std::nullopt, 1, 1e9, true),
              choice("center_mode", "worst_shell", {"worst_shell", "omniscient_shell", "attack"}),
              real("radius", std::nullopt, 0.0, false)});
      break;
    case Command::strip_census:
      channel(true, true);
      code();
      strips();
      append({integer("realizations", "1", 1, 1e6), real("z_typical_epsilon", "0.05", 0.0, false)});
      break;
    case Command::blob:
      channel(true, true);
      append({integer("n", std::nullopt, 1, 64, true), required_real("rate", 0.0, false),
              integer("attack_vectors", "100", 1, 1e6), real("radius", std::nullopt, 0.0, false),
              integer("max_realizations", "64", 1, 1e6)});
      strips();
      break;
    case Command::caps_selftest:
      append({integer("grid_steps", "20", 2, 200)});
      break;
  }
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class I>
std::optional<I> parse_int(const std::string& s) {
  I v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

using RawMap = std::vector<std::pair<std::string, std::string>>;

void flatten_json(const nlohmann::json& j, const std::string& prefix, RawMap& out, std::vector<ConfigIssue>& issues) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      flatten_json(v, key, out, issues);
    } else if (v.is_string()) {
      out.emplace_back(key, v.get<std::string>());
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
      out.emplace_back(key, v.dump());
    } else if (v.is_number_float()) {
      out.emplace_back(key, format_real(v.get<double>()));
    } else if (v.is_boolean()) {
      out.emplace_back(key, v.get<bool>() ? "true" : "false");
    } else {
      issues.push_back({key, "unsupported value type"});
    }
  }
}

RawMap read_document(std::string_view doc, std::vector<ConfigIssue>& issues) {
  RawMap raw;
  const std::string body = trim(doc);
  if (!body.empty() && body.front() == '{') {
    try {
      flatten_json(nlohmann::json::parse(body), "", raw, issues);
    } catch (const nlohmann::json::exception& e) {
      issues.push_back({"<document>", std::string("malformed JSON: ") + e.what()});
    }
    return raw;
  }
  std::istringstream in{std::string(doc)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      issues.push_back({"line " + std::to_string(lineno), "expected key=value"});
      continue;
    }
    raw.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return raw;
}

std::string describe_range(const KeySpec& k) {
  std::ostringstream os;
  os << (k.lo_open ? "(" : "[") << (std::isinf(k.lo) ? "-inf" : format_real(k.lo)) << ", "
     << (std::isinf(k.hi) ? "inf" : format_real(k.hi)) << (k.hi_open ? ")" : "]");
  return os.str();
}

bool in_range(const KeySpec& k, double v) {
  const bool lo_ok = k.lo_open ? v > k.lo : v >= k.lo;
  const bool hi_ok = k.hi_open ? v < k.hi : v <= k.hi;
  return lo_ok && hi_ok;
}

// Validates one value; returns its canonical text.
std::optional<std::string> check_value(const KeySpec& k, const std::string& value, std::vector<ConfigIssue>& issues) {
  switch (k.type) {
    case T::real: {
      const auto v = parse_real(value);
      if (!v) {
        issues.push_back({k.name, "not a finite number: '" + value + "'"});
        return std::nullopt;
      }
      if (!in_range(k, *v)) {
        issues.push_back({k.name, "value " + value + " outside " + describe_range(k)});
        return std::nullopt;
      }
      return format_real(*v);
    }
    case T::integer: {
      const auto v = parse_int<long long>(value);
      if (!v) {
        issues.push_back({k.name, "not an integer: '" + value + "'"});
        return std::nullopt;
      }
      if (!in_range(k, static_cast<double>(*v))) {
        issues.push_back({k.name, "value " + value + " outside " + describe_range(k)});
        return std::nullopt;
      }
      return std::to_string(*v);
    }
    case T::choice:
      if (std::find(k.choices.begin(), k.choices.end(), value) == k.choices.end()) {
        std::string opts;
        for (const auto& c : k.choices) opts += (opts.empty() ? "" : "|") + c;
        issues.push_back({k.name, "'" + value + "' is not one of " + opts});
        return std::nullopt;
      }
      return value;
    case T::text:
      if (value.empty()) {
        issues.push_back({k.name, "must not be empty"});
        return std::nullopt;
      }
      return value;
  }
  return std::nullopt;
}

void cross_checks(const ExperimentSpec& spec, std::vector<ConfigIssue>& issues) {
  auto ordered = [&](const char* lo, const char* hi) {
    if (spec.has(lo) && spec.has(hi) && spec.real(lo) > spec.real(hi)) {
      issues.push_back({lo, std::string("exceeds ") + hi});
    }
  };
  if (spec.command == Command::region) {
    ordered("sigma2_over_p_min", "sigma2_over_p_max");
    ordered("n_over_p_min", "n_over_p_max");
  }
  if (spec.has("strip_epsilon") && spec.has("strip_delta")) {
    const double ratio = spec.real("strip_epsilon") / spec.real("strip_delta");
    if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
      issues.push_back({"strip_epsilon", "must be a whole multiple of strip_delta"});
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + i.key + ": " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string to_string(Command c) {
  switch (c) {
    case Command::region: return "region";
    case Command::simulate: return "simulate";
    case Command::listdec: return "listdec";
    case Command::strip_census: return "strip-census";
    case Command::blob: return "blob";
    case Command::caps_selftest: return "caps-selftest";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::region, Command::simulate, Command::listdec, Command::strip_census, Command::blob,
                    Command::caps_selftest}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_stochastic(Command c) {
  return c == Command::simulate || c == Command::listdec || c == Command::strip_census || c == Command::blob;
}

double ExperimentSpec::real(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ParameterError("config key '" + key + "' is not set");
  return *parse_real(it->second);
}

long long ExperimentSpec::integer(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ParameterError("config key '" + key + "' is not set");
  return *parse_int<long long>(it->second);
}

const std::string& ExperimentSpec::text(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ParameterError("config key '" + key + "' is not set");
  return it->second;
}

std::string ExperimentSpec::canonical() const {
  std::string out = "command=" + to_string(command) + "\n";
  out += "seed=" + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  for (const auto& [k, v] : params) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t ExperimentSpec::config_hash() const { return fnv1a64(canonical()); }

ExperimentSpec parse_config(std::string_view document, std::optional<std::uint64_t> seed_override) {
  std::vector<ConfigIssue> issues;
  const RawMap raw = read_document(document, issues);

  std::map<std::string, std::string> given;
  for (const auto& [k, v] : raw) {
    if (!given.emplace(k, v).second) issues.push_back({k, "given more than once"});
  }

  ExperimentSpec spec;
  const auto cmd_it = given.find("command");
  if (cmd_it == given.end()) {
    issues.push_back({"command", "missing"});
    throw ConfigError(std::move(issues));
  }
  const auto cmd = parse_command(cmd_it->second);
  if (!cmd) {
    issues.push_back({"command", "unknown command '" + cmd_it->second + "'"});
    throw ConfigError(std::move(issues));
  }
  spec.command = *cmd;

  const auto keys = schema(spec.command);
  std::set<std::string> known{"command", "seed", "output"};
  for (const auto& k : keys) known.insert(k.name);
  for (const auto& [k, v] : given) {
    if (!known.count(k)) issues.push_back({k, "unknown key for command " + to_string(spec.command)});
  }

  if (seed_override) {
    spec.seed = *seed_override;
  } else if (auto it = given.find("seed"); it != given.end()) {
    if (auto s = parse_int<std::uint64_t>(it->second)) {
      spec.seed = *s;
    } else {
      issues.push_back({"seed", "not an unsigned 64-bit integer: '" + it->second + "'"});
    }
  } else if (is_stochastic(spec.command)) {
    issues.push_back({"seed", "required for command " + to_string(spec.command)});
  }
  if (auto it = given.find("output"); it != given.end()) spec.output_path = it->second;

  for (const auto& k : keys) {
    auto it = given.find(k.name);
    if (it != given.end()) {
      if (auto v = check_value(k, it->second, issues)) spec.params[k.name] = *v;
    } else if (k.required) {
      issues.push_back({k.name, "missing"});
    } else if (k.fallback) {
      spec.params[k.name] = *k.fallback;
    }
  }
  cross_checks(spec, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return spec;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string build_id() { return MYOPIC_BUILD_ID; }

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& table) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + quote(table.columns[i]);
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::logic_error("CSV row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              out += format_real(v);
            } else if constexpr (std::is_same_v<V, std::string>) {
              out += quote(v);
            } else {
              out += std::to_string(v);
            }
          },
          row[i]);
    }
    out += "\n";
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  const std::string body = render_csv(table);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace myopic
