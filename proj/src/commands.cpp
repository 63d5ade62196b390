#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "myopic/cli_io.hpp"
#include "myopic/errors.hpp"
#include "myopic/experiments.hpp"
#include "myopic/rng.hpp"

namespace myopic {

namespace {

// Leading provenance columns shared by every command.
struct Provenance {
  std::uint64_t seed;
  std::string build;
  std::string hash;

  explicit Provenance(const ExperimentSpec& spec)
      : seed(spec.seed.value_or(0)), build(build_id()), hash([&] {
          char buf[20];
          std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec.config_hash()));
          return std::string(buf);
        }()) {}

  CsvTable table(std::vector<std::string> columns) const {
    CsvTable t;
    t.columns = {"seed", "build_id", "config_hash"};
    t.columns.insert(t.columns.end(), columns.begin(), columns.end());
    return t;
  }
  void add(CsvTable& t, std::vector<CsvCell> cells) const {
    std::vector<CsvCell> row{seed, build, hash};
    row.insert(row.end(), cells.begin(), cells.end());
    t.rows.push_back(std::move(row));
  }
};

CsvCell count(std::size_t v) { return static_cast<std::uint64_t>(v); }
CsvCell flag(bool v) { return static_cast<long long>(v ? 1 : 0); }
CsvCell optional_real(std::optional<double> v) {
  if (v && std::isfinite(*v)) return *v;
  return std::string();
}

ChannelParams channel(const ExperimentSpec& spec) {
  return ChannelParams{spec.real("P"), spec.real("N"), spec.real("sigma2")};
}

AttackSpec attack(const ExperimentSpec& spec, const ChannelParams& params) {
  AttackSpec a;
  a.kind = parse_attack_kind(spec.text("attack"));
  if (spec.has("alpha")) a.alpha = spec.real("alpha");
  a.babble_eps = spec.real("babble_eps");
  a.backoff = spec.real("backoff");
  if (a.kind == AttackSpec::Kind::scale_and_babble && !a.alpha) a.alpha = minimize_scale_babble(params).argument;
  return a;
}

std::size_t budget(const ExperimentSpec& spec) { return std::size_t{1} << spec.integer("budget_log2"); }

std::vector<double> grid(double lo, double hi, long long steps, bool log_spacing) {
  std::vector<double> out;
  for (long long i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    out.push_back(log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return out;
}

double rate_or_zero(const std::vector<std::pair<std::string, double>>& rates, const std::string& name) {
  for (const auto& [k, v] : rates) {
    if (k == name) return v;
  }
  return 0.0;
}

CommandResult run_region(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  const bool log_spacing = spec.text("spacing") == "log";
  const auto s_axis = grid(spec.real("sigma2_over_p_min"), spec.real("sigma2_over_p_max"),
                           spec.integer("sigma2_over_p_steps"), log_spacing);
  const auto x_axis =
      grid(spec.real("n_over_p_min"), spec.real("n_over_p_max"), spec.integer("n_over_p_steps"), log_spacing);
  const double r_key = spec.real("r_key");
  std::vector<KeyRegime> regimes;
  const std::string& which = spec.text("regime");
  if (which == "none" || which == "all") regimes.push_back(KeyRegime::none());
  if (which == "log_n" || which == "all") regimes.push_back(KeyRegime::log_n());
  if (which == "linear" || which == "all") regimes.push_back(KeyRegime::linear(r_key));
  if (which == "infinite" || which == "all") regimes.push_back(KeyRegime::infinite());

  CommandResult res;
  res.table = prov.table({"regime", "sigma2_over_p", "n_over_p", "r_key", "verdict", "lower", "upper", "row",
                          "boundary", "rate_ld", "rate_myop", "rate_gv"});
  for (const auto& regime : regimes) {
    for (const auto& r : region_sweep(s_axis, x_axis, regime)) {
      const auto& v = r.verdict;
      prov.add(res.table, {to_string(regime.kind), r.sigma2_over_p, r.n_over_p,
                           regime.kind == KeyRegime::Kind::linear ? regime.r_key : 0.0, to_string(v.kind), v.lower,
                           v.upper, v.regime_label, flag(v.boundary), rate_ld(ChannelParams{1.0, r.n_over_p, r.sigma2_over_p}),
                           rate_or_zero(v.rates_used, "R_myop"), rate_gv(ChannelParams{1.0, r.n_over_p, r.sigma2_over_p})});
    }
  }
  return res;
}

CodebookMode codebook_mode(const std::string& s) {
  if (s == "fixed") return CodebookMode::fixed;
  if (s == "ensemble") return CodebookMode::ensemble;
  return CodebookMode::automatic;
}

CommandResult run_simulate(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  TrialConfig c;
  c.params = channel(spec);
  c.n = static_cast<int>(spec.integer("n"));
  c.rate = spec.real("rate");
  c.key_rate = spec.real("key_rate");
  c.trials = static_cast<std::size_t>(spec.integer("trials"));
  c.seed = *spec.seed;
  c.decoder = spec.text("decoder") == "list" ? DecoderKind::list : DecoderKind::min_distance;
  if (spec.has("list_radius")) c.list_radius = spec.real("list_radius");
  c.mode = codebook_mode(spec.text("codebook_mode"));
  c.budget = budget(spec);
  c.threads = static_cast<unsigned>(spec.integer("threads"));
  c.attack = attack(spec, c.params);

  PeResult r;
  if (spec.has("codebook_out")) {
    if (c.mode == CodebookMode::ensemble) throw ParameterError("codebook_out needs a materialized codebook");
    const auto cb = SphericalCodebook::generate(c.seed, c.n, c.rate, c.key_rate, c.params.P, c.budget);
    cb.save(spec.text("codebook_out"));
    r = run_pe(c, cb);
  } else {
    r = run_pe(c);
  }

  const auto& t = r.tally;
  std::size_t max_list = 0;
  double list_sum = 0.0;
  for (const auto& [size, cnt] : t.list_size_histogram) {
    max_list = std::max(max_list, size);
    list_sum += static_cast<double>(size) * static_cast<double>(cnt);
  }
  const bool listing = c.decoder == DecoderKind::list;
  const auto ci = t.ci95();
  CommandResult res;
  res.table = prov.table({"n", "rate", "key_rate", "P", "N", "sigma2", "attack", "alpha", "decoder", "codebook",
                          "trials", "errors", "pe_hat", "ci95_low", "ci95_high", "clip_count", "tie_count",
                          "mean_list_size", "max_list_size"});
  prov.add(res.table,
           {static_cast<long long>(c.n), r.actual_rate, r.actual_key_rate, c.params.P, c.params.N, c.params.sigma2,
            to_string(c.attack.kind), optional_real(r.alpha), spec.text("decoder"),
            std::string(r.ensemble ? "ensemble" : "fixed"), count(t.trials), count(t.errors), t.pe_hat(), ci.lower,
            ci.upper, count(t.clip_count), count(t.tie_count),
            listing ? CsvCell(list_sum / static_cast<double>(t.trials)) : CsvCell(std::string()),
            listing ? CsvCell(count(max_list)) : CsvCell(std::string())});
  return res;
}

CommandResult run_listdec(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  const ChannelParams params = channel(spec);
  params.validate();
  const int n = static_cast<int>(spec.integer("n"));
  const auto cb = SphericalCodebook::generate(*spec.seed, n, spec.real("rate"), spec.real("key_rate"), params.P,
                                              budget(spec));
  SurveyConfig sc;
  const std::string& mode = spec.text("center_mode");
  sc.mode = mode == "attack" ? CenterMode::attack
                             : mode == "omniscient_shell" ? CenterMode::omniscient_shell : CenterMode::worst_shell;
  sc.radius = spec.has("radius") ? spec.real("radius") : std::sqrt(n * params.N);
  sc.centers = static_cast<std::size_t>(spec.integer("centers"));
  sc.seed = *spec.seed;
  sc.params = params;
  sc.attack = attack(spec, params);
  const SurveyResult r = list_size_survey(cb, sc);

  CommandResult res;
  res.table = prov.table({"n", "rate", "center_mode", "radius", "centers", "list_size", "count", "max_list",
                          "mean_list", "expected_mean"});
  for (const auto& [size, cnt] : r.histogram) {
    prov.add(res.table, {static_cast<long long>(n), cb.rate(), mode, sc.radius, count(r.centers), count(size),
                         count(cnt), count(r.max_list), r.mean_list, optional_real(r.expected_mean)});
  }
  return res;
}

StripOptions strip_options(const ExperimentSpec& spec) {
  StripOptions o;
  o.epsilon = spec.real("strip_epsilon");
  o.delta = spec.real("strip_delta");
  o.ogs_epsilon = spec.real("ogs_epsilon");
  return o;
}

CommandResult run_strip_census(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  const ChannelParams params = channel(spec);
  params.validate();
  const int n = static_cast<int>(spec.integer("n"));
  const std::uint64_t seed = *spec.seed;
  const auto cb =
      SphericalCodebook::generate(seed, n, spec.real("rate"), spec.real("key_rate"), params.P, budget(spec));
  const StripOptions opt = strip_options(spec);
  const std::size_t block = ogs_block_size(n, opt.ogs_epsilon);

  CommandResult res;
  res.table = prov.table({"realization", "n", "rate_code", "z_norm", "z_redraws", "thick_count", "x_strip", "x_block",
                          "x_in_last_block", "strip", "inner_distance", "outer_distance", "count", "fraction",
                          "expected_log2_count", "delta_factor", "delta_factor_valid", "e_str", "ogs_blocks"});
  const auto realizations = static_cast<std::size_t>(spec.integer("realizations"));
  for (std::size_t r = 0; r < realizations; ++r) {
    Rng rng = make_stream(seed, StreamTag::census, r);
    std::uniform_int_distribution<std::size_t> pick_m(0, cb.message_count() - 1);
    std::uniform_int_distribution<std::size_t> pick_k(0, cb.key_count() - 1);
    const std::size_t m = pick_m(rng);
    const std::size_t k = pick_k(rng);
    const std::size_t f = cb.flat_index(m, k);
    const Observation obs = typical_observation(rng, cb.row(f), params, spec.real("z_typical_epsilon"));
    const StripCensus c = strip_census(cb, params, obs.z, opt);
    const auto x_strip = c.strip_of(f);
    CsvCell x_strip_cell = std::string(), x_block = std::string(), x_last = std::string();
    if (x_strip) {
      const OgsPartition part = build_ogs(c, *x_strip, block);
      x_strip_cell = static_cast<long long>(*x_strip);
      x_block = count(*part.block_of(f));
      x_last = flag(part.in_last_block(f));
    }
    for (const auto& row : c.strips) {
      const std::size_t blocks = (row.count + block - 1) / block;
      prov.add(res.table, {count(r), static_cast<long long>(n), cb.rate() + cb.key_rate(), c.z_hat_norm,
                           count(obs.redraws), count(c.thick_count()), x_strip_cell, x_block, x_last, static_cast<long long>(row.index),
                           row.inner_distance, row.outer_distance, count(row.count), row.fraction,
                           row.expected_log2_count, row.delta_factor, flag(row.delta_factor_valid), flag(row.e_str),
                           count(blocks)});
    }
  }
  return res;
}

CommandResult run_blob(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  BlobSurveyConfig bc;
  bc.params = channel(spec);
  bc.n = static_cast<int>(spec.integer("n"));
  bc.rate = spec.real("rate");
  bc.strips = strip_options(spec);
  bc.attack_vectors = static_cast<std::size_t>(spec.integer("attack_vectors"));
  if (spec.has("radius")) bc.radius = spec.real("radius");
  bc.seed = *spec.seed;
  bc.max_realizations = static_cast<std::size_t>(spec.integer("max_realizations"));
  const BlobSurvey s = blob_survey(bc);

  CommandResult res;
  res.table = prov.table({"n", "realization", "strip", "strip_size", "ogs_size", "e_orcl", "attack_index",
                          "blob_count", "reverse_size_max"});
  for (const auto& row : s.rows) {
    prov.add(res.table, {static_cast<long long>(bc.n), count(s.realization), static_cast<long long>(s.strip_index),
                         count(s.strip_size), count(s.ogs_size), flag(s.e_orcl), count(row.attack_index),
                         count(row.blob_count), count(row.reverse_size_max)});
  }
  return res;
}

// Invariant grid over (P, N, sigma2) in [0.1, 10]^3, log-spaced.
CommandResult run_caps_selftest(const ExperimentSpec& spec) {
  const Provenance prov(spec);
  const auto axis = grid(0.1, 10.0, spec.integer("grid_steps"), true);
  struct Check {
    std::string name;
    double tolerance;
    std::size_t points = 0, failures = 0;
    double worst = 0.0;
    void record(double deviation) {
      ++points;
      if (!(deviation <= tolerance)) ++failures;
      if (std::isnan(deviation) || deviation > worst) worst = std::isnan(deviation) ? HUGE_VAL : deviation;
    }
  };
  Check change{"change_of_variables", 1e-8}, closed{"closed_form", 1e-8}, monotone_s{"myop_nondecreasing_in_sigma2", 1e-12},
      monotone_n{"myop_nonincreasing_in_N", 1e-12},
      keys{"key_ordering", 1e-12}, sandwich{"gv_lp_rankin_order", 1e-12}, bounds{"verdict_bounds", 0.0};

  const std::vector<KeyRegime> regimes{KeyRegime::none(), KeyRegime::log_n(), KeyRegime::linear(0.2),
                                       KeyRegime::infinite()};
  // R_myop is the binding rate where sigma2/P >= P/N - 1 and sigma2/P > N/P - 1.
  auto myop_binds = [](const ChannelParams& p) {
    const double s = p.sigma2 / p.P, x = p.N / p.P;
    return s >= 1.0 / x - 1.0 && s > x - 1.0;
  };
  for (double P : axis) {
    for (double N : axis) {
      double prev_myop = -HUGE_VAL;
      for (double s2 : axis) {
        const ChannelParams p{P, N, s2};
        const double radius_rate = maximize_myop_ld_radius(p).achieved_rate;
        change.record(std::fabs(radius_rate - minimize_scale_babble(p).achieved_rate));
        closed.record(std::fabs(radius_rate - myop_ld_closed_form_rate(p)));
        if (myop_binds(p)) {
          const double myop = rate_myop(p);
          monotone_s.record(std::max(0.0, prev_myop - myop));
          prev_myop = myop;
        }
        const double gv = rate_gv(p), lp = rate_lp(p), rankin = rate_rankin(p);
        sandwich.record(std::max({0.0, gv - lp, lp - rankin}));
        double prev_lower = -HUGE_VAL;
        for (const auto& regime : regimes) {
          const CapacityVerdict v = classify(p, regime);
          keys.record(std::max(0.0, prev_lower - v.lower));
          prev_lower = v.lower;
          bounds.record(std::max({0.0, -v.lower, v.lower - v.upper}));
        }
      }
    }
    for (double s2 : axis) {
      double prev_myop = HUGE_VAL;
      for (double N : axis) {
        const ChannelParams p{P, N, s2};
        if (!myop_binds(p)) continue;
        const double myop = rate_myop(p);
        monotone_n.record(std::max(0.0, myop - prev_myop));
        prev_myop = myop;
      }
    }
  }

  CommandResult res;
  res.table = prov.table({"check", "points", "failures", "max_deviation", "tolerance", "status"});
  for (const Check* c : {&change, &closed, &monotone_s, &monotone_n, &keys, &sandwich, &bounds}) {
    const bool ok = c->failures == 0;
    res.selftest_failed |= !ok;
    prov.add(res.table, {c->name, count(c->points), count(c->failures), std::isfinite(c->worst) ? c->worst : 1e308,
                         c->tolerance, std::string(ok ? "pass" : "fail")});
  }
  return res;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CommandResult run_command(const ExperimentSpec& spec) {
  if (is_stochastic(spec.command) && !spec.seed) throw ParameterError("seed required for " + to_string(spec.command));
  switch (spec.command) {
    case Command::region: return run_region(spec);
    case Command::simulate: return run_simulate(spec);
    case Command::listdec: return run_listdec(spec);
    case Command::strip_census: return run_strip_census(spec);
    case Command::blob: return run_blob(spec);
    case Command::caps_selftest: return run_caps_selftest(spec);
  }
  throw std::logic_error("unhandled command");
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Myopic jamming laboratory: capacity regions, coding simulations and geometry surveys."};
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config document");
  run->add_option("config", config_path, "key=value or JSON config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_path, "Write CSV here instead of the config's output (or stdout)");
  auto* check = app.add_subcommand("check", "Validate a config document and print its canonical form");
  check->add_option("config", config_path, "key=value or JSON config file")->required();
  check->add_option("--seed", seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentSpec spec;
    try {
      spec = parse_config(read_file(config_path), seed);
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      return 1;
    }

    if (check->parsed()) {
      out << spec.canonical();
      return 0;
    }
    const CommandResult result = run_command(spec);
    const std::string target = !out_path.empty() ? out_path : spec.output_path;
    if (target.empty()) {
      out << render_csv(result.table);
    } else {
      emit_csv(result.table, target);
    }
    if (result.selftest_failed) {
      err << "caps-selftest: invariant failures, see the status column\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace myopic
