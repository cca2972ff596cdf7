// Experiment front door: analytic solves, exact oracles, simulations, FNCAC
// training, grid sweeps, and sweep comparisons, all emitting CSV.
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caclab/blocking.hpp"
#include "caclab/config.hpp"
#include "caclab/fncac.hpp"
#include "caclab/policies.hpp"
#include "caclab/random.hpp"
#include "caclab/rrbfn.hpp"
#include "caclab/simulator.hpp"
#include "caclab/traffic.hpp"

namespace {

using namespace caclab;

// start:stop:step, both ends inclusive within 1e-9; a bare number is a
// one-point grid.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::string token;
  std::istringstream in(spec);
  while (std::getline(in, token, ':')) parts.push_back(parse_double(token));
  std::vector<double> grid;
  if (parts.size() == 1) {
    grid.push_back(parts[0]);
  } else if (parts.size() == 3) {
    double start = parts[0], stop = parts[1], step = parts[2];
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop before start");
    for (int k = 0;; ++k) {
      double v = start + k * step;
      if (v > stop + 1e-9) break;
      grid.push_back(v);
    }
  } else {
    throw std::invalid_argument("grid must be 'start:stop:step' or one value");
  }
  if (grid.empty()) throw std::invalid_argument("grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0.0) throw std::invalid_argument("grid values must be > 0");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("grid must be strictly increasing");
  }
  return grid;
}

std::string format_grid_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

// Every adjustable knob of the sweep-style commands, filled by CLI11.
struct Options {
  int capacity = 50;
  std::uint64_t seed = 1;
  int replications = 5;
  std::int64_t arrivals = 30000;
  std::int64_t warmup = -1;  // -1: 10% of arrivals
  std::string grid = "0.1:0.9:0.1";
  std::vector<std::string> policies = {"conventional", "fuzzy", "fncac"};
  std::string policy = "conventional";
  std::string mode;
  std::string model;
  std::string config_path;
  std::string out;
  std::string in;
  std::string trace;
  double utilization = 0.6;
  bool validate_exact = false;
  int samples = 1000;
  int epochs = 0;
  double step_size = 0.0;
};

std::int64_t resolved_warmup(const Options& opt) {
  return opt.warmup >= 0 ? opt.warmup : default_warmup(opt.arrivals);
}

// Shared policy parameters: thresholds and the fuzzy rule base come from the
// config file when present, the FNCAC bundle from --model.
struct PolicyResources {
  ThresholdSet thresholds{2, 4, 6};
  FuzzySystem fuzzy;
  std::optional<FncacBundle> bundle;
};

PolicyResources load_resources(const Options& opt, bool need_fncac) {
  PolicyResources res;
  res.fuzzy = default_fuzzy_system();
  if (!opt.config_path.empty()) {
    Config cfg = Config::parse_file(opt.config_path);
    if (cfg.has("threshold.a1")) res.thresholds = thresholds_from_config(cfg);
    if (cfg.has("fuzzy.rule.count")) res.fuzzy = fuzzy_from_config(cfg);
  }
  if (need_fncac) {
    if (opt.model.empty())
      throw std::runtime_error("the fncac policy needs --model <file>");
    res.bundle = load_fncac(opt.model);
  }
  return res;
}

std::unique_ptr<AdmissionPolicy> make_policy(const std::string& name, double a,
                                             const PolicyResources& res,
                                             int capacity) {
  if (name == "conventional") return std::make_unique<ConventionalPolicy>();
  if (name == "threshold") {
    validate(res.thresholds, capacity);
    return std::make_unique<ThresholdPolicy>(res.thresholds);
  }
  if (name == "fuzzy") return std::make_unique<FuzzyPolicy>(res.fuzzy);
  if (name == "fncac") {
    if (!res.bundle) throw std::runtime_error("fncac model not loaded");
    return std::make_unique<FncacPolicy>(*res.bundle, a);
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

const char kSweepHeader[] =
    "utilization,policy,class,offered,blocked,blocking_prob,ci_low,ci_high,seed";

void write_sweep_rows(std::ostream& out, const std::string& util,
                      const std::string& policy, const Metrics& m,
                      std::uint64_t seed) {
  const char* names[3] = {"type1", "type2", "type3"};
  double off_total = 0.0, blk_total = 0.0;
  for (int i = 0; i < 3; ++i) {
    out << util << ',' << policy << ',' << names[i] << ','
        << format_double(m.offered[i]) << ',' << format_double(m.blocked[i])
        << ',' << format_double(m.blocking[i]) << ','
        << format_double(m.blocking[i] - m.half_width[i]) << ','
        << format_double(m.blocking[i] + m.half_width[i]) << ',' << seed
        << '\n';
    off_total += m.offered[i];
    blk_total += m.blocked[i];
  }
  out << util << ',' << policy << ",aggregate," << format_double(off_total)
      << ',' << format_double(blk_total) << ','
      << format_double(m.aggregate_blocking) << ','
      << format_double(m.aggregate_blocking - m.aggregate_half_width) << ','
      << format_double(m.aggregate_blocking + m.aggregate_half_width) << ','
      << seed << '\n';
}

void write_aggregate_row(std::ostream& out, const std::string& util,
                         const std::string& policy, const Metrics& m,
                         std::uint64_t seed) {
  double off_total = m.offered[0] + m.offered[1] + m.offered[2];
  double blk_total = m.blocked[0] + m.blocked[1] + m.blocked[2];
  out << util << ',' << policy << ",aggregate," << format_double(off_total)
      << ',' << format_double(blk_total) << ','
      << format_double(m.aggregate_blocking) << ','
      << format_double(m.aggregate_blocking - m.aggregate_half_width) << ','
      << format_double(m.aggregate_blocking + m.aggregate_half_width) << ','
      << seed << '\n';
}

int cmd_analytic(const Options& opt) {
  std::vector<double> grid = parse_grid(opt.grid);
  BlockingMode mode =
      blocking_mode_from_string(opt.mode.empty() ? "edge-state" : opt.mode);
  std::vector<BlockingReport> reports = sweep_analytic(grid, opt.capacity, mode);
  std::ofstream out = open_out(opt.out);
  write_analytic_csv(out, grid, reports);
  return 0;
}

int cmd_exact(const Options& opt) {
  std::vector<double> grid = parse_grid(opt.grid);
  std::vector<BlockingReport> reports;
  for (double a : grid) {
    Scenario sc = build_utilization_scenario(a, opt.capacity);
    reports.push_back(multirate_exact(sc.capacity, sc.classes));
  }
  std::ofstream out = open_out(opt.out);
  write_analytic_csv(out, grid, reports);
  return 0;
}

int cmd_simulate(const Options& opt) {
  if (opt.utilization < 0.0)
    throw std::invalid_argument("utilization must be >= 0");
  Scenario sc = build_utilization_scenario(opt.utilization, opt.capacity);
  PolicyResources res = load_resources(opt, opt.policy == "fncac");
  std::unique_ptr<AdmissionPolicy> policy =
      make_policy(opt.policy, opt.utilization, res, opt.capacity);

  SimConfig cfg;
  cfg.total_arrivals = opt.arrivals;
  cfg.warmup_arrivals = resolved_warmup(opt);
  cfg.seed = opt.seed;
  cfg.replications = opt.replications;

  std::ofstream trace;
  if (!opt.trace.empty()) {
    if (opt.replications != 1)
      throw std::invalid_argument("--trace needs --replications 1");
    trace = open_out(opt.trace);
    cfg.trace = &trace;
  }

  Metrics m = replicate(sc, *policy, cfg);
  std::cout << "policy: " << policy->name() << "\n"
            << "capacity: " << opt.capacity
            << "  utilization: " << format_grid_value(opt.utilization)
            << "  arrivals: " << opt.arrivals
            << "  replications: " << opt.replications << "\n";
  if (m.single_replication_warning)
    std::cout << "warning: single replication, half-widths are zero\n";
  const char* names[3] = {"type1", "type2", "type3"};
  for (int i = 0; i < 3; ++i)
    std::cout << names[i] << ": offered " << m.offered[i] << "  blocked "
              << m.blocked[i] << "  blocking " << m.blocking[i] << " +/- "
              << m.half_width[i] << "\n";
  std::cout << "aggregate: blocking " << m.aggregate_blocking << " +/- "
            << m.aggregate_half_width << "\n";

  if (opt.validate_exact) {
    ExactComparison cmp = validate_against_exact(sc, *policy, cfg);
    std::cout << "\nexact-oracle comparison (complete sharing):\n"
              << format_comparison(cmp);
  }
  if (!opt.out.empty()) {
    std::ofstream out = open_out(opt.out);
    out << kSweepHeader << '\n';
    write_sweep_rows(out, format_grid_value(opt.utilization), policy->name(), m,
                     opt.seed);
  }
  return 0;
}

int cmd_train(const Options& opt) {
  PipelineConfig cfg;
  cfg.capacity = opt.capacity;
  cfg.sample_count = opt.samples;
  cfg.seed = opt.seed;
  if (opt.epochs > 0) cfg.train.epochs = opt.epochs;
  if (opt.step_size > 0.0) cfg.train.step_size = opt.step_size;
  std::string out_path = opt.out.empty() ? "fncac.model" : opt.out;

  PipelineResult result = run_fncac_pipeline(cfg);
  save_fncac(result.bundle, out_path);

  double admit = 0.0;
  for (const auto& s : result.samples) admit += s.label;
  admit /= result.samples.size();

  std::cout << "oracle thresholds: a1=" << result.search.best.a1
            << " a2=" << result.search.best.a2 << " a3=" << result.search.best.a3
            << "  (aggregate blocking " << result.search.best_blocking << ")\n"
            << "samples: " << opt.samples << "  admit fraction: " << admit
            << "\n"
            << "train/test split: " << result.training.train_count << "/"
            << result.training.test_count << "\n"
            << "epochs: " << cfg.train.epochs
            << "  final loss: " << result.training.report.epoch_mse.back()
            << "\n"
            << "held-out accuracy: " << result.training.held_out_accuracy
            << "\n"
            << "model written to " << out_path << "\n";
  return 0;
}

int cmd_sweep(const Options& opt) {
  std::vector<double> grid = parse_grid(opt.grid);
  if (opt.policies.empty()) throw std::invalid_argument("no policies given");
  std::string mode = opt.mode.empty() ? "per-class" : opt.mode;
  bool per_class;
  if (mode == "per-class") per_class = true;
  else if (mode == "aggregate") per_class = false;
  else throw std::invalid_argument("mode must be per-class or aggregate");

  bool need_fncac = false;
  for (const auto& p : opt.policies) need_fncac |= (p == "fncac");
  PolicyResources res = load_resources(opt, need_fncac);

  SimConfig base;
  base.total_arrivals = opt.arrivals;
  base.warmup_arrivals = resolved_warmup(opt);
  base.replications = opt.replications;

  std::ofstream out = open_out(opt.out);
  out << kSweepHeader << '\n';
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Scenario sc = build_utilization_scenario(grid[g], opt.capacity);
    // One stream per grid point, shared by every policy: common random
    // numbers make the policy comparison paired.
    SimConfig cfg = base;
    cfg.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(g));
    std::string util = format_grid_value(grid[g]);
    for (const auto& name : opt.policies) {
      std::unique_ptr<AdmissionPolicy> policy =
          make_policy(name, grid[g], res, opt.capacity);
      Metrics m = replicate(sc, *policy, cfg);
      if (per_class)
        write_sweep_rows(out, util, name, m, cfg.seed);
      else
        write_aggregate_row(out, util, name, m, cfg.seed);
    }
  }
  return 0;
}

struct SweepRow {
  std::string utilization;
  std::string policy;
  double blocking = 0.0;
};

std::vector<SweepRow> read_aggregate_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
    throw std::invalid_argument("malformed sweep CSV: bad header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream cell_in(line);
    std::string cell;
    while (std::getline(cell_in, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw std::invalid_argument("malformed sweep CSV: wrong column count");
    if (cells[2] != "aggregate") continue;
    rows.push_back(SweepRow{cells[0], cells[1], parse_double(cells[5])});
  }
  return rows;
}

int cmd_compare(const Options& opt) {
  std::vector<SweepRow> rows = read_aggregate_rows(opt.in);
  std::vector<std::string> grid_order;
  std::map<std::string, std::map<std::string, double>> by_point;
  for (const auto& row : rows) {
    if (!by_point.count(row.utilization)) grid_order.push_back(row.utilization);
    by_point[row.utilization][row.policy] = row.blocking;
  }
  if (grid_order.empty())
    throw std::invalid_argument("sweep CSV has no aggregate rows");

  std::optional<std::ofstream> out;
  if (!opt.out.empty()) {
    out = open_out(opt.out);
    *out << "utilization,fncac,conventional,fuzzy,"
            "reduction_vs_conventional,reduction_vs_fuzzy\n";
  }

  // Per-point relative reduction is undefined where the baseline never
  // blocks (printed as n/a). The mean is the ratio of sums, i.e. each grid
  // point weighted by its baseline blocking, so near-zero baselines cannot
  // swamp the average with meaningless ratios.
  double base_conv = 0.0, diff_conv = 0.0;
  double base_fuzzy = 0.0, diff_fuzzy = 0.0;
  bool any_fuzzy = false;
  std::cout << "utilization  fncac  conventional  fuzzy  vs_conv  vs_fuzzy\n";
  for (const auto& util : grid_order) {
    const auto& policies = by_point[util];
    if (!policies.count("fncac") || !policies.count("conventional"))
      throw std::invalid_argument(
          "sweep CSV lacks fncac or conventional aggregate rows at " + util);
    double fn = policies.at("fncac");
    double conv = policies.at("conventional");
    bool have_fuzzy = policies.count("fuzzy") > 0;
    double fz = have_fuzzy ? policies.at("fuzzy") : 0.0;

    base_conv += conv;
    diff_conv += conv - fn;
    std::string vs_conv = conv > 0.0 ? format_double((conv - fn) / conv) : "n/a";
    std::string vs_fuzzy = "n/a";
    if (have_fuzzy) {
      any_fuzzy = true;
      base_fuzzy += fz;
      diff_fuzzy += fz - fn;
      if (fz > 0.0) vs_fuzzy = format_double((fz - fn) / fz);
    }
    std::cout << util << "  " << fn << "  " << conv << "  "
              << (have_fuzzy ? std::to_string(fz) : std::string("n/a")) << "  "
              << vs_conv << "  " << vs_fuzzy << "\n";
    if (out)
      *out << util << ',' << format_double(fn) << ',' << format_double(conv)
           << ',' << (have_fuzzy ? format_double(fz) : std::string()) << ','
           << (vs_conv == "n/a" ? std::string() : vs_conv) << ','
           << (vs_fuzzy == "n/a" ? std::string() : vs_fuzzy) << '\n';
  }
  if (base_conv > 0.0)
    std::cout << "mean reduction vs conventional: " << 100.0 * diff_conv / base_conv
              << "% (weighted by baseline blocking)\n";
  else
    std::cout << "mean reduction vs conventional: n/a (baseline never blocks)\n";
  if (any_fuzzy) {
    if (base_fuzzy > 0.0)
      std::cout << "mean reduction vs fuzzy: " << 100.0 * diff_fuzzy / base_fuzzy
                << "% (weighted by baseline blocking)\n";
    else
      std::cout << "mean reduction vs fuzzy: n/a (baseline never blocks)\n";
  }
  return 0;
}

int cmd_rules(const Options& opt) {
  PolicyResources res = load_resources(opt, false);
  std::cout << describe(res.fuzzy);
  std::cout << "thresholds: a1=" << res.thresholds.a1
            << " a2=" << res.thresholds.a2 << " a3=" << res.thresholds.a3
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"call-admission-control laboratory"};
  app.require_subcommand(1);
  Options opt;
  std::map<CLI::App*, CLI::Option*> config_opts;

  auto add_config = [&](CLI::App* cmd) {
    config_opts[cmd] =
        cmd->set_config("--config", "", "config file supplying any flag");
    cmd->allow_config_extras(true);
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--capacity", opt.capacity, "virtual channels in the cell");
    cmd->add_option("--seed", opt.seed, "master random seed");
    add_config(cmd);
  };
  auto add_sim_common = [&](CLI::App* cmd) {
    add_common(cmd);
    cmd->add_option("--replications", opt.replications, "independent runs");
    cmd->add_option("--arrivals", opt.arrivals, "arrivals per run");
    cmd->add_option("--warmup", opt.warmup,
                    "warmup arrivals excluded from metrics (default 10%)");
  };

  CLI::App* analytic = app.add_subcommand(
      "analytic", "blocking from the occupancy recurrence, CSV per grid point");
  add_common(analytic);
  analytic->add_option("--grid", opt.grid, "utilization grid start:stop:step");
  analytic->add_option("--mode", opt.mode,
                       "edge-state or cumulative read-out (default edge-state)");
  analytic->add_option("--out", opt.out, "output CSV path")->required();

  CLI::App* exact = app.add_subcommand(
      "exact", "exact occupancy-distribution blocking (complete sharing), CSV");
  add_common(exact);
  exact->add_option("--grid", opt.grid, "utilization grid start:stop:step");
  exact->add_option("--out", opt.out, "output CSV path")->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "simulate one scenario under one policy");
  add_sim_common(simulate);
  simulate->add_option("--utilization", opt.utilization,
                       "offered load as a fraction of capacity");
  simulate->add_option("--policy", opt.policy,
                       "conventional | threshold | fuzzy | fncac");
  simulate->add_option("--model", opt.model, "fncac bundle (for --policy fncac)");
  simulate->add_option("--trace", opt.trace, "event trace file (1 replication)");
  simulate->add_flag("--validate", opt.validate_exact,
                     "compare against the exact oracle (conventional only)");
  simulate->add_option("--out", opt.out, "optional CSV output");

  CLI::App* train = app.add_subcommand(
      "train", "search oracle thresholds, generate samples, train the model");
  add_common(train);
  train->add_option("--samples", opt.samples, "labeled sample count");
  train->add_option("--epochs", opt.epochs, "training epochs (0 = default)");
  train->add_option("--step", opt.step_size, "gradient step (0 = default)");
  train->add_option("--out", opt.out,
                    "model bundle path (default fncac.model)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "replicate every policy across the utilization grid, CSV");
  add_sim_common(sweep);
  sweep->add_option("--grid", opt.grid, "utilization grid start:stop:step");
  sweep->add_option("--policy", opt.policies,
                    "policies to sweep (repeatable)");
  sweep->add_option("--mode", opt.mode,
                    "per-class or aggregate rows (default per-class)");
  sweep->add_option("--model", opt.model, "fncac bundle (when fncac swept)");
  sweep->add_option("--out", opt.out, "output CSV path")->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "aggregate-blocking reductions from a sweep CSV");
  compare->add_option("--in", opt.in, "sweep CSV")->required();
  compare->add_option("--out", opt.out, "optional per-point CSV");

  CLI::App* rules = app.add_subcommand(
      "rules", "print the fuzzy memberships, rule base, and thresholds");
  add_config(rules);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [cmd, config_opt] : config_opts)
    if (cmd->parsed() && config_opt->count() > 0)
      opt.config_path = config_opt->as<std::string>();

  try {
    if (*analytic) return cmd_analytic(opt);
    if (*exact) return cmd_exact(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*train) return cmd_train(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*compare) return cmd_compare(opt);
    if (*rules) return cmd_rules(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
