#include "caclab/fncac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "caclab/config.hpp"
#include "caclab/random.hpp"
#include "caclab/simulator.hpp"

namespace caclab {

void validate(const NetworkEnvironment& env) {
  if (env.rats.empty()) throw std::invalid_argument("environment has no RATs");
  for (const auto& rat : env.rats) {
    if (rat.capacity <= 0)
      throw std::invalid_argument("RAT capacity must be positive");
    if (rat.current_load < 0 || rat.current_load > rat.capacity)
      throw std::invalid_argument("RAT load outside [0, capacity]");
    if (rat.cost_per_channel < 0.0)
      throw std::invalid_argument("RAT cost must be nonnegative");
  }
}

NetworkEnvironment default_environment(int total) {
  if (total < 3)
    throw std::invalid_argument("environment needs at least 3 channels");
  const double costs[3] = {1.0, 0.6, 0.8};
  NetworkEnvironment env;
  int base = total / 3, rem = total % 3;
  for (int k = 0; k < 3; ++k) {
    RatDescriptor rat;
    rat.id = k + 1;
    rat.capacity = base + (k < rem ? 1 : 0);
    rat.current_load = 0;
    rat.cost_per_channel = costs[k];
    env.rats.push_back(rat);
  }
  validate(env);
  return env;
}

int total_capacity(const NetworkEnvironment& env) {
  int total = 0;
  for (const auto& rat : env.rats) total += rat.capacity;
  return total;
}

NetworkEnvironment project_load(const NetworkEnvironment& env,
                                int occupied_channels) {
  validate(env);
  int total = total_capacity(env);
  if (occupied_channels < 0 || occupied_channels > total)
    throw std::invalid_argument("occupied channels outside [0, total capacity]");

  NetworkEnvironment out = env;
  std::vector<double> frac(out.rats.size());
  int assigned = 0;
  for (std::size_t k = 0; k < out.rats.size(); ++k) {
    double target = double(occupied_channels) * out.rats[k].capacity / total;
    int base = static_cast<int>(std::floor(target));
    out.rats[k].current_load = base;
    frac[k] = target - base;
    assigned += base;
  }
  std::vector<std::size_t> order(out.rats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < occupied_channels; ++k) {
    std::size_t idx = order[k % order.size()];
    if (out.rats[idx].current_load < out.rats[idx].capacity) {
      out.rats[idx].current_load += 1;
      ++assigned;
    }
  }
  return out;
}

int feature_arity(const NetworkEnvironment& env) {
  return static_cast<int>(env.rats.size()) + 5;
}

FeatureVector extract_features(const NetworkEnvironment& env,
                               const TrafficClass& cls, double a) {
  validate(env);
  validate(cls);
  if (cls.id < 1 || cls.id > 3)
    throw std::invalid_argument("class id outside {1, 2, 3}");
  if (a < 0.0 || !std::isfinite(a))
    throw std::invalid_argument("utilization must be finite and nonnegative");

  FeatureVector f;
  f.reserve(feature_arity(env));
  for (const auto& rat : env.rats)
    f.push_back(double(rat.current_load) / double(rat.capacity));
  for (int c = 1; c <= 3; ++c) f.push_back(cls.id == c ? 1.0 : 0.0);
  f.push_back(a);

  // Cheapest placement: the least-loaded RAT, ties to the lower cost, then
  // the lower id. Normalized by the dearest possible request (demand 3 on
  // the costliest RAT) so the entry stays within [0, 1].
  const RatDescriptor* pick = &env.rats.front();
  double max_cost = 0.0;
  for (const auto& rat : env.rats) {
    max_cost = std::max(max_cost, rat.cost_per_channel);
    double r_ratio = double(rat.current_load) / rat.capacity;
    double p_ratio = double(pick->current_load) / pick->capacity;
    if (r_ratio < p_ratio ||
        (r_ratio == p_ratio && rat.cost_per_channel < pick->cost_per_channel))
      pick = &rat;
  }
  double normalizer = 3.0 * max_cost;
  f.push_back(normalizer > 0.0
                  ? cls.channel_demand * pick->cost_per_channel / normalizer
                  : 0.0);
  return f;
}

ThresholdSearchResult search_best_thresholds(int capacity, double a,
                                             std::uint64_t seed,
                                             int replications,
                                             std::int64_t arrivals,
                                             int max_threshold) {
  if (max_threshold < 3)
    throw std::invalid_argument("threshold search needs max_threshold >= 3");
  max_threshold = std::min(max_threshold, capacity);

  Scenario sc = build_utilization_scenario(a, capacity);
  SimConfig cfg;
  cfg.total_arrivals = arrivals;
  cfg.warmup_arrivals = default_warmup(arrivals);
  cfg.seed = seed;
  cfg.replications = replications;

  ThresholdSearchResult result;
  bool first = true;
  for (int a1 = 1; a1 <= max_threshold - 2; ++a1) {
    for (int a2 = a1 + 1; a2 <= max_threshold - 1; ++a2) {
      for (int a3 = a2 + 1; a3 <= max_threshold; ++a3) {
        ThresholdSet t{a1, a2, a3};
        ThresholdPolicy policy(t);
        double blocking = replicate(sc, policy, cfg).aggregate_blocking;
        result.table.emplace_back(t, blocking);
        if (first || blocking < result.best_blocking) {
          result.best = t;
          result.best_blocking = blocking;
          first = false;
        }
      }
    }
  }
  return result;
}

std::vector<Scenario> default_training_scenarios(int capacity) {
  std::vector<Scenario> scenarios;
  for (int i = 1; i <= 9; ++i)
    scenarios.push_back(build_utilization_scenario(i / 10.0, capacity));
  return scenarios;
}

namespace {

// Threshold oracle that also records labeled samples past the warmup, until
// its quota is filled. Every arrival's features enter a rolling window so a
// recorded sample carries the history a live network would have stepped
// through. Rejections and admissions within three channels of the class
// threshold are always recorded; deep-interior admissions only 1-in-10.
// Keeping both sides of the boundary equally dense matters: thinning only
// the admit side drags the regressed score below 0.5 just above the
// threshold and the learned policy turns over-conservative.
class RecordingPolicy final : public AdmissionPolicy {
 public:
  RecordingPolicy(const ThresholdSet& oracle, NetworkEnvironment env, double a,
                  std::int64_t warmup, int quota,
                  std::vector<LabeledSample>* sink)
      : inner_(oracle), oracle_(oracle), env_(std::move(env)), a_(a),
        warmup_(warmup), quota_(quota), sink_(sink) {}

  std::string name() const override { return "threshold"; }

  AdmissionDecision decide(const SystemState& state,
                           const TrafficClass& cls) override {
    AdmissionDecision decision = inner_.decide(state, cls);
    int used = state.capacity - state.free_channels;
    window_.push_back(extract_features(project_load(env_, used), cls, a_));
    if (static_cast<int>(window_.size()) > kHistoryLength)
      window_.erase(window_.begin());

    int limit = cls.id == 1   ? oracle_.a1
                : cls.id == 2 ? oracle_.a2
                              : oracle_.a3;
    bool near_boundary = state.free_channels - limit <= 3;
    bool keep = !decision.admitted() || near_boundary ||
                (admit_count_++ % 10 == 0);
    if (seen_ >= warmup_ && recorded_ < quota_ && keep) {
      LabeledSample sample;
      sample.features = window_.back();
      sample.history.assign(window_.begin(), window_.end() - 1);
      sample.label = decision.admitted() ? 1.0 : 0.0;
      sample.occupied = state.occupied_per_class;
      sample.class_id = cls.id;
      sample.utilization = a_;
      sample.free_channels = state.free_channels;
      sample.channel_demand = cls.channel_demand;
      sink_->push_back(std::move(sample));
      ++recorded_;
    }
    ++seen_;
    return decision;
  }

  void reset() override {
    inner_.reset();
    window_.clear();
    seen_ = 0;
    admit_count_ = 0;
  }

  std::unique_ptr<AdmissionPolicy> clone() const override {
    return std::make_unique<RecordingPolicy>(*this);
  }

 private:
  ThresholdPolicy inner_;
  ThresholdSet oracle_;
  NetworkEnvironment env_;
  double a_;
  std::int64_t warmup_;
  int quota_;
  std::vector<LabeledSample>* sink_;
  std::vector<FeatureVector> window_;
  std::int64_t seen_ = 0;
  std::int64_t admit_count_ = 0;
  int recorded_ = 0;
};

// Largest-remainder apportionment of `size` into weighted shares.
std::vector<int> apportion(const std::vector<double>& weights, int size) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> quota(weights.size(), 0);
  if (total <= 0.0) {
    for (int i = 0; i < size; ++i) quota[i % quota.size()] += 1;
    return quota;
  }
  std::vector<double> frac(weights.size());
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double target = size * weights[i] / total;
    quota[i] = static_cast<int>(std::floor(target));
    frac[i] = target - quota[i];
    assigned += quota[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (int i = 0; assigned < size; ++i, ++assigned)
    quota[order[i % order.size()]] += 1;
  return quota;
}

}  // namespace

std::vector<LabeledSample> generate_training_set(
    const std::vector<Scenario>& scenarios, const ThresholdSet& oracle,
    int size, std::uint64_t seed, std::int64_t warmup_arrivals) {
  if (size < 1) throw std::invalid_argument("sample count must be >= 1");
  if (scenarios.empty()) throw std::invalid_argument("no scenarios given");
  if (warmup_arrivals < 0) throw std::invalid_argument("warmup must be >= 0");

  std::vector<double> weights;
  for (const auto& sc : scenarios) weights.push_back(sc.aggregate_utilization);
  std::vector<int> quota = apportion(weights, size);

  std::vector<LabeledSample> samples;
  samples.reserve(size);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (quota[i] == 0) continue;
    const Scenario& sc = scenarios[i];
    validate(oracle, sc.capacity);
    RecordingPolicy recorder(oracle, default_environment(sc.capacity),
                             sc.aggregate_utilization, warmup_arrivals,
                             quota[i], &samples);
    SimConfig cfg;
    // Admission thinning keeps roughly 1-in-10 arrivals at light load, so
    // budget well past the quota; recording stops once the quota is filled.
    cfg.total_arrivals = warmup_arrivals + 12 * std::int64_t(quota[i]) + 100;
    cfg.warmup_arrivals = warmup_arrivals;
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    run(sc, recorder, cfg);
  }
  if (static_cast<int>(samples.size()) != size)
    throw std::runtime_error("training-set generation came up short: " +
                             std::to_string(samples.size()) + " of " +
                             std::to_string(size));
  return samples;
}

FncacTrainConfig default_fncac_train_config() {
  FncacTrainConfig cfg;
  cfg.network = RrbfnConfig{8, {24, 16}, 1.0};
  cfg.epochs = 6000;
  cfg.step_size = 1.0;
  return cfg;
}

FncacTrainResult train_fncac(const std::vector<LabeledSample>& data,
                             const FncacTrainConfig& cfg, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("no training data");

  TrainingSet train_set;
  std::vector<LabeledSample> held_out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i % 5 == 4) {
      held_out.push_back(data[i]);
    } else {
      TrainingSample sample;
      sample.inputs = data[i].history;
      sample.inputs.push_back(data[i].features);
      sample.target = data[i].label;
      train_set.samples.push_back(std::move(sample));
    }
  }
  if (train_set.samples.empty() || held_out.empty())
    throw std::invalid_argument("training set too small to split 80/20");

  FncacTrainResult result;
  result.model = init_model(cfg.network, seed);
  result.report =
      train_gradient_descent(result.model, train_set, cfg.epochs, cfg.step_size);
  result.train_count = train_set.samples.size();
  result.test_count = held_out.size();
  result.held_out_accuracy = evaluate_accuracy(result.model, held_out);
  return result;
}

double evaluate_accuracy(RrbfnModel& model,
                         const std::vector<LabeledSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples to evaluate");
  std::size_t matches = 0;
  for (const auto& sample : samples) {
    reset_state(model);
    for (const auto& step : sample.history) rrbfn_step(model, step);
    double score = rrbfn_step(model, sample.features);
    bool admit = score >= 0.5;
    // The deployed controller never admits past the free capacity, so the
    // guard is part of the decision being scored.
    if (sample.channel_demand > 0 &&
        sample.free_channels < sample.channel_demand)
      admit = false;
    bool labeled_admit = sample.label >= 0.5;
    if (admit == labeled_admit) ++matches;
  }
  reset_state(model);
  return double(matches) / double(samples.size());
}

AdmissionDecision decide_fncac(RrbfnModel& model,
                               const NetworkEnvironment& env,
                               const SystemState& state,
                               const TrafficClass& cls, double a) {
  validate(state);
  if (total_capacity(env) != state.capacity)
    throw std::invalid_argument(
        "environment capacity does not match the system state");
  int used = state.capacity - state.free_channels;
  FeatureVector features = extract_features(project_load(env, used), cls, a);
  double score = rrbfn_step(model, features);
  if (state.free_channels < cls.channel_demand)
    return reject_decision(RejectReason::Capacity);
  if (score >= 0.5) return admit_decision();
  return reject_decision(RejectReason::PolicyScore);
}

void save_fncac(const FncacBundle& bundle, const std::string& path) {
  validate(bundle.env);
  if (bundle.cost_normalizer < 0.0)
    throw std::invalid_argument("cost normalizer must be nonnegative");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "fncac-bundle 1\n";
  out << "rats " << bundle.env.rats.size() << "\n";
  for (const auto& rat : bundle.env.rats)
    out << "rat " << rat.id << ' ' << rat.capacity << ' '
        << format_double(rat.cost_per_channel) << "\n";
  out << "cost_normalizer " << format_double(bundle.cost_normalizer) << "\n";
  out << "class_order 1 2 3\n";
  save_model(bundle.model, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

FncacBundle load_fncac(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  auto expect = [&](const std::string& token) {
    std::string got;
    if (!(in >> got) || got != token)
      throw std::runtime_error("fncac file: expected '" + token + "', got '" +
                               got + "'");
  };

  FncacBundle bundle;
  expect("fncac-bundle");
  int version = 0;
  if (!(in >> version) || version != 1)
    throw std::runtime_error("unsupported fncac bundle version");
  expect("rats");
  std::size_t count = 0;
  if (!(in >> count) || count == 0)
    throw std::runtime_error("fncac file: bad RAT count");
  for (std::size_t k = 0; k < count; ++k) {
    expect("rat");
    RatDescriptor rat;
    std::string cost;
    if (!(in >> rat.id >> rat.capacity >> cost))
      throw std::runtime_error("fncac file: bad RAT line");
    rat.cost_per_channel = parse_double(cost);
    bundle.env.rats.push_back(rat);
  }
  expect("cost_normalizer");
  std::string norm;
  if (!(in >> norm)) throw std::runtime_error("fncac file: bad normalizer");
  bundle.cost_normalizer = parse_double(norm);
  expect("class_order");
  for (int expected = 1; expected <= 3; ++expected) {
    int c;
    if (!(in >> c) || c != expected)
      throw std::runtime_error("fncac file: unsupported class order");
  }
  bundle.model = load_model(in);
  validate(bundle.env);
  if (feature_arity(bundle.env) != bundle.model.input_size)
    throw std::runtime_error(
        "fncac file: model input size does not match the feature map");
  return bundle;
}

PipelineResult run_fncac_pipeline(const PipelineConfig& cfg) {
  if (cfg.sample_count < 1)
    throw std::invalid_argument("pipeline needs at least one sample");
  PipelineResult result;
  result.search = search_best_thresholds(
      cfg.capacity, cfg.search_utilization, derive_seed(cfg.seed, 1),
      cfg.search_replications, cfg.search_arrivals);
  result.samples = generate_training_set(default_training_scenarios(cfg.capacity),
                                         result.search.best, cfg.sample_count,
                                         derive_seed(cfg.seed, 2));
  result.training = train_fncac(result.samples, cfg.train, derive_seed(cfg.seed, 3));
  result.bundle.env = default_environment(cfg.capacity);
  double max_cost = 0.0;
  for (const auto& rat : result.bundle.env.rats)
    max_cost = std::max(max_cost, rat.cost_per_channel);
  result.bundle.cost_normalizer = 3.0 * max_cost;
  result.bundle.model = result.training.model;
  return result;
}

}  // namespace caclab
