#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "caclab/policies.hpp"
#include "caclab/rrbfn.hpp"
#include "caclab/traffic.hpp"

namespace caclab {

/// One radio access technology abstracted as a channel pool.
struct RatDescriptor {
  int id = 0;
  int capacity = 0;
  int current_load = 0;  // occupied channels
  double cost_per_channel = 0.0;
};

struct NetworkEnvironment {
  std::vector<RatDescriptor> rats;
};

void validate(const NetworkEnvironment& env);

/// Three RATs splitting `total_capacity` as evenly as possible, with fixed
/// per-channel costs (1.0, 0.6, 0.8).
NetworkEnvironment default_environment(int total_capacity);

int total_capacity(const NetworkEnvironment& env);

/// Distributes `occupied_channels` across the RATs proportionally to their
/// capacities (largest-remainder rounding, ties to the lowest index).
NetworkEnvironment project_load(const NetworkEnvironment& env,
                                int occupied_channels);

/// Per-RAT occupancy ratios, class demand one-hot (3 entries), aggregate
/// utilization, and the normalized cost of serving the request on the
/// least-loaded RAT: #RATs + 5 entries.
using FeatureVector = std::vector<double>;

int feature_arity(const NetworkEnvironment& env);

/// Cost feature = b_i * cost of the least-loaded RAT (ties to the cheapest),
/// normalized by (max demand * max configured cost) so the entry stays in
/// [0, 1].
FeatureVector extract_features(const NetworkEnvironment& env,
                               const TrafficClass& cls, double a);

struct LabeledSample {
  FeatureVector features;
  double label = 0.0;  // 1 admit, 0 reject
  // Feature vectors of the arrivals that preceded this one in the same run
  // (oldest first, at most kHistoryLength - 1). Replaying them before the
  // decision reproduces the recurrent input state the network would carry
  // at this point of a live run.
  std::vector<FeatureVector> history;
  // State context, kept so labels can be re-derived and audited.
  std::array<int, 3> occupied{};
  int class_id = 0;
  double utilization = 0.0;
  // Decision-time capacity context. When channel_demand > 0, accuracy
  // evaluation applies the same absolute capacity guard the deployed
  // controller does; synthetic samples may leave both at 0 to score the
  // bare network.
  int free_channels = 0;
  int channel_demand = 0;
};

/// Arrivals replayed per sample (the decision plus its history). Input
/// self-recurrence weights are bounded by 1 and sigmoid slopes by 1/4, so
/// influence from arrivals farther back decays at least as 4^-k; eight steps
/// put it below 1e-4.
constexpr int kHistoryLength = 8;

/// Exhaustive search over threshold triples a1 < a2 < a3 <= max_threshold
/// minimizing replicated aggregate blocking on the utilization-a scenario.
/// All triples share the same seed (common random numbers); ties keep the
/// lexicographically smallest triple.
struct ThresholdSearchResult {
  ThresholdSet best;
  double best_blocking = 0.0;
  std::vector<std::pair<ThresholdSet, double>> table;  // every triple tried
};

ThresholdSearchResult search_best_thresholds(int capacity, double a,
                                             std::uint64_t seed,
                                             int replications,
                                             std::int64_t arrivals,
                                             int max_threshold = 8);

/// Labeled admission decisions recorded while simulating under the oracle
/// threshold policy across the utilization grid. Sample quotas per grid
/// point are proportional to the utilization (rounded by largest
/// remainder), so loaded regimes where admission is contested dominate.
/// Within a run every rejected arrival is kept, admissions within three
/// free channels of the class threshold are kept (both sides of the
/// boundary stay equally dense), and deep-interior admissions are thinned
/// 1-in-10. The admit fraction stays well inside (0.1, 0.9).
/// Produces exactly `size` samples, deterministically per seed.
std::vector<LabeledSample> generate_training_set(
    const std::vector<Scenario>& scenarios, const ThresholdSet& oracle,
    int size, std::uint64_t seed, std::int64_t warmup_arrivals = 500);

/// The default generation mix: utilization-a scenarios for a = 0.1..0.9.
std::vector<Scenario> default_training_scenarios(int capacity);

struct FncacTrainConfig {
  RrbfnConfig network;
  int epochs = 0;
  double step_size = 0.0;
};

FncacTrainConfig default_fncac_train_config();

struct FncacTrainResult {
  RrbfnModel model;
  TrainReport report;
  double held_out_accuracy = 0.0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

/// Trains on an 80/20 split (every fifth sample held out), reporting
/// held-out decision accuracy against the labels.
FncacTrainResult train_fncac(const std::vector<LabeledSample>& data,
                             const FncacTrainConfig& cfg, std::uint64_t seed);

/// Fraction of samples whose decision matches the label. For each sample
/// the recurrent state is reset, the history is replayed, and the final
/// step's score is thresholded at 0.5; samples carrying capacity context
/// (channel_demand > 0) are rejected outright when the demand does not
/// fit, exactly as the deployed controller would.
double evaluate_accuracy(RrbfnModel& model,
                         const std::vector<LabeledSample>& samples);

/// Advances the model one recurrence step on the extracted features and
/// admits iff the score is >= 0.5 (ties admit) and the call fits. The
/// capacity guard is absolute. The environment's capacities must sum to the
/// state's capacity; its loads are overwritten by the state's occupancy.
AdmissionDecision decide_fncac(RrbfnModel& model,
                               const NetworkEnvironment& env,
                               const SystemState& state,
                               const TrafficClass& cls, double a);

/// Trained model plus the feature map it was trained against.
struct FncacBundle {
  NetworkEnvironment env;
  double cost_normalizer = 0.0;
  RrbfnModel model;
};

void save_fncac(const FncacBundle& bundle, const std::string& path);
FncacBundle load_fncac(const std::string& path);

class FncacPolicy final : public AdmissionPolicy {
 public:
  FncacPolicy(FncacBundle bundle, double utilization)
      : bundle_(std::move(bundle)), utilization_(utilization) {}
  std::string name() const override { return "fncac"; }
  AdmissionDecision decide(const SystemState& state,
                           const TrafficClass& cls) override {
    return decide_fncac(bundle_.model, bundle_.env, state, cls, utilization_);
  }
  /// New run: forget the previous run's traffic history.
  void reset() override { reset_state(bundle_.model); }
  std::unique_ptr<AdmissionPolicy> clone() const override {
    return std::make_unique<FncacPolicy>(*this);
  }
  const FncacBundle& bundle() const { return bundle_; }

 private:
  FncacBundle bundle_;
  double utilization_;
};

/// End-to-end pipeline: threshold search, training-set generation,
/// training, bundle assembly. Deterministic per master seed.
struct PipelineConfig {
  int capacity = 50;
  int sample_count = 1000;
  std::uint64_t seed = 1;
  double search_utilization = 0.7;
  int search_replications = 3;
  std::int64_t search_arrivals = 20000;
  FncacTrainConfig train;

  PipelineConfig() : train(default_fncac_train_config()) {}
};

struct PipelineResult {
  ThresholdSearchResult search;
  std::vector<LabeledSample> samples;
  FncacTrainResult training;
  FncacBundle bundle;
};

PipelineResult run_fncac_pipeline(const PipelineConfig& cfg);

}  // namespace caclab
