#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "caclab/config.hpp"
#include "caclab/traffic.hpp"

namespace caclab {

/// Live cell occupancy snapshot consulted by admission policies.
struct SystemState {
  int capacity = 0;
  std::array<int, 3> occupied_per_class{};  // active calls per class
  int free_channels = 0;
};

void validate(const SystemState& state);

/// Builds a state from a scenario's demands and per-class call counts.
SystemState make_state(const Scenario& sc, const std::array<int, 3>& occupied);

/// Free-channel thresholds, 0 < a1 < a2 < a3 <= capacity. Above a3 all
/// classes are eligible; each lower region drops the heaviest remaining
/// class ("falls below X" means free < X, regions half-open).
struct ThresholdSet {
  int a1 = 1;
  int a2 = 2;
  int a3 = 3;
};

void validate(const ThresholdSet& t, int capacity);
ThresholdSet thresholds_from_config(const Config& cfg);
Config thresholds_to_config(const ThresholdSet& t);

enum class Verdict { Admit, Reject };
enum class RejectReason { None, Capacity, ThresholdRegion, PolicyScore };

std::string to_string(RejectReason reason);

struct AdmissionDecision {
  Verdict verdict = Verdict::Reject;
  RejectReason reason = RejectReason::Capacity;

  bool admitted() const { return verdict == Verdict::Admit; }
};

AdmissionDecision admit_decision();
AdmissionDecision reject_decision(RejectReason reason);

/// Capacity-only admission: admit iff free channels cover the demand.
AdmissionDecision decide_conventional(const SystemState& state,
                                      const TrafficClass& cls);

/// Threshold admission. With f free channels: f >= a3 admits any class,
/// a2 <= f < a3 admits classes 1-2, a1 <= f < a2 admits class 1 only,
/// f < a1 admits nothing. An eligible call still needs f >= b_i; that
/// failure is reported as a capacity rejection.
AdmissionDecision decide_threshold(const SystemState& state,
                                   const TrafficClass& cls,
                                   const ThresholdSet& t);

// ---------------------------------------------------------------------------
// Fuzzy controller

struct TriangularSet {
  std::string label;
  double left = 0.0;
  double peak = 0.0;
  double right = 0.0;

  double membership(double x) const;
};

/// Rule: IF occupancy is occupancy_set AND demand is demand_set
///       THEN admit-score is output_set. Indices into the FuzzySystem sets.
struct FuzzyRule {
  int occupancy_set = 0;
  int demand_set = 0;
  int output_set = 0;
};

/// Mamdani system over (occupancy ratio, channel demand) producing an
/// admit score in [0, 1]: min activation, max aggregation, centroid
/// defuzzification on a fixed 1001-point grid.
struct FuzzySystem {
  std::vector<TriangularSet> occupancy_sets;  // Low, Medium, High
  std::vector<TriangularSet> demand_sets;     // Light, Medium, Heavy
  std::vector<TriangularSet> output_sets;     // Reject, Weak, StronglyAdmit
  std::vector<FuzzyRule> rules;
};

/// The built-in rule base: occupancy partitioned Low/Medium/High with peaks
/// at 0.0/0.5/1.0, demand Light/Medium/Heavy peaked at 1/2/3, output sets
/// Reject/Weak/StronglyAdmit centered at 0.1/0.5/0.9. Higher occupancy and
/// higher demand push toward Reject.
FuzzySystem default_fuzzy_system();

void validate(const FuzzySystem& sys);
FuzzySystem fuzzy_from_config(const Config& cfg);
Config fuzzy_to_config(const FuzzySystem& sys);

/// Human-readable membership and rule table.
std::string describe(const FuzzySystem& sys);

/// Admit score in [0, 1]. occupancy_ratio must lie in [0, 1] and demand in
/// {1, 2, 3}; anything else is rejected with std::invalid_argument.
double fuzzy_infer(const FuzzySystem& sys, double occupancy_ratio, int demand);

/// Admit iff the fuzzy score is >= 0.5 (ties admit) and the call fits.
/// The capacity guard dominates the score.
AdmissionDecision decide_fuzzy(const SystemState& state,
                               const TrafficClass& cls,
                               const FuzzySystem& sys);

// ---------------------------------------------------------------------------
// Policy interface consumed by the simulator

class AdmissionPolicy {
 public:
  virtual ~AdmissionPolicy() = default;
  virtual std::string name() const = 0;
  virtual AdmissionDecision decide(const SystemState& state,
                                   const TrafficClass& cls) = 0;
  /// Called once at the start of each simulation run.
  virtual void reset() {}
  virtual std::unique_ptr<AdmissionPolicy> clone() const = 0;
};

class ConventionalPolicy final : public AdmissionPolicy {
 public:
  std::string name() const override { return "conventional"; }
  AdmissionDecision decide(const SystemState& state,
                           const TrafficClass& cls) override {
    return decide_conventional(state, cls);
  }
  std::unique_ptr<AdmissionPolicy> clone() const override {
    return std::make_unique<ConventionalPolicy>(*this);
  }
};

class ThresholdPolicy final : public AdmissionPolicy {
 public:
  explicit ThresholdPolicy(const ThresholdSet& t) : thresholds_(t) {}
  std::string name() const override { return "threshold"; }
  AdmissionDecision decide(const SystemState& state,
                           const TrafficClass& cls) override {
    return decide_threshold(state, cls, thresholds_);
  }
  std::unique_ptr<AdmissionPolicy> clone() const override {
    return std::make_unique<ThresholdPolicy>(*this);
  }
  const ThresholdSet& thresholds() const { return thresholds_; }

 private:
  ThresholdSet thresholds_;
};

class FuzzyPolicy final : public AdmissionPolicy {
 public:
  FuzzyPolicy() : system_(default_fuzzy_system()) {}
  explicit FuzzyPolicy(FuzzySystem sys) : system_(std::move(sys)) {}
  std::string name() const override { return "fuzzy"; }
  AdmissionDecision decide(const SystemState& state,
                           const TrafficClass& cls) override {
    return decide_fuzzy(state, cls, system_);
  }
  std::unique_ptr<AdmissionPolicy> clone() const override {
    return std::make_unique<FuzzyPolicy>(*this);
  }
  const FuzzySystem& system() const { return system_; }

 private:
  FuzzySystem system_;
};

}  // namespace caclab
