#pragma once

#include <string>
#include <vector>

#include "caclab/config.hpp"
#include "caclab/random.hpp"

namespace caclab {

/// One QoS traffic class of the multirate loss cell. A class-i call holds
/// channel_demand channels for an exponentially distributed holding time.
struct TrafficClass {
  int id = 0;                 // 1, 2, 3
  std::string name;           // conversational | interactive | background
  int channel_demand = 1;     // b_i, channels per call
  double arrival_rate = 0.0;  // lambda_i, calls per unit time
  double service_rate = 1.0;  // mu_i, departures per unit time per call
};

/// Offered load of one class: lambda/mu.
double utilization(const TrafficClass& cls);

/// Throws std::invalid_argument when the class violates its invariants.
/// arrival_rate may be zero (a silent class); service_rate must be positive.
void validate(const TrafficClass& cls);

/// Exponential inter-arrival sample, mean 1/lambda. Deterministic given the
/// stream state; +infinity when the class has zero arrival rate.
double sample_interarrival(const TrafficClass& cls, RandomStream& rng);

/// Exponential holding-time sample, mean 1/mu.
double sample_holding(const TrafficClass& cls, RandomStream& rng);

struct Scenario {
  std::vector<TrafficClass> classes;  // three classes by default
  int capacity = 0;                   // N virtual channels
  double aggregate_utilization = 0.0; // the sweep knob a the builder received
};

void validate(const Scenario& sc);

/// Three classes with demands (1, 2, 3), mu = 1 and lambda_i = a for every
/// class, so utilization(class_i) == a. The per-class offered load is read
/// directly off the single sweep knob `a`.
Scenario build_equal_rate_scenario(double a, int capacity);

/// Default simulation cell: three classes with demands (1, 2, 3), call-arrival
/// shares (0.7, 0.2, 0.1) and mean holding times (1, 2, 4). Narrow calls
/// dominate the arrival stream while wide calls occupy channels the longest.
/// Rates are scaled so the total offered channel load is a * capacity, i.e.
/// offered_load_fraction(sc) == a, making sweeps over a in (0, 1) comparable
/// at any capacity.
Scenario build_utilization_scenario(double a, int capacity);

/// Total offered channel load as a fraction of capacity:
/// sum_i (lambda_i / mu_i) * b_i / N.
double offered_load_fraction(const Scenario& sc);

/// Scenario <-> plain-text config (keys: capacity, class.<id>.name,
/// class.<id>.demand, class.<id>.lambda, class.<id>.mu).
Config scenario_to_config(const Scenario& sc);
Scenario scenario_from_config(const Config& cfg);
void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace caclab
