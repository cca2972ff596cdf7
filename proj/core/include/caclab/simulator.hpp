#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "caclab/blocking.hpp"
#include "caclab/policies.hpp"
#include "caclab/traffic.hpp"

namespace caclab {

enum class EventKind { Arrival, Departure };

/// Trace record, one per processed event.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  int class_id = 0;
  std::int64_t call_id = -1;  // departures only
};

struct SimConfig {
  std::int64_t total_arrivals = 100000;  // stop after this many arrivals
  std::int64_t warmup_arrivals = 10000;  // leading arrivals excluded from metrics
  std::uint64_t seed = 1;
  int replications = 1;
  std::ostream* trace = nullptr;  // optional event trace sink
};

/// The default warmup: 10% of the arrival budget.
std::int64_t default_warmup(std::int64_t total_arrivals);

void validate(const SimConfig& cfg);

/// Blocking metrics. From run(): raw post-warmup counts of one replication.
/// From replicate(): per-replication means plus 95% normal-approximation
/// half-widths for the probability fields.
struct Metrics {
  std::array<double, 3> offered{};
  std::array<double, 3> blocked{};
  std::array<double, 3> blocking{};
  double aggregate_blocking = 0.0;  // total blocked / total offered
  std::array<double, 3> half_width{};
  double aggregate_half_width = 0.0;
  int replications = 1;
  bool single_replication_warning = false;
};

void validate(const Metrics& m);

/// One replication: event-driven Poisson arrivals and exponential holding,
/// admission by `policy`, per-class blocking counted after warmup. Each
/// class draws arrivals and holding times from its own sub-streams of
/// cfg.seed, so the offered traffic is identical across policies. A policy
/// that admits past the free capacity aborts the run.
Metrics run(const Scenario& sc, AdmissionPolicy& policy, const SimConfig& cfg);

/// cfg.replications independent runs, sub-seed r derived from (cfg.seed, r);
/// reports means and 95% half-widths. With one replication the half-widths
/// are zero and the warning flag is set.
Metrics replicate(const Scenario& sc, AdmissionPolicy& policy,
                  const SimConfig& cfg);

/// Simulated-vs-exact comparison under complete sharing.
struct ExactComparison {
  Metrics simulated;
  BlockingReport exact;
  std::array<double, 3> gap{};  // |simulated - exact| per class
};

/// Replicates the scenario under the given policy and compares per-class
/// blocking with the multirate occupancy oracle. The oracle models complete
/// sharing only, so any policy other than the conventional one is rejected.
ExactComparison validate_against_exact(const Scenario& sc,
                                       AdmissionPolicy& policy,
                                       const SimConfig& cfg);

/// Convenience overload running the conventional policy.
ExactComparison validate_against_exact(const Scenario& sc,
                                       const SimConfig& cfg);

std::string format_comparison(const ExactComparison& cmp);

}  // namespace caclab
