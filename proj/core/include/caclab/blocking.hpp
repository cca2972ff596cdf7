#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "caclab/traffic.hpp"

namespace caclab {

/// Steady-state probabilities over occupied-channel counts k = 0..N.
struct StateDistribution {
  std::vector<double> probs;  // size capacity + 1
  int capacity = 0;
};

void validate(const StateDistribution& dist);

enum class BlockingMode { EdgeState, Cumulative };

std::string to_string(BlockingMode mode);
BlockingMode blocking_mode_from_string(const std::string& s);

struct BlockingReport {
  std::array<double, 3> per_class{};  // type1, type2, type3
  double aggregate = 0.0;
  BlockingMode mode = BlockingMode::EdgeState;
};

/// Third-order recurrence over occupancy states:
///   P_k = (a/3) * (P_{k-1} + P_{k-2} + P_{k-3}),  P_0 seeded to 1,
///   P_k = 0 for k < 0, then one normalization pass so the entries sum to 1.
/// Requires capacity >= 3 (the recurrence window) and a >= 0.
StateDistribution solve_recurrence(int capacity, double a);

/// Per-class blocking read-out. EdgeState takes the single state at each
/// class's admission edge, B1 = P_N, B2 = P_{N-1}, B3 = P_{N-2}; Cumulative
/// sums the states with fewer than b_i free channels,
/// B_i = sum_{k = N-b_i+1}^{N} P_k for the demands (1, 2, 3). The report's
/// aggregate field is left at zero; combine with aggregate_blocking when the
/// full row is needed.
BlockingReport class_blocking(const StateDistribution& dist, BlockingMode mode);

/// Aggregate blocking (a/3) * (P_N + P_{N-1} + P_{N-2}).
double aggregate_blocking(const StateDistribution& dist, double a);

/// Erlang-B blocking for `servers` channels offered `offered_load` erlangs,
/// via the numerically stable recursion E(k) = a E(k-1) / (k + a E(k-1)).
/// Validation oracle for the single-class, demand-1 case.
double erlang_b(int servers, double offered_load);

/// Exact complete-sharing multirate loss blocking via the occupancy
/// recursion k q(k) = sum_i rho_i b_i q(k - b_i). Per-class blocking is the
/// tail mass of states with fewer than b_i free channels. The aggregate is
/// the offered-call-weighted mean of the per-class values. Validation
/// oracle for the capacity-only admission policy.
BlockingReport multirate_exact(int capacity,
                               const std::vector<TrafficClass>& classes);

/// One report per grid point, in grid order; aggregate filled from the
/// top-state sum above.
std::vector<BlockingReport> sweep_analytic(const std::vector<double>& grid,
                                           int capacity, BlockingMode mode);

/// CSV with header `utilization,mode,b_type1,b_type2,b_type3,aggregate`.
void write_analytic_csv(std::ostream& out, const std::vector<double>& grid,
                        const std::vector<BlockingReport>& reports);

}  // namespace caclab
