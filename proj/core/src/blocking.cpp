#include "caclab/blocking.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "caclab/config.hpp"

namespace caclab {

void validate(const StateDistribution& dist) {
  if (dist.capacity < 0 ||
      dist.probs.size() != static_cast<std::size_t>(dist.capacity) + 1) {
    throw std::invalid_argument("state distribution: size != capacity + 1");
  }
  double sum = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("state distribution: negative entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("state distribution: entries do not sum to 1");
  }
}

std::string to_string(BlockingMode mode) {
  return mode == BlockingMode::EdgeState ? "edge-state" : "cumulative";
}

BlockingMode blocking_mode_from_string(const std::string& s) {
  if (s == "edge-state") return BlockingMode::EdgeState;
  if (s == "cumulative") return BlockingMode::Cumulative;
  throw std::invalid_argument("unknown blocking mode: " + s +
                              " (expected edge-state or cumulative)");
}

StateDistribution solve_recurrence(int capacity, double a) {
  if (capacity < 3) {
    throw std::invalid_argument(
        "solve_recurrence: capacity must be at least 3 (recurrence depth)");
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("solve_recurrence: a must be finite and >= 0");
  }
  StateDistribution dist;
  dist.capacity = capacity;
  dist.probs.assign(static_cast<std::size_t>(capacity) + 1, 0.0);
  // Unnormalized pass, states below zero contribute nothing.
  dist.probs[0] = 1.0;
  const double w = a / 3.0;
  for (int k = 1; k <= capacity; ++k) {
    double sum = 0.0;
    for (int back = 1; back <= 3; ++back) {
      if (k - back >= 0) sum += dist.probs[static_cast<std::size_t>(k - back)];
    }
    dist.probs[static_cast<std::size_t>(k)] = w * sum;
  }
  double total = 0.0;
  for (double p : dist.probs) total += p;
  for (double& p : dist.probs) p /= total;
  return dist;
}

BlockingReport class_blocking(const StateDistribution& dist,
                              BlockingMode mode) {
  if (dist.capacity < 3) {
    throw std::invalid_argument("class_blocking: capacity must be at least 3");
  }
  validate(dist);
  const int n = dist.capacity;
  BlockingReport rep;
  rep.mode = mode;
  if (mode == BlockingMode::EdgeState) {
    rep.per_class = {dist.probs[static_cast<std::size_t>(n)],
                     dist.probs[static_cast<std::size_t>(n - 1)],
                     dist.probs[static_cast<std::size_t>(n - 2)]};
  } else {
    for (int i = 0; i < 3; ++i) {
      const int demand = i + 1;
      double sum = 0.0;
      for (int k = n - demand + 1; k <= n; ++k) {
        sum += dist.probs[static_cast<std::size_t>(k)];
      }
      rep.per_class[static_cast<std::size_t>(i)] = sum;
    }
  }
  return rep;
}

double aggregate_blocking(const StateDistribution& dist, double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("aggregate_blocking: a must be finite and >= 0");
  }
  if (dist.capacity < 2) {
    throw std::invalid_argument("aggregate_blocking: capacity must be >= 2");
  }
  validate(dist);
  const int n = dist.capacity;
  return a / 3.0 *
         (dist.probs[static_cast<std::size_t>(n)] +
          dist.probs[static_cast<std::size_t>(n - 1)] +
          dist.probs[static_cast<std::size_t>(n - 2)]);
}

double erlang_b(int servers, double offered_load) {
  if (servers < 1) throw std::invalid_argument("erlang_b: servers must be >= 1");
  if (!(offered_load >= 0.0)) {
    throw std::invalid_argument("erlang_b: offered load must be >= 0");
  }
  double e = 1.0;
  for (int k = 1; k <= servers; ++k) {
    e = offered_load * e / (static_cast<double>(k) + offered_load * e);
  }
  return e;
}

BlockingReport multirate_exact(int capacity,
                               const std::vector<TrafficClass>& classes) {
  if (classes.empty()) {
    throw std::invalid_argument("multirate_exact: no classes");
  }
  int max_demand = 0;
  for (const auto& cls : classes) {
    validate(cls);
    if (cls.channel_demand > max_demand) max_demand = cls.channel_demand;
  }
  if (capacity < max_demand) {
    throw std::invalid_argument(
        "multirate_exact: capacity must be >= the largest channel demand");
  }

  // Occupancy recursion over total busy channels.
  std::vector<double> q(static_cast<std::size_t>(capacity) + 1, 0.0);
  q[0] = 1.0;
  for (int k = 1; k <= capacity; ++k) {
    double sum = 0.0;
    for (const auto& cls : classes) {
      const int b = cls.channel_demand;
      if (k - b >= 0) {
        sum += utilization(cls) * b * q[static_cast<std::size_t>(k - b)];
      }
    }
    q[static_cast<std::size_t>(k)] = sum / static_cast<double>(k);
  }
  double total = 0.0;
  for (double v : q) total += v;

  BlockingReport rep;
  rep.mode = BlockingMode::Cumulative;
  double weighted = 0.0;
  double rate_sum = 0.0;
  for (const auto& cls : classes) {
    double tail = 0.0;
    for (int k = capacity - cls.channel_demand + 1; k <= capacity; ++k) {
      tail += q[static_cast<std::size_t>(k)];
    }
    const double blocking = tail / total;
    if (cls.id >= 1 && cls.id <= 3) {
      rep.per_class[static_cast<std::size_t>(cls.id - 1)] = blocking;
    }
    weighted += cls.arrival_rate * blocking;
    rate_sum += cls.arrival_rate;
  }
  rep.aggregate = rate_sum > 0.0 ? weighted / rate_sum : 0.0;
  return rep;
}

std::vector<BlockingReport> sweep_analytic(const std::vector<double>& grid,
                                           int capacity, BlockingMode mode) {
  std::vector<BlockingReport> out;
  out.reserve(grid.size());
  for (double a : grid) {
    StateDistribution dist = solve_recurrence(capacity, a);
    BlockingReport rep = class_blocking(dist, mode);
    rep.aggregate = aggregate_blocking(dist, a);
    out.push_back(rep);
  }
  return out;
}

namespace {

std::string format_grid_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_analytic_csv(std::ostream& out, const std::vector<double>& grid,
                        const std::vector<BlockingReport>& reports) {
  if (grid.size() != reports.size()) {
    throw std::invalid_argument("analytic csv: grid/report size mismatch");
  }
  out << "utilization,mode,b_type1,b_type2,b_type3,aggregate\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = reports[i];
    out << format_grid_value(grid[i]) << ',' << to_string(r.mode) << ','
        << format_double(r.per_class[0]) << ',' << format_double(r.per_class[1])
        << ',' << format_double(r.per_class[2]) << ','
        << format_double(r.aggregate) << '\n';
  }
}

}  // namespace caclab
