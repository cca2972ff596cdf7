#include "caclab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "caclab/random.hpp"

namespace caclab {

std::int64_t default_warmup(std::int64_t total_arrivals) {
  return total_arrivals / 10;
}

void validate(const SimConfig& cfg) {
  if (cfg.total_arrivals <= 0)
    throw std::invalid_argument("total arrivals must be positive");
  if (cfg.warmup_arrivals < 0 || cfg.warmup_arrivals >= cfg.total_arrivals)
    throw std::invalid_argument("warmup must satisfy 0 <= warmup < total");
  if (cfg.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
}

void validate(const Metrics& m) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (m.offered[i] < 0.0 || m.blocked[i] < 0.0 || m.blocked[i] > m.offered[i])
      throw std::invalid_argument("blocked counts must lie in [0, offered]");
    if (m.blocking[i] < 0.0 || m.blocking[i] > 1.0)
      throw std::invalid_argument("blocking probability outside [0, 1]");
  }
  if (m.aggregate_blocking < 0.0 || m.aggregate_blocking > 1.0)
    throw std::invalid_argument("aggregate blocking outside [0, 1]");
}

namespace {

struct Departure {
  double time;
  std::int64_t seq;  // insertion order, breaks ties deterministically
  int class_index;
  std::int64_t call_id;
};

struct DepartureLater {
  bool operator()(const Departure& a, const Departure& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

const char* kind_name(EventKind k) {
  return k == EventKind::Arrival ? "arrival" : "departure";
}

void write_trace(std::ostream* trace, const Event& ev, int free_before,
                 const std::string& decision) {
  if (!trace) return;
  *trace << ev.time << ',' << kind_name(ev.kind) << ',' << (ev.class_id + 1)
         << ',' << free_before << ',' << decision << '\n';
}

}  // namespace

Metrics run(const Scenario& sc, AdmissionPolicy& policy, const SimConfig& cfg) {
  validate(sc);
  validate(cfg);
  policy.reset();

  std::array<RandomStream, 3> arrival_rng = {
      RandomStream::derive(cfg.seed, 0), RandomStream::derive(cfg.seed, 2),
      RandomStream::derive(cfg.seed, 4)};
  std::array<RandomStream, 3> holding_rng = {
      RandomStream::derive(cfg.seed, 1), RandomStream::derive(cfg.seed, 3),
      RandomStream::derive(cfg.seed, 5)};

  std::array<double, 3> next_arrival{};
  for (std::size_t i = 0; i < 3; ++i)
    next_arrival[i] = sample_interarrival(sc.classes[i], arrival_rng[i]);

  std::priority_queue<Departure, std::vector<Departure>, DepartureLater> departures;
  std::array<int, 3> occupied{};
  int free = sc.capacity;
  std::int64_t seq = 0;
  std::int64_t call_id = 0;
  std::int64_t arrivals_seen = 0;
  std::array<std::int64_t, 3> offered{}, blocked{};
  double now = 0.0;

  while (arrivals_seen < cfg.total_arrivals) {
    int next_class = -1;
    double arrival_time = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i) {
      if (next_arrival[i] < arrival_time) {
        arrival_time = next_arrival[i];
        next_class = static_cast<int>(i);
      }
    }

    // Departures release capacity before a simultaneous arrival sees it.
    if (!departures.empty() && departures.top().time <= arrival_time) {
      Departure dep = departures.top();
      departures.pop();
      now = dep.time;
      int free_before = free;
      occupied[dep.class_index] -= 1;
      free += sc.classes[dep.class_index].channel_demand;
      write_trace(cfg.trace,
                  Event{now, EventKind::Departure, dep.class_index, dep.call_id},
                  free_before, "-");
      continue;
    }

    if (next_class < 0) break;  // no arrivals will ever occur
    now = arrival_time;
    const TrafficClass& cls = sc.classes[next_class];
    next_arrival[next_class] =
        now + sample_interarrival(cls, arrival_rng[next_class]);
    // Drawn unconditionally so the holding stream stays aligned across
    // policies (common random numbers).
    double holding = sample_holding(cls, holding_rng[next_class]);

    SystemState state;
    state.capacity = sc.capacity;
    state.occupied_per_class = occupied;
    state.free_channels = free;

    AdmissionDecision decision = policy.decide(state, cls);
    if (decision.admitted()) {
      if (free < cls.channel_demand) {
        std::ostringstream msg;
        msg << "policy '" << policy.name() << "' admitted a type-" << cls.id
            << " call needing " << cls.channel_demand << " channels with only "
            << free << " free at t=" << now;
        throw std::runtime_error(msg.str());
      }
      occupied[next_class] += 1;
      free -= cls.channel_demand;
      departures.push(Departure{now + holding, seq++, next_class, call_id});
    }

    bool counted = arrivals_seen >= cfg.warmup_arrivals;
    if (counted) {
      offered[next_class] += 1;
      if (!decision.admitted()) blocked[next_class] += 1;
    }
    write_trace(cfg.trace, Event{now, EventKind::Arrival, next_class, call_id},
                state.free_channels,
                decision.admitted() ? "admit"
                                    : "reject-" + to_string(decision.reason));
    ++call_id;
    ++arrivals_seen;
  }

  Metrics m;
  m.replications = 1;
  double total_offered = 0.0, total_blocked = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    m.offered[i] = static_cast<double>(offered[i]);
    m.blocked[i] = static_cast<double>(blocked[i]);
    m.blocking[i] = offered[i] > 0 ? m.blocked[i] / m.offered[i] : 0.0;
    total_offered += m.offered[i];
    total_blocked += m.blocked[i];
  }
  m.aggregate_blocking = total_offered > 0.0 ? total_blocked / total_offered : 0.0;
  validate(m);
  return m;
}

Metrics replicate(const Scenario& sc, AdmissionPolicy& policy,
                  const SimConfig& cfg) {
  validate(cfg);
  const int k = cfg.replications;
  std::vector<Metrics> reps;
  reps.reserve(k);
  for (int r = 0; r < k; ++r) {
    SimConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    sub.replications = 1;
    reps.push_back(run(sc, policy, sub));
  }

  Metrics m;
  m.replications = k;
  m.single_replication_warning = (k == 1);
  for (const Metrics& r : reps) {
    for (std::size_t i = 0; i < 3; ++i) {
      m.offered[i] += r.offered[i] / k;
      m.blocked[i] += r.blocked[i] / k;
      m.blocking[i] += r.blocking[i] / k;
    }
    m.aggregate_blocking += r.aggregate_blocking / k;
  }
  if (k >= 2) {
    auto half_width = [&](auto metric) {
      double mean = 0.0;
      for (const Metrics& r : reps) mean += metric(r) / k;
      double ss = 0.0;
      for (const Metrics& r : reps) {
        double d = metric(r) - mean;
        ss += d * d;
      }
      double sd = std::sqrt(ss / (k - 1));
      return 1.96 * sd / std::sqrt(double(k));
    };
    for (std::size_t i = 0; i < 3; ++i)
      m.half_width[i] = half_width([i](const Metrics& r) { return r.blocking[i]; });
    m.aggregate_half_width =
        half_width([](const Metrics& r) { return r.aggregate_blocking; });
  }
  validate(m);
  return m;
}

ExactComparison validate_against_exact(const Scenario& sc,
                                       AdmissionPolicy& policy,
                                       const SimConfig& cfg) {
  if (policy.name() != "conventional")
    throw std::invalid_argument(
        "exact-oracle comparison supports the conventional policy only "
        "(complete sharing)");
  ExactComparison cmp;
  cmp.simulated = replicate(sc, policy, cfg);
  cmp.exact = multirate_exact(sc.capacity, sc.classes);
  for (std::size_t i = 0; i < 3; ++i)
    cmp.gap[i] = std::abs(cmp.simulated.blocking[i] - cmp.exact.per_class[i]);
  return cmp;
}

ExactComparison validate_against_exact(const Scenario& sc,
                                       const SimConfig& cfg) {
  ConventionalPolicy conventional;
  return validate_against_exact(sc, conventional, cfg);
}

std::string format_comparison(const ExactComparison& cmp) {
  std::ostringstream out;
  out << "class  simulated  exact  gap  half_width\n";
  for (std::size_t i = 0; i < 3; ++i) {
    out << (i + 1) << "  " << cmp.simulated.blocking[i] << "  "
        << cmp.exact.per_class[i] << "  " << cmp.gap[i] << "  "
        << cmp.simulated.half_width[i] << "\n";
  }
  return out.str();
}

}  // namespace caclab
