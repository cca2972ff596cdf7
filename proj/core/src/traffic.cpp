#include "caclab/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace caclab {

double utilization(const TrafficClass& cls) {
  return cls.arrival_rate / cls.service_rate;
}

void validate(const TrafficClass& cls) {
  if (cls.id < 1) throw std::invalid_argument("traffic class: id must be >= 1");
  if (cls.channel_demand < 1) {
    throw std::invalid_argument("traffic class: channel demand must be >= 1");
  }
  if (!(cls.arrival_rate >= 0.0) || !std::isfinite(cls.arrival_rate)) {
    throw std::invalid_argument("traffic class: arrival rate must be finite and >= 0");
  }
  if (!(cls.service_rate > 0.0) || !std::isfinite(cls.service_rate)) {
    throw std::invalid_argument("traffic class: service rate must be finite and > 0");
  }
}

double sample_interarrival(const TrafficClass& cls, RandomStream& rng) {
  return rng.exponential(cls.arrival_rate);
}

double sample_holding(const TrafficClass& cls, RandomStream& rng) {
  return rng.exponential(cls.service_rate);
}

void validate(const Scenario& sc) {
  if (sc.classes.empty()) throw std::invalid_argument("scenario: no classes");
  int max_demand = 0;
  std::set<int> ids;
  for (const auto& cls : sc.classes) {
    validate(cls);
    max_demand = std::max(max_demand, cls.channel_demand);
    if (!ids.insert(cls.id).second) {
      throw std::invalid_argument("scenario: duplicate class id " +
                                  std::to_string(cls.id));
    }
  }
  if (sc.capacity < max_demand) {
    throw std::invalid_argument(
        "scenario: capacity must be >= the largest channel demand");
  }
}

namespace {

void check_knob(double a, int capacity) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("scenario: utilization a must be finite and >= 0");
  }
  if (capacity < 3) {
    throw std::invalid_argument("scenario: capacity must be at least 3");
  }
}

}  // namespace

Scenario build_equal_rate_scenario(double a, int capacity) {
  check_knob(a, capacity);
  Scenario sc;
  sc.capacity = capacity;
  sc.aggregate_utilization = a;
  sc.classes = {
      {1, "conversational", 1, a, 1.0},
      {2, "interactive", 2, a, 1.0},
      {3, "background", 3, a, 1.0},
  };
  return sc;
}

Scenario build_utilization_scenario(double a, int capacity) {
  check_knob(a, capacity);
  // Call mix: most arrivals are narrow conversational calls; wide classes
  // arrive rarely but hold longer (mean holding 1, 2, 4). Each class offers
  // share_i * b_i / mu_i channel-time per call-arrival unit, so the total
  // rate follows from the requested load fraction a.
  constexpr double share[3] = {0.7, 0.2, 0.1};
  constexpr double mu[3] = {1.0, 0.5, 0.25};
  double per_call = share[0] * 1 / mu[0] + share[1] * 2 / mu[1] + share[2] * 3 / mu[2];
  double total_rate = a * capacity / per_call;
  Scenario sc;
  sc.capacity = capacity;
  sc.aggregate_utilization = a;
  sc.classes = {
      {1, "conversational", 1, share[0] * total_rate, mu[0]},
      {2, "interactive", 2, share[1] * total_rate, mu[1]},
      {3, "background", 3, share[2] * total_rate, mu[2]},
  };
  return sc;
}

double offered_load_fraction(const Scenario& sc) {
  double load = 0.0;
  for (const auto& cls : sc.classes) {
    load += utilization(cls) * cls.channel_demand;
  }
  return load / sc.capacity;
}

Config scenario_to_config(const Scenario& sc) {
  Config cfg;
  cfg.set_int("capacity", sc.capacity);
  cfg.set_double("utilization", sc.aggregate_utilization);
  for (const auto& cls : sc.classes) {
    std::string p = "class." + std::to_string(cls.id) + ".";
    cfg.set(p + "name", cls.name);
    cfg.set_int(p + "demand", cls.channel_demand);
    cfg.set_double(p + "lambda", cls.arrival_rate);
    cfg.set_double(p + "mu", cls.service_rate);
  }
  return cfg;
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario sc;
  sc.capacity = cfg.get_int("capacity");
  std::set<int> ids;
  for (const auto& key : cfg.keys_with_prefix("class.")) {
    std::size_t dot = key.find('.', 6);
    if (dot == std::string::npos) {
      throw std::invalid_argument("scenario config: malformed key: " + key);
    }
    ids.insert(std::stoi(key.substr(6, dot - 6)));
  }
  if (ids.empty()) {
    throw std::invalid_argument("scenario config: no class.<id>.* entries");
  }
  for (int id : ids) {
    std::string p = "class." + std::to_string(id) + ".";
    TrafficClass cls;
    cls.id = id;
    cls.name = cfg.get(p + "name");
    cls.channel_demand = cfg.get_int(p + "demand");
    cls.arrival_rate = cfg.get_double(p + "lambda");
    cls.service_rate = cfg.get_double(p + "mu");
    sc.classes.push_back(cls);
  }
  validate(sc);
  sc.aggregate_utilization =
      cfg.get_double_or("utilization", offered_load_fraction(sc));
  return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
  scenario_to_config(sc).save_file(path);
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_config(Config::parse_file(path));
}

}  // namespace caclab
