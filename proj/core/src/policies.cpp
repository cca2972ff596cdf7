#include "caclab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace caclab {

void validate(const SystemState& state) {
  if (state.capacity <= 0)
    throw std::invalid_argument("state capacity must be positive");
  for (int n : state.occupied_per_class)
    if (n < 0) throw std::invalid_argument("occupied count negative");
  if (state.free_channels < 0 || state.free_channels > state.capacity)
    throw std::invalid_argument("free channels outside [0, capacity]");
  int calls = 0;
  for (int n : state.occupied_per_class) calls += n;
  if (calls > state.capacity - state.free_channels)
    throw std::invalid_argument("occupied calls exceed used channels");
}

SystemState make_state(const Scenario& sc, const std::array<int, 3>& occupied) {
  SystemState st;
  st.capacity = sc.capacity;
  st.occupied_per_class = occupied;
  int used = 0;
  for (std::size_t i = 0; i < occupied.size(); ++i)
    used += occupied[i] * sc.classes[i].channel_demand;
  st.free_channels = sc.capacity - used;
  validate(st);
  return st;
}

void validate(const ThresholdSet& t, int capacity) {
  if (!(0 < t.a1 && t.a1 < t.a2 && t.a2 < t.a3 && t.a3 <= capacity))
    throw std::invalid_argument(
        "thresholds must satisfy 0 < a1 < a2 < a3 <= capacity");
}

ThresholdSet thresholds_from_config(const Config& cfg) {
  ThresholdSet t;
  t.a1 = cfg.get_int("threshold.a1");
  t.a2 = cfg.get_int("threshold.a2");
  t.a3 = cfg.get_int("threshold.a3");
  return t;
}

Config thresholds_to_config(const ThresholdSet& t) {
  Config cfg;
  cfg.set_int("threshold.a1", t.a1);
  cfg.set_int("threshold.a2", t.a2);
  cfg.set_int("threshold.a3", t.a3);
  return cfg;
}

std::string to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "none";
    case RejectReason::Capacity: return "capacity";
    case RejectReason::ThresholdRegion: return "threshold-region";
    case RejectReason::PolicyScore: return "policy-score";
  }
  throw std::logic_error("unknown reject reason");
}

AdmissionDecision admit_decision() {
  return AdmissionDecision{Verdict::Admit, RejectReason::None};
}

AdmissionDecision reject_decision(RejectReason reason) {
  if (reason == RejectReason::None)
    throw std::logic_error("reject requires a reason");
  return AdmissionDecision{Verdict::Reject, reason};
}

AdmissionDecision decide_conventional(const SystemState& state,
                                      const TrafficClass& cls) {
  if (state.free_channels >= cls.channel_demand) return admit_decision();
  return reject_decision(RejectReason::Capacity);
}

AdmissionDecision decide_threshold(const SystemState& state,
                                   const TrafficClass& cls,
                                   const ThresholdSet& t) {
  const int f = state.free_channels;
  bool eligible = false;
  if (f >= t.a3) {
    eligible = true;
  } else if (f >= t.a2) {
    eligible = cls.id <= 2;
  } else if (f >= t.a1) {
    eligible = cls.id == 1;
  }
  if (!eligible) return reject_decision(RejectReason::ThresholdRegion);
  if (f < cls.channel_demand) return reject_decision(RejectReason::Capacity);
  return admit_decision();
}

// ---------------------------------------------------------------------------
// Fuzzy controller

double TriangularSet::membership(double x) const {
  if (x < left || x > right) return 0.0;
  if (x == peak) return 1.0;
  if (x < peak) return (x - left) / (peak - left);
  return (right - x) / (right - peak);
}

namespace {

TriangularSet tri(std::string label, double l, double p, double r) {
  return TriangularSet{std::move(label), l, p, r};
}

constexpr int kReject = 0;
constexpr int kWeak = 1;
constexpr int kStrong = 2;

}  // namespace

FuzzySystem default_fuzzy_system() {
  FuzzySystem sys;
  // High is deliberately narrow: the controller only intervenes near full
  // occupancy, reserving the last few channels for narrow calls. For a wide
  // (demand 3) call the Strong and Reject activations balance at occupancy
  // 1.12/1.24 ~ 0.903, so wide calls are turned away once the cell is more
  // than ~90% full while narrow calls are never score-rejected.
  sys.occupancy_sets = {tri("Low", -0.5, 0.0, 0.5), tri("Medium", 0.0, 0.5, 1.0),
                        tri("High", 0.88, 1.0, 1.12)};
  sys.demand_sets = {tri("Light", 0.0, 1.0, 2.0), tri("Medium", 1.0, 2.0, 3.0),
                     tri("Heavy", 2.0, 3.0, 4.0)};
  sys.output_sets = {tri("Reject", -0.2, 0.1, 0.4), tri("Weak", 0.2, 0.5, 0.8),
                     tri("StronglyAdmit", 0.6, 0.9, 1.2)};
  // Row = occupancy (Low, Medium, High), column = demand (Light, Medium,
  // Heavy). Consequents weaken monotonically along both axes.
  const int matrix[3][3] = {
      {kStrong, kStrong, kStrong},
      {kStrong, kStrong, kStrong},
      {kStrong, kWeak, kReject},
  };
  for (int o = 0; o < 3; ++o)
    for (int d = 0; d < 3; ++d) sys.rules.push_back(FuzzyRule{o, d, matrix[o][d]});
  return sys;
}

namespace {

void check_sets(const std::vector<TriangularSet>& sets, const char* what) {
  if (sets.empty()) throw std::invalid_argument(std::string(what) + " sets empty");
  for (const auto& s : sets) {
    if (!(s.left <= s.peak && s.peak <= s.right) || s.left == s.right)
      throw std::invalid_argument(std::string(what) + " set '" + s.label +
                                  "' is not a valid triangle");
  }
}

void check_coverage(const std::vector<TriangularSet>& sets, double lo,
                    double hi, const char* what) {
  for (int k = 0; k <= 1000; ++k) {
    double x = lo + (hi - lo) * k / 1000.0;
    bool covered = false;
    for (const auto& s : sets)
      if (s.membership(x) > 0.0) { covered = true; break; }
    if (!covered)
      throw std::invalid_argument(std::string(what) +
                                  " sets leave part of the domain uncovered");
  }
}

}  // namespace

void validate(const FuzzySystem& sys) {
  check_sets(sys.occupancy_sets, "occupancy");
  check_sets(sys.demand_sets, "demand");
  check_sets(sys.output_sets, "output");
  check_coverage(sys.occupancy_sets, 0.0, 1.0, "occupancy");
  check_coverage(sys.demand_sets, 1.0, 3.0, "demand");
  check_coverage(sys.output_sets, 0.0, 1.0, "output");
  if (sys.rules.empty()) throw std::invalid_argument("rule base empty");
  std::vector<char> seen(sys.occupancy_sets.size() * sys.demand_sets.size(), 0);
  for (const auto& r : sys.rules) {
    if (r.occupancy_set < 0 ||
        r.occupancy_set >= static_cast<int>(sys.occupancy_sets.size()) ||
        r.demand_set < 0 ||
        r.demand_set >= static_cast<int>(sys.demand_sets.size()) ||
        r.output_set < 0 ||
        r.output_set >= static_cast<int>(sys.output_sets.size()))
      throw std::invalid_argument("rule references a missing set");
    seen[r.occupancy_set * sys.demand_sets.size() + r.demand_set] = 1;
  }
  for (char s : seen)
    if (!s)
      throw std::invalid_argument(
          "rule base does not cover every antecedent combination");
}

static void sets_to_config(Config& cfg, const std::string& prefix,
                           const std::vector<TriangularSet>& sets) {
  cfg.set_int(prefix + ".count", static_cast<int>(sets.size()));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::string base = prefix + "." + std::to_string(i);
    cfg.set(base + ".label", sets[i].label);
    cfg.set_double(base + ".left", sets[i].left);
    cfg.set_double(base + ".peak", sets[i].peak);
    cfg.set_double(base + ".right", sets[i].right);
  }
}

static std::vector<TriangularSet> sets_from_config(const Config& cfg,
                                                   const std::string& prefix) {
  int count = cfg.get_int(prefix + ".count");
  std::vector<TriangularSet> sets;
  for (int i = 0; i < count; ++i) {
    std::string base = prefix + "." + std::to_string(i);
    TriangularSet s;
    s.label = cfg.get(base + ".label");
    s.left = cfg.get_double(base + ".left");
    s.peak = cfg.get_double(base + ".peak");
    s.right = cfg.get_double(base + ".right");
    sets.push_back(s);
  }
  return sets;
}

Config fuzzy_to_config(const FuzzySystem& sys) {
  Config cfg;
  sets_to_config(cfg, "fuzzy.occupancy", sys.occupancy_sets);
  sets_to_config(cfg, "fuzzy.demand", sys.demand_sets);
  sets_to_config(cfg, "fuzzy.output", sys.output_sets);
  cfg.set_int("fuzzy.rule.count", static_cast<int>(sys.rules.size()));
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    std::string base = "fuzzy.rule." + std::to_string(i);
    cfg.set_int(base + ".occupancy", sys.rules[i].occupancy_set);
    cfg.set_int(base + ".demand", sys.rules[i].demand_set);
    cfg.set_int(base + ".output", sys.rules[i].output_set);
  }
  return cfg;
}

FuzzySystem fuzzy_from_config(const Config& cfg) {
  FuzzySystem sys;
  sys.occupancy_sets = sets_from_config(cfg, "fuzzy.occupancy");
  sys.demand_sets = sets_from_config(cfg, "fuzzy.demand");
  sys.output_sets = sets_from_config(cfg, "fuzzy.output");
  int count = cfg.get_int("fuzzy.rule.count");
  for (int i = 0; i < count; ++i) {
    std::string base = "fuzzy.rule." + std::to_string(i);
    FuzzyRule r;
    r.occupancy_set = cfg.get_int(base + ".occupancy");
    r.demand_set = cfg.get_int(base + ".demand");
    r.output_set = cfg.get_int(base + ".output");
    sys.rules.push_back(r);
  }
  validate(sys);
  return sys;
}

static void describe_sets(std::ostringstream& out, const std::string& title,
                          const std::vector<TriangularSet>& sets) {
  out << title << ":\n";
  for (const auto& s : sets)
    out << "  " << s.label << "  tri(" << s.left << ", " << s.peak << ", "
        << s.right << ")\n";
}

std::string describe(const FuzzySystem& sys) {
  std::ostringstream out;
  describe_sets(out, "occupancy sets", sys.occupancy_sets);
  describe_sets(out, "demand sets", sys.demand_sets);
  describe_sets(out, "output sets", sys.output_sets);
  out << "rules:\n";
  for (const auto& r : sys.rules)
    out << "  if occupancy is " << sys.occupancy_sets[r.occupancy_set].label
        << " and demand is " << sys.demand_sets[r.demand_set].label
        << " then " << sys.output_sets[r.output_set].label << "\n";
  return out.str();
}

double fuzzy_infer(const FuzzySystem& sys, double occupancy_ratio, int demand) {
  if (!(occupancy_ratio >= 0.0 && occupancy_ratio <= 1.0))
    throw std::invalid_argument("occupancy ratio outside [0, 1]");
  if (demand < 1 || demand > 3)
    throw std::invalid_argument("demand outside {1, 2, 3}");

  std::vector<double> activation(sys.rules.size());
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    const auto& r = sys.rules[i];
    double occ = sys.occupancy_sets[r.occupancy_set].membership(occupancy_ratio);
    double dem = sys.demand_sets[r.demand_set].membership(double(demand));
    activation[i] = std::min(occ, dem);
  }

  // Centroid of the max-aggregated consequent, trapezoid rule on a fixed
  // 1001-point grid over [0, 1].
  constexpr int kPoints = 1001;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    double x = k / double(kPoints - 1);
    double mu = 0.0;
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
      if (activation[i] <= 0.0) continue;
      double m = std::min(activation[i],
                          sys.output_sets[sys.rules[i].output_set].membership(x));
      mu = std::max(mu, m);
    }
    double w = (k == 0 || k == kPoints - 1) ? 0.5 : 1.0;
    num += w * x * mu;
    den += w * mu;
  }
  if (den <= 0.0)
    throw std::runtime_error("fuzzy aggregation produced an empty output set");
  return num / den;
}

AdmissionDecision decide_fuzzy(const SystemState& state,
                               const TrafficClass& cls,
                               const FuzzySystem& sys) {
  if (state.free_channels < cls.channel_demand)
    return reject_decision(RejectReason::Capacity);
  double ratio =
      double(state.capacity - state.free_channels) / double(state.capacity);
  double score = fuzzy_infer(sys, ratio, cls.channel_demand);
  if (score >= 0.5) return admit_decision();
  return reject_decision(RejectReason::PolicyScore);
}

}  // namespace caclab
