#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "caclab/traffic.hpp"

using namespace caclab;

TEST_CASE("equal-rate scenario wires three classes with demands 1,2,3") {
  Scenario sc = build_equal_rate_scenario(0.3, 10);
  REQUIRE(sc.classes.size() == 3);
  CHECK(sc.capacity == 10);
  CHECK(sc.aggregate_utilization == 0.3);
  for (int i = 0; i < 3; ++i) {
    const TrafficClass& cls = sc.classes[i];
    CHECK(cls.id == i + 1);
    CHECK(cls.channel_demand == i + 1);
    CHECK(cls.arrival_rate == doctest::Approx(0.3));
    CHECK(cls.service_rate == 1.0);
    CHECK(utilization(cls) == doctest::Approx(0.3));
  }
  CHECK(sc.classes[0].name == "conversational");
  CHECK(sc.classes[1].name == "interactive");
  CHECK(sc.classes[2].name == "background");
}

TEST_CASE("utilization scenario normalizes offered channel load") {
  for (double a : {0.1, 0.4, 0.7, 0.9}) {
    for (int cap : {20, 30, 50}) {
      Scenario sc = build_utilization_scenario(a, cap);
      // Call shares 0.7/0.2/0.1, mean holding 1/2/4: each arrival offers
      // 0.7*1*1 + 0.2*2*2 + 0.1*3*4 = 2.7 channel-time units on average.
      double total = a * cap / 2.7;
      CHECK(sc.classes[0].arrival_rate == doctest::Approx(0.7 * total));
      CHECK(sc.classes[1].arrival_rate == doctest::Approx(0.2 * total));
      CHECK(sc.classes[2].arrival_rate == doctest::Approx(0.1 * total));
      CHECK(sc.classes[0].service_rate == 1.0);
      CHECK(sc.classes[1].service_rate == 0.5);
      CHECK(sc.classes[2].service_rate == 0.25);
      CHECK(sc.aggregate_utilization == a);
      CHECK(offered_load_fraction(sc) == doctest::Approx(a).epsilon(1e-12));
    }
  }
}

TEST_CASE("scenario validation rejects bad shapes") {
  CHECK_THROWS_AS(build_equal_rate_scenario(0.3, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_equal_rate_scenario(-0.1, 10), std::invalid_argument);
  CHECK_NOTHROW(build_equal_rate_scenario(0.0, 3));

  Scenario sc = build_equal_rate_scenario(0.5, 10);
  sc.classes[1].service_rate = 0.0;
  CHECK_THROWS_AS(validate(sc), std::invalid_argument);

  sc = build_equal_rate_scenario(0.5, 10);
  sc.classes[2].channel_demand = 0;
  CHECK_THROWS_AS(validate(sc), std::invalid_argument);

  sc = build_equal_rate_scenario(0.5, 10);
  sc.classes[2].id = sc.classes[0].id;
  CHECK_THROWS_AS(validate(sc), std::invalid_argument);
}

TEST_CASE("zero arrival rate is a valid silent class") {
  Scenario sc = build_equal_rate_scenario(0.5, 10);
  sc.classes[1].arrival_rate = 0.0;
  CHECK_NOTHROW(validate(sc));
  RandomStream rng(1);
  CHECK(std::isinf(sample_interarrival(sc.classes[1], rng)));
}

TEST_CASE("interarrival and holding samples match their means") {
  TrafficClass cls;
  cls.id = 1;
  cls.name = "conversational";
  cls.channel_demand = 1;
  cls.arrival_rate = 4.0;
  cls.service_rate = 0.5;
  RandomStream rng(77);
  double arr = 0.0, hold = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    arr += sample_interarrival(cls, rng);
    hold += sample_holding(cls, rng);
  }
  CHECK(arr / n == doctest::Approx(1.0 / cls.arrival_rate).epsilon(0.02));
  CHECK(hold / n == doctest::Approx(1.0 / cls.service_rate).epsilon(0.02));
}

TEST_CASE("sample streams are reproducible per seed") {
  TrafficClass cls = build_equal_rate_scenario(0.7, 10).classes[2];
  RandomStream a(99), b(99), c(100);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 50; ++i) {
    double va = sample_interarrival(cls, a);
    double vb = sample_interarrival(cls, b);
    double vc = sample_interarrival(cls, c);
    all_equal = all_equal && (va == vb);
    any_diff = any_diff || (va != vc);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("scenario config round trip preserves every field") {
  Scenario sc = build_utilization_scenario(0.65, 40);
  Config cfg = scenario_to_config(sc);
  Scenario back = scenario_from_config(cfg);
  CHECK(back.capacity == sc.capacity);
  CHECK(back.aggregate_utilization ==
        doctest::Approx(sc.aggregate_utilization).epsilon(1e-12));
  REQUIRE(back.classes.size() == sc.classes.size());
  for (std::size_t i = 0; i < sc.classes.size(); ++i) {
    CHECK(back.classes[i].id == sc.classes[i].id);
    CHECK(back.classes[i].name == sc.classes[i].name);
    CHECK(back.classes[i].channel_demand == sc.classes[i].channel_demand);
    CHECK(back.classes[i].arrival_rate == sc.classes[i].arrival_rate);
    CHECK(back.classes[i].service_rate == sc.classes[i].service_rate);
  }
}

TEST_CASE("scenario file round trip") {
  Scenario sc = build_equal_rate_scenario(0.45, 25);
  std::string path = "test_traffic_tmp.cfg";
  save_scenario(sc, path);
  Scenario back = load_scenario(path);
  CHECK(back.capacity == 25);
  CHECK(back.classes[2].arrival_rate == sc.classes[2].arrival_rate);
  std::remove(path.c_str());
}
