#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>

#include "caclab/config.hpp"
#include "caclab/random.hpp"

using namespace caclab;

TEST_CASE("config parses keys, comments and blanks") {
  Config cfg = Config::parse_string(
      "# header comment\n"
      "capacity = 50\n"
      "\n"
      "class.1.lambda = 0.25   # trailing comment\n"
      "class.1.name = conversational\n");
  CHECK(cfg.size() == 3);
  CHECK(cfg.has("capacity"));
  CHECK(cfg.get_int("capacity") == 50);
  CHECK(cfg.get_double("class.1.lambda") == doctest::Approx(0.25));
  CHECK(cfg.get("class.1.name") == "conversational");
  CHECK_FALSE(cfg.has("missing"));
  CHECK(cfg.get_or("missing", "fallback") == "fallback");
  CHECK(cfg.get_double_or("missing", 1.5) == 1.5);
  CHECK(cfg.get_int_or("missing", 7) == 7);
}

TEST_CASE("config rejects malformed input and missing keys") {
  CHECK_THROWS_AS(Config::parse_string("no equals sign\n"),
                  std::invalid_argument);
  Config cfg;
  CHECK_THROWS_AS(cfg.get("absent"), std::out_of_range);
  CHECK_THROWS_AS(Config::parse_string("x = abc\n").get_double("x"),
                  std::invalid_argument);
}

TEST_CASE("config serialization is sorted and round-trips") {
  Config cfg;
  cfg.set("zeta", "last");
  cfg.set_double("alpha", 1.0 / 3.0);
  cfg.set_int("mid.count", 42);
  std::string text = cfg.serialize();
  CHECK(text.find("alpha") < text.find("mid.count"));
  CHECK(text.find("mid.count") < text.find("zeta"));

  Config back = Config::parse_string(text);
  CHECK(back.size() == cfg.size());
  CHECK(back.get_double("alpha") == 1.0 / 3.0);
  CHECK(back.get_int("mid.count") == 42);
  CHECK(back.get("zeta") == "last");
  CHECK(back.serialize() == text);
}

TEST_CASE("config file round trip") {
  Config cfg;
  cfg.set_double("pi.ish", 3.14159);
  cfg.set("name", "cell");
  std::string path = "test_config_tmp.cfg";
  cfg.save_file(path);
  Config back = Config::parse_file(path);
  CHECK(back.serialize() == cfg.serialize());
  std::remove(path.c_str());
  CHECK_THROWS_AS(Config::parse_file("does_not_exist.cfg"),
                  std::runtime_error);
}

TEST_CASE("keys_with_prefix filters and sorts") {
  Config cfg;
  cfg.set("class.2.lambda", "1");
  cfg.set("class.1.lambda", "1");
  cfg.set("capacity", "50");
  auto keys = cfg.keys_with_prefix("class.");
  REQUIRE(keys.size() == 2);
  CHECK(keys[0] == "class.1.lambda");
  CHECK(keys[1] == "class.2.lambda");
  CHECK(cfg.keys_with_prefix("nope").empty());
}

TEST_CASE("format_double round-trips binary64 exactly") {
  const double values[] = {0.0,        1.0 / 3.0, 0.1,  1e-300,
                           1.25e300,   -7.5,      2e-9, 123456789.123456789};
  for (double v : values) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("mix64 and derive_seed separate streams deterministically") {
  CHECK(mix64(1) == mix64(1));
  CHECK(mix64(1) != mix64(2));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  RandomStream a(derive_seed(7, 0));
  RandomStream b(derive_seed(7, 0));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and matches across equal seeds") {
  RandomStream rng(42);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("exponential has the requested mean") {
  RandomStream rng(123);
  double rate = 2.5;
  double sum = 0.0;
  int n = 200000;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  double mean = sum / n;
  CHECK(mean == doctest::Approx(1.0 / rate).epsilon(0.02));
  CHECK(std::isinf(rng.exponential(0.0)));
}

TEST_CASE("truncated normal respects bounds and stays centered") {
  RandomStream rng(9);
  double sum = 0.0;
  int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = rng.truncated_normal(0.0, 0.5, -1.0, 1.0);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    sum += v;
  }
  CHECK(std::abs(sum / n) < 0.02);
}

TEST_CASE("below covers the whole range") {
  RandomStream rng(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t v = rng.below(6);
    CHECK(v < 6);
    seen.insert(v);
  }
  CHECK(seen.size() == 6);
}
