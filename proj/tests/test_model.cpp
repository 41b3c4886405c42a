#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "aoi/model.hpp"

using namespace aoi;

namespace {

// Frequency of `event` over n iid draws, for checking closed forms against
// brute-force sampling within 3 binomial standard errors.
template <typename F>
double frequency(F&& event, int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (event(gen, unit_exp)) ++hits;
  return double(hits) / n;
}

double three_se(double p, int n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_SUITE("model-core") {

TEST_CASE("rate threshold") {
  CHECK(model::epsilon_threshold(1.0, 1.0).epsilon == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(model::epsilon_threshold(0.0, 5.0).epsilon == 0.0);
  CHECK(model::epsilon_threshold(2.0, 1.0).epsilon == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(model::epsilon_threshold(2.0, 2.0).epsilon == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(model::epsilon_threshold(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(model::epsilon_threshold(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("primary success closed form") {
  CHECK(model::primary_success_prob(1.0, 0.0) == 1.0);
  CHECK(model::primary_success_prob(10.0, 1.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(model::primary_success_prob(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("primary success vs sampled channel") {
  const double power = 10.0, eps = 1.0;
  const int n = 1'000'000;
  double p = model::primary_success_prob(power, eps);
  double f = frequency([&](auto& g, auto& d) { return power * d(g) > eps; }, n, 20260821u);
  CHECK(std::fabs(f - p) <= three_se(p, n));
}

TEST_CASE("interference-hit secondary success closed form") {
  CHECK(model::interfered_secondary_success(3.0, 7.0, 0.0) == 1.0);
  double expect = std::exp(-0.1) / 2.0;  // e^{-eps/Ps} / (1 + P eps / Ps)
  CHECK(model::interfered_secondary_success(10.0, 10.0, 1.0) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(model::interfered_secondary_success(10.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("interference-hit secondary success vs sampled channels") {
  const double pp = 10.0, ps = 10.0, eps = 1.0;
  const int n = 1'000'000;
  double theta = model::interfered_secondary_success(pp, ps, eps);
  double f = frequency(
      [&](auto& g, auto& d) {
        double gp = d(g), gs = d(g);
        return ps * gs > eps * (pp * gp + 1.0);
      },
      n, 7u);
  CHECK(std::fabs(f - theta) <= three_se(theta, n));
}

TEST_CASE("secondary is never likelier than an interference-free link") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  for (int i = 0; i < 200; ++i) {
    double pp = u(gen), ps = u(gen), eps = u(gen) / 10.0;
    double theta = model::interfered_secondary_success(pp, ps, eps);
    double clear = std::exp(-eps / ps);
    CHECK(theta <= clear + 1e-15);
    CHECK(theta > 0.0);
  }
  // Equality only without a rate requirement.
  CHECK(model::interfered_secondary_success(5.0, 5.0, 0.0) == 1.0);
  CHECK(model::interfered_secondary_success(5.0, 5.0, 1e-9) < 1.0);
}

TEST_CASE("arrival probability") {
  CHECK(model::arrival_prob(0.0, 7.0) == 0.0);
  CHECK(model::arrival_prob(0.1, 24.0) == doctest::Approx(1.0 - std::exp(-2.4)).epsilon(1e-12));
  CHECK_THROWS_AS(model::arrival_prob(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(model::arrival_prob(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("arrival probability vs sampled arrival process") {
  const double rate = 0.1, window = 24.0;
  const int n = 1'000'000;
  double p = model::arrival_prob(rate, window);
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> gap(rate);
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (gap(gen) <= window) ++hits;
  CHECK(std::fabs(double(hits) / n - p) <= three_se(p, n));
}

TEST_CASE("arrival probability is memoryless across window splits") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    double rate = u(gen), a = u(gen), b = u(gen);
    double whole = model::arrival_prob(rate, a + b);
    double split = 1.0 - (1.0 - model::arrival_prob(rate, a)) * (1.0 - model::arrival_prob(rate, b));
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("arrival probability is stable for tiny rate-window products") {
  double p = model::arrival_prob(1e-12, 1.0);
  CHECK(p == doctest::Approx(1e-12).epsilon(1e-9));
  CHECK(p > 0.0);
}

TEST_CASE("decibel conversion") {
  CHECK(model::db_to_linear(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(model::db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(model::db_to_linear(20.0) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(model::db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("success probabilities are monotone in power and threshold") {
  for (double eps : {0.1, 1.0, 3.0}) {
    double prev = 0.0;
    for (double p = 1.0; p <= 1e4; p *= 10.0) {
      double cur = model::primary_success_prob(p, eps);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
  for (double p : {1.0, 10.0, 100.0}) {
    double prev = 1.0;
    for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      double cur = model::interfered_secondary_success(p, p, eps);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("per-slot decode predicates agree with their closed forms") {
  const double pp = 10.0, ps = 5.0, eps = 1.5;
  const int n = 200'000;
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> d(1.0);
  int prim = 0, sec_busy = 0, sec_idle = 0;
  for (int i = 0; i < n; ++i) {
    model::ChannelGain gp{d(gen)}, gs{d(gen)};
    if (model::primary_decodes(gp, pp, eps)) ++prim;
    if (model::secondary_decodes(gs, gp, true, pp, ps, eps)) ++sec_busy;
    if (model::secondary_decodes(gs, gp, false, pp, ps, eps)) ++sec_idle;
  }
  double p1 = model::primary_success_prob(pp, eps);
  double th = model::interfered_secondary_success(pp, ps, eps);
  double free = std::exp(-eps / ps);
  CHECK(std::fabs(double(prim) / n - p1) <= three_se(p1, n));
  CHECK(std::fabs(double(sec_busy) / n - th) <= three_se(th, n));
  CHECK(std::fabs(double(sec_idle) / n - free) <= three_se(free, n));
}

TEST_CASE("system config validation") {
  model::SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.frame_length() == doctest::Approx(8.0).epsilon(1e-15));

  model::SystemConfig bad = cfg;
  bad.num_users = 7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.num_users = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.slot_duration = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.slot_duration = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.packet_bits = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.primary_power = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.secondary_power = -2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.arrival_rate_m = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.arrival_rate_partner = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Zero rates and zero bits are degenerate but legal.
  bad = cfg;
  bad.arrival_rate_m = 0.0;
  bad.packet_bits = 0.0;
  CHECK_NOTHROW(bad.validate());
}

}  // TEST_SUITE
