#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/model.hpp"
#include "aoi/sim.hpp"

using namespace aoi;

namespace {

model::SystemConfig make_cfg(int users, double slot, double bits, double p_db, double lam,
                             double lam_p) {
  model::SystemConfig cfg;
  cfg.num_users = users;
  cfg.slot_duration = slot;
  cfg.packet_bits = bits;
  cfg.primary_power = model::db_to_linear(p_db);
  cfg.secondary_power = cfg.primary_power;
  cfg.arrival_rate_m = lam;
  cfg.arrival_rate_partner = lam_p;
  return cfg;
}

bool same_user_result(const sim::UserResult& a, const sim::UserResult& b) {
  return std::memcmp(&a.avg_aoi, &b.avg_aoi, sizeof(double)) == 0 &&
         a.primary_attempts == b.primary_attempts &&
         a.primary_successes == b.primary_successes &&
         a.secondary_attempts == b.secondary_attempts &&
         a.secondary_successes == b.secondary_successes && a.deliveries == b.deliveries &&
         a.batch_aoi == b.batch_aoi;
}

// Rebuilds the age integral of one user from its delivery log by midpoint
// sampling. The age curve is piecewise linear with kinks only at slot
// boundaries, and the sampling grid subdivides every slot evenly, so the
// midpoint rule is exact up to rounding.
double riemann_avg(const std::vector<sim::DeliveryEvent>& trace, int user, double end,
                   double slot, int cells_per_slot) {
  std::vector<sim::DeliveryEvent> mine;
  for (const sim::DeliveryEvent& ev : trace)
    if (ev.user == user) mine.push_back(ev);
  double dt = slot / cells_per_slot;
  std::int64_t steps = std::llround(end / dt);
  double area = 0.0, u = 0.0;
  size_t next = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    double t = (k + 0.5) * dt;
    while (next < mine.size() && mine[next].deliver_time <= t) u = mine[next++].gen_time;
    area += (t - u) * dt;
  }
  return area / end;
}

}  // namespace

TEST_SUITE("sim-engine") {

TEST_CASE("scheme names round trip") {
  using sim::SchemeKind;
  for (SchemeKind s : {SchemeKind::TDMA_NRT, SchemeKind::TDMA_RT, SchemeKind::NOMA_NRT,
                       SchemeKind::NOMA_RT}) {
    auto parsed = sim::parse_scheme(sim::scheme_name(s));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == s);
  }
  CHECK(sim::scheme_name(SchemeKind::NOMA_RT) == "noma-rt");
  CHECK(!sim::parse_scheme("csma").has_value());
  CHECK(!sim::parse_scheme("").has_value());
}

TEST_CASE("identical seeds reproduce runs bit for bit") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.5, 0.3);
  for (sim::SchemeKind s : {sim::SchemeKind::TDMA_NRT, sim::SchemeKind::TDMA_RT,
                            sim::SchemeKind::NOMA_NRT, sim::SchemeKind::NOMA_RT}) {
    sim::SimResult a = sim::simulate(cfg, s, 2000, 77);
    sim::SimResult b = sim::simulate(cfg, s, 2000, 77);
    CHECK(same_user_result(a.users[0], b.users[0]));
    CHECK(same_user_result(a.users[1], b.users[1]));
    CHECK(a.rng_algorithm == b.rng_algorithm);
  }
}

TEST_CASE("disjoint seeds produce distinct sample paths") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.5, 0.5);
  std::set<double> seen;
  for (std::uint64_t seed = 1; seed <= 8; ++seed)
    seen.insert(sim::simulate(cfg, sim::SchemeKind::NOMA_RT, 2000, seed).users[0].avg_aoi);
  CHECK(seen.size() == 8);
}

TEST_CASE("rng provenance is recorded") {
  model::SystemConfig cfg = make_cfg(2, 1.0, 1.0, 10.0, 0.5, 0.5);
  sim::SimResult r = sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 200, 1);
  CHECK(r.rng_algorithm == "mt19937_64/splitmix64[user,purpose]");
  CHECK(r.seed == 1);
  CHECK(r.frames == 200);
}

TEST_CASE("argument validation") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.5, 0.5);
  CHECK_THROWS_AS(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 100, 1, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 100, 1, 200),
                  std::invalid_argument);
  model::SystemConfig bad = cfg;
  bad.num_users = 5;
  CHECK_THROWS_AS(sim::simulate(bad, sim::SchemeKind::TDMA_NRT, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(sim::replicate(cfg, sim::SchemeKind::TDMA_NRT, 100, {}), std::invalid_argument);
}

TEST_CASE("warmup defaults to one percent, floored and capped") {
  model::SystemConfig cfg = make_cfg(2, 1.0, 1.0, 10.0, 0.5, 0.5);
  CHECK(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 50, 1).warmup_frames == 49);
  CHECK(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 5000, 1).warmup_frames == 100);
  CHECK(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 20000, 1).warmup_frames == 200);
  CHECK(sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 300, 1, 7).warmup_frames == 7);
}

TEST_CASE("batch means average back to the run mean") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.5, 0.5);
  sim::SimResult r = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 5000, 3);
  REQUIRE(r.users[0].batch_aoi.size() == 16);
  double sum = 0.0;
  for (double b : r.users[0].batch_aoi) sum += b;
  CHECK(sum / 16.0 == doctest::Approx(r.users[0].avg_aoi).epsilon(1e-9));

  sim::SimResult tiny = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 110, 3, 100);
  CHECK(tiny.users[0].batch_aoi.size() == 10);
}

TEST_CASE("sawtooth area equals a fine direct integration of the age curve") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 5.0, 0.4, 0.7);
  for (sim::SchemeKind s : {sim::SchemeKind::TDMA_NRT, sim::SchemeKind::NOMA_RT}) {
    std::vector<sim::DeliveryEvent> trace;
    sim::SimResult r = sim::simulate(cfg, s, 200, 5, 0, &trace);
    double end = 200 * cfg.frame_length();
    CHECK(r.users[0].avg_aoi ==
          doctest::Approx(riemann_avg(trace, 0, end, cfg.slot_duration, 4096)).epsilon(1e-6));
    CHECK(r.users[1].avg_aoi ==
          doctest::Approx(riemann_avg(trace, 1, end, cfg.slot_duration, 4096)).epsilon(1e-6));
  }
}

TEST_CASE("delivered generations advance strictly") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.8, 0.8);
  std::vector<sim::DeliveryEvent> trace;
  sim::simulate(cfg, sim::SchemeKind::NOMA_RT, 3000, 11, 0, &trace);
  REQUIRE(!trace.empty());
  double last_gen[2] = {-1.0, -1.0};
  double last_t = 0.0;
  for (const sim::DeliveryEvent& ev : trace) {
    CHECK(ev.deliver_time >= last_t);
    last_t = ev.deliver_time;
    CHECK(ev.gen_time < ev.deliver_time);
    CHECK(ev.gen_time > last_gen[ev.user]);
    last_gen[ev.user] = ev.gen_time;
  }
}

TEST_CASE("a zero rate threshold never loses a transmission") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 0.0, 0.0, 0.5, 0.5);
  sim::SimResult r = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 2000, 2);
  CHECK(r.users[0].primary_attempts > 0);
  CHECK(r.users[0].p_primary_emp == 1.0);
  CHECK(r.users[0].p_secondary_emp == 1.0);
  CHECK(r.users[0].primary_successes == r.users[0].primary_attempts);
}

TEST_CASE("a silent source only ages") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.0, 0.0);
  sim::SimResult r = sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 500, 1);
  CHECK(r.users[0].deliveries == 0);
  CHECK(std::isnan(r.users[0].p_primary_emp));
  double w = r.warmup_frames * cfg.frame_length();
  double end = 500 * cfg.frame_length();
  CHECK(r.users[0].avg_aoi == doctest::Approx((end + w) / 2.0).epsilon(1e-9));
}

TEST_CASE("retransmission never delivers less on the same draws") {
  model::SystemConfig cfg = make_cfg(8, 3.0, 1.0, 0.0, 0.1, 0.1);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    sim::SimResult nrt = sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 20000, seed);
    sim::SimResult rt = sim::simulate(cfg, sim::SchemeKind::TDMA_RT, 20000, seed);
    for (int u : {0, 1}) CHECK(rt.users[u].deliveries >= nrt.users[u].deliveries);
  }
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    sim::SimResult nrt = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 20000, seed);
    sim::SimResult rt = sim::simulate(cfg, sim::SchemeKind::NOMA_RT, 20000, seed);
    CHECK(rt.users[0].deliveries + rt.users[1].deliveries >=
          nrt.users[0].deliveries + nrt.users[1].deliveries);
  }
}

TEST_CASE("sample moments recompose the sample mean age") {
  model::SystemConfig cfg = make_cfg(8, 3.0, 1.0, 10.0, 0.1, 0.1);
  for (sim::SchemeKind s : {sim::SchemeKind::TDMA_NRT, sim::SchemeKind::TDMA_RT,
                            sim::SchemeKind::NOMA_NRT, sim::SchemeKind::NOMA_RT}) {
    sim::UserResult u = sim::simulate(cfg, s, 20000, 4).users[0];
    double recomposed =
        u.mean_system_time + u.mean_sq_interdelivery / (2.0 * u.mean_interdelivery);
    CHECK(u.avg_aoi == doctest::Approx(recomposed).epsilon(0.01));
  }
}

TEST_CASE("simulation tracks the closed forms within two percent") {
  model::SystemConfig cfg = make_cfg(8, 3.0, 1.0, 20.0, 0.1, 0.1);
  using Fn = analytic::AoiBreakdown (*)(const model::SystemConfig&);
  std::pair<sim::SchemeKind, Fn> cases[] = {
      {sim::SchemeKind::TDMA_NRT, analytic::tdma_nrt_aoi},
      {sim::SchemeKind::TDMA_RT, analytic::tdma_rt_aoi},
      {sim::SchemeKind::NOMA_NRT, analytic::noma_nrt_aoi},
      {sim::SchemeKind::NOMA_RT, analytic::noma_rt_aoi},
  };
  for (auto [scheme, fn] : cases) {
    double want = fn(cfg).avg_aoi;
    double got = sim::simulate(cfg, scheme, 100000, 1).users[0].avg_aoi;
    CHECK(got == doctest::Approx(want).epsilon(0.02));
  }
}

TEST_CASE("empirical link frequencies match the closed forms within 3 SE") {
  model::SystemConfig cfg = make_cfg(8, 3.0, 1.0, 10.0, 0.1, 0.1);
  double eps = model::epsilon_threshold(cfg.packet_bits, cfg.slot_duration).epsilon;
  double pmm = model::primary_success_prob(cfg.primary_power, eps);

  sim::SimResult nrt = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 30000, 9);
  sim::LinkEstimate est = sim::empirical_success_probs(nrt);
  CHECK(std::fabs(est.stats.p_primary - pmm) <= 3.0 * est.se_primary);
  CHECK(std::fabs(est.stats.p_partner_primary - pmm) <= 3.0 * est.se_partner_primary);
  double mix = analytic::noma_nrt_secondary_success(cfg);
  CHECK(std::fabs(est.stats.p_secondary_m - mix) <= 3.0 * est.se_secondary_m);
  CHECK(std::isnan(est.stats.theta));

  sim::SimResult rt = sim::simulate(cfg, sim::SchemeKind::NOMA_RT, 100000, 9);
  sim::LinkEstimate rt_est = sim::empirical_success_probs(rt);
  double fixed_point = analytic::noma_rt_secondary_success(cfg).p_secondary_m;
  CHECK(std::fabs(rt_est.stats.p_secondary_m - fixed_point) <= 3.0 * rt_est.se_secondary_m);

  sim::SimResult tdma = sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 30000, 9);
  sim::LinkEstimate tdma_est = sim::empirical_success_probs(tdma);
  CHECK(std::fabs(tdma_est.stats.p_primary - pmm) <= 3.0 * tdma_est.se_primary);
  CHECK(std::isnan(tdma_est.stats.p_secondary_m));
}

TEST_CASE("too few attempts refuse to estimate") {
  model::SystemConfig cfg = make_cfg(8, 3.0, 1.0, 10.0, 0.001, 0.001);
  sim::SimResult r = sim::simulate(cfg, sim::SchemeKind::NOMA_NRT, 120, 1);
  CHECK_THROWS_AS(sim::empirical_success_probs(r), sim::UnderSampled);
}

TEST_CASE("replication pools batch means across seeds") {
  model::SystemConfig cfg = make_cfg(4, 1.0, 1.0, 10.0, 0.5, 0.5);
  sim::Replicated one = sim::replicate(cfg, sim::SchemeKind::NOMA_NRT, 4000, {42});
  REQUIRE(one.runs.size() == 1);
  CHECK(one.pooled.mean_aoi == one.runs[0].users[0].avg_aoi);
  CHECK(one.pooled.se > 0.0);
  CHECK(one.pooled.ci95 == doctest::Approx(1.959963985 * one.pooled.se).epsilon(1e-12));

  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 16; ++s) seeds.push_back(s);
  sim::Replicated many = sim::replicate(cfg, sim::SchemeKind::NOMA_NRT, 4000, seeds);
  int contained = 0;
  for (const sim::SimResult& run : many.runs) {
    const std::vector<double>& b = run.users[0].batch_aoi;
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= b.size();
    double var = 0.0;
    for (double v : b) var += (v - mean) * (v - mean);
    double se = std::sqrt(var / (b.size() - 1) / b.size());
    if (std::fabs(many.pooled.mean_aoi - mean) <= 1.96 * se) ++contained;
  }
  CHECK(contained >= 13);  // a 95% interval per seed, 16 seeds
}

TEST_CASE("saturated arrivals ride just above the service floor") {
  // At 50 arrivals per frame the queueing delay is gone but the sampling
  // offset 1/lambda is not; the mean age exceeds T + MT/2 by about 3%.
  model::SystemConfig cfg = make_cfg(8, 3.0, 0.0, 0.0, 50.0 / 24.0, 50.0 / 24.0);
  double analytic_aoi = analytic::tdma_nrt_aoi(cfg).avg_aoi;
  double simulated = sim::simulate(cfg, sim::SchemeKind::TDMA_NRT, 100000, 6).users[0].avg_aoi;
  double floor = cfg.slot_duration + cfg.frame_length() / 2.0;
  CHECK(simulated == doctest::Approx(analytic_aoi).epsilon(0.01));
  CHECK(std::fabs(simulated - floor) / floor > 0.02);

  // Pushing the rate two orders further actually lands on the floor.
  model::SystemConfig hot = make_cfg(2, 1.0, 0.0, 0.0, 800.0, 800.0);
  double hot_sim = sim::simulate(hot, sim::SchemeKind::TDMA_NRT, 10000, 6).users[0].avg_aoi;
  double hot_floor = hot.slot_duration + hot.frame_length() / 2.0;
  CHECK(hot_sim == doctest::Approx(hot_floor).epsilon(0.01));
}

}  // TEST_SUITE
