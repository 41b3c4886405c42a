#include "aoi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace aoi::sim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64[user,purpose]";

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, int user, int purpose) {
  return std::mt19937_64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(user * 2 + purpose + 1)));
}

// Uniform in (0,1), never returning an endpoint, so -log is always finite.
double u01(std::mt19937_64& g) { return ((g() >> 11) + 0.5) * 0x1p-53; }

double exp_draw(std::mt19937_64& g) { return -std::log(u01(g)); }

// Integrates t - u over sub-intervals, clipped to the post-warmup horizon
// and split across equal-length batches.
struct AreaAccount {
  double start = 0.0;
  double stop = 0.0;
  double batch_len = 0.0;
  double area = 0.0;
  std::vector<double> batch;

  AreaAccount(double warmup_time, double end_time, int batches)
      : start(warmup_time),
        stop(end_time),
        batch_len((end_time - warmup_time) / batches),
        batch(batches, 0.0) {}

  void add(double a, double b, double u) {
    a = std::max(a, start);
    b = std::min(b, stop);
    if (b <= a) return;
    int k = std::min(static_cast<int>((a - start) / batch_len), static_cast<int>(batch.size()) - 1);
    double lo = a;
    while (lo < b) {
      double edge = start + (k + 1) * batch_len;
      double hi = k + 1 == static_cast<int>(batch.size()) ? b : std::min(b, edge);
      double piece = (hi - lo) * (0.5 * (lo + hi) - u);
      batch[k] += piece;
      area += piece;
      lo = hi;
      ++k;
    }
  }
};

struct Stats {
  std::int64_t primary_attempts = 0, primary_successes = 0;
  std::int64_t secondary_attempts = 0, secondary_successes = 0;
  std::int64_t deliveries = 0;
  double sum_s = 0.0, sum_d = 0.0, sum_d2 = 0.0;
  double prev_delivery = 0.0;  // phantom delivery at time 0
  double last_t = 0.0;         // integration frontier
};

double ratio(std::int64_t num, std::int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : kNan;
}

double binom_se(std::int64_t successes, std::int64_t attempts) {
  if (attempts <= 0) return kNan;
  double p = static_cast<double>(successes) / static_cast<double>(attempts);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(attempts));
}

}  // namespace

std::string_view scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::TDMA_NRT: return "tdma-nrt";
    case SchemeKind::TDMA_RT: return "tdma-rt";
    case SchemeKind::NOMA_NRT: return "noma-nrt";
    case SchemeKind::NOMA_RT: return "noma-rt";
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) {
  if (name == "tdma-nrt") return SchemeKind::TDMA_NRT;
  if (name == "tdma-rt") return SchemeKind::TDMA_RT;
  if (name == "noma-nrt") return SchemeKind::NOMA_NRT;
  if (name == "noma-rt") return SchemeKind::NOMA_RT;
  return std::nullopt;
}

SimResult simulate(const model::SystemConfig& cfg, SchemeKind scheme, std::int64_t frames,
                   std::uint64_t seed, std::int64_t warmup_frames,
                   std::vector<DeliveryEvent>* trace) {
  cfg.validate();
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  if (warmup_frames < 0) warmup_frames = std::min(std::max<std::int64_t>(100, frames / 100), frames - 1);
  if (warmup_frames >= frames) throw std::invalid_argument("warmup_frames must be < frames");

  const double slot = cfg.slot_duration;
  const double mt = cfg.frame_length();
  const double half = mt / 2.0;
  const double eps = model::epsilon_threshold(cfg.packet_bits, slot).epsilon;
  const bool noma = is_noma(scheme);
  const bool rt = is_rt(scheme);
  const double lambda[2] = {cfg.arrival_rate_m, cfg.arrival_rate_partner};

  const double warmup_time = static_cast<double>(warmup_frames) * mt;
  const double end_time = static_cast<double>(frames) * mt;
  const int batches = static_cast<int>(std::min<std::int64_t>(16, frames - warmup_frames));

  std::mt19937_64 arr_rng[2] = {make_stream(seed, 0, 0), make_stream(seed, 1, 0)};
  std::mt19937_64 chan_rng[2] = {make_stream(seed, 0, 1), make_stream(seed, 1, 1)};

  UserState st[2];
  Stats stats[2];
  AreaAccount account[2] = {AreaAccount(warmup_time, end_time, batches),
                            AreaAccount(warmup_time, end_time, batches)};
  for (int u = 0; u < 2; ++u)
    st[u].next_arrival = lambda[u] > 0.0 ? exp_draw(arr_rng[u]) / lambda[u] : kInf;

  auto advance_arrivals = [&](int u, double t) {
    while (st[u].next_arrival <= t) {
      st[u].buffer = st[u].next_arrival;
      st[u].next_arrival += exp_draw(arr_rng[u]) / lambda[u];
    }
  };

  auto deliver = [&](int u, double gen, double t1) {
    account[u].add(stats[u].last_t, t1, st[u].last_delivered_gen);
    stats[u].last_t = t1;
    st[u].last_delivered_gen = gen;
    st[u].aoi_area = account[u].area;
    if (t1 > warmup_time) {
      stats[u].deliveries += 1;
      double d = t1 - stats[u].prev_delivery;
      stats[u].sum_s += t1 - gen;
      stats[u].sum_d += d;
      stats[u].sum_d2 += d * d;
    }
    stats[u].prev_delivery = t1;
    st[u].deliveries = stats[u].deliveries;
    if (trace) trace->push_back({u, gen, t1});
  };

  for (std::int64_t frame = 0; frame < frames; ++frame) {
    double frame_start = static_cast<double>(frame) * mt;
    for (int s = 0; s < 2; ++s) {
      int owner = s;
      int other = 1 - s;
      double t0 = frame_start + s * half;
      double t1 = t0 + slot;
      bool counted = t1 > warmup_time;

      advance_arrivals(owner, t0);
      if (noma) advance_arrivals(other, t0);

      if (st[owner].buffer) {
        st[owner].in_flight = st[owner].buffer;
        st[owner].buffer.reset();
      }
      st[owner].delta_flags[s] = st[owner].in_flight.has_value();
      if (noma) {
        if (st[other].buffer) {
          st[other].in_flight = st[other].buffer;
          st[other].buffer.reset();
        }
        st[other].delta_flags[s] = st[other].in_flight.has_value();
      } else {
        st[other].delta_flags[s] = false;
      }

      model::ChannelGain g_owner{exp_draw(chan_rng[owner])};
      bool owner_tx = st[owner].in_flight.has_value();
      bool owner_ok = owner_tx && model::primary_decodes(g_owner, cfg.primary_power, eps);
      if (owner_tx && counted) {
        stats[owner].primary_attempts += 1;
        if (owner_ok) stats[owner].primary_successes += 1;
      }

      bool other_tx = false, other_ok = false;
      if (noma) {
        model::ChannelGain g_other{exp_draw(chan_rng[other])};
        other_tx = st[other].in_flight.has_value();
        other_ok = other_tx && model::secondary_decodes(g_other, g_owner, owner_tx,
                                                        cfg.primary_power, cfg.secondary_power, eps);
        if (other_tx && counted) {
          stats[other].secondary_attempts += 1;
          if (other_ok) stats[other].secondary_successes += 1;
        }
      }

      if (owner_ok) deliver(owner, *st[owner].in_flight, t1);
      if (other_ok) deliver(other, *st[other].in_flight, t1);

      advance_arrivals(owner, t1);
      if (noma) advance_arrivals(other, t1);
      auto settle = [&](int u, bool ok) {
        if (rt && !ok && st[u].in_flight && !st[u].buffer) st[u].buffer = st[u].in_flight;
        st[u].in_flight.reset();
      };
      settle(owner, owner_ok);
      if (noma) settle(other, other_ok);
    }
  }

  SimResult out;
  out.scheme = scheme;
  out.frames = frames;
  out.seed = seed;
  out.warmup_frames = warmup_frames;
  out.rng_algorithm = kRngAlgorithm;
  double span = end_time - warmup_time;
  for (int u = 0; u < 2; ++u) {
    account[u].add(stats[u].last_t, end_time, st[u].last_delivered_gen);
    UserResult& r = out.users[u];
    r.avg_aoi = account[u].area / span;
    r.primary_attempts = stats[u].primary_attempts;
    r.primary_successes = stats[u].primary_successes;
    r.p_primary_emp = ratio(stats[u].primary_successes, stats[u].primary_attempts);
    r.se_primary = binom_se(stats[u].primary_successes, stats[u].primary_attempts);
    r.secondary_attempts = stats[u].secondary_attempts;
    r.secondary_successes = stats[u].secondary_successes;
    r.p_secondary_emp =
        noma ? ratio(stats[u].secondary_successes, stats[u].secondary_attempts) : kNan;
    r.se_secondary = noma ? binom_se(stats[u].secondary_successes, stats[u].secondary_attempts) : kNan;
    r.deliveries = stats[u].deliveries;
    r.mean_system_time = stats[u].deliveries > 0 ? stats[u].sum_s / stats[u].deliveries : kNan;
    r.mean_interdelivery = stats[u].deliveries > 0 ? stats[u].sum_d / stats[u].deliveries : kNan;
    r.mean_sq_interdelivery = stats[u].deliveries > 0 ? stats[u].sum_d2 / stats[u].deliveries : kNan;
    r.batch_aoi.reserve(account[u].batch.size());
    for (double a : account[u].batch) r.batch_aoi.push_back(a / account[u].batch_len);
  }
  return out;
}

Replicated replicate(const model::SystemConfig& cfg, SchemeKind scheme, std::int64_t frames,
                     const std::vector<std::uint64_t>& seeds, std::int64_t warmup_frames) {
  if (seeds.empty()) throw std::invalid_argument("replicate requires at least one seed");
  Replicated rep;
  rep.runs.reserve(seeds.size());
  for (std::uint64_t s : seeds) rep.runs.push_back(simulate(cfg, scheme, frames, s, warmup_frames));

  std::vector<double> batch;
  double mean_sum = 0.0;
  std::int64_t p_att = 0, p_suc = 0, s_att = 0, s_suc = 0;
  for (const SimResult& r : rep.runs) {
    const UserResult& u = r.users[0];
    mean_sum += u.avg_aoi;
    batch.insert(batch.end(), u.batch_aoi.begin(), u.batch_aoi.end());
    p_att += u.primary_attempts;
    p_suc += u.primary_successes;
    s_att += u.secondary_attempts;
    s_suc += u.secondary_successes;
  }
  Pooled& p = rep.pooled;
  p.mean_aoi = mean_sum / static_cast<double>(rep.runs.size());
  double n = static_cast<double>(batch.size());
  double bmean = 0.0;
  for (double b : batch) bmean += b;
  bmean /= n;
  double var = 0.0;
  for (double b : batch) var += (b - bmean) * (b - bmean);
  p.se = n > 1 ? std::sqrt(var / (n - 1.0) / n) : kNan;
  p.ci95 = 1.959963985 * p.se;
  p.p_primary_emp = ratio(p_suc, p_att);
  p.p_secondary_emp = is_noma(scheme) ? ratio(s_suc, s_att) : kNan;
  return rep;
}

LinkEstimate empirical_success_probs(const SimResult& result) {
  const UserResult& m = result.users[0];
  const UserResult& mp = result.users[1];
  if (m.primary_attempts < 100)
    throw UnderSampled("fewer than 100 primary transmission attempts");
  if (is_noma(result.scheme) && m.secondary_attempts < 100)
    throw UnderSampled("fewer than 100 secondary transmission attempts");

  LinkEstimate est;
  est.stats.p_primary = m.p_primary_emp;
  est.se_primary = m.se_primary;
  est.stats.p_partner_primary = mp.p_primary_emp;
  est.se_partner_primary = mp.se_primary;
  est.stats.p_secondary_m = m.p_secondary_emp;
  est.se_secondary_m = m.se_secondary;
  est.stats.p_secondary_partner = mp.p_secondary_emp;
  est.se_secondary_partner = mp.se_secondary;
  est.stats.theta = kNan;
  return est;
}

}  // namespace aoi::sim
