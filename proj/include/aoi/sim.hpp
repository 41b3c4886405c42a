#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/model.hpp"

namespace aoi::sim {

enum class SchemeKind { TDMA_NRT, TDMA_RT, NOMA_NRT, NOMA_RT };

constexpr bool is_noma(SchemeKind s) {
  return s == SchemeKind::NOMA_NRT || s == SchemeKind::NOMA_RT;
}
constexpr bool is_rt(SchemeKind s) {
  return s == SchemeKind::TDMA_RT || s == SchemeKind::NOMA_RT;
}

std::string_view scheme_name(SchemeKind s);
std::optional<SchemeKind> parse_scheme(std::string_view name);

// Mutable per-user simulation state. Timestamps are absolute times; the
// buffer and the transmitter each hold at most one generation timestamp.
struct UserState {
  std::optional<double> buffer;
  std::optional<double> in_flight;
  double next_arrival = 0.0;
  double last_delivered_gen = 0.0;      // u(t)
  double aoi_area = 0.0;                // post-warmup integral of t - u(t)
  std::int64_t deliveries = 0;          // post-warmup
  std::array<bool, 2> delta_flags{};    // transmit indicators, current frame
};

struct DeliveryEvent {
  int user = 0;
  double gen_time = 0.0;
  double deliver_time = 0.0;
};

struct UserResult {
  double avg_aoi = 0.0;
  double p_primary_emp = 0.0;
  double se_primary = 0.0;
  std::int64_t primary_attempts = 0;
  std::int64_t primary_successes = 0;
  double p_secondary_emp = 0.0;  // NaN for TDMA schemes
  double se_secondary = 0.0;
  std::int64_t secondary_attempts = 0;
  std::int64_t secondary_successes = 0;
  double mean_system_time = 0.0;       // sample E{S}
  double mean_interdelivery = 0.0;     // sample E{D}
  double mean_sq_interdelivery = 0.0;  // sample E{D^2}
  std::int64_t deliveries = 0;
  std::vector<double> batch_aoi;  // time-averaged AoI per post-warmup batch
};

struct SimResult {
  std::array<UserResult, 2> users;  // [0] = user m, [1] = partner m'
  SchemeKind scheme = SchemeKind::TDMA_NRT;
  std::int64_t frames = 0;
  std::uint64_t seed = 0;
  std::int64_t warmup_frames = 0;
  std::string rng_algorithm;
};

// Runs one user pair for `frames` frames of length M*T. warmup_frames < 0
// selects the default (1% of frames, at least 100, capped at frames-1).
// If trace is non-null every delivery of either user is appended to it.
SimResult simulate(const model::SystemConfig& cfg, SchemeKind scheme, std::int64_t frames,
                   std::uint64_t seed, std::int64_t warmup_frames = -1,
                   std::vector<DeliveryEvent>* trace = nullptr);

// Pooled statistics of user m across seed replications. The standard error
// comes from the batch means of all runs pooled together, so it is usable
// for a single seed as well.
struct Pooled {
  double mean_aoi = 0.0;
  double se = 0.0;
  double ci95 = 0.0;  // half-width
  double p_primary_emp = 0.0;
  double p_secondary_emp = 0.0;  // NaN for TDMA schemes
};

struct Replicated {
  std::vector<SimResult> runs;
  Pooled pooled;
};

Replicated replicate(const model::SystemConfig& cfg, SchemeKind scheme, std::int64_t frames,
                     const std::vector<std::uint64_t>& seeds, std::int64_t warmup_frames = -1);

// Frequency estimates of the link success probabilities of user m with
// binomial standard errors. Secondary entries are NaN for TDMA schemes.
struct LinkEstimate {
  model::LinkStats stats;
  double se_primary = 0.0;
  double se_partner_primary = 0.0;
  double se_secondary_m = 0.0;
  double se_secondary_partner = 0.0;
};

struct UnderSampled : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LinkEstimate empirical_success_probs(const SimResult& result);

}  // namespace aoi::sim
