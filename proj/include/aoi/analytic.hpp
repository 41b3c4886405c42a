#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "aoi/model.hpp"

namespace aoi::analytic {

// Average-AoI decomposition for one scheme at one configuration. avg_aoi is
// always mean_system_time + mean_sq_interdelivery / (2 mean_interdelivery).
// An arrival rate of zero yields the infinite-AoI marker instead of an
// exception: avg_aoi and the interdelivery moments are +infinity,
// mean_system_time is NaN and intermediates are empty.
struct AoiBreakdown {
  double avg_aoi = 0.0;
  double mean_system_time = 0.0;       // E{S}
  double mean_interdelivery = 0.0;     // E{D}
  double mean_sq_interdelivery = 0.0;  // E{D^2}
  model::LinkStats link;
  std::map<std::string, double> intermediates;

  bool infinite_aoi() const;
};

// Lemma-style coupled solution of the two retransmission-activity chains.
// p_secondary_m is the root selected from the quadratic; p_secondary_partner
// follows from it; theta_hat / theta_tilde are the steady-state idle/active
// probabilities of the partner's slot and the user's own slot.
struct SecondarySuccess {
  double p_secondary_m = 0.0;
  double p_secondary_partner = 0.0;
  double theta_hat0 = 0.0;
  double theta_hat1 = 0.0;
  double theta_tilde0 = 0.0;
  double theta_tilde1 = 0.0;
  double residual = 0.0;       // coupled fixed-point residual of the root
  double rejected_root = 0.0;  // the other quadratic root; NaN if none
};

struct ModelInconsistency : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AmbiguousRoot : std::runtime_error {
  double root_a;
  double root_b;
  AmbiguousRoot(const std::string& what, double a, double b)
      : std::runtime_error(what), root_a(a), root_b(b) {}
};

AoiBreakdown tdma_nrt_aoi(const model::SystemConfig& cfg);
AoiBreakdown noma_nrt_aoi(const model::SystemConfig& cfg);
AoiBreakdown tdma_rt_aoi(const model::SystemConfig& cfg);
AoiBreakdown noma_rt_aoi(const model::SystemConfig& cfg);

double noma_nrt_secondary_success(const model::SystemConfig& cfg);
SecondarySuccess noma_rt_secondary_success(const model::SystemConfig& cfg);

}  // namespace aoi::analytic
