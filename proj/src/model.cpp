#include "aoi/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi::model {

void SystemConfig::validate() const {
  if (num_users < 2 || num_users % 2 != 0)
    throw std::invalid_argument("num_users must be an even integer >= 2, got " +
                                std::to_string(num_users));
  if (!(slot_duration > 0.0))
    throw std::invalid_argument("slot_duration must be > 0");
  if (!(packet_bits >= 0.0))
    throw std::invalid_argument("packet_bits must be >= 0");
  if (!(primary_power > 0.0))
    throw std::invalid_argument("primary_power must be > 0");
  if (!(secondary_power > 0.0))
    throw std::invalid_argument("secondary_power must be > 0");
  if (!(arrival_rate_m >= 0.0))
    throw std::invalid_argument("arrival_rate_m must be >= 0");
  if (!(arrival_rate_partner >= 0.0))
    throw std::invalid_argument("arrival_rate_partner must be >= 0");
}

RateThreshold epsilon_threshold(double bits, double slot) {
  if (!(slot > 0.0)) throw std::invalid_argument("slot duration must be > 0");
  if (!(bits >= 0.0)) throw std::invalid_argument("packet bits must be >= 0");
  return {std::exp2(bits / slot) - 1.0};
}

double primary_success_prob(double power, double epsilon) {
  if (!(power > 0.0)) throw std::invalid_argument("power must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  return std::exp(-epsilon / power);
}

double interfered_secondary_success(double power, double secondary_power, double epsilon) {
  if (!(power > 0.0) || !(secondary_power > 0.0))
    throw std::invalid_argument("powers must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  return std::exp(-epsilon / secondary_power) / (1.0 + power * epsilon / secondary_power);
}

double arrival_prob(double rate, double window) {
  if (!(rate >= 0.0) || !(window >= 0.0))
    throw std::invalid_argument("rate and window must be >= 0");
  return -std::expm1(-rate * window);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool primary_decodes(ChannelGain g, double power, double epsilon) {
  return power * g.gain > epsilon;
}

bool secondary_decodes(ChannelGain g_secondary, ChannelGain g_primary, bool primary_active,
                       double power, double secondary_power, double epsilon) {
  double interference = primary_active ? power * g_primary.gain : 0.0;
  return secondary_power * g_secondary.gain > epsilon * (interference + 1.0);
}

}  // namespace aoi::model
