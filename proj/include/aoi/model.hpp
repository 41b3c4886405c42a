#pragma once

namespace aoi::model {

// Shared parameter set for one user pair in an M-slot frame. Powers are
// linear SNRs (noise is normalized to 1); the CLI converts from dB.
struct SystemConfig {
  int num_users = 8;                  // M, even, >= 2
  double slot_duration = 1.0;         // T
  double packet_bits = 1.0;           // N
  double primary_power = 1.0;         // P
  double secondary_power = 1.0;       // Ps
  double arrival_rate_m = 0.1;        // lambda_m
  double arrival_rate_partner = 0.1;  // lambda_m'

  double frame_length() const { return num_users * slot_duration; }
  void validate() const;  // throws std::invalid_argument
};

struct RateThreshold {
  double epsilon = 0.0;  // 2^(N/T) - 1
};

// Per-slot decoding success probabilities for a pair. The secondary entries
// are scheme-dependent and left NaN by calculators that have no secondary
// transmissions (TDMA).
struct LinkStats {
  double p_primary = 0.0;            // P_mm
  double p_partner_primary = 0.0;    // P_m'm'
  double p_secondary_m = 0.0;        // P_mm'
  double p_secondary_partner = 0.0;  // P_m'm
  double theta = 0.0;                // secondary success under interference
};

// Block-fading power gain |h|^2, unit-mean exponential (Rayleigh envelope).
struct ChannelGain {
  double gain = 0.0;
};

RateThreshold epsilon_threshold(double bits, double slot);
double primary_success_prob(double power, double epsilon);
double interfered_secondary_success(double power, double secondary_power, double epsilon);
double arrival_prob(double rate, double window);
double db_to_linear(double db);

// Decoding events the probabilities above describe. The secondary is decoded
// first under SIC, so it sees the primary's signal as interference while the
// primary sees a clean channel.
bool primary_decodes(ChannelGain g, double power, double epsilon);
bool secondary_decodes(ChannelGain g_secondary, ChannelGain g_primary, bool primary_active,
                       double power, double secondary_power, double epsilon);

}  // namespace aoi::model
