#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/sim.hpp"

namespace aoi::bench {

// One evaluated point. Fields that a given producer does not fill (the
// analytic side for simulate-only runs, the sim side for analytic-only
// runs, or everything past the cause of a recorded error) stay NaN.
struct ComparisonRow {
  std::string scheme;
  model::SystemConfig cfg;
  double snr_db = 0.0;
  double snr_s_db = 0.0;
  std::int64_t frames = 0;
  std::vector<std::uint64_t> seeds;
  double aoi_analytic = 0.0;
  double aoi_sim = 0.0;
  double ci95 = 0.0;
  double rel_err = 0.0;
  double p_mm_analytic = 0.0;
  double p_mm_emp = 0.0;
  double p_mmp_analytic = 0.0;
  double p_mmp_emp = 0.0;
  std::string error;  // empty when the point evaluated cleanly
};

ComparisonRow analytic_row(const model::SystemConfig& cfg, sim::SchemeKind scheme);
ComparisonRow sim_row(const model::SystemConfig& cfg, sim::SchemeKind scheme, std::int64_t frames,
                      const std::vector<std::uint64_t>& seeds, std::int64_t warmup_frames = -1);
ComparisonRow run_point(const model::SystemConfig& cfg, sim::SchemeKind scheme,
                        std::int64_t frames, const std::vector<std::uint64_t>& seeds,
                        std::int64_t warmup_frames = -1);

enum class SweepAxis { snr_db, lambda, slot_duration };

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::snr_db;
  std::vector<double> values;  // strictly increasing
  model::SystemConfig base;
  std::vector<sim::SchemeKind> schemes;
  std::int64_t frames = 100000;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t warmup_frames = -1;  // negative selects the simulator default

  void validate() const;  // throws std::invalid_argument
};

// Applies one axis value to the base configuration. When the secondary
// power tracks the primary (equal in the base) an snr_db sweep moves both;
// likewise the partner arrival rate tracks lambda when equal in the base.
model::SystemConfig apply_axis(const model::SystemConfig& base, SweepAxis axis, double value);

// Scheme-major, axis-ascending rows. Per-point failures are recorded in the
// row's error note; the sweep itself never throws for them.
std::vector<ComparisonRow> run_sweep(const SweepSpec& spec);

enum class EmitFormat { csv, json };

std::optional<EmitFormat> parse_format(std::string_view name);

// Renders numbers with 9 significant digits; infinities as inf, missing
// values as nan. JSON carries the same keys as the CSV header plus an
// error key on rows that recorded one.
void emit(const std::vector<ComparisonRow>& rows, EmitFormat format, std::ostream& out);

}  // namespace aoi::bench
