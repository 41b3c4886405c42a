#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoi/bench.hpp"
#include "aoi/model.hpp"
#include "aoi/sim.hpp"

namespace {

struct Opts {
  std::string scheme = "all";
  int users = 8;
  double slot = 1.0;
  double bits = 1.0;
  double snr_db = 0.0;
  std::optional<double> snr_s_db;
  double lambda = 0.1;
  std::optional<double> lambda_partner;
  std::int64_t frames = 100000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::int64_t warmup_frames = -1;
  std::string format = "csv";
  std::string out;
  std::string axis;
  std::optional<double> from, to, step;
  std::vector<double> values;
};

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--scheme", o.scheme,
                  "Scheme: tdma-nrt, tdma-rt, noma-nrt, noma-rt, or all");
  cmd->add_option("--users", o.users, "Number of users M (even)");
  cmd->add_option("--slot", o.slot, "Slot duration T");
  cmd->add_option("--bits", o.bits, "Update size N in bits");
  cmd->add_option("--snr-db", o.snr_db, "Transmit SNR of the primary signal in dB");
  cmd->add_option("--snr-s-db", o.snr_s_db,
                  "Transmit SNR of the secondary signal in dB (default: --snr-db)");
  cmd->add_option("--lambda", o.lambda, "Packet arrival rate of user m");
  cmd->add_option("--lambda-partner", o.lambda_partner,
                  "Packet arrival rate of the partner (default: --lambda)");
  cmd->add_option("--format", o.format, "Output format: csv or json");
  cmd->add_option("--out", o.out, "Output path (default: standard output)");
}

void add_sim_flags(CLI::App* cmd, Opts& o) {
  cmd->add_option("--frames", o.frames, "Frames to simulate");
  cmd->add_option("--seed", o.seed, "Seed for a single replication");
  cmd->add_option("--seeds", o.seeds, "Seed list for replications")->delimiter(',');
  cmd->add_option("--warmup-frames", o.warmup_frames,
                  "Frames discarded before averaging (default: 1%, at least 100)");
}

aoi::model::SystemConfig make_cfg(const Opts& o) {
  aoi::model::SystemConfig cfg;
  cfg.num_users = o.users;
  cfg.slot_duration = o.slot;
  cfg.packet_bits = o.bits;
  cfg.primary_power = aoi::model::db_to_linear(o.snr_db);
  cfg.secondary_power = aoi::model::db_to_linear(o.snr_s_db.value_or(o.snr_db));
  cfg.arrival_rate_m = o.lambda;
  cfg.arrival_rate_partner = o.lambda_partner.value_or(o.lambda);
  cfg.validate();
  return cfg;
}

std::vector<aoi::sim::SchemeKind> resolve_schemes(const std::string& name) {
  using aoi::sim::SchemeKind;
  if (name == "all")
    return {SchemeKind::TDMA_NRT, SchemeKind::TDMA_RT, SchemeKind::NOMA_NRT, SchemeKind::NOMA_RT};
  auto one = aoi::sim::parse_scheme(name);
  if (!one) throw std::invalid_argument("unknown scheme: " + name);
  return {*one};
}

std::vector<std::uint64_t> resolve_seeds(const Opts& o) {
  return o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
}

std::vector<double> resolve_values(const Opts& o) {
  if (!o.values.empty()) {
    if (o.from || o.to || o.step)
      throw std::invalid_argument("give either --values or --from/--to/--step, not both");
    return o.values;
  }
  if (!o.from || !o.to || !o.step)
    throw std::invalid_argument("sweep needs --values or all of --from/--to/--step");
  if (!(*o.step > 0.0)) throw std::invalid_argument("--step must be > 0");
  if (*o.to < *o.from) throw std::invalid_argument("--to must be >= --from");
  std::vector<double> vals;
  double limit = *o.to + *o.step * 1e-9;
  for (double v = *o.from; v <= limit; v += *o.step) vals.push_back(v);
  return vals;
}

int emit_rows(const std::vector<aoi::bench::ComparisonRow>& rows, const Opts& o) {
  auto format = aoi::bench::parse_format(o.format);
  if (!format) {
    std::cerr << "error: unknown format: " << o.format << "\n";
    return 1;
  }
  if (o.out.empty()) {
    aoi::bench::emit(rows, *format, std::cout);
    return 0;
  }
  std::ofstream file(o.out);
  if (!file) {
    std::cerr << "error: cannot open output file: " << o.out << "\n";
    return 1;
  }
  aoi::bench::emit(rows, *format, file);
  return file.good() ? 0 : 1;
}

int cmd_analytic(const Opts& o) {
  auto cfg = make_cfg(o);
  std::vector<aoi::bench::ComparisonRow> rows;
  for (auto scheme : resolve_schemes(o.scheme))
    rows.push_back(aoi::bench::analytic_row(cfg, scheme));
  return emit_rows(rows, o);
}

int cmd_simulate(const Opts& o) {
  auto cfg = make_cfg(o);
  auto seeds = resolve_seeds(o);
  std::vector<aoi::bench::ComparisonRow> rows;
  for (auto scheme : resolve_schemes(o.scheme))
    rows.push_back(aoi::bench::sim_row(cfg, scheme, o.frames, seeds, o.warmup_frames));
  return emit_rows(rows, o);
}

int cmd_compare(const Opts& o) {
  auto cfg = make_cfg(o);
  auto seeds = resolve_seeds(o);
  std::vector<aoi::bench::ComparisonRow> rows;
  for (auto scheme : resolve_schemes(o.scheme))
    rows.push_back(aoi::bench::run_point(cfg, scheme, o.frames, seeds, o.warmup_frames));
  return emit_rows(rows, o);
}

int cmd_sweep(const Opts& o) {
  aoi::bench::SweepSpec spec;
  auto axis = aoi::bench::parse_axis(o.axis);
  if (!axis) throw std::invalid_argument("unknown axis: " + o.axis);
  spec.axis = *axis;
  spec.values = resolve_values(o);
  spec.base = make_cfg(o);
  spec.schemes = resolve_schemes(o.scheme);
  spec.frames = o.frames;
  spec.seeds = resolve_seeds(o);
  spec.warmup_frames = o.warmup_frames;
  spec.validate();
  return emit_rows(aoi::bench::run_sweep(spec), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average age-of-information evaluator for TDMA and NOMA uplink status updates"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* analytic = app.add_subcommand("analytic", "Closed-form average AoI at one point");
  add_common(analytic, o);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo average AoI at one point");
  add_common(simulate, o);
  add_sim_flags(simulate, o);

  CLI::App* compare =
      app.add_subcommand("compare", "Closed form vs simulation at one point");
  add_common(compare, o);
  add_sim_flags(compare, o);

  CLI::App* sweep = app.add_subcommand("sweep", "Compare along one parameter axis");
  add_common(sweep, o);
  add_sim_flags(sweep, o);
  sweep->add_option("--axis", o.axis, "Axis: snr_db, lambda, or slot_duration")->required();
  sweep->add_option("--from", o.from, "First axis value");
  sweep->add_option("--to", o.to, "Last axis value");
  sweep->add_option("--step", o.step, "Axis increment");
  sweep->add_option("--values", o.values, "Explicit axis values")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (analytic->parsed()) return cmd_analytic(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (compare->parsed()) return cmd_compare(o);
    if (sweep->parsed()) return cmd_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
