#include "aoi/bench.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "aoi/analytic.hpp"

namespace aoi::bench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* kCsvHeader =
    "scheme,M,T,N_bits,snr_db,snr_s_db,lambda_m,lambda_mp,frames,seeds,aoi_analytic,aoi_sim,"
    "ci95,rel_err,p_mm_analytic,p_mm_emp,p_mmp_analytic,p_mmp_emp";

std::string num9(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

ComparisonRow blank_row(const model::SystemConfig& cfg, sim::SchemeKind scheme) {
  ComparisonRow row;
  row.scheme = std::string(sim::scheme_name(scheme));
  row.cfg = cfg;
  row.snr_db = 10.0 * std::log10(cfg.primary_power);
  row.snr_s_db = 10.0 * std::log10(cfg.secondary_power);
  row.aoi_analytic = kNan;
  row.aoi_sim = kNan;
  row.ci95 = kNan;
  row.rel_err = kNan;
  row.p_mm_analytic = kNan;
  row.p_mm_emp = kNan;
  row.p_mmp_analytic = kNan;
  row.p_mmp_emp = kNan;
  return row;
}

analytic::AoiBreakdown dispatch_analytic(const model::SystemConfig& cfg, sim::SchemeKind scheme) {
  switch (scheme) {
    case sim::SchemeKind::TDMA_NRT: return analytic::tdma_nrt_aoi(cfg);
    case sim::SchemeKind::TDMA_RT: return analytic::tdma_rt_aoi(cfg);
    case sim::SchemeKind::NOMA_NRT: return analytic::noma_nrt_aoi(cfg);
    case sim::SchemeKind::NOMA_RT: return analytic::noma_rt_aoi(cfg);
  }
  throw std::invalid_argument("unknown scheme");
}

void fill_analytic(ComparisonRow& row, const model::SystemConfig& cfg, sim::SchemeKind scheme) {
  analytic::AoiBreakdown bd = dispatch_analytic(cfg, scheme);
  row.aoi_analytic = bd.avg_aoi;
  row.p_mm_analytic = bd.link.p_primary;
  row.p_mmp_analytic = bd.link.p_secondary_m;
}

void fill_sim(ComparisonRow& row, const model::SystemConfig& cfg, sim::SchemeKind scheme,
              std::int64_t frames, const std::vector<std::uint64_t>& seeds,
              std::int64_t warmup_frames) {
  sim::Replicated rep = sim::replicate(cfg, scheme, frames, seeds, warmup_frames);
  std::int64_t deliveries = 0;
  for (const sim::SimResult& r : rep.runs) deliveries += r.users[0].deliveries;
  if (deliveries == 0) {
    row.error = "no deliveries";
    return;
  }
  row.aoi_sim = rep.pooled.mean_aoi;
  row.ci95 = rep.pooled.ci95;
  row.p_mm_emp = rep.pooled.p_primary_emp;
  row.p_mmp_emp = rep.pooled.p_secondary_emp;
}

}  // namespace

ComparisonRow analytic_row(const model::SystemConfig& cfg, sim::SchemeKind scheme) {
  ComparisonRow row = blank_row(cfg, scheme);
  fill_analytic(row, cfg, scheme);
  return row;
}

ComparisonRow sim_row(const model::SystemConfig& cfg, sim::SchemeKind scheme, std::int64_t frames,
                      const std::vector<std::uint64_t>& seeds, std::int64_t warmup_frames) {
  ComparisonRow row = blank_row(cfg, scheme);
  row.frames = frames;
  row.seeds = seeds;
  fill_sim(row, cfg, scheme, frames, seeds, warmup_frames);
  return row;
}

ComparisonRow run_point(const model::SystemConfig& cfg, sim::SchemeKind scheme,
                        std::int64_t frames, const std::vector<std::uint64_t>& seeds,
                        std::int64_t warmup_frames) {
  ComparisonRow row = blank_row(cfg, scheme);
  row.frames = frames;
  row.seeds = seeds;
  fill_analytic(row, cfg, scheme);
  fill_sim(row, cfg, scheme, frames, seeds, warmup_frames);
  if (std::isfinite(row.aoi_analytic) && std::isfinite(row.aoi_sim))
    row.rel_err = std::fabs(row.aoi_sim - row.aoi_analytic) / row.aoi_analytic;
  return row;
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::slot_duration: return "slot_duration";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  if (name == "snr_db") return SweepAxis::snr_db;
  if (name == "lambda") return SweepAxis::lambda;
  if (name == "slot_duration") return SweepAxis::slot_duration;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw std::invalid_argument("sweep values must be strictly increasing");
  if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
}

model::SystemConfig apply_axis(const model::SystemConfig& base, SweepAxis axis, double value) {
  model::SystemConfig cfg = base;
  switch (axis) {
    case SweepAxis::snr_db:
      cfg.primary_power = model::db_to_linear(value);
      if (base.secondary_power == base.primary_power) cfg.secondary_power = cfg.primary_power;
      break;
    case SweepAxis::lambda:
      cfg.arrival_rate_m = value;
      if (base.arrival_rate_partner == base.arrival_rate_m) cfg.arrival_rate_partner = value;
      break;
    case SweepAxis::slot_duration:
      cfg.slot_duration = value;
      break;
  }
  return cfg;
}

std::vector<ComparisonRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<ComparisonRow> rows;
  rows.reserve(spec.schemes.size() * spec.values.size());
  for (sim::SchemeKind scheme : spec.schemes) {
    for (double value : spec.values) {
      model::SystemConfig cfg = apply_axis(spec.base, spec.axis, value);
      try {
        rows.push_back(run_point(cfg, scheme, spec.frames, spec.seeds, spec.warmup_frames));
      } catch (const std::exception& e) {
        ComparisonRow row = blank_row(cfg, scheme);
        row.frames = spec.frames;
        row.seeds = spec.seeds;
        row.error = e.what();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::optional<EmitFormat> parse_format(std::string_view name) {
  if (name == "csv") return EmitFormat::csv;
  if (name == "json") return EmitFormat::json;
  return std::nullopt;
}

void emit(const std::vector<ComparisonRow>& rows, EmitFormat format, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("nothing to emit: no rows");

  if (format == EmitFormat::csv) {
    out << kCsvHeader << '\n';
    for (const ComparisonRow& r : rows) {
      std::string seeds;
      for (std::size_t i = 0; i < r.seeds.size(); ++i) {
        if (i) seeds += ';';
        seeds += std::to_string(r.seeds[i]);
      }
      out << r.scheme << ',' << r.cfg.num_users << ',' << num9(r.cfg.slot_duration) << ','
          << num9(r.cfg.packet_bits) << ',' << num9(r.snr_db) << ',' << num9(r.snr_s_db) << ','
          << num9(r.cfg.arrival_rate_m) << ',' << num9(r.cfg.arrival_rate_partner) << ','
          << r.frames << ',' << seeds << ',' << num9(r.aoi_analytic) << ',' << num9(r.aoi_sim)
          << ',' << num9(r.ci95) << ',' << num9(r.rel_err) << ',' << num9(r.p_mm_analytic) << ','
          << num9(r.p_mm_emp) << ',' << num9(r.p_mmp_analytic) << ',' << num9(r.p_mmp_emp)
          << '\n';
    }
    return;
  }

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  auto jnum = [](double x) -> nlohmann::ordered_json {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return std::strtod(num9(x).c_str(), nullptr);
  };
  for (const ComparisonRow& r : rows) {
    nlohmann::ordered_json obj;
    obj["scheme"] = r.scheme;
    obj["M"] = r.cfg.num_users;
    obj["T"] = jnum(r.cfg.slot_duration);
    obj["N_bits"] = jnum(r.cfg.packet_bits);
    obj["snr_db"] = jnum(r.snr_db);
    obj["snr_s_db"] = jnum(r.snr_s_db);
    obj["lambda_m"] = jnum(r.cfg.arrival_rate_m);
    obj["lambda_mp"] = jnum(r.cfg.arrival_rate_partner);
    obj["frames"] = r.frames;
    obj["seeds"] = r.seeds;
    obj["aoi_analytic"] = jnum(r.aoi_analytic);
    obj["aoi_sim"] = jnum(r.aoi_sim);
    obj["ci95"] = jnum(r.ci95);
    obj["rel_err"] = jnum(r.rel_err);
    obj["p_mm_analytic"] = jnum(r.p_mm_analytic);
    obj["p_mm_emp"] = jnum(r.p_mm_emp);
    obj["p_mmp_analytic"] = jnum(r.p_mmp_analytic);
    obj["p_mmp_emp"] = jnum(r.p_mmp_emp);
    if (!r.error.empty()) obj["error"] = r.error;
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace aoi::bench
