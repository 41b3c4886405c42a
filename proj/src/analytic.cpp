#include "aoi/analytic.hpp"

#include <cmath>
#include <limits>

#include "aoi/markov.hpp"

namespace aoi::analytic {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFixedPointTol = 1e-10;
constexpr double kBracketTol = 1e-9;

struct Common {
  double mt;     // frame length
  double eps;    // decoding threshold
  double p_mm;   // primary success, both users
  double e_s;    // exp(-eps/Ps), interference-free secondary success
  double theta;  // secondary success under interference
};

Common common_terms(const model::SystemConfig& cfg) {
  cfg.validate();
  Common c;
  c.mt = cfg.frame_length();
  c.eps = model::epsilon_threshold(cfg.packet_bits, cfg.slot_duration).epsilon;
  c.p_mm = model::primary_success_prob(cfg.primary_power, c.eps);
  c.e_s = std::exp(-c.eps / cfg.secondary_power);
  c.theta = model::interfered_secondary_success(cfg.primary_power, cfg.secondary_power, c.eps);
  return c;
}

// Mean waiting-plus-service time T + E{delta t | arrival in window L}, in the
// cancellation-free form T + (1 - lambda L / (e^{lambda L} - 1)) / lambda.
double system_time_over_window(double lambda, double window, double slot) {
  double x = lambda * window;
  return slot + (1.0 - x / std::expm1(x)) / lambda;
}

AoiBreakdown infinite_marker(const model::LinkStats& link) {
  AoiBreakdown bd;
  bd.avg_aoi = kInf;
  bd.mean_system_time = kNan;
  bd.mean_interdelivery = kInf;
  bd.mean_sq_interdelivery = kInf;
  bd.link = link;
  return bd;
}

model::LinkStats tdma_link(const Common& c) {
  model::LinkStats ls;
  ls.p_primary = c.p_mm;
  ls.p_partner_primary = c.p_mm;
  ls.p_secondary_m = kNan;
  ls.p_secondary_partner = kNan;
  ls.theta = c.theta;
  return ls;
}

double nrt_secondary_mixture(const Common& c, double partner_rate, double half_frame) {
  double active = model::arrival_prob(partner_rate, half_frame);
  return active * c.theta + (1.0 - active) * c.e_s;
}

}  // namespace

bool AoiBreakdown::infinite_aoi() const { return std::isinf(avg_aoi); }

AoiBreakdown tdma_nrt_aoi(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  if (cfg.arrival_rate_m == 0.0) return infinite_marker(tdma_link(c));

  double lambda = cfg.arrival_rate_m;
  double mt = c.mt;
  double q_bar = model::arrival_prob(lambda, mt);
  double p_a = q_bar * c.p_mm;  // delivery probability per frame

  AoiBreakdown bd;
  bd.link = tdma_link(c);
  bd.mean_system_time = system_time_over_window(lambda, mt, cfg.slot_duration);
  bd.mean_interdelivery = mt / p_a;
  bd.mean_sq_interdelivery = mt * mt * (2.0 - p_a) / (p_a * p_a);
  bd.avg_aoi = bd.mean_system_time + bd.mean_sq_interdelivery / (2.0 * bd.mean_interdelivery);
  bd.intermediates["Gamma"] = bd.mean_system_time;
  return bd;
}

double noma_nrt_secondary_success(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  return nrt_secondary_mixture(c, cfg.arrival_rate_partner, c.mt / 2.0);
}

AoiBreakdown noma_nrt_aoi(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  double mt = c.mt;
  double half = mt / 2.0;

  model::LinkStats link = tdma_link(c);
  link.p_secondary_m = nrt_secondary_mixture(c, cfg.arrival_rate_partner, half);
  link.p_secondary_partner = nrt_secondary_mixture(c, cfg.arrival_rate_m, half);
  if (cfg.arrival_rate_m == 0.0) return infinite_marker(link);

  double lambda = cfg.arrival_rate_m;
  double r = model::arrival_prob(lambda, half);  // transmit probability per opportunity
  double p1 = r * c.p_mm;
  double p2 = r * link.p_secondary_m;
  double p0 = (1.0 - p1) * (1.0 - p2);
  double one_m_p0 = p1 + p2 * (1.0 - p1);

  double a = p1 * p2 * (p0 * p0 + 6.0 * p0 + 1.0);
  double b = 2.0 * (1.0 + p0) * (p1 * p1 * (1.0 - p2) + p2 * p2 * (1.0 - p1));
  double core = p1 * p2 * (1.0 + p0 - p1 - p2) + p1 * p1 + p2 * p2;
  double cc = core * one_m_p0;

  AoiBreakdown bd;
  bd.link = link;
  bd.mean_system_time = system_time_over_window(lambda, half, cfg.slot_duration);
  bd.mean_interdelivery = mt * core / ((p1 + p2) * one_m_p0 * one_m_p0);
  bd.mean_sq_interdelivery = mt * mt * (a + b) / (2.0 * (p1 + p2) * one_m_p0 * one_m_p0 * one_m_p0);
  bd.avg_aoi = bd.mean_system_time + bd.mean_sq_interdelivery / (2.0 * bd.mean_interdelivery);
  bd.intermediates["Omega_bar"] = bd.mean_system_time;
  bd.intermediates["p0"] = p0;
  bd.intermediates["p1"] = p1;
  bd.intermediates["p2"] = p2;
  bd.intermediates["A"] = a;
  bd.intermediates["B"] = b;
  bd.intermediates["C"] = cc;
  return bd;
}

AoiBreakdown tdma_rt_aoi(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  if (cfg.arrival_rate_m == 0.0) return infinite_marker(tdma_link(c));

  double lambda = cfg.arrival_rate_m;
  double mt = c.mt;
  double p = c.p_mm;
  double q = std::exp(-lambda * mt);  // no arrival during a frame
  double q_bar = model::arrival_prob(lambda, mt);
  double hold = q_bar + q * p;  // 1 - (1-p) q, probability the retransmit loop exits

  double gamma = system_time_over_window(lambda, mt, cfg.slot_duration);

  AoiBreakdown bd;
  bd.link = tdma_link(c);
  bd.mean_system_time = gamma + mt * (1.0 - p) * q / hold;
  bd.mean_interdelivery = mt * hold / (q_bar * p);
  bd.mean_sq_interdelivery =
      mt * mt *
      ((1.0 + p - q) * (3.0 * q - 1.0) / (q_bar * q_bar * p) + (2.0 + p * p) / (p * p));
  bd.avg_aoi = bd.mean_system_time + bd.mean_sq_interdelivery / (2.0 * bd.mean_interdelivery);
  bd.intermediates["Gamma"] = gamma;
  bd.intermediates["Psi"] = bd.mean_interdelivery;
  bd.intermediates["Lambda"] = bd.mean_sq_interdelivery;
  return bd;
}

SecondarySuccess noma_rt_secondary_success(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  if (!(cfg.arrival_rate_m > 0.0 && cfg.arrival_rate_partner > 0.0))
    throw std::invalid_argument("noma_rt_secondary_success requires both arrival rates > 0");

  double half = c.mt / 2.0;
  double w1 = std::exp(-cfg.arrival_rate_partner * half);
  double w2 = std::exp(-cfg.arrival_rate_m * half);
  double p = c.p_mm;
  double th = c.theta;
  double e = c.e_s;

  // Two-state activity chains for the partner's slot (hat, drives P_mm') and
  // the user's own slot (tilde, drives P_m'm), folded into one quadratic.
  double a1 = (w1 - 1.0) * w1;
  double b1 = (1.0 - p * w1) * w1;
  double c1 = a1 + b1;
  double d1 = (1.0 - w1 * w1) + w1 * w1 * p;
  double a2 = (w2 - 1.0) * w2;
  double b2 = (1.0 - p * w2) * w2;
  double c2 = a2 + b2;
  double d2 = (1.0 - w2 * w2) + w2 * w2 * p;

  double alpha = a2 * th + b2 * e;
  double beta = (1.0 - w2 * w2) * th + p * w2 * w2 * e;
  double alpha_p = a1 * th + b1 * e;
  double beta_p = (1.0 - w1 * w1) * th + p * w1 * w1 * e;

  double a_hat = alpha * c1 + c2 * d1;
  double b_hat = beta * c1 - alpha * alpha_p - beta_p * c2 + d1 * d2;
  double c_hat = -beta * alpha_p - beta_p * d2;

  auto partner_of = [&](double x) { return (alpha * x + beta) / (c2 * x + d2); };
  auto step = [&](double x) {
    double y = partner_of(x);
    return (alpha_p * y + beta_p) / (c1 * y + d1);
  };

  std::vector<double> roots = markov::quadratic_real_roots(a_hat, b_hat, c_hat);
  std::vector<double> in_unit, in_bracket;
  for (double r : roots) {
    if (r >= -kBracketTol && r <= 1.0 + kBracketTol) in_unit.push_back(r);
    if (r >= th - kBracketTol && r <= e + kBracketTol) in_bracket.push_back(r);
  }
  if (in_unit.empty())
    throw ModelInconsistency("secondary success: no quadratic root in [0,1]");
  if (in_bracket.empty())
    throw ModelInconsistency("secondary success: no quadratic root in [theta, e^(-eps/Ps)]");

  double selected = in_bracket.front();
  double rejected = kNan;
  if (in_bracket.size() >= 2) {
    // Disambiguate by damped iteration from the interference-free endpoint.
    double x = e;
    for (int i = 0; i < 400; ++i) x = 0.5 * x + 0.5 * step(x);
    double keep = std::fabs(x - in_bracket[0]) <= std::fabs(x - in_bracket[1]) ? in_bracket[0]
                                                                               : in_bracket[1];
    double other = keep == in_bracket[0] ? in_bracket[1] : in_bracket[0];
    double h = 1e-7;
    double slope = (step(other + h) - step(other - h)) / (2.0 * h);
    if (std::fabs(slope) < 1.0)
      throw AmbiguousRoot("secondary success: two stable fixed points", keep, other);
    selected = keep;
    rejected = other;
  } else if (roots.size() == 2) {
    rejected = roots[0] == selected ? roots[1] : roots[0];
  }

  // Polish away the last float error of the closed-form root; the stable fixed
  // point attracts the damped map, so this only tightens the residual.
  double polished = std::min(1.0, std::max(0.0, selected));
  for (int i = 0; i < 50 && std::fabs(step(polished) - polished) > 1e-13; ++i)
    polished = 0.5 * polished + 0.5 * step(polished);

  SecondarySuccess out;
  out.p_secondary_m = std::min(1.0, std::max(0.0, polished));
  out.p_secondary_partner = partner_of(out.p_secondary_m);
  out.residual = std::fabs(step(out.p_secondary_m) - out.p_secondary_m);
  if (out.residual > kFixedPointTol)
    throw ModelInconsistency("secondary success: fixed-point residual above tolerance");
  out.rejected_root = rejected;

  double y = out.p_secondary_partner;
  out.theta_hat1 = (a1 * y + (1.0 - w1 * w1)) / (c1 * y + d1);
  out.theta_hat0 = 1.0 - out.theta_hat1;
  out.theta_tilde1 = (a2 * out.p_secondary_m + (1.0 - w2 * w2)) / (c2 * out.p_secondary_m + d2);
  out.theta_tilde0 = 1.0 - out.theta_tilde1;
  return out;
}

AoiBreakdown noma_rt_aoi(const model::SystemConfig& cfg) {
  Common c = common_terms(cfg);
  double mt = c.mt;
  if (cfg.arrival_rate_m == 0.0) {
    model::LinkStats link = tdma_link(c);
    link.p_secondary_m = kNan;
    link.p_secondary_partner = kNan;
    return infinite_marker(link);
  }

  SecondarySuccess sec = noma_rt_secondary_success(cfg);
  double p_mm = c.p_mm;
  double p_mmp = sec.p_secondary_m;

  double lambda = cfg.arrival_rate_m;
  double w = std::exp(-lambda * mt / 2.0);
  double one_m_w = model::arrival_prob(lambda, mt / 2.0);
  double q = w * w;
  double q_bar = model::arrival_prob(lambda, mt);
  double p_m0 = (1.0 - p_mm) * (1.0 - p_mmp);
  double one_m_pm0 = p_mm + p_mmp * (1.0 - p_mm);
  double den0 = q_bar + q * one_m_pm0;  // 1 - q P_m0

  double g1 = p_mm * one_m_w * (1.0 + w * (1.0 - p_mmp)) / (2.0 * den0);
  double g4 = p_mmp * one_m_w * (1.0 + w * (1.0 - p_mm)) / (2.0 * den0);

  auto y_of = [&](double ps, double po) {
    // ps: success prob whose complement scales the odd-step branch (the
    // other member's slot); po = P_m0.
    return mt * (w * (1.0 + po * q) * (1.0 - ps) + 2.0 * po * q) /
           (2.0 * (q_bar + q * (1.0 - po)) * (1.0 + (1.0 - ps) * w));
  };
  double y = y_of(p_mmp, p_m0);
  double yp = y_of(p_mm, p_m0);

  auto w_of = [&](double pa, double pb) {
    // pa enters unscaled, pb scaled by w; swap the pair for the primed value.
    return 0.5 * mt *
           ((2.0 * (1.0 + w) - pa - w * pb) / (one_m_pm0 * (1.0 + w)) + w / one_m_w);
  };
  double ww = w_of(p_mmp, p_mm);
  double wwp = w_of(p_mm, p_mmp);

  auto d2_constants = [&](double pa, double pb) {
    // E{D^2 | Q} polynomial constants; (pa, pb) = (P_mm, P_mm') for the
    // unprimed set and swapped for the primed one.
    double k_l = pb * (pa * pa * pb + pa * pa - 5.0 * pa * pb + 4.0 * pb);
    double k_s = pb * (pa * pa * pb - pa * pa - 3.0 * pa * pb + 4.0 * pb);
    double k_r = 2.0 * pa * pa * pb * pb - 7.0 * pa * pa * pb + 4.0 * pa * pa + pa * pb * pb +
                 6.0 * pa * pb - 4.0 * pb * pb;
    double mid = pb + w * (p_m0 + pa - pb - 1.0) + q * (p_m0 - pa + 1.0) - 2.0;
    double k_t = 4.0 * p_m0 * q_bar * q_bar + mid * mid +
                 pa * pb * (1.0 - pb + q * q * (1.0 - pa));
    return std::array<double, 4>{k_l, k_r, k_s, k_t};
  };
  auto kc = d2_constants(p_mm, p_mmp);
  auto kcp = d2_constants(p_mmp, p_mm);
  double quarter = mt * mt / 4.0;
  double den2 = q_bar * q_bar * one_m_pm0 * one_m_pm0;
  double d2_qm = quarter * (w * q * kc[0] + q * kc[1] + w * kc[2] + kc[3]) / den2;
  double d2_qmp = quarter * (w * q * kcp[0] + q * kcp[1] + w * kcp[2] + kcp[3]) / den2;

  double omega = system_time_over_window(lambda, mt / 2.0, cfg.slot_duration);
  double h = (g1 * d2_qm + g4 * d2_qmp) / (g1 + g4);
  double wd = g1 * ww + g4 * wwp;

  AoiBreakdown bd;
  bd.link = tdma_link(c);
  bd.link.p_secondary_m = p_mmp;
  bd.link.p_secondary_partner = sec.p_secondary_partner;
  // First Theorem-4 term: deliveries weight system time by their own cycle
  // length W, so this is E{D S}/E{D}, which keeps the trapezoid ratio
  // identity exact. The plain delivery-weighted mean is kept as an
  // intermediate for simulator comparisons.
  bd.mean_system_time = (g1 * (omega + y) * ww + g4 * (omega + yp) * wwp) / wd;
  bd.mean_interdelivery = wd / (g1 + g4);
  bd.mean_sq_interdelivery = h;
  bd.avg_aoi = bd.mean_system_time + bd.mean_sq_interdelivery / (2.0 * bd.mean_interdelivery);

  auto& im = bd.intermediates;
  im["Omega_bar"] = omega;
  im["P_m0"] = p_m0;
  im["gamma1"] = g1;
  im["gamma4"] = g4;
  im["Y"] = y;
  im["Yp"] = yp;
  im["W"] = ww;
  im["Wp"] = wwp;
  im["H"] = h;
  im["K_L"] = kc[0];
  im["K_R"] = kc[1];
  im["K_S"] = kc[2];
  im["K_T"] = kc[3];
  im["K_Lp"] = kcp[0];
  im["K_Rp"] = kcp[1];
  im["K_Sp"] = kcp[2];
  im["K_Tp"] = kcp[3];
  im["E_D2_Qm"] = d2_qm;
  im["E_D2_Qmp"] = d2_qmp;
  im["system_time_gamma_avg"] = (g1 * (omega + y) + g4 * (omega + yp)) / (g1 + g4);

  // Lemma coefficients, recomputed here so the breakdown is self-contained.
  double half = mt / 2.0;
  double w1 = std::exp(-cfg.arrival_rate_partner * half);
  double w2 = std::exp(-cfg.arrival_rate_m * half);
  double a1 = (w1 - 1.0) * w1, b1 = (1.0 - p_mm * w1) * w1;
  double a2 = (w2 - 1.0) * w2, b2 = (1.0 - p_mm * w2) * w2;
  double c1 = a1 + b1, d1 = (1.0 - w1 * w1) + w1 * w1 * p_mm;
  double c2 = a2 + b2, d2 = (1.0 - w2 * w2) + w2 * w2 * p_mm;
  double alpha = a2 * c.theta + b2 * c.e_s;
  double beta = (1.0 - w2 * w2) * c.theta + p_mm * w2 * w2 * c.e_s;
  double alpha_p = a1 * c.theta + b1 * c.e_s;
  double beta_p = (1.0 - w1 * w1) * c.theta + p_mm * w1 * w1 * c.e_s;
  im["a1"] = a1;
  im["b1"] = b1;
  im["a2"] = a2;
  im["b2"] = b2;
  im["c1"] = c1;
  im["c2"] = c2;
  im["d1"] = d1;
  im["d2"] = d2;
  im["a_hat"] = alpha * c1 + c2 * d1;
  im["b_hat"] = beta * c1 - alpha * alpha_p - beta_p * c2 + d1 * d2;
  im["c_hat"] = -beta * alpha_p - beta_p * d2;
  return bd;
}

}  // namespace aoi::analytic
