#pragma once

// ISS-Lyapunov certificates for the slow/fast blocks, sample-based
// verification of the certificate and of the time-scale (perturbation
// function) conditions, constructive synthesis of the scale gains, and the
// max-type composite Lyapunov function with its trajectory decrease check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spkit/comparison.hpp"
#include "spkit/samples.hpp"
#include "spkit/system.hpp"

namespace spkit {

using ValueFn = std::function<double(const VecX&)>;
using GradFn = std::function<VecX(const VecX&)>;
using ValueFn2 = std::function<double(const VecX&, const VecX&)>;
using GradFn2 = std::function<VecX(const VecX&, const VecX&)>;

// Lyapunov data for the unperturbed subsystems. chi_s / chi_f are absent when
// the corresponding input channel has dimension zero; the guarded
// implications then hold unconditionally.
struct ISSCertificate {
  ValueFn V_s;
  GradFn grad_V_s;
  ValueFn2 V_f;        // (z, x)
  GradFn2 grad_V_f_z;  // (z, x)
  GradFn2 grad_V_f_x;

  ComparisonCurve alpha_s_lower, alpha_s_upper;  // sandwich for V_s (Kinf)
  ComparisonCurve gamma_s;                       // fast-value gain (Kinf)
  std::optional<ComparisonCurve> chi_s;          // d gain (Kinf)
  ComparisonCurve alpha_s;                       // decrease rate (PD)
  ComparisonCurve alpha_f_lower, alpha_f_upper;  // sandwich for V_f (Kinf)
  std::optional<ComparisonCurve> chi_f;          // w gain (Kinf)
  ComparisonCurve alpha_f;                       // decrease rate (PD)
  ComparisonCurve lambda_f1, lambda_f2;          // cross-gradient bounds (PD)
};

// The data of the time-scale conditions: guarded lower bound on rho_s,
// small-gain pair, the rate inequality and the guarded drive bound.
struct TheoremConditions {
  ComparisonCurve rho_s_lower;  // class P
  ComparisonCurve gamma_f;      // Kinf
  ComparisonCurve rho_s_upper;  // class P
  ComparisonCurve rho_f_lower;  // class P
  std::optional<ComparisonCurve> sigma;
  std::vector<double> grid = default_grid();
  double margin_min = 1e-9;
};

struct CheckOptions {
  double slack = 1e-9;             // absolute slack on <= comparisons
  double guard_inflation = 1e-9;   // relative inflation of implication guards
};

struct ConditionCheck {
  std::string name;
  bool pass = true;
  // For pointwise <= checks: max over samples of (lhs - rhs); pass iff
  // worst <= slack. For grid margin checks: min relative margin.
  double worst = -std::numeric_limits<double>::infinity();
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<StateSample> witness;
  std::optional<double> witness_r;
  std::size_t applicable = 0;
  std::size_t total = 0;
};

struct VerificationReport {
  std::string subject;
  std::vector<ConditionCheck> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ConditionCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline void note_violation(ConditionCheck& c, double violation,
                           const StateSample& s, double slack) {
  ++c.applicable;
  if (violation > c.worst) {
    c.worst = violation;
    c.witness = s;
  }
  if (violation > slack) c.pass = false;
}

inline double guard_threshold(double raw, double inflation) {
  return raw * (1.0 + inflation);
}

}  // namespace detail

// Sample-based check of the certificate itself: both sandwich bounds, the
// guarded decrease of V_s and V_f, and the cross-gradient bound. Failures are
// report entries, never exceptions.
inline VerificationReport verify_certificate(const PerturbedSystem& sys,
                                             const ISSCertificate& cert,
                                             const std::vector<StateSample>& samples,
                                             CheckOptions opt = {}) {
  VerificationReport rep;
  rep.subject = "certificate";
  ConditionCheck slow_sandwich{.name = "slow_sandwich"};
  ConditionCheck slow_decrease{.name = "slow_decrease"};
  ConditionCheck fast_sandwich{.name = "fast_sandwich"};
  ConditionCheck fast_decrease{.name = "fast_decrease"};
  ConditionCheck cross_gradient{.name = "cross_gradient"};

  for (const StateSample& s : samples) {
    const double vs = cert.V_s(s.x);
    const double vf = cert.V_f(s.z, s.x);
    const double xn = s.x.norm();
    const double en = (s.z - sys.phi(s.x)).norm();
    const double dn = s.d.norm();
    const double wn = s.w.norm();

    slow_sandwich.total++;
    detail::note_violation(
        slow_sandwich,
        std::max(cert.alpha_s_lower(xn) - vs, vs - cert.alpha_s_upper(xn)), s,
        opt.slack);

    fast_sandwich.total++;
    detail::note_violation(
        fast_sandwich,
        std::max(cert.alpha_f_lower(en) - vf, vf - cert.alpha_f_upper(en)), s,
        opt.slack);

    slow_decrease.total++;
    const double slow_guard =
        std::max(cert.gamma_s(vf), cert.chi_s ? (*cert.chi_s)(dn) : 0.0);
    if (vs >= detail::guard_threshold(slow_guard, opt.guard_inflation)) {
      const double lhs = cert.grad_V_s(s.x).dot(sys.g_s(s.x, s.z, s.d));
      detail::note_violation(slow_decrease, lhs + cert.alpha_s(vs), s,
                             opt.slack);
    }

    fast_decrease.total++;
    const double fast_guard = cert.chi_f ? (*cert.chi_f)(wn) : 0.0;
    if (vf >= detail::guard_threshold(fast_guard, opt.guard_inflation)) {
      const double lhs =
          cert.grad_V_f_z(s.z, s.x).dot(sys.g_f(s.z, s.x, s.w));
      detail::note_violation(fast_decrease, lhs + cert.alpha_f(vf), s,
                             opt.slack);
    }

    cross_gradient.total++;
    detail::note_violation(cross_gradient,
                           cert.grad_V_f_x(s.z, s.x).norm() -
                               (cert.lambda_f1(vf) + cert.lambda_f2(vs)),
                           s, opt.slack);
  }
  rep.checks = {slow_sandwich, slow_decrease, fast_sandwich, fast_decrease,
                cross_gradient};
  return rep;
}

// Central-difference consistency of the supplied gradients. Tolerance
// max(1e-6, 1e-4 * |gradient|) per sample.
inline ConditionCheck check_certificate_gradients(
    const ISSCertificate& cert, const std::vector<StateSample>& samples,
    double step = 1e-5) {
  ConditionCheck check{.name = "gradient_consistency"};
  const auto central = [step](const std::function<double(const VecX&)>& f,
                              const VecX& at) {
    VecX g(at.size());
    for (Eigen::Index j = 0; j < at.size(); ++j) {
      const double h = step * std::max(1.0, std::abs(at[j]));
      VecX p = at, m = at;
      p[j] += h;
      m[j] -= h;
      g[j] = (f(p) - f(m)) / (2.0 * h);
    }
    return g;
  };
  for (const StateSample& s : samples) {
    check.total++;
    const VecX gs = cert.grad_V_s(s.x);
    const VecX gs_fd = central(cert.V_s, s.x);
    const VecX gfz = cert.grad_V_f_z(s.z, s.x);
    const VecX gfz_fd =
        central([&](const VecX& z) { return cert.V_f(z, s.x); }, s.z);
    const VecX gfx = cert.grad_V_f_x(s.z, s.x);
    const VecX gfx_fd =
        central([&](const VecX& x) { return cert.V_f(s.z, x); }, s.x);
    double viol = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : {std::pair{gs, gs_fd}, std::pair{gfz, gfz_fd},
                               std::pair{gfx, gfx_fd}}) {
      const double tol = std::max(1e-6, 1e-4 * a.norm());
      viol = std::max(viol, (a - b).norm() - tol);
    }
    detail::note_violation(check, viol, s, 0.0);
  }
  return check;
}

// Sample check of the drive envelope property
//   |g_s(x,z,d)| <= envelope(|x| + |z - phi(x)| + |d|).
inline ConditionCheck validate_drive_envelope(
    const PerturbedSystem& sys, const ComparisonCurve& envelope,
    const std::vector<StateSample>& samples, CheckOptions opt = {}) {
  ConditionCheck check{.name = "drive_envelope"};
  for (const StateSample& s : samples) {
    check.total++;
    const double lhs = sys.g_s(s.x, s.z, s.d).norm();
    const double arg = s.x.norm() + (s.z - sys.phi(s.x)).norm() + s.d.norm();
    detail::note_violation(check, lhs - envelope(arg), s, opt.slack);
  }
  return check;
}

// Envelope of |g_s| as a function of the fast Lyapunov value, per-gain form:
//   r -> envelope(alow_s^{-1}(gamma_s(r)) + alow_f^{-1}(r)
//                 + gamma_s(chi_s^{-1}(r))),
// the bound used by the constant time-scale-ratio condition. The chi_s term
// is omitted when the scenario has no d channel.
inline ComparisonCurve drive_bound_from_gains(const ISSCertificate& cert,
                                              const ComparisonCurve& envelope) {
  const auto alow_s = cert.alpha_s_lower;
  const auto alow_f = cert.alpha_f_lower;
  const auto gamma_s = cert.gamma_s;
  const auto chi_s = cert.chi_s;
  return ComparisonCurve(
      [=](double r) {
        double arg = invert_numeric(alow_s, gamma_s(r)) +
                     invert_numeric(alow_f, r);
        if (chi_s) arg += gamma_s(invert_numeric(*chi_s, r));
        return envelope(arg);
      },
      compose(envelope, cert.gamma_s).tag(), envelope.domain_hint(),
      "drive_bound[" + envelope.name() + "]");
}

// Same envelope expressed through the chosen gamma_f:
//   r -> envelope(alow_s^{-1}(gamma_f^{-1}(r)) + alow_f^{-1}(r)
//                 + gamma_f^{-1}(chi_s^{-1}(r))).
inline ComparisonCurve drive_bound_from_gamma_f(const ISSCertificate& cert,
                                                const ComparisonCurve& gamma_f,
                                                const ComparisonCurve& envelope) {
  const auto alow_s = cert.alpha_s_lower;
  const auto alow_f = cert.alpha_f_lower;
  const auto chi_s = cert.chi_s;
  return ComparisonCurve(
      [=](double r) {
        const double gfi = r == 0.0 ? 0.0 : invert_numeric(gamma_f, r);
        double arg = invert_numeric(alow_s, gfi) + invert_numeric(alow_f, r);
        if (chi_s) arg += invert_numeric(gamma_f, invert_numeric(*chi_s, r));
        return envelope(arg);
      },
      envelope.tag(), envelope.domain_hint(),
      "drive_bound_gamma_f[" + envelope.name() + "]");
}

struct TimescaleRatioResult {
  double c0 = 0.0;
  bool unsatisfiable = false;
  double worst_r = 0.0;  // grid point attaining the infimum
};

// Largest admissible constant slow/fast time-scale ratio on the grid:
//   0.999 * inf_r alpha_f(r) / (drive_bound(r) * (lambda_f1 + lambda_f2∘gamma_s)(r)).
// Grid points with zero denominator are skipped; a vanishing infimum is
// flagged as unsatisfiable.
inline TimescaleRatioResult find_max_timescale_ratio(
    const ISSCertificate& cert, const ComparisonCurve& envelope,
    const std::vector<double>& grid = default_grid(), double deflate = 0.999,
    double floor = 1e-12) {
  const ComparisonCurve gbar = drive_bound_from_gains(cert, envelope);
  TimescaleRatioResult res;
  double inf = std::numeric_limits<double>::infinity();
  for (double r : grid) {
    const double den = gbar(r) * (cert.lambda_f1(r) + cert.lambda_f2(cert.gamma_s(r)));
    if (den == 0.0) continue;
    const double ratio = cert.alpha_f(r) / den;
    if (ratio < inf) {
      inf = ratio;
      res.worst_r = r;
    }
  }
  if (!std::isfinite(inf)) {
    res.unsatisfiable = true;
    return res;
  }
  res.c0 = deflate * inf;
  if (res.c0 <= floor) {
    res.c0 = 0.0;
    res.unsatisfiable = true;
  }
  return res;
}

struct DerivationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Slow gain of the drive magnitude: rho(r) = 0.96 * rho_s_upper(gtilde^{-1}(r)) / r,
// extended to r = 0 by its value at the grid's lower end. The defining
// inequality rho(g(s)) * g(s) <= rho_s_upper(s) is re-verified on the grid in
// forward form (so the numeric inversion slack actually gets exercised).
inline ComparisonCurve derive_slow_gain(const ComparisonCurve& rho_s_upper,
                                        const ComparisonCurve& g_tilde,
                                        const std::vector<double>& grid = default_grid(),
                                        double safety = 0.96) {
  if (g_tilde.tag() != CurveClass::KInf)
    throw PreconditionError("derive_slow_gain: drive bound must be tagged Kinf");
  const double r0 = grid.front();
  auto raw = [rho_s_upper, g_tilde, safety](double r) {
    return safety * rho_s_upper(invert_numeric(g_tilde, r)) / r;
  };
  ComparisonCurve rho(
      [raw, r0](double r) { return r > 0.0 ? raw(r) : raw(r0); },
      CurveClass::P, g_tilde.domain_hint(), "derived_slow_gain");
  for (double s : grid) {
    const double g = g_tilde(s);
    if (g <= 0.0) continue;
    if (rho(g) * g > rho_s_upper(s))
      throw DerivationError(
          "derive_slow_gain: defining inequality violated at s = " +
          detail::num_str(s));
  }
  return rho;
}

// Fast gain of the fast-drive magnitude: rho(s) = 1.04 * rho_f_lower(
// alpha_f_upper(g_f_lower^{-1}(s))); verified as
// rho(g_f_lower(r)) >= rho_f_lower(alpha_f_upper(r)) on the grid.
inline ComparisonCurve derive_fast_gain(const ISSCertificate& cert,
                                        const ComparisonCurve& rho_f_lower,
                                        const ComparisonCurve& g_f_lower,
                                        const std::vector<double>& grid = default_grid(),
                                        double safety = 1.04) {
  if (g_f_lower.tag() != CurveClass::KInf)
    throw PreconditionError("derive_fast_gain: fast drive lower bound must be Kinf");
  const auto ahi_f = cert.alpha_f_upper;
  ComparisonCurve rho(
      [rho_f_lower, g_f_lower, ahi_f, safety](double s) {
        const double r = s == 0.0 ? 0.0 : invert_numeric(g_f_lower, s);
        return safety * rho_f_lower(ahi_f(r));
      },
      CurveClass::P, g_f_lower.domain_hint(), "derived_fast_gain");
  for (double r : grid) {
    if (rho(g_f_lower(r)) < rho_f_lower(ahi_f(r)))
      throw DerivationError(
          "derive_fast_gain: defining inequality violated at r = " +
          detail::num_str(r));
  }
  return rho;
}

// Checks the four time-scale conditions against samples and the curve grid.
// Precondition: verify_certificate passed for (sys, cert).
inline VerificationReport verify_perturbation_conditions(
    const PerturbedSystem& sys, const ISSCertificate& cert,
    const TheoremConditions& conds, const std::vector<StateSample>& samples,
    CheckOptions opt = {}) {
  VerificationReport rep;
  rep.subject = "perturbation_conditions";

  ConditionCheck rho_s_low{.name = "slow_gain_lower"};
  ConditionCheck small_gain{.name = "small_gain"};
  ConditionCheck rate{.name = "rate_inequality"};
  ConditionCheck drive{.name = "slow_drive_bound"};
  ConditionCheck rho_f_low{.name = "fast_gain_lower"};

  for (const StateSample& s : samples) {
    const double vs = cert.V_s(s.x);
    const double vf = cert.V_f(s.z, s.x);
    const double dn = s.d.norm();
    const double wn = s.w.norm();

    rho_s_low.total++;
    const double slow_guard =
        std::max(cert.gamma_s(vf), cert.chi_s ? (*cert.chi_s)(dn) : 0.0);
    if (vs >= detail::guard_threshold(slow_guard, opt.guard_inflation)) {
      detail::note_violation(
          rho_s_low, conds.rho_s_lower(vs) - sys.rho_s_at(s.x, s.z, s.d), s,
          opt.slack);
    }

    const double fast_guard = std::max(
        {conds.gamma_f(vs),
         cert.chi_s ? conds.gamma_f((*cert.chi_s)(dn)) : 0.0,
         cert.chi_f ? (*cert.chi_f)(wn) : 0.0});
    drive.total++;
    rho_f_low.total++;
    if (vf >= detail::guard_threshold(fast_guard, opt.guard_inflation)) {
      const double drive_lhs =
          sys.rho_s_at(s.x, s.z, s.d) * sys.g_s(s.x, s.z, s.d).norm();
      detail::note_violation(drive, drive_lhs - conds.rho_s_upper(vf), s,
                             opt.slack);
      detail::note_violation(
          rho_f_low, conds.rho_f_lower(vf) - sys.rho_f_at(s.z, s.x, s.w), s,
          opt.slack);
    }
  }

  const SmallGainReport sg =
      check_small_gain(conds.gamma_f, cert.gamma_s, conds.grid, conds.margin_min);
  small_gain.pass = sg.pass;
  small_gain.worst_margin = sg.worst_margin;
  small_gain.witness_r = sg.worst_r;
  small_gain.total = sg.points;
  small_gain.applicable = sg.points;

  rate.total = conds.grid.size();
  for (double r : conds.grid) {
    const double gfi = invert_numeric(conds.gamma_f, r, {0.0, std::max(1.0, r)});
    const double lhs =
        conds.rho_s_upper(r) * (cert.lambda_f1(r) + cert.lambda_f2(gfi));
    const double rhs = conds.rho_f_lower(r) * cert.alpha_f(r);
    const double margin = rhs > 0.0
                              ? (rhs - lhs) / rhs
                              : (lhs <= 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
    ++rate.applicable;
    if (margin < rate.worst_margin) {
      rate.worst_margin = margin;
      rate.witness_r = r;
    }
  }
  rate.pass = rate.worst_margin >= conds.margin_min;

  rep.checks = {rho_s_low, small_gain, rate, drive, rho_f_low};
  return rep;
}

enum class LyapBranch { Slow, Fast, Tie };

// V(x, z) = max{ V_s(x), sigma(V_f(z, x)) } with a branch indicator; ties are
// flagged when the two arguments agree to 1e-12 relative.
class CompositeLyapunov {
 public:
  CompositeLyapunov(ValueFn v_s, ValueFn2 v_f, ComparisonCurve sigma,
                    double tie_rel = 1e-12)
      : v_s_(std::move(v_s)),
        v_f_(std::move(v_f)),
        sigma_(std::move(sigma)),
        tie_rel_(tie_rel) {}

  std::pair<double, LyapBranch> eval(const VecX& x, const VecX& z) const {
    const double a = v_s_(x);
    const double b = sigma_(v_f_(z, x));
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (std::abs(a - b) < tie_rel_ * scale)
      return {std::max(a, b), LyapBranch::Tie};
    return a > b ? std::pair{a, LyapBranch::Slow}
                 : std::pair{b, LyapBranch::Fast};
  }
  double value(const VecX& x, const VecX& z) const { return eval(x, z).first; }
  const ComparisonCurve& sigma() const { return sigma_; }

 private:
  ValueFn v_s_;
  ValueFn2 v_f_;
  ComparisonCurve sigma_;
  double tie_rel_;
};

inline CompositeLyapunov make_composite_lyapunov(const ISSCertificate& cert,
                                                 const ComparisonCurve& sigma) {
  return CompositeLyapunov(cert.V_s, cert.V_f, sigma);
}

// Fills traj.lyapunov with (V_s, V_f, V) per recorded sample.
inline void attach_lyapunov(Trajectory& traj, const ISSCertificate& cert,
                            const CompositeLyapunov& lyap) {
  traj.lyapunov.resize(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double vs = cert.V_s(traj.x[k]);
    const double vf = cert.V_f(traj.z[k], traj.x[k]);
    traj.lyapunov[k] = {vs, vf, lyap.value(traj.x[k], traj.z[k])};
  }
}

struct DecreaseReport {
  std::size_t violations = 0;
  double worst_jump = 0.0;  // max of V_{k+1} - V_k - slack over violations
  double fraction_above_level = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<double> violation_times;  // first few, for diagnostics
};

// Difference-form decrease check: over consecutive samples with
// V(t_k) > input_level, requires V(t_{k+1}) <= V(t_k) + 1e-7 * max(1, V(t_k)).
// The composite V is nonsmooth at branch ties, so no gradient form is used.
inline DecreaseReport check_lyapunov_decrease(const Trajectory& traj,
                                              const CompositeLyapunov& lyap,
                                              double input_level,
                                              double slack_coeff = 1e-7) {
  DecreaseReport rep;
  if (traj.size() < 2) return rep;
  std::size_t above = 0;
  std::vector<double> values(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    values[k] = lyap.value(traj.x[k], traj.z[k]);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    if (values[k] > input_level) {
      ++above;
      ++rep.pairs_checked;
      const double slack = slack_coeff * std::max(1.0, values[k]);
      const double jump = values[k + 1] - values[k] - slack;
      if (jump > 0.0) {
        ++rep.violations;
        rep.worst_jump = std::max(rep.worst_jump, jump);
        if (rep.violation_times.size() < 16)
          rep.violation_times.push_back(traj.times[k]);
      }
    }
  }
  rep.fraction_above_level =
      static_cast<double>(above) / static_cast<double>(traj.size() - 1);
  return rep;
}

}  // namespace spkit
