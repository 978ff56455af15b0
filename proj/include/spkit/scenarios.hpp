#pragma once

// Ready-to-run scenario bundles: the saturated-dynamics example, nonlinear
// integral control, and gradient-flow feedback optimization, each wired as a
// PerturbedSystem plus its ISS certificate and time-scale condition data.

#include <cmath>
#include <optional>
#include <string>

#include "spkit/catalog.hpp"
#include "spkit/certificates.hpp"
#include "spkit/samples.hpp"
#include "spkit/system.hpp"

namespace spkit {

struct ScenarioBundle {
  std::string name;
  PerturbedSystem system;
  std::optional<ISSCertificate> certificate;
  std::optional<TheoremConditions> conditions;
  std::optional<ComparisonCurve> drive_envelope;  // bound curve for |g_s|
  VecX x_eq, z_eq;
  SampleBox box;  // the stated box for sample-based checks
};

namespace detail {

inline double sat(double r) { return std::clamp(r, -1.0, 1.0); }

inline VecX scalar_vec(double v) {
  VecX x(1);
  x << v;
  return x;
}

// Zero curve for a vanishing cross-gradient term; no class tag fits a curve
// that is identically zero.
inline ComparisonCurve zero_curve() {
  return ComparisonCurve([](double) { return 0.0; }, CurveClass::Unspecified,
                         {}, "zero");
}

}  // namespace detail

// Certificate of the saturated-dynamics system for one value of the free
// parameter varrho in (0, 1):
//   V_s = x^2/2, V_f = (z-x)^2/2, gamma_s(r) = r/varrho^2,
//   alpha_s(r) = (1-varrho) * psi(sqrt(2r)), alpha_f(r) = psi(sqrt(2r)),
//   lambda_f1(r) = sqrt(2r), lambda_f2 = 0, with psi(u) = u*sat(u).
inline ISSCertificate make_saturated_certificate(double varrho) {
  if (!(varrho > 0.0) || !(varrho < 1.0))
    throw std::invalid_argument("varrho must lie in (0, 1)");
  ISSCertificate cert;
  cert.V_s = [](const VecX& x) { return 0.5 * x[0] * x[0]; };
  cert.grad_V_s = [](const VecX& x) { return detail::scalar_vec(x[0]); };
  cert.V_f = [](const VecX& z, const VecX& x) {
    const double e = z[0] - x[0];
    return 0.5 * e * e;
  };
  cert.grad_V_f_z = [](const VecX& z, const VecX& x) {
    return detail::scalar_vec(z[0] - x[0]);
  };
  cert.grad_V_f_x = [](const VecX& z, const VecX& x) {
    return detail::scalar_vec(x[0] - z[0]);
  };
  const auto half_square = power_curve(0.5, 2.0);
  cert.alpha_s_lower = half_square;
  cert.alpha_s_upper = half_square;
  cert.alpha_f_lower = half_square;
  cert.alpha_f_upper = half_square;
  cert.gamma_s = linear_curve(1.0 / (varrho * varrho));
  const auto psi_sqrt = [](double r) {
    const double u = std::sqrt(2.0 * r);
    return u * detail::sat(u);
  };
  cert.alpha_s = ComparisonCurve(
      [varrho, psi_sqrt](double r) { return (1.0 - varrho) * psi_sqrt(r); },
      CurveClass::PD, {}, "alpha_s");
  cert.alpha_f =
      ComparisonCurve(psi_sqrt, CurveClass::PD, {}, "alpha_f");
  cert.lambda_f1 = ComparisonCurve(
      [](double r) { return std::sqrt(2.0 * r); }, CurveClass::PD, {},
      "lambda_f1");
  cert.lambda_f2 = detail::zero_curve();
  return cert;
}

// Saturated two-block system  xdot = -c0 sat(z), zdot = -sat(z - x),
// phi(x) = x, with the constant time-scale pair rho_s = c0, rho_f = 1.
inline ScenarioBundle saturated_dynamics_scenario(double c0 = 0.4,
                                                  double varrho = 0.9) {
  if (!(c0 > 0.0))
    throw std::invalid_argument("saturated_dynamics_scenario: c0 must be > 0");
  ScenarioBundle b;
  b.name = "example1_saturated";
  b.system.n = 1;
  b.system.m = 1;
  b.system.g_s = [](const VecX&, const VecX& z, const VecX&) {
    return detail::scalar_vec(-detail::sat(z[0]));
  };
  b.system.g_f = [](const VecX& z, const VecX& x, const VecX&) {
    return detail::scalar_vec(-detail::sat(z[0] - x[0]));
  };
  b.system.rho_s = [c0](const VecX&, const VecX&, const VecX&) { return c0; };
  b.system.phi = [](const VecX& x) { return x; };

  b.certificate = make_saturated_certificate(varrho);
  b.drive_envelope = saturation_curve();

  // Conditions via a slightly inflated gamma_s: gamma_f is its inverse, and
  // the drive bound through gamma_f caps rho_s * |g_s| on the guard set.
  const double vr_hat2 = 0.9 * varrho * varrho;
  TheoremConditions conds;
  conds.rho_s_lower = constant_curve(c0);
  conds.gamma_f = linear_curve(vr_hat2);
  conds.rho_f_lower = constant_curve(1.0);
  const ComparisonCurve ghat =
      drive_bound_from_gamma_f(*b.certificate, conds.gamma_f,
                               *b.drive_envelope);
  conds.rho_s_upper = ComparisonCurve(
      [c0, ghat](double r) { return c0 * ghat(r); }, CurveClass::P, {},
      "rho_s_upper");
  conds.sigma =
      construct_sigma(b.certificate->gamma_s, conds.gamma_f, conds.grid);
  b.conditions = std::move(conds);

  b.x_eq = detail::scalar_vec(0.0);
  b.z_eq = detail::scalar_vec(0.0);
  b.box = symmetric_box(1, 5.0, 1, 5.0);
  return b;
}

struct TimescaleSweepResult {
  double c0_max = 0.0;
  double best_varrho = 0.0;
};

// Largest admissible constant time-scale ratio for the saturated-dynamics
// system, maximised over the certificate parameter varrho.
inline TimescaleSweepResult saturated_c0_sweep(
    const std::vector<double>& varrho_grid,
    const std::vector<double>& grid = default_grid()) {
  TimescaleSweepResult res;
  for (double vr : varrho_grid) {
    const ISSCertificate cert = make_saturated_certificate(vr);
    const auto ratio = find_max_timescale_ratio(cert, saturation_curve(), grid);
    if (!ratio.unsatisfiable && ratio.c0 > res.c0_max) {
      res.c0_max = ratio.c0;
      res.best_varrho = vr;
    }
  }
  return res;
}

inline std::vector<double> default_varrho_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(0.01 * i);
  g.back() = 0.99;
  return g;
}

namespace detail {

// Shared fast-block certificate pieces for the cubic plant z' = -(z-x-a)^3:
// V_f = (z-x-a)^2, alpha_f(r) = 2 r^2, lambda_f1(r) = 2 sqrt(r).
inline void fill_cubic_fast_block(ISSCertificate& cert, double offset) {
  cert.V_f = [offset](const VecX& z, const VecX& x) {
    const double e = z[0] - x[0] - offset;
    return e * e;
  };
  cert.grad_V_f_z = [offset](const VecX& z, const VecX& x) {
    return scalar_vec(2.0 * (z[0] - x[0] - offset));
  };
  cert.grad_V_f_x = [offset](const VecX& z, const VecX& x) {
    return scalar_vec(-2.0 * (z[0] - x[0] - offset));
  };
  cert.alpha_f_lower = power_curve(1.0, 2.0);
  cert.alpha_f_upper = power_curve(1.0, 2.0);
  cert.alpha_f = ComparisonCurve([](double r) { return 2.0 * r * r; },
                                 CurveClass::PD, {}, "alpha_f");
  cert.lambda_f1 = ComparisonCurve(
      [](double r) { return 2.0 * std::sqrt(r); }, CurveClass::PD, {},
      "lambda_f1");
  cert.lambda_f2 = zero_curve();
}

inline void fill_quadratic_slow_block(ISSCertificate& cert,
                                      const ComparisonCurve& alpha_s) {
  cert.V_s = [](const VecX& x) { return x[0] * x[0]; };
  cert.grad_V_s = [](const VecX& x) { return scalar_vec(2.0 * x[0]); };
  cert.alpha_s_lower = power_curve(1.0, 2.0);
  cert.alpha_s_upper = power_curve(1.0, 2.0);
  cert.gamma_s = linear_curve(4.0);
  cert.alpha_s = alpha_s;
}

}  // namespace detail

// Integral feedback for the cubic plant z' = -(z - x)^3 with output y = z:
//   x' = -rho(|y|) y, rho(r) = coeff * r^2 (nonlinear gain) or rho = coeff
//   (the classical constant-gain integrator).
inline ScenarioBundle integral_control_scenario(bool use_nonlinear_gain,
                                                double rho_coeff) {
  if (!(rho_coeff > 0.0))
    throw std::invalid_argument("integral_control_scenario: rho_coeff > 0");
  ScenarioBundle b;
  b.name = "integral_control";
  b.system.n = 1;
  b.system.m = 1;
  b.system.g_s = [](const VecX&, const VecX& z, const VecX&) {
    return detail::scalar_vec(-z[0]);
  };
  b.system.g_f = [](const VecX& z, const VecX& x, const VecX&) {
    return detail::scalar_vec(-std::pow(z[0] - x[0], 3));
  };
  if (use_nonlinear_gain) {
    b.system.rho_s = [rho_coeff](const VecX&, const VecX& z, const VecX&) {
      return rho_coeff * z[0] * z[0];
    };
  } else {
    b.system.rho_s = [rho_coeff](const VecX&, const VecX&, const VecX&) {
      return rho_coeff;
    };
  }
  b.system.phi = [](const VecX& x) { return x; };

  ISSCertificate cert;
  detail::fill_quadratic_slow_block(cert, linear_curve(1.0));
  detail::fill_cubic_fast_block(cert, 0.0);
  b.certificate = std::move(cert);
  b.drive_envelope = identity_curve();

  TheoremConditions conds;
  conds.gamma_f = linear_curve(1.0 / 4.41);
  conds.rho_f_lower = constant_curve(1.0);
  if (use_nonlinear_gain) {
    conds.rho_s_lower = ComparisonCurve(
        [rho_coeff](double r) { return 0.25 * rho_coeff * r; }, CurveClass::P,
        {}, "rho_s_lower");
    // |g_s| <= 3.1 sqrt(V_f) on the guard set, so rho |g_s| <= coeff * |g_s|^3
    // <= 29.8 coeff V_f^{3/2}.
    conds.rho_s_upper = power_curve(29.8 * rho_coeff, 1.5);
  } else {
    conds.rho_s_lower = constant_curve(rho_coeff);
    conds.rho_s_upper = power_curve(3.1 * rho_coeff, 0.5);
  }
  conds.sigma =
      construct_sigma(b.certificate->gamma_s, conds.gamma_f, conds.grid);
  b.conditions = std::move(conds);

  b.x_eq = detail::scalar_vec(0.0);
  b.z_eq = detail::scalar_vec(0.0);
  b.box = symmetric_box(1, 5.0, 1, 5.0);
  return b;
}

// Gradient-flow feedback optimization for the cubic plant, in coordinates
// shifted to put the optimizer at (0, 1):
//   x' = rho(|g|) g with g = -2z + 2, rho(r) = 0.004 r^2,
//   z' = -(z - x - 1)^3,  phi(x) = x + 1.
inline ScenarioBundle feedback_optimization_scenario() {
  ScenarioBundle b;
  b.name = "example2_feedback_opt";
  b.system.n = 1;
  b.system.m = 1;
  b.system.g_s = [](const VecX&, const VecX& z, const VecX&) {
    return detail::scalar_vec(-2.0 * z[0] + 2.0);
  };
  b.system.g_f = [](const VecX& z, const VecX& x, const VecX&) {
    return detail::scalar_vec(-std::pow(z[0] - x[0] - 1.0, 3));
  };
  b.system.rho_s = [](const VecX&, const VecX& z, const VecX&) {
    const double g = -2.0 * z[0] + 2.0;
    return 0.004 * g * g;
  };
  b.system.phi = [](const VecX& x) { return detail::scalar_vec(x[0] + 1.0); };

  ISSCertificate cert;
  detail::fill_quadratic_slow_block(cert, linear_curve(2.0));
  detail::fill_cubic_fast_block(cert, 1.0);
  b.certificate = std::move(cert);
  b.drive_envelope = linear_curve(2.0);

  TheoremConditions conds;
  conds.rho_s_lower = ComparisonCurve([](double r) { return 0.004 * r; },
                                      CurveClass::P, {}, "rho_s_lower");
  conds.gamma_f = linear_curve(1.0 / 4.41);
  conds.rho_s_upper = power_curve(0.99, 1.5);
  conds.rho_f_lower = constant_curve(1.0);
  conds.sigma =
      construct_sigma(b.certificate->gamma_s, conds.gamma_f, conds.grid);
  b.conditions = std::move(conds);

  b.x_eq = detail::scalar_vec(0.0);
  b.z_eq = detail::scalar_vec(1.0);
  b.box = symmetric_box(1, 3.0, 1, 3.0);
  return b;
}

// Constant-gain variant of the feedback optimization loop. Its linearization
// at the equilibrium is nilpotent with a nonzero Jordan block, so no
// exponential certificate exists; the shipped condition data honestly fails
// the rate inequality.
inline ScenarioBundle feedback_optimization_constant_gain(double gain = 0.004) {
  if (!(gain > 0.0))
    throw std::invalid_argument("feedback_optimization_constant_gain: gain > 0");
  ScenarioBundle b = feedback_optimization_scenario();
  b.name = "example2_constant_gain";
  b.system.rho_s = [gain](const VecX&, const VecX&, const VecX&) {
    return gain;
  };
  TheoremConditions conds;
  conds.rho_s_lower = constant_curve(gain);
  conds.gamma_f = linear_curve(1.0 / 4.41);
  conds.rho_s_upper = power_curve(6.2 * gain, 0.5);
  conds.rho_f_lower = constant_curve(1.0);
  conds.sigma =
      construct_sigma(b.certificate->gamma_s, conds.gamma_f, conds.grid);
  b.conditions = std::move(conds);
  return b;
}

}  // namespace spkit
