#pragma once

// Generic explicit ODE integrators on Eigen vectors: classical fixed-step RK4
// and a Dormand-Prince 4(5) embedded pair with PI step-size control.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace spkit {

using VecX = Eigen::VectorXd;
using OdeFn = std::function<VecX(double, const VecX&)>;

// Called after every accepted step; return false to stop the integration.
using StepObserver = std::function<bool(double t, const VecX& y)>;

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct StepUnderflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void integrate_rk4(const OdeFn& f, VecX& y, double t0, double t1,
                          double dt, const StepObserver& observe,
                          StepStats& stats) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_rk4: dt must be > 0");
  double t = t0;
  while (t < t1) {
    const double h = std::min(dt, t1 - t);
    const VecX k1 = f(t, y);
    const VecX k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const VecX k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const VecX k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (h == dt) ? t + h : t1;
    ++stats.accepted;
    if (observe && !observe(t, y)) return;
  }
}

namespace detail {

inline double error_norm(const VecX& err, const VecX& y0, const VecX& y1,
                         double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

}  // namespace detail

// Dormand-Prince 5(4) with FSAL and a PI controller on the step size.
inline void integrate_rk45(const OdeFn& f, VecX& y, double t0, double t1,
                           double rtol, double atol,
                           const StepObserver& observe, StepStats& stats) {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("integrate_rk45: tolerances must be > 0");
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (!(span > 0.0)) return;
  const double dt_min = 1e-14 * span;

  double t = t0;
  VecX k1 = f(t, y);
  // Initial step from the local derivative scale.
  double dt = std::min(0.01 * (1.0 + y.norm()) / (1.0 + k1.norm()), 0.1 * span);
  dt = std::max(dt, dt_min * 16.0);
  double err_prev = 1e-4;

  VecX k2, k3, k4, k5, k6, k7, y5;
  while (t < t1 * (1.0 - 1e-16) || (t1 == 0.0 && t < t1)) {
    if (t + dt > t1) dt = t1 - t;
    k2 = f(t + a21 * dt, y + dt * (a21 * k1));
    k3 = f(t + 0.3 * dt, y + dt * (a31 * k1 + a32 * k2));
    k4 = f(t + 0.8 * dt, y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + (8.0 / 9) * dt,
           y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + dt,
           y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + dt, y5);
    const VecX err =
        dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = detail::error_norm(err, y, y5, rtol, atol);
    if (!std::isfinite(err_norm)) err_norm = 1e10;
    if (err_norm <= 1.0) {
      t += dt;
      y = y5;
      k1 = k7;  // FSAL
      ++stats.accepted;
      const double e = std::max(err_norm, 1e-10);
      double fac = 0.9 * std::pow(e, -0.14) * std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, 5.0);
      dt *= fac;
      err_prev = e;
      if (observe && !observe(t, y)) return;
    } else {
      ++stats.rejected;
      dt *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
      if (dt < dt_min)
        throw StepUnderflowError(
            "integrate_rk45: step size underflow (problem too stiff for the "
            "requested tolerance)");
    }
  }
}

}  // namespace spkit
