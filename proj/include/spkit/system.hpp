#pragma once

// Two-block systems  xdot = rho_s(x,z,d) g_s(x,z,d),
//                    zdot = rho_f(z,x,w) g_f(z,x,w)
// with positive state-dependent time-scale functions rho_s, rho_f, a
// steady-state map phi for the fast block, and deterministic input signals.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spkit/comparison.hpp"
#include "spkit/integrate.hpp"

namespace spkit {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using StateFn = std::function<VecX(const VecX&, const VecX&, const VecX&)>;
using ScaleFn = std::function<double(const VecX&, const VecX&, const VecX&)>;
using SignalFn = std::function<VecX(double)>;

struct PerturbedSystem {
  Eigen::Index n = 0, m = 0, p = 0, q = 0;
  StateFn g_s;  // (x, z, d) -> R^n
  StateFn g_f;  // (z, x, w) -> R^m
  ScaleFn rho_s;  // defaults to 1
  ScaleFn rho_f;
  std::function<VecX(const VecX&)> phi;  // steady-state map R^n -> R^m
  SignalFn d_signal;  // defaults to zero
  SignalFn w_signal;

  VecX d_at(double t) const { return d_signal ? d_signal(t) : VecX::Zero(p); }
  VecX w_at(double t) const { return w_signal ? w_signal(t) : VecX::Zero(q); }
  double rho_s_at(const VecX& x, const VecX& z, const VecX& d) const;
  double rho_f_at(const VecX& z, const VecX& x, const VecX& w) const;
};

// Small catalog of deterministic input signals for scenario wiring.
inline SignalFn constant_signal(VecX value) {
  return [value = std::move(value)](double) { return value; };
}

inline SignalFn step_signal(double switch_time, VecX before, VecX after) {
  return [=](double t) { return t < switch_time ? before : after; };
}

inline SignalFn sinusoid_signal(VecX amplitude, double angular_freq,
                                double phase = 0.0) {
  return [=](double t) {
    return VecX(amplitude * std::sin(angular_freq * t + phase));
  };
}

inline double PerturbedSystem::rho_s_at(const VecX& x, const VecX& z,
                                        const VecX& d) const {
  return rho_s ? rho_s(x, z, d) : 1.0;
}
inline double PerturbedSystem::rho_f_at(const VecX& z, const VecX& x,
                                        const VecX& w) const {
  return rho_f ? rho_f(z, x, w) : 1.0;
}

// Evaluates the right-hand side at one state. A negative time-scale value is
// a model violation; a zero value is one too unless the matching drift
// vanishes there (a class-P gain of the drift magnitude is zero exactly at
// such states, and the product is unambiguously zero).
inline std::pair<VecX, VecX> rhs(const PerturbedSystem& sys, double t,
                                 const VecX& x, const VecX& z) {
  const VecX d = sys.d_at(t);
  const VecX w = sys.w_at(t);
  const double rs = sys.rho_s_at(x, z, d);
  const double rf = sys.rho_f_at(z, x, w);
  const VecX gs = sys.g_s(x, z, d);
  const VecX gf = sys.g_f(z, x, w);
  if (rs < 0.0 || !std::isfinite(rs) || (rs == 0.0 && gs.norm() > 0.0))
    throw ModelError("rho_s evaluated nonpositive (" + detail::num_str(rs) +
                     ") at a state with nonzero slow drift");
  if (rf < 0.0 || !std::isfinite(rf) || (rf == 0.0 && gf.norm() > 0.0))
    throw ModelError("rho_f evaluated nonpositive (" + detail::num_str(rf) +
                     ") at a state with nonzero fast drift");
  return {rs * gs, rf * gf};
}

enum class SimMethod { Rk4Fixed, Rk45Adaptive };

struct SimConfig {
  double t_final = 1.0;
  SimMethod method = SimMethod::Rk4Fixed;
  double dt = 1e-3;       // fixed-step size
  double rtol = 1e-8;     // adaptive tolerances
  double atol = 1e-10;
  double divergence_radius = 1e8;
  int record_every = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<VecX> x;
  std::vector<VecX> z;
  // Optional (V_s, V_f, V) per sample, filled by attach_lyapunov.
  std::vector<std::array<double, 3>> lyapunov;
  StepStats steps;
  bool diverged = false;

  std::size_t size() const { return times.size(); }
  const VecX& final_x() const { return x.back(); }
  const VecX& final_z() const { return z.back(); }
};

inline void validate(const SimConfig& cfg) {
  if (!(cfg.t_final > 0.0))
    throw std::invalid_argument("SimConfig: t_final must be > 0");
  if (cfg.method == SimMethod::Rk4Fixed && !(cfg.dt > 0.0))
    throw std::invalid_argument("SimConfig: dt must be > 0");
  if (cfg.method == SimMethod::Rk45Adaptive &&
      (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)))
    throw std::invalid_argument("SimConfig: rtol and atol must be > 0");
  if (cfg.record_every < 1)
    throw std::invalid_argument("SimConfig: record_every must be >= 1");
}

// Integrates the system over [0, t_final]. A trajectory that leaves the
// divergence radius is truncated and flagged, not an error: instability
// demonstrations are first-class outputs.
inline Trajectory simulate(const PerturbedSystem& sys, const VecX& x0,
                           const VecX& z0, const SimConfig& cfg) {
  validate(cfg);
  if (x0.size() != sys.n || z0.size() != sys.m)
    throw std::invalid_argument("simulate: initial state dimension mismatch");
  if (!x0.allFinite() || !z0.allFinite())
    throw std::invalid_argument("simulate: initial state must be finite");

  const OdeFn f = [&sys](double t, const VecX& y) {
    const VecX x = y.head(sys.n);
    const VecX z = y.tail(sys.m);
    auto [xdot, zdot] = rhs(sys, t, x, z);
    VecX dy(sys.n + sys.m);
    dy.head(sys.n) = xdot;
    dy.tail(sys.m) = zdot;
    return dy;
  };

  Trajectory traj;
  VecX y(sys.n + sys.m);
  y.head(sys.n) = x0;
  y.tail(sys.m) = z0;
  traj.times.push_back(0.0);
  traj.x.push_back(x0);
  traj.z.push_back(z0);

  std::size_t step_index = 0;
  const StepObserver observe = [&](double t, const VecX& yc) {
    ++step_index;
    if (!yc.allFinite()) {  // truncate; never record non-finite samples
      traj.diverged = true;
      return false;
    }
    const bool blown = yc.norm() > cfg.divergence_radius;
    if (step_index % static_cast<std::size_t>(cfg.record_every) == 0 ||
        t >= cfg.t_final || blown) {
      traj.times.push_back(t);
      traj.x.push_back(yc.head(sys.n));
      traj.z.push_back(yc.tail(sys.m));

    }
    if (blown) {
      traj.diverged = true;
      return false;
    }
    return true;
  };

  if (cfg.method == SimMethod::Rk4Fixed)
    integrate_rk4(f, y, 0.0, cfg.t_final, cfg.dt, observe, traj.steps);
  else
    integrate_rk45(f, y, 0.0, cfg.t_final, cfg.rtol, cfg.atol, observe,
                   traj.steps);

  return traj;
}

struct SteadyStateReport {
  double max_fast_residual = 0.0;
  VecX witness_x;
  double slow_residual_origin = 0.0;
  bool pass = false;
};

// Checks |g_f(phi(x), x, 0)| over the grid and |g_s(0, phi(0), 0)|.
inline SteadyStateReport check_steady_state_map(
    const PerturbedSystem& sys, const std::vector<VecX>& x_grid,
    double tol = 1e-9) {
  if (x_grid.empty())
    throw std::invalid_argument("check_steady_state_map: empty grid");
  SteadyStateReport rep;
  const VecX w0 = VecX::Zero(sys.q);
  const VecX d0 = VecX::Zero(sys.p);
  for (const VecX& x : x_grid) {
    const double res = sys.g_f(sys.phi(x), x, w0).norm();
    if (res >= rep.max_fast_residual) {
      rep.max_fast_residual = res;
      rep.witness_x = x;
    }
  }
  const VecX origin = VecX::Zero(sys.n);
  rep.slow_residual_origin = sys.g_s(origin, sys.phi(origin), d0).norm();
  rep.pass = rep.max_fast_residual <= tol && rep.slow_residual_origin <= tol;
  return rep;
}

// Central finite-difference Jacobian of the full right-hand side at (x, z).
inline Eigen::MatrixXd numeric_jacobian(const PerturbedSystem& sys,
                                        const VecX& x, const VecX& z,
                                        double t = 0.0, double step = 1e-6) {
  const Eigen::Index dim = sys.n + sys.m;
  Eigen::MatrixXd jac(dim, dim);
  VecX y(dim);
  y << x, z;
  const auto eval = [&](const VecX& yy) {
    auto [xd, zd] = rhs(sys, t, yy.head(sys.n), yy.tail(sys.m));
    VecX out(dim);
    out << xd, zd;
    return out;
  };
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double h = step * std::max(1.0, std::abs(y[j]));
    VecX yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    jac.col(j) = (eval(yp) - eval(ym)) / (2.0 * h);
  }
  return jac;
}

}  // namespace spkit
