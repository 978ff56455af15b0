#include "spkit/scenarios.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "spkit/certificates.hpp"

using namespace spkit;

namespace {

VecX sv(double v) {
  VecX x(1);
  x << v;
  return x;
}

double distance_to(const Trajectory& traj, const VecX& x_ref,
                   const VecX& z_ref) {
  return std::hypot((traj.final_x() - x_ref).norm(),
                    (traj.final_z() - z_ref).norm());
}

}  // namespace

TEST(SaturatedScenario, BundleChecksPass) {
  const auto b = saturated_dynamics_scenario(0.4, 0.9);
  const auto samples =
      make_sample_set(b.box, 10000, CounterRng{17}, &b.system);
  EXPECT_TRUE(verify_certificate(b.system, *b.certificate, samples).pass());
  EXPECT_TRUE(verify_perturbation_conditions(b.system, *b.certificate,
                                             *b.conditions, samples)
                  .pass());
  std::vector<VecX> grid;
  for (double v = -5.0; v <= 5.0; v += 0.1) grid.push_back(sv(v));
  EXPECT_TRUE(check_steady_state_map(b.system, grid).pass);
}

TEST(SaturatedScenario, AdmissibleRatioFailsWhenExceeded) {
  // c0 = 0.47 exceeds the ratio the shipped varrho = 0.9 data supports.
  const auto b = saturated_dynamics_scenario(0.47, 0.9);
  const auto samples = make_sample_set(b.box, 100, CounterRng{17}, &b.system);
  const auto rep = verify_perturbation_conditions(b.system, *b.certificate,
                                                  *b.conditions, samples);
  const auto* rate = rep.find("rate_inequality");
  ASSERT_NE(rate, nullptr);
  EXPECT_FALSE(rate->pass);
}

TEST(IntegralControl, NonlinearGainConvergesFromUnitStart) {
  const auto b = integral_control_scenario(true, 0.004);
  SimConfig cfg;
  cfg.t_final = 4e8;  // the cubic tail contracts like 1/sqrt(t)
  cfg.method = SimMethod::Rk45Adaptive;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  cfg.record_every = 1000000;
  const auto traj = simulate(b.system, sv(1.0), sv(-1.0), cfg);
  ASSERT_FALSE(traj.diverged);
  EXPECT_LT(distance_to(traj, b.x_eq, b.z_eq), 1e-3);
}

TEST(IntegralControl, NonlinearBundlePassesConditions) {
  const auto b = integral_control_scenario(true, 0.004);
  const auto samples =
      make_sample_set(b.box, 10000, CounterRng{29}, &b.system);
  EXPECT_TRUE(verify_certificate(b.system, *b.certificate, samples).pass());
  EXPECT_TRUE(verify_perturbation_conditions(b.system, *b.certificate,
                                             *b.conditions, samples)
                  .pass());
}

TEST(IntegralControl, ClassicalGainFailsTheRateInequality) {
  const auto b = integral_control_scenario(false, 1.0);
  const auto samples = make_sample_set(b.box, 100, CounterRng{29}, &b.system);
  const auto rep = verify_perturbation_conditions(b.system, *b.certificate,
                                                  *b.conditions, samples);
  const auto* rate = rep.find("rate_inequality");
  ASSERT_NE(rate, nullptr);
  EXPECT_FALSE(rate->pass);
}

TEST(IntegralControl, ClassicalGainHasNoMonotoneCertificateDescent) {
  // The constant-gain loop is only algebraically attracted to the origin:
  // by t = 500 it has not settled and the composite Lyapunov function rises
  // along the way (no certificate-grade descent).
  const auto b = integral_control_scenario(false, 1.0);
  SimConfig cfg;
  cfg.t_final = 500.0;
  cfg.dt = 1e-3;
  cfg.record_every = 10;
  const auto traj = simulate(b.system, sv(0.5), sv(0.5), cfg);
  EXPECT_GT(distance_to(traj, b.x_eq, b.z_eq), 1e-3);
  const auto lyap =
      make_composite_lyapunov(*b.certificate, *b.conditions->sigma);
  const auto rep = check_lyapunov_decrease(traj, lyap, 0.0);
  EXPECT_GT(rep.violations, 0u);
}

TEST(IntegralControl, OriginIsInvariant) {
  for (bool nonlinear : {true, false}) {
    const auto b = integral_control_scenario(nonlinear, 0.004);
    SimConfig cfg;
    cfg.t_final = 100.0;
    cfg.dt = 1e-2;
    cfg.record_every = 100;
    const auto traj = simulate(b.system, sv(0.0), sv(0.0), cfg);
    for (std::size_t k = 0; k < traj.size(); ++k)
      EXPECT_LT(std::hypot(traj.x[k][0], traj.z[k][0]), 1e-12);
  }
}

TEST(FeedbackOpt, ConvergesToOptimizer) {
  const auto b = feedback_optimization_scenario();
  SimConfig cfg;
  cfg.t_final = 4e7;
  cfg.method = SimMethod::Rk45Adaptive;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  cfg.record_every = 100000;
  const auto traj = simulate(b.system, sv(2.0), sv(-1.0), cfg);
  ASSERT_FALSE(traj.diverged);
  EXPECT_LT(distance_to(traj, b.x_eq, b.z_eq), 1e-3);
}

TEST(FeedbackOpt, SteadyStateMapIsExact) {
  const auto b = feedback_optimization_scenario();
  std::vector<VecX> grid;
  for (double v = -5.0; v <= 5.0; v += 0.1) grid.push_back(sv(v));
  const auto rep = check_steady_state_map(b.system, grid);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.max_fast_residual, 1e-40);  // cubed rounding residue only
}

TEST(FeedbackOpt, ConstantGainLinearizationIsNilpotentWithGrowth) {
  const auto b = feedback_optimization_constant_gain(0.004);
  const auto jac = numeric_jacobian(b.system, b.x_eq, b.z_eq);
  EXPECT_NEAR(jac(0, 0), 0.0, 1e-9);
  EXPECT_NEAR(jac(0, 1), -0.008, 1e-9);
  EXPECT_NEAR(jac(1, 0), 0.0, 1e-9);
  EXPECT_NEAR(jac(1, 1), 0.0, 1e-9);
  const Eigen::Matrix2d exact = (Eigen::Matrix2d() << 0.0, -0.008, 0.0, 0.0)
                                    .finished();
  // The matrix exponential grows without bound: ||exp(J t)|| ~ 0.008 t.
  const Eigen::Matrix2d expm = (exact * 5000.0).exp();
  EXPECT_GE(expm.operatorNorm(), 10.0);
  const Eigen::Matrix2d expm2 = (exact * 50000.0).exp();
  EXPECT_GE(expm2.operatorNorm(), 10.0 * expm.operatorNorm() * 0.9);
}

TEST(FeedbackOpt, ConstantGainConditionsFailHonestly) {
  const auto b = feedback_optimization_constant_gain(0.004);
  const auto samples = make_sample_set(b.box, 100, CounterRng{5}, &b.system);
  const auto rep = verify_perturbation_conditions(b.system, *b.certificate,
                                                  *b.conditions, samples);
  EXPECT_FALSE(rep.pass());
  EXPECT_FALSE(rep.find("rate_inequality")->pass);
}

TEST(FeedbackOpt, DerivedGainSitsNearShippedValue) {
  const auto b = feedback_optimization_scenario();
  const auto gtilde = drive_bound_from_gamma_f(
      *b.certificate, b.conditions->gamma_f, *b.drive_envelope);
  const auto rho = derive_slow_gain(b.conditions->rho_s_upper, gtilde);
  const double reference = 0.99 / std::pow(6.2, 3);
  EXPECT_LT(std::abs(rho(1.0) - reference), 0.05 * reference);
}
