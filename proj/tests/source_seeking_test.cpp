#include "spkit/source_seeking.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spkit;

namespace {

SourceSeekingScenario two_agent_line() {
  SourceSeekingScenario scn;
  scn.agent_count = 2;
  scn.dim = 1;
  std::vector<VecX> centers(2, VecX(1));
  centers[0] << 0.5;
  centers[1] << -0.5;
  scn.offsets = offsets_from_centers(centers);
  scn.adjacency = make_default_adjacency(2);
  scn.mu = 1.0;
  scn.c0 = 0.1;
  scn.p_star = VecX::Zero(1);
  scn.objective.value = [](const VecX& p) { return p.squaredNorm(); };
  scn.objective.grad = [](const VecX& p) { return VecX(2.0 * p); };
  scn.objective.omega = 2.0;
  scn.objective.theta = 2.0;
  scn.finalize();
  return scn;
}

VecX stack_positions(const std::vector<VecX>& ps) {
  const int n = static_cast<int>(ps[0].size());
  VecX out(static_cast<Eigen::Index>(ps.size()) * n);
  for (std::size_t i = 0; i < ps.size(); ++i)
    out.segment(static_cast<Eigen::Index>(i) * n, n) = ps[i];
  return out;
}

VecX mean_position(const VecX& p, int N, int n) {
  VecX m = VecX::Zero(n);
  for (int i = 0; i < N; ++i)
    m += p.segment(static_cast<Eigen::Index>(i) * n, n);
  return m / static_cast<double>(N);
}

}  // namespace

TEST(Network, TwoAgentPathClosedForm) {
  const auto scn = two_agent_line();
  const auto mats = build_reduced_network(scn);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, -1.0, -1.0, 1.0;
  EXPECT_LT((mats.laplacian - expected).norm(), 1e-15);
  ASSERT_EQ(mats.Lbar.rows(), 2);
  ASSERT_EQ(mats.Lbar.cols(), 1);
  // L has eigenvalues {0, 2}; the reduced column is the unit eigenvector of
  // the nonzero eigenvalue scaled by it, so its norm is 2.
  EXPECT_NEAR(mats.Lbar.norm(), 2.0, 1e-12);
  ASSERT_EQ(mats.A.rows(), 3);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(mats.A);
  EXPECT_LT(es.eigenvalues().real().maxCoeff(), 0.0);
}

TEST(Network, CompleteGraphSpectrum) {
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mats.laplacian);
  const VecX ev = es.eigenvalues();
  EXPECT_NEAR(ev[0], 0.0, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev[i], 4.0, 1e-12);
}

TEST(Network, UnitaryComplementProperties) {
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  const int N = scn.agent_count;
  EXPECT_LT((mats.U1.transpose() * mats.U1 -
             Eigen::MatrixXd::Identity(N - 1, N - 1))
                .norm(),
            1e-13);
  EXPECT_LT((mats.U1.transpose() * VecX::Ones(N)).norm(), 1e-13);
  EXPECT_LT((mats.laplacian * VecX::Ones(N)).norm(), 1e-13);
}

TEST(Network, LyapunovSolveResidual) {
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  EXPECT_LE(mats.lyapunov_residual, 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mats.P);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Network, DisconnectedGraphThrows) {
  auto scn = make_square_formation_scenario();
  scn.adjacency.setZero();
  EXPECT_THROW(build_reduced_network(scn), NetworkError);
}

TEST(Scenario, ValidationPassesOnShippedDefault) {
  const auto scn = make_square_formation_scenario();
  EXPECT_NO_THROW(validate_scenario(scn, CounterRng{99}));
  VecX sum = VecX::Zero(scn.dim);
  for (const auto& d : scn.d0) sum += d;
  EXPECT_LE(sum.norm(), 1e-15);
  EXPECT_NEAR(scn.gram.determinant(), 1.0, 1e-14);
}

TEST(Scenario, BrokenAntisymmetryIsCaught) {
  auto scn = make_square_formation_scenario();
  scn.offsets[1][0] += 1e-8;
  EXPECT_THROW(validate_scenario(scn, CounterRng{99}), NetworkError);
}

TEST(Equilibrium, ConstantFieldGivesZeroEstimate) {
  auto scn = make_square_formation_scenario();
  scn.objective.value = [](const VecX&) { return 5.0; };
  scn.objective.grad = [](const VecX& p) { return VecX(VecX::Zero(p.size())); };
  VecX p0(2);
  p0 << 0.7, -1.3;
  EXPECT_LE(gradient_estimate(scn, p0).norm(), 1e-15);
}

TEST(Equilibrium, QuadraticFieldAtOptimumHasNoCurvatureBias) {
  // Equal |d_i0| on the symmetric square makes the curvature terms cancel,
  // so the estimate vanishes exactly at the optimizer.
  const auto scn = make_square_formation_scenario();
  EXPECT_LE(gradient_estimate(scn, scn.p_star).norm(), 1e-14);
}

TEST(Equilibrium, ReducedDriftVanishesOnTheMap) {
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  const auto sys = reduced_seeking_system(scn, mats);
  const CounterRng rng{314};
  for (std::uint64_t k = 0; k < 3; ++k) {
    VecX p0(2);
    p0 << rng.uniform(2 * k, -4.0, 4.0), rng.uniform(2 * k + 1, -4.0, 4.0);
    const VecX ze = equilibrium_map(scn, mats, p0);
    EXPECT_LE(sys.g_f(ze, p0, VecX(0)).norm(), 1e-10);
  }
}

TEST(Reduction, FullAndReducedEstimatorsAgree) {
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  std::vector<VecX> positions(4, VecX(2));
  positions[0] << 1.0, 0.3;
  positions[1] << -0.2, 0.8;
  positions[2] << 0.4, -0.6;
  positions[3] << 2.0, 1.1;
  const auto full = frozen_estimator_full(scn, positions);
  const auto reduced = frozen_estimator_reduced(scn, mats, positions);

  const int N = scn.agent_count, n = scn.dim;
  const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;
  VecX z0_full(2 * nd);
  for (Eigen::Index i = 0; i < 2 * nd; ++i)
    z0_full[i] = std::sin(0.7 * static_cast<double>(i + 1));
  const Eigen::MatrixXd U1k = Eigen::kroneckerProduct(
      mats.U1, Eigen::MatrixXd::Identity(n, n));
  VecX z0_red(nd + U1k.cols());
  z0_red.head(nd) = z0_full.head(nd);
  z0_red.tail(U1k.cols()) = U1k.transpose() * z0_full.tail(nd);

  SimConfig cfg;
  cfg.t_final = 20.0;
  cfg.dt = 1e-3;
  cfg.record_every = 100;
  const auto tf = simulate(full, VecX(0), z0_full, cfg);
  const auto tr = simulate(reduced, VecX(0), z0_red, cfg);
  ASSERT_EQ(tf.size(), tr.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < tf.size(); ++k)
    worst = std::max(worst,
                     (tf.z[k].head(nd) - tr.z[k].head(nd)).norm());
  EXPECT_LE(worst, 1e-8);
}

TEST(Reduction, LinearFastBlockMatchesEigenSolution) {
  // Closed form through the eigendecomposition of the estimator matrix:
  // z(t) = phi + V exp(D t) V^{-1} (z0 - phi).
  const auto scn = make_square_formation_scenario();
  const auto mats = build_reduced_network(scn);
  std::vector<VecX> positions(4, VecX(2));
  positions[0] << 0.5, 0.5;
  positions[1] << -0.5, 0.5;
  positions[2] << -0.5, -0.5;
  positions[3] << 0.5, -0.5;
  const auto sys = frozen_estimator_reduced(scn, mats, positions);
  const VecX phi = sys.phi(VecX(0));
  VecX z0(sys.m);
  for (Eigen::Index i = 0; i < sys.m; ++i)
    z0[i] = 0.5 * std::cos(1.3 * static_cast<double>(i));

  SimConfig cfg;
  cfg.t_final = 5.0;
  cfg.method = SimMethod::Rk45Adaptive;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  cfg.record_every = 1000000;
  const auto traj = simulate(sys, VecX(0), z0, cfg);

  const Eigen::EigenSolver<Eigen::MatrixXd> es(mats.A);
  const Eigen::VectorXcd expd =
      (es.eigenvalues() * cfg.t_final).array().exp();
  const Eigen::VectorXcd w =
      es.eigenvectors().partialPivLu().solve((z0 - phi).cast<std::complex<double>>());
  const VecX closed =
      phi + (es.eigenvectors() * expd.asDiagonal() * w).real();
  EXPECT_LE((traj.final_z() - closed).norm(), 1e-8);
}

TEST(Estimator, FrozenPositionsConvergeToMeanValueEstimate) {
  const auto scn = make_square_formation_scenario();
  std::vector<VecX> positions(4, VecX(2));
  positions[0] << 1.1, 0.2;
  positions[1] << -0.4, 0.9;
  positions[2] << 0.3, -0.7;
  positions[3] << 1.8, 1.4;
  const auto sys = frozen_estimator_full(scn, positions);

  VecX target = VecX::Zero(2);
  for (int i = 0; i < 4; ++i)
    target += scn.d0[i] * scn.objective.value(positions[i]);

  // Slowest estimator mode has real part -1/2; run 50 time constants.
  SimConfig cfg;
  cfg.t_final = 100.0;
  cfg.dt = 1e-3;
  cfg.record_every = 100000;
  const auto traj = simulate(sys, VecX(0), VecX::Zero(sys.m), cfg);
  for (int j = 0; j < 4; ++j) {
    const VecX delta_j = traj.final_z().segment(2 * j, 2);
    EXPECT_LE((delta_j - target).norm(), 1e-6) << "agent " << j;
  }
}

TEST(Saturation, Contract) {
  const CounterRng rng{2718};
  std::uint64_t c = 0;
  for (int k = 0; k < 200; ++k) {
    VecX v(3);
    for (int i = 0; i < 3; ++i) v[i] = rng.uniform(c++, -8.0, 8.0);
    const VecX s = saturate(v);
    EXPECT_LE(s.norm(), 1.0 + 1e-15);
    if (v.norm() <= 1.0) EXPECT_LT((s - v).norm(), 1e-15);
    if (v.norm() > 0.0) EXPECT_GT(v.dot(s), 0.0);
  }
  EXPECT_DOUBLE_EQ(saturate(VecX::Zero(3)).norm(), 0.0);
}

TEST(Remainder, QuadraticFieldWorstRatioIsHalf) {
  Objective obj;
  const double theta = 3.0;
  obj.value = [theta](const VecX& p) { return 0.5 * theta * p.squaredNorm(); };
  obj.grad = [theta](const VecX& p) { return VecX(theta * p); };
  const CounterRng rng{77};
  std::uint64_t c = 0;
  std::vector<std::pair<VecX, VecX>> pairs;
  for (int k = 0; k < 500; ++k) {
    VecX a(2), b(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = rng.uniform(c++, -10.0, 10.0);
      b[i] = rng.uniform(c++, -10.0, 10.0);
    }
    pairs.emplace_back(a, b);
  }
  pairs.emplace_back(pairs.front().first, pairs.front().first);  // equal pair
  const auto rep = check_gradient_remainder(obj, theta, pairs);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.worst_ratio, 0.5, 1e-12);
}

TEST(Remainder, SinePerturbedQuadraticPasses) {
  Objective obj;
  obj.value = [](const VecX& p) { return p.squaredNorm() + std::sin(p[0]); };
  obj.grad = [](const VecX& p) {
    VecX g = 2.0 * p;
    g[0] += std::cos(p[0]);
    return g;
  };
  const CounterRng rng{78};
  std::uint64_t c = 0;
  std::vector<std::pair<VecX, VecX>> pairs;
  for (int k = 0; k < 1000; ++k) {
    VecX a(2), b(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = rng.uniform(c++, -10.0, 10.0);
      b[i] = rng.uniform(c++, -10.0, 10.0);
    }
    pairs.emplace_back(a, b);
  }
  const auto rep = check_gradient_remainder(obj, 3.0, pairs);
  EXPECT_TRUE(rep.pass);
}

TEST(FullLoop, EquilibriumIsInvariant) {
  // Perfect formation at the source with settled estimator states.
  const auto scn = make_square_formation_scenario();
  const auto sys = full_closed_loop_system(scn);
  std::vector<VecX> positions(4, VecX(2));
  for (int i = 0; i < 4; ++i) positions[i] = scn.p_star + scn.d0[i];
  const VecX p_eq = stack_positions(positions);
  const VecX z_eq = sys.phi(p_eq);
  ASSERT_LE(sys.g_f(z_eq, p_eq, VecX(0)).norm(), 1e-12);
  ASSERT_LE(sys.g_s(p_eq, z_eq, VecX(0)).norm(), 1e-12);

  SimConfig cfg;
  cfg.t_final = 100.0;
  cfg.dt = 1e-2;
  cfg.record_every = 100;
  const auto traj = simulate(sys, p_eq, z_eq, cfg);
  double max_dev = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    max_dev = std::max(max_dev, std::hypot((traj.x[k] - p_eq).norm(),
                                           (traj.z[k] - z_eq).norm()));
  EXPECT_LT(max_dev, 1e-10);
}

TEST(FullLoop, ShortRunMetrics) {
  const auto scn = make_square_formation_scenario();
  const auto sys = full_closed_loop_system(scn);
  SimConfig cfg;
  cfg.t_final = 200.0;
  cfg.dt = 1e-3;
  cfg.record_every = 200;
  const VecX p0 = VecX::Zero(sys.n);
  const VecX z0 = VecX::Zero(sys.m);
  const auto traj = simulate(sys, p0, z0, cfg);
  ASSERT_FALSE(traj.diverged);

  const int N = scn.agent_count, n = scn.dim;
  double worst_vf_sum = 0.0;
  double max_formation_first_half = 0.0, max_formation = 0.0;
  bool entered = false;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const VecX mean = mean_position(traj.x[k], N, n);
    if ((mean - scn.p_star).norm() <= scn.p_epsilon) entered = true;
    const auto vel = agent_velocities(scn, traj.x[k],
                                      traj.z[k].head(static_cast<Eigen::Index>(n) * N));
    VecX vf_sum = VecX::Zero(n);
    for (const auto& v : vel.formation) vf_sum += v;
    worst_vf_sum = std::max(worst_vf_sum, vf_sum.norm());
    for (int i = 0; i < N; ++i) {
      const double err =
          (traj.x[k].segment(static_cast<Eigen::Index>(i) * n, n) - mean -
           scn.d0[i])
              .norm();
      max_formation = std::max(max_formation, err);
      if (traj.times[k] <= 0.5 * cfg.t_final)
        max_formation_first_half = std::max(max_formation_first_half, err);
    }
  }
  EXPECT_TRUE(entered);
  EXPECT_LE(worst_vf_sum, 1e-12);
  EXPECT_LE(max_formation, 10.0 * max_formation_first_half);
  const VecX final_mean = mean_position(traj.final_x(), N, n);
  EXPECT_LE((final_mean - scn.p_star).norm(), scn.p_epsilon);
}
