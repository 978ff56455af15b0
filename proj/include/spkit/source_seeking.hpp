#pragma once

// Formation-based source seeking: N single-integrator agents hold a formation
// whose offsets turn sampled field values into a mean-value gradient estimate
// via a distributed averaging estimator; the average position descends the
// estimated gradient through a saturated law. Builds both the full per-agent
// closed loop and the reduced model obtained by factoring the all-ones
// direction out of the estimator.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "spkit/certificates.hpp"
#include "spkit/rng.hpp"
#include "spkit/system.hpp"

namespace spkit {

struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Objective {
  ValueFn value;
  GradFn grad;
  double omega = 0.0;  // strong-convexity constant
  double theta = 0.0;  // gradient Lipschitz constant
};

// Radial saturation v * min(1, 1/|v|).
inline VecX saturate(const VecX& v) {
  const double norm = v.norm();
  return norm <= 1.0 ? v : VecX(v / norm);
}

struct SourceSeekingScenario {
  int agent_count = 0;
  int dim = 0;
  std::vector<VecX> offsets;   // pairwise d(i,j), row-major length N*N
  Eigen::MatrixXi adjacency;   // symmetric 0/1, zero diagonal
  double mu = 1.0;
  double c0 = 0.1;
  Objective objective;
  VecX p_star;
  double p_epsilon = 0.2;

  // Derived formation data.
  std::vector<VecX> d0;        // d_i0 = (1/N) sum_j d(i,j)
  Eigen::MatrixXd gram;        // sum_j d_j0 d_j0^T
  Eigen::MatrixXd gram_inv;

  const VecX& offset(int i, int j) const {
    return offsets[static_cast<std::size_t>(i) *
                       static_cast<std::size_t>(agent_count) +
                   static_cast<std::size_t>(j)];
  }

  void finalize() {
    const int N = agent_count, n = dim;
    d0.assign(N, VecX::Zero(n));
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) d0[i] += offset(i, j);
      d0[i] /= static_cast<double>(N);
    }
    gram = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < N; ++j) gram += d0[j] * d0[j].transpose();
    if (!(gram.determinant() > 0.0))
      throw NetworkError("formation offsets do not span the space "
                         "(det of the offset Gram matrix is not positive)");
    gram_inv = gram.inverse();
  }
};

// Complete graph for small teams, a cycle otherwise.
inline Eigen::MatrixXi make_default_adjacency(int agent_count) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(agent_count, agent_count);
  if (agent_count <= 6) {
    a.setOnes();
    a.diagonal().setZero();
  } else {
    for (int i = 0; i < agent_count; ++i) {
      const int j = (i + 1) % agent_count;
      a(i, j) = a(j, i) = 1;
    }
  }
  return a;
}

// Builds the pairwise offsets from per-agent center offsets:
// d(i,j) = center[i] - center[j], which is antisymmetric by construction.
inline std::vector<VecX> offsets_from_centers(const std::vector<VecX>& center) {
  const int N = static_cast<int>(center.size());
  std::vector<VecX> offsets;
  offsets.reserve(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) offsets.push_back(center[i] - center[j]);
  return offsets;
}

// Shipped default: four agents on the unit-square corners, complete graph,
// quadratic field centered at (3, -2).
inline SourceSeekingScenario make_square_formation_scenario() {
  SourceSeekingScenario scn;
  scn.agent_count = 4;
  scn.dim = 2;
  std::vector<VecX> corners(4, VecX(2));
  corners[0] << 0.5, 0.5;
  corners[1] << -0.5, 0.5;
  corners[2] << -0.5, -0.5;
  corners[3] << 0.5, -0.5;
  scn.offsets = offsets_from_centers(corners);
  scn.adjacency = make_default_adjacency(4);
  scn.mu = 2.0;
  scn.c0 = 0.05;
  scn.p_star = VecX(2);
  scn.p_star << 3.0, -2.0;
  scn.p_epsilon = 0.2;
  const VecX target = scn.p_star;
  scn.objective.value = [target](const VecX& p) {
    return (p - target).squaredNorm();
  };
  scn.objective.grad = [target](const VecX& p) {
    return VecX(2.0 * (p - target));
  };
  scn.objective.omega = 2.0;
  scn.objective.theta = 2.0;
  scn.finalize();
  return scn;
}

inline bool graph_connected(const Eigen::MatrixXi& adjacency) {
  const int N = static_cast<int>(adjacency.rows());
  if (N == 0) return false;
  std::vector<bool> seen(N, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < N; ++j) {
      if (adjacency(i, j) != 0 && !seen[j]) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == N;
}

// Scenario invariants: exact antisymmetry, vanishing mean offset, positive
// Gram determinant, connectivity, and the declared convexity/Lipschitz
// constants of the field on random pairs.
inline void validate_scenario(const SourceSeekingScenario& scn,
                              const CounterRng& rng, std::size_t pairs = 100) {
  const int N = scn.agent_count;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (scn.offset(i, j) != VecX(-scn.offset(j, i)))
        throw NetworkError("offsets are not exactly antisymmetric");
  VecX sum = VecX::Zero(scn.dim);
  for (const auto& d : scn.d0) sum += d;
  if (sum.norm() > 1e-15)
    throw NetworkError("center offsets do not sum to zero");
  if (!graph_connected(scn.adjacency))
    throw NetworkError("communication graph is not connected");
  if ((scn.adjacency - scn.adjacency.transpose()).cwiseAbs().maxCoeff() != 0)
    throw NetworkError("adjacency matrix is not symmetric");
  std::uint64_t counter = 0;
  for (std::size_t k = 0; k < pairs; ++k) {
    VecX p1(scn.dim), p2(scn.dim);
    for (int i = 0; i < scn.dim; ++i) {
      p1[i] = rng.uniform(counter++, -10.0, 10.0);
      p2[i] = rng.uniform(counter++, -10.0, 10.0);
    }
    const VecX dp = p1 - p2;
    const VecX dg = scn.objective.grad(p1) - scn.objective.grad(p2);
    if (dp.dot(dg) < scn.objective.omega * dp.squaredNorm() * (1.0 - 1e-9))
      throw NetworkError("field violates the declared strong convexity");
    if (dg.norm() > scn.objective.theta * dp.norm() * (1.0 + 1e-9))
      throw NetworkError("field violates the declared gradient Lipschitz bound");
  }
}

struct ReducedNetworkMatrices {
  Eigen::MatrixXd laplacian;  // N x N
  Eigen::MatrixXd U1;         // N x (N-1), orthonormal complement of 1/sqrt(N)
  Eigen::MatrixXd Lbar;       // L * U1
  Eigen::MatrixXd Lbar_kron;  // Lbar ⊗ I_n
  Eigen::MatrixXd A;          // [[-I, -Lbar_kron], [mu Lbar_kron^T, 0]]
  Eigen::MatrixXd B;          // [-I; 0]
  Eigen::MatrixXd P;          // solves P A + A^T P = -I
  double lyapunov_residual = 0.0;
};

// Solves P A + A^T P = -I by a vectorized linear solve (desk scale).
inline Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& A) {
  const Eigen::Index k = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd At = A.transpose();
  const Eigen::MatrixXd M =
      Eigen::kroneckerProduct(I, At) + Eigen::kroneckerProduct(At, I);
  const Eigen::VectorXd rhs =
      Eigen::Map<const Eigen::VectorXd>((-I).eval().data(), k * k);
  const Eigen::VectorXd vec_p = M.partialPivLu().solve(rhs);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), k, k);
  P = 0.5 * (P + P.transpose()).eval();
  return P;
}

inline double symmetric_operator_norm(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline ReducedNetworkMatrices build_reduced_network(
    const SourceSeekingScenario& scn) {
  if (!graph_connected(scn.adjacency))
    throw NetworkError("build_reduced_network: graph is not connected");
  if (!(scn.mu > 0.0))
    throw NetworkError("build_reduced_network: mu must be positive");
  const int N = scn.agent_count, n = scn.dim;
  ReducedNetworkMatrices mats;

  mats.laplacian = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const double a = static_cast<double>(scn.adjacency(i, j));
      mats.laplacian(i, i) += a;
      mats.laplacian(i, j) -= a;
    }
  }

  // Householder reflection sending e_1 to 1/sqrt(N); columns 2..N form the
  // orthonormal complement of the all-ones direction.
  VecX ones_unit = VecX::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));
  VecX v = VecX::Zero(N);
  v[0] = 1.0;
  v -= ones_unit;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(N, N);
  if (v.squaredNorm() > 0.0)
    H -= (2.0 / v.squaredNorm()) * (v * v.transpose());
  mats.U1 = H.rightCols(N - 1);

  mats.Lbar = mats.laplacian * mats.U1;
  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  mats.Lbar_kron = Eigen::kroneckerProduct(mats.Lbar, In);

  const Eigen::Index nf = static_cast<Eigen::Index>(n) * (2 * N - 1);
  const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;
  mats.A = Eigen::MatrixXd::Zero(nf, nf);
  mats.A.topLeftCorner(nd, nd) = -Eigen::MatrixXd::Identity(nd, nd);
  mats.A.topRightCorner(nd, nf - nd) = -mats.Lbar_kron;
  mats.A.bottomLeftCorner(nf - nd, nd) = scn.mu * mats.Lbar_kron.transpose();
  mats.B = Eigen::MatrixXd::Zero(nf, nd);
  mats.B.topRows(nd) = -Eigen::MatrixXd::Identity(nd, nd);

  const Eigen::EigenSolver<Eigen::MatrixXd> es(mats.A);
  if (es.eigenvalues().real().maxCoeff() >= -1e-9)
    throw NetworkError(
        "build_reduced_network: estimator matrix is not Hurwitz (disconnected "
        "graph or nonpositive mu slipped through)");

  mats.P = solve_continuous_lyapunov(mats.A);
  mats.lyapunov_residual = symmetric_operator_norm(
      mats.P * mats.A + mats.A.transpose() * mats.P +
      Eigen::MatrixXd::Identity(nf, nf));
  return mats;
}

// Stacked field samples H(p0) in R^{nN}: block i is N h(p0 + d_i0) d_i0.
inline VecX field_sample_stack(const SourceSeekingScenario& scn,
                               const VecX& p0) {
  const int N = scn.agent_count, n = scn.dim;
  VecX H(static_cast<Eigen::Index>(n) * N);
  for (int i = 0; i < N; ++i)
    H.segment(static_cast<Eigen::Index>(i) * n, n) =
        static_cast<double>(N) * scn.objective.value(p0 + scn.d0[i]) *
        scn.d0[i];
  return H;
}

// Mean-value gradient estimate the averaging estimator settles on:
// delta_e(p0) = sum_i d_i0 h(p0 + d_i0).
inline VecX gradient_estimate(const SourceSeekingScenario& scn,
                              const VecX& p0) {
  VecX d = VecX::Zero(scn.dim);
  for (int i = 0; i < scn.agent_count; ++i)
    d += scn.d0[i] * scn.objective.value(p0 + scn.d0[i]);
  return d;
}

// Frozen-position equilibrium of the reduced estimator, stacked as
// [1_N ⊗ delta_e; qhat_e] in R^{n(2N-1)}.
inline VecX equilibrium_map(const SourceSeekingScenario& scn,
                            const ReducedNetworkMatrices& mats,
                            const VecX& p0) {
  const int N = scn.agent_count, n = scn.dim;
  const VecX delta_e = gradient_estimate(scn, p0);
  VecX delta_stack(static_cast<Eigen::Index>(n) * N);
  for (int i = 0; i < N; ++i)
    delta_stack.segment(static_cast<Eigen::Index>(i) * n, n) = delta_e;
  const VecX rhs = delta_stack - field_sample_stack(scn, p0);
  const VecX qhat =
      -(mats.Lbar_kron.transpose() * mats.Lbar_kron)
           .ldlt()
           .solve(mats.Lbar_kron.transpose() * rhs);
  VecX out(static_cast<Eigen::Index>(n) * (2 * N - 1));
  out << delta_stack, qhat;
  return out;
}

// Reduced closed loop: slow state is the average position (time-scaled by
// c0), fast state is the reduced estimator [delta; qhat].
inline PerturbedSystem reduced_seeking_system(
    const SourceSeekingScenario& scn, const ReducedNetworkMatrices& mats) {
  auto ctx = std::make_shared<const SourceSeekingScenario>(scn);
  auto m = std::make_shared<const ReducedNetworkMatrices>(mats);
  PerturbedSystem sys;
  const int N = scn.agent_count, n = scn.dim;
  sys.n = n;
  sys.m = static_cast<Eigen::Index>(n) * (2 * N - 1);
  sys.rho_s = [c0 = scn.c0](const VecX&, const VecX&, const VecX&) {
    return c0;
  };
  sys.g_s = [ctx](const VecX&, const VecX& z, const VecX&) {
    const int N = ctx->agent_count, n = ctx->dim;
    VecX v = VecX::Zero(n);
    for (int i = 0; i < N; ++i)
      v -= saturate(ctx->gram_inv *
                    z.segment(static_cast<Eigen::Index>(i) * n, n));
    return VecX(v / static_cast<double>(N));
  };
  sys.g_f = [ctx, m](const VecX& z, const VecX& x, const VecX&) {
    const int N = ctx->agent_count, n = ctx->dim;
    VecX drift = m->A * z;
    drift.head(static_cast<Eigen::Index>(n) * N) +=
        field_sample_stack(*ctx, x);
    return drift;
  };
  sys.phi = [ctx, m](const VecX& x) { return equilibrium_map(*ctx, *m, x); };
  return sys;
}

// Full closed loop with per-agent states: x stacks the N positions, z stacks
// the N estimator pairs (delta, q).
inline PerturbedSystem full_closed_loop_system(
    const SourceSeekingScenario& scn) {
  struct Ctx {
    SourceSeekingScenario scn;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> laplacian_cod;
  };
  auto ctx = std::make_shared<Ctx>();
  ctx->scn = scn;
  const int N = scn.agent_count, n = scn.dim;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const double a = static_cast<double>(scn.adjacency(i, j));
      L(i, i) += a;
      L(i, j) -= a;
    }
  ctx->laplacian_cod.compute(L);

  PerturbedSystem sys;
  sys.n = static_cast<Eigen::Index>(n) * N;
  sys.m = 2 * static_cast<Eigen::Index>(n) * N;

  sys.g_s = [ctx](const VecX& p, const VecX& z, const VecX&) {
    const auto& scn = ctx->scn;
    const int N = scn.agent_count, n = scn.dim;
    VecX v(static_cast<Eigen::Index>(n) * N);
    for (int i = 0; i < N; ++i) {
      const VecX pi = p.segment(static_cast<Eigen::Index>(i) * n, n);
      VecX vf = VecX::Zero(n);
      for (int j = 0; j < N; ++j) {
        if (scn.adjacency(i, j) == 0) continue;
        vf += pi - p.segment(static_cast<Eigen::Index>(j) * n, n) -
              scn.offset(i, j);
      }
      vf *= -1.0 / static_cast<double>(N);
      const VecX delta_i = z.segment(static_cast<Eigen::Index>(i) * n, n);
      const VecX ve = -scn.c0 * saturate(scn.gram_inv * delta_i);
      v.segment(static_cast<Eigen::Index>(i) * n, n) = vf + ve;
    }
    return v;
  };

  sys.g_f = [ctx](const VecX& z, const VecX& p, const VecX&) {
    const auto& scn = ctx->scn;
    const int N = scn.agent_count, n = scn.dim;
    const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;
    VecX out(2 * nd);
    for (int i = 0; i < N; ++i) {
      const VecX pi = p.segment(static_cast<Eigen::Index>(i) * n, n);
      const VecX delta_i = z.segment(static_cast<Eigen::Index>(i) * n, n);
      VecX ddot = -(delta_i - static_cast<double>(N) *
                                  scn.objective.value(pi) * scn.d0[i]);
      VecX qdot = VecX::Zero(n);
      const VecX qi = z.segment(nd + static_cast<Eigen::Index>(i) * n, n);
      for (int j = 0; j < N; ++j) {
        if (scn.adjacency(i, j) == 0) continue;
        ddot -= qi - z.segment(nd + static_cast<Eigen::Index>(j) * n, n);
        qdot += scn.mu * (delta_i -
                          z.segment(static_cast<Eigen::Index>(j) * n, n));
      }
      out.segment(static_cast<Eigen::Index>(i) * n, n) = ddot;
      out.segment(nd + static_cast<Eigen::Index>(i) * n, n) = qdot;
    }
    return out;
  };

  sys.phi = [ctx](const VecX& p) {
    const auto& scn = ctx->scn;
    const int N = scn.agent_count, n = scn.dim;
    const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;
    VecX c(nd);
    VecX mean = VecX::Zero(n);
    for (int i = 0; i < N; ++i) {
      const VecX pi = p.segment(static_cast<Eigen::Index>(i) * n, n);
      c.segment(static_cast<Eigen::Index>(i) * n, n) =
          static_cast<double>(N) * scn.objective.value(pi) * scn.d0[i];
      mean += c.segment(static_cast<Eigen::Index>(i) * n, n);
    }
    mean /= static_cast<double>(N);
    VecX out(2 * nd);
    for (int i = 0; i < N; ++i)
      out.segment(static_cast<Eigen::Index>(i) * n, n) = mean;
    // Per-coordinate minimum-norm solve of L q = c - 1 ⊗ mean.
    for (int k = 0; k < n; ++k) {
      VecX rhs(N);
      for (int i = 0; i < N; ++i)
        rhs[i] = c[static_cast<Eigen::Index>(i) * n + k] - mean[k];
      const VecX qk = ctx->laplacian_cod.solve(rhs);
      for (int i = 0; i < N; ++i)
        out[nd + static_cast<Eigen::Index>(i) * n + k] = qk[i];
    }
    return out;
  };
  return sys;
}

// Estimator-only systems at frozen agent positions (no slow block). Used to
// check that the all-ones reduction is an exact change of variables and that
// the estimator settles on the mean-value gradient estimate.
inline PerturbedSystem frozen_estimator_full(const SourceSeekingScenario& scn,
                                             const std::vector<VecX>& positions) {
  PerturbedSystem full = full_closed_loop_system(scn);
  const int n = scn.dim;
  VecX p(static_cast<Eigen::Index>(n) * scn.agent_count);
  for (int i = 0; i < scn.agent_count; ++i)
    p.segment(static_cast<Eigen::Index>(i) * n, n) = positions[i];
  PerturbedSystem sys;
  sys.n = 0;
  sys.m = full.m;
  sys.g_s = [](const VecX&, const VecX&, const VecX&) { return VecX(0); };
  sys.g_f = [full, p](const VecX& z, const VecX&, const VecX& w) {
    return full.g_f(z, p, w);
  };
  sys.phi = [full, p](const VecX&) { return full.phi(p); };
  return sys;
}

inline PerturbedSystem frozen_estimator_reduced(
    const SourceSeekingScenario& scn, const ReducedNetworkMatrices& mats,
    const std::vector<VecX>& positions) {
  // The reduced drift with H evaluated at the frozen per-agent positions
  // rather than at the average: block i of the stack is N h(p_i) d_i0.
  auto ctx = std::make_shared<const SourceSeekingScenario>(scn);
  auto m = std::make_shared<const ReducedNetworkMatrices>(mats);
  const int N = scn.agent_count, n = scn.dim;
  VecX H(static_cast<Eigen::Index>(n) * N);
  for (int i = 0; i < N; ++i)
    H.segment(static_cast<Eigen::Index>(i) * n, n) =
        static_cast<double>(N) * scn.objective.value(positions[i]) *
        scn.d0[i];
  PerturbedSystem sys;
  sys.n = 0;
  sys.m = static_cast<Eigen::Index>(n) * (2 * N - 1);
  sys.g_s = [](const VecX&, const VecX&, const VecX&) { return VecX(0); };
  sys.g_f = [ctx, m, H, N, n](const VecX& z, const VecX&, const VecX&) {
    VecX drift = m->A * z;
    drift.head(static_cast<Eigen::Index>(n) * N) += H;
    return drift;
  };
  sys.phi = [ctx, m, H, N, n](const VecX&) {
    VecX delta_e = VecX::Zero(n);
    for (int i = 0; i < N; ++i)
      delta_e += H.segment(static_cast<Eigen::Index>(i) * n, n) /
                 static_cast<double>(N);
    VecX delta_stack(static_cast<Eigen::Index>(n) * N);
    for (int i = 0; i < N; ++i)
      delta_stack.segment(static_cast<Eigen::Index>(i) * n, n) = delta_e;
    const VecX rhs = delta_stack - H;
    const VecX qhat = -(m->Lbar_kron.transpose() * m->Lbar_kron)
                           .ldlt()
                           .solve(m->Lbar_kron.transpose() * rhs);
    VecX out(static_cast<Eigen::Index>(n) * (2 * N - 1));
    out << delta_stack, qhat;
    return out;
  };
  return sys;
}

struct AgentVelocities {
  std::vector<VecX> total;
  std::vector<VecX> formation;
  std::vector<VecX> seek;
};

inline AgentVelocities agent_velocities(const SourceSeekingScenario& scn,
                                        const VecX& p, const VecX& delta) {
  const int N = scn.agent_count, n = scn.dim;
  AgentVelocities out;
  out.total.resize(N);
  out.formation.resize(N);
  out.seek.resize(N);
  for (int i = 0; i < N; ++i) {
    const VecX pi = p.segment(static_cast<Eigen::Index>(i) * n, n);
    VecX vf = VecX::Zero(n);
    for (int j = 0; j < N; ++j) {
      if (scn.adjacency(i, j) == 0) continue;
      vf += pi - p.segment(static_cast<Eigen::Index>(j) * n, n) -
            scn.offset(i, j);
    }
    vf *= -1.0 / static_cast<double>(N);
    const VecX ve = -scn.c0 * saturate(scn.gram_inv *
                                       delta.segment(
                                           static_cast<Eigen::Index>(i) * n,
                                           n));
    out.formation[i] = vf;
    out.seek[i] = ve;
    out.total[i] = vf + ve;
  }
  return out;
}

struct RemainderReport {
  double worst_ratio = 0.0;  // max of |remainder| / (theta |d|^2)
  bool pass = true;
  std::size_t pairs = 0;
};

// First-order Taylor remainder bound for a field with theta-Lipschitz
// gradient: |h(a) - h(b) - grad h(a)·(a - b)| <= theta |a - b|^2.
inline RemainderReport check_gradient_remainder(
    const Objective& objective, double theta,
    const std::vector<std::pair<VecX, VecX>>& pairs) {
  RemainderReport rep;
  for (const auto& [a, b] : pairs) {
    ++rep.pairs;
    const double dist2 = (a - b).squaredNorm();
    const double remainder =
        std::abs(objective.value(a) - objective.value(b) -
                 objective.grad(a).dot(a - b));
    if (dist2 == 0.0) {
      if (remainder > 0.0) rep.pass = false;
      continue;
    }
    const double ratio = remainder / (theta * dist2);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (ratio > 1.0 + 1e-9) rep.pass = false;
  }
  return rep;
}

}  // namespace spkit
