#pragma once

// Finite sample sets standing in for "for all x, z, d, w" quantifiers:
// uniform draws from a stated box, plus the equilibrium and points on the
// coordinate axes. All randomness is counter-based.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spkit/rng.hpp"
#include "spkit/system.hpp"

namespace spkit {

struct StateSample {
  VecX x, z, d, w;
};

struct SampleBox {
  VecX x_lo, x_hi;
  VecX z_lo, z_hi;
  VecX d_lo, d_hi;  // empty for p = 0
  VecX w_lo, w_hi;  // empty for q = 0
};

inline SampleBox symmetric_box(Eigen::Index n, double x_half, Eigen::Index m,
                               double z_half, Eigen::Index p = 0,
                               double d_half = 0.0, Eigen::Index q = 0,
                               double w_half = 0.0) {
  SampleBox b;
  b.x_lo = VecX::Constant(n, -x_half);
  b.x_hi = VecX::Constant(n, x_half);
  b.z_lo = VecX::Constant(m, -z_half);
  b.z_hi = VecX::Constant(m, z_half);
  b.d_lo = VecX::Constant(p, -d_half);
  b.d_hi = VecX::Constant(p, d_half);
  b.w_lo = VecX::Constant(q, -w_half);
  b.w_hi = VecX::Constant(q, w_half);
  return b;
}

namespace detail {
inline VecX draw(const CounterRng& rng, std::uint64_t& counter,
                 const VecX& lo, const VecX& hi) {
  VecX v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    v[i] = rng.uniform(counter++, lo[i], hi[i]);
  return v;
}
}  // namespace detail

// count uniform samples in the box, then the supplied equilibrium (with the
// fast state on the steady-state map) and two axis points per state
// coordinate.
inline std::vector<StateSample> make_sample_set(
    const SampleBox& box, std::size_t count, const CounterRng& rng,
    const PerturbedSystem* sys = nullptr) {
  std::vector<StateSample> samples;
  samples.reserve(count + 2 * static_cast<std::size_t>(box.x_lo.size() +
                                                       box.z_lo.size()) +
                  1);
  std::uint64_t counter = 0;
  for (std::size_t k = 0; k < count; ++k) {
    StateSample s;
    s.x = detail::draw(rng, counter, box.x_lo, box.x_hi);
    s.z = detail::draw(rng, counter, box.z_lo, box.z_hi);
    s.d = detail::draw(rng, counter, box.d_lo, box.d_hi);
    s.w = detail::draw(rng, counter, box.w_lo, box.w_hi);
    samples.push_back(std::move(s));
  }
  const Eigen::Index n = box.x_lo.size(), m = box.z_lo.size();
  const VecX d0 = VecX::Zero(box.d_lo.size());
  const VecX w0 = VecX::Zero(box.w_lo.size());
  if (sys && sys->phi) {
    const VecX xe = VecX::Zero(n);
    samples.push_back({xe, sys->phi(xe), d0, w0});
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double v : {box.x_lo[i], box.x_hi[i]}) {
      StateSample s{VecX::Zero(n), VecX::Zero(m), d0, w0};
      s.x[i] = v;
      samples.push_back(std::move(s));
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (double v : {box.z_lo[i], box.z_hi[i]}) {
      StateSample s{VecX::Zero(n), VecX::Zero(m), d0, w0};
      s.z[i] = v;
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

}  // namespace spkit
