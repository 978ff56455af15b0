#pragma once

// CSV export at full double precision (17 significant digits) so identical
// runs produce byte-identical files.

#include <cstdio>
#include <ostream>
#include <string>

#include "spkit/system.hpp"

namespace spkit {

namespace detail {
inline void put_g17(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}
}  // namespace detail

// Header: t,x_1..x_n,z_1..z_m[,V_s,V_f,V], one row per recorded sample.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 Eigen::Index n, Eigen::Index m) {
  const bool with_lyap = traj.lyapunov.size() == traj.size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",z_" << i;
  if (with_lyap) os << ",V_s,V_f,V";
  os << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    detail::put_g17(os, traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      os << ',';
      detail::put_g17(os, traj.x[k][i]);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      os << ',';
      detail::put_g17(os, traj.z[k][i]);
    }
    if (with_lyap) {
      for (double v : traj.lyapunov[k]) {
        os << ',';
        detail::put_g17(os, v);
      }
    }
    os << "\n";
  }
}

}  // namespace spkit
