#pragma once

// CSV serialization of trajectories. Column order is frozen; new columns are
// only ever appended.
//
//   t, x_1..x_n, u_j_k, nu_k, omega_applied_k, e_1..e_{N+1}, e_nu_norm,
//   Wv_i_k, Wa_i_k, Wnu_r_c, fp_iters, omegahat_i_k
//
// Indices in column names are 1-based. Floats use 17 significant digits so a
// read after write reproduces every finite value exactly.

#include <iosfwd>
#include <string>
#include <vector>

#include "hadp/simulator.hpp"

namespace hadp {

std::vector<std::string> csv_header(const TrajectoryLayout& layout);

void write_trajectory(const Trajectory& traj, std::ostream& out);
void write_trajectory(const Trajectory& traj, const std::string& path);

/// The layout is recovered from the header. Throws std::runtime_error on
/// malformed input.
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::string& path);

/// 17-significant-digit shortest form used for every float field.
std::string format_double(double v);

}  // namespace hadp
