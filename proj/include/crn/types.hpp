#pragma once

#include <Eigen/Dense>

namespace crn {

template <class F>
using Vec = Eigen::Matrix<F, Eigen::Dynamic, 1>;
template <class F>
using Mat = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic>;

using Vecd = Vec<double>;
using Matd = Mat<double>;
using Veci = Vec<int>;
using Mati = Mat<int>;

// Absolute slack on the norm constraint ||b - A w|| <= tau used by every
// feasibility check (solvers, rounding, audits). Keeping one value project-wide
// makes the solver/oracle/audit comparisons consistent.
inline constexpr double kFeasTol = 1e-9;

}  // namespace crn
