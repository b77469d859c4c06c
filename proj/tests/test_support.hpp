#pragma once

#include <random>

#include "crn/step_problem.hpp"

namespace crn::testing {

// Random selection instances shaped like real trajectory steps: columns split
// into dominant and minor magnitudes (plus occasional zero columns), and b is
// the full-support prediction plus noise inside the budget, so the full
// support stays feasible wherever the instance is feasible at all - exactly
// the class the pipeline feeds the solvers. Regimes: slack budget
// (cardinality 0), representable with a loose budget, representable with a
// tight budget, and certified-infeasible (b beyond the reach of every
// column).
inline StepProblem random_instance(std::mt19937_64& rng, int ns, int nr) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  StepProblem p;
  p.t = 1;
  p.condition_id = 0;
  p.A = Matd(ns, nr);
  for (int i = 0; i < nr; ++i) {
    double scale = unit(rng) < 0.55 ? 1.0 : 1e-3;
    for (int s = 0; s < ns; ++s) p.A(s, i) = scale * gauss(rng);
    if (unit(rng) < 0.12) p.A.col(i).setZero();
  }

  Vecd full = p.A * Vecd::Ones(nr);
  Vecd noise(ns);
  for (int s = 0; s < ns; ++s) noise[s] = gauss(rng);

  switch (rng() % 4) {
    case 0: {  // empty selection feasible
      p.b = 0.3 * noise;
      p.tau = p.b.norm() * (1.0 + unit(rng)) + 1e-9;
      break;
    }
    case 1: {  // loose budget around the full-support prediction
      p.tau = (0.15 + 0.5 * unit(rng)) * full.norm() + 1e-6;
      double nn = noise.norm();
      p.b = full + (nn > 0 ? (0.5 * p.tau * unit(rng) / nn) * noise : noise);
      break;
    }
    case 2: {  // tight budget
      p.tau = (0.02 + 0.1 * unit(rng)) * full.norm() + 1e-6;
      double nn = noise.norm();
      p.b = full + (nn > 0 ? (0.5 * p.tau * unit(rng) / nn) * noise : noise);
      break;
    }
    default: {  // infeasible for every support, by the triangle inequality
      double reach = 0.0;
      for (int i = 0; i < nr; ++i) reach += p.A.col(i).norm();
      p.tau = 0.05 * unit(rng) + 1e-4;
      double nn = std::max(noise.norm(), 1e-12);
      p.b = ((reach + p.tau + 1.0 + unit(rng)) / nn) * noise;
      break;
    }
  }
  p.full_residual = residual_norm(p, Vecd::Ones(nr));
  p.infeasible_at_full = p.full_residual > p.tau + kFeasTol;
  return p;
}

}  // namespace crn::testing
