#pragma once

#include <cstdint>
#include <vector>

#include "crn/mechanism.hpp"
#include "crn/types.hpp"

namespace crn {

/// One point of the experiment parameter space. rate_scale multiplies each
/// reaction's rate constant and stands in for the physical boundary-condition
/// sweep (temperature, pressure, mixture) of the data source.
struct Condition {
  int id = 0;
  Vecd initial_concentrations;  // size Ns, entries >= 0
  Vecd rate_scale;              // size Nr, entries > 0
};

struct NoiseSpec {
  double sigma = 0.0;  // stddev of additive Gaussian state noise
  std::uint64_t seed = 0;
};

/// Sampled states X_t (t = 1..T+1) and the reaction rates r_t evaluated at the
/// stored states (t = 1..T). states.size() == rates.size() + 1.
struct Trajectory {
  int condition_id = 0;
  double dt = 0.0;
  std::vector<Vecd> states;
  std::vector<Vecd> rates;
  long clip_count = 0;  // negative concentrations clipped to zero

  int num_steps() const { return static_cast<int>(rates.size()); }
};

/// Mass-action rates: r_i = rate_scale_i * k_i * prod_s X_s^nu_si with nu the
/// reactant stoichiometry. X must be finite and nonnegative.
Vecd reaction_rates(const Mechanism& mech, const Vecd& x, const Condition& cond);

/// One explicit Euler update X + (M r) h. The simulator and any consistency
/// check must share this expression so the noiseless substeps=1 residual is
/// bit-exact zero.
inline Vecd euler_step(const Matd& m, const Vecd& x, const Vecd& r, double h) {
  return x + (m * r) * h;
}

/// Integrates with explicit Euler at internal step dt/substeps and records a
/// state every dt. Negative intermediates are clipped to zero (counted).
/// After recording, i.i.d. Gaussian noise (sigma, seeded) is added to the
/// recorded state, clipped at zero; integration continues from the noisy
/// state and stored rates are evaluated at the stored states. Divergence
/// (|X| > overflow_bound) aborts with the offending step.
Trajectory simulate_trajectory(const Mechanism& mech, const Condition& cond, double dt, int T,
                               int substeps, const NoiseSpec& noise,
                               double overflow_bound = 1e12);

/// One trajectory per condition, per-condition seed = noise.seed XOR id.
std::vector<Trajectory> generate_dataset(const Mechanism& mech,
                                         const std::vector<Condition>& conds, double dt, int T,
                                         int substeps, const NoiseSpec& noise,
                                         double overflow_bound = 1e12);

}  // namespace crn
