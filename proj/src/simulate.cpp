#include "crn/simulate.hpp"

#include <cmath>
#include <random>

#include "crn/error.hpp"

namespace crn {

Vecd reaction_rates(const Mechanism& mech, const Vecd& x, const Condition& cond) {
  const int ns = mech.num_species();
  const int nr = mech.num_reactions();
  if (x.size() != ns) throw Error("reaction_rates: state size mismatch");
  if (cond.rate_scale.size() != nr) throw Error("reaction_rates: rate_scale size mismatch");
  for (int s = 0; s < ns; ++s) {
    if (!std::isfinite(x[s])) throw Error("reaction_rates: non-finite concentration");
    if (x[s] < 0.0) throw Error("reaction_rates: negative concentration");
  }
  Vecd r(nr);
  for (int i = 0; i < nr; ++i) {
    double v = mech.reactions[i].rate_constant * cond.rate_scale[i];
    for (const auto& [s, coef] : mech.reactions[i].reactant_stoich)
      for (int c = 0; c < coef; ++c) v *= x[s];
    r[i] = v;
  }
  return r;
}

namespace {

void check_condition(const Mechanism& mech, const Condition& cond) {
  if (cond.initial_concentrations.size() != mech.num_species())
    throw Error("condition " + std::to_string(cond.id) + ": initial concentration size mismatch");
  if (cond.rate_scale.size() != mech.num_reactions())
    throw Error("condition " + std::to_string(cond.id) + ": rate_scale size mismatch");
  if ((cond.initial_concentrations.array() < 0.0).any())
    throw Error("condition " + std::to_string(cond.id) + ": negative initial concentration");
  if (!(cond.rate_scale.array() > 0.0).all())
    throw Error("condition " + std::to_string(cond.id) + ": rate_scale entries must be positive");
}

}  // namespace

Trajectory simulate_trajectory(const Mechanism& mech, const Condition& cond, double dt, int T,
                               int substeps, const NoiseSpec& noise, double overflow_bound) {
  if (!(dt > 0.0)) throw Error("simulate_trajectory: dt must be positive");
  if (T < 1) throw Error("simulate_trajectory: T must be >= 1");
  if (substeps < 1) throw Error("simulate_trajectory: substeps must be >= 1");
  check_condition(mech, cond);

  const Matd m = mech.M.cast<double>();
  const double h = dt / substeps;

  std::mt19937_64 engine(noise.seed);
  std::normal_distribution<double> gauss(0.0, noise.sigma > 0.0 ? noise.sigma : 1.0);

  Trajectory traj;
  traj.condition_id = cond.id;
  traj.dt = dt;
  traj.states.reserve(T + 1);
  traj.states.push_back(cond.initial_concentrations);

  Vecd x = cond.initial_concentrations;
  for (int t = 1; t <= T; ++t) {
    for (int s = 0; s < substeps; ++s) {
      Vecd r = reaction_rates(mech, x, cond);
      x = euler_step(m, x, r, h);
      for (int k = 0; k < x.size(); ++k)
        if (x[k] < 0.0) {
          x[k] = 0.0;
          ++traj.clip_count;
        }
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > overflow_bound)
        throw SimulationError("trajectory diverged at step t=" + std::to_string(t) +
                                  " (condition " + std::to_string(cond.id) + ")",
                              t);
    }
    if (noise.sigma > 0.0) {
      for (int k = 0; k < x.size(); ++k) {
        x[k] += gauss(engine);
        if (x[k] < 0.0) {
          x[k] = 0.0;
          ++traj.clip_count;
        }
      }
    }
    traj.states.push_back(x);
  }

  traj.rates.reserve(T);
  for (int t = 0; t < T; ++t)
    traj.rates.push_back(reaction_rates(mech, traj.states[t], cond));
  return traj;
}

std::vector<Trajectory> generate_dataset(const Mechanism& mech,
                                         const std::vector<Condition>& conds, double dt, int T,
                                         int substeps, const NoiseSpec& noise,
                                         double overflow_bound) {
  if (conds.empty()) throw Error("generate_dataset: no conditions given");
  std::vector<Trajectory> out;
  out.reserve(conds.size());
  for (const Condition& cond : conds) {
    NoiseSpec per = noise;
    per.seed = noise.seed ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(cond.id));
    try {
      out.push_back(simulate_trajectory(mech, cond, dt, T, substeps, per, overflow_bound));
    } catch (const SimulationError& e) {
      throw SimulationError("condition " + std::to_string(cond.id) + ": " + e.what(), e.t());
    }
  }
  return out;
}

}  // namespace crn
