#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crn/error.hpp"
#include "crn/step_problem.hpp"

using namespace crn;

namespace {

Condition plain_condition(const Mechanism& mech, Vecd x0, int id = 0) {
  return {id, std::move(x0), Vecd::Ones(mech.num_reactions())};
}

Trajectory decay_step(const Mechanism& mech, double xa, double dt) {
  Vecd x0(2);
  x0 << xa, 0;
  return simulate_trajectory(mech, plain_condition(mech, x0), dt, 1, 1, {});
}

SelectionVector fractional(Vecd w) {
  return {std::move(w), SelectionKind::fractional, SelectionOrigin::relaxed};
}

}  // namespace

TEST_CASE("fitting error of the A->B step") {
  Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");
  Trajectory traj = decay_step(mech, 1.0, 0.1);
  REQUIRE(traj.states[1][0] == doctest::Approx(0.8));

  SUBCASE("full mechanism reproduces the Euler step") {
    CHECK(fitting_error(mech, traj, 1, ones_selection(1)) <= 1e-12);
  }
  SUBCASE("empty mechanism leaves the raw change") {
    double expected = 0.2 * std::sqrt(2.0);  // ||(-0.2, 0.2)||
    CHECK(fitting_error(mech, traj, 1, zeros_selection(1)) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(fitting_error(mech, traj, 1, zeros_selection(1)) ==
          doctest::Approx((traj.states[1] - traj.states[0]).norm()).epsilon(1e-15));
  }
  SUBCASE("t out of range") {
    CHECK_THROWS_AS(fitting_error(mech, traj, 0, ones_selection(1)), Error);
    CHECK_THROWS_AS(fitting_error(mech, traj, 2, ones_selection(1)), Error);
  }
}

TEST_CASE("normalization") {
  SUBCASE("hand values") {
    Mechanism mech = parse_mechanism("species: A B C\nA -> B ; k=3\nA -> C ; k=4\n");
    Vecd x0(3);
    x0 << 1, 0, 0;
    Trajectory traj = simulate_trajectory(mech, plain_condition(mech, x0), 0.1, 1, 1, {});
    CHECK(normalization(traj, 1) == doctest::Approx(0.5).epsilon(1e-14));  // ||(3,4)|| * 0.1
  }
  SUBCASE("rate 6 decay step") {
    Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");
    Trajectory traj = decay_step(mech, 3.0, 0.1);
    CHECK(normalization(traj, 1) == doctest::Approx(0.6).epsilon(1e-14));
  }
  SUBCASE("zero rates") {
    Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");
    Trajectory traj = decay_step(mech, 0.0, 0.1);
    CHECK(normalization(traj, 1) == 0.0);
  }
}

TEST_CASE("assemble_step_problem") {
  Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");

  SUBCASE("relative tau on the rate-6 step") {
    Trajectory traj = decay_step(mech, 3.0, 0.1);
    StepProblem p = assemble_step_problem(mech, traj, 1, 0.2, ToleranceMode::relative);
    CHECK(p.tau == doctest::Approx(0.12).epsilon(1e-14));
    CHECK_FALSE(p.degenerate);
    CHECK_FALSE(p.infeasible_at_full);
    CHECK(p.full_residual <= 1e-12);
  }
  SUBCASE("paper-literal tau divides by the norm") {
    Trajectory traj = decay_step(mech, 3.0, 0.1);
    StepProblem p = assemble_step_problem(mech, traj, 1, 0.2, ToleranceMode::paper_literal);
    CHECK(p.tau == doctest::Approx(0.2 / 0.6).epsilon(1e-14));
  }
  SUBCASE("noiseless data is feasible at w=1 for any epsilon") {
    Trajectory traj = decay_step(mech, 1.0, 0.1);
    for (double eps : {1e-6, 0.05, 0.2, 10.0}) {
      StepProblem p = assemble_step_problem(mech, traj, 1, eps);
      CHECK_FALSE(p.infeasible_at_full);
    }
  }
  SUBCASE("quiescent step with b=0 gets tau 0 and stays usable") {
    Trajectory traj = decay_step(mech, 0.0, 0.1);
    StepProblem p = assemble_step_problem(mech, traj, 1, 0.2);
    CHECK(p.tau == 0.0);
    CHECK_FALSE(p.degenerate);
    CHECK(is_feasible(p, Vecd::Zero(1)));
  }
  SUBCASE("quiescent step with unexplained change is degenerate") {
    Trajectory traj = decay_step(mech, 0.0, 0.1);
    traj.states[1][1] = 0.05;  // inject pure noise
    StepProblem rel = assemble_step_problem(mech, traj, 1, 0.2, ToleranceMode::relative);
    CHECK(rel.degenerate);
    StepProblem lit = assemble_step_problem(mech, traj, 1, 0.2, ToleranceMode::paper_literal);
    CHECK(lit.degenerate);
  }
  SUBCASE("noisy step can be infeasible at full support") {
    Trajectory traj = decay_step(mech, 1.0, 0.1);
    traj.states[1][1] += 1.0;  // gross measurement error
    StepProblem p = assemble_step_problem(mech, traj, 1, 0.05);
    CHECK(p.infeasible_at_full);
    CHECK(p.full_residual > p.tau);
  }
}

TEST_CASE("algebraic identity between fitting_error and the assembled instance") {
  Mechanism mech = parse_mechanism(
      "species: A B C D\nA -> B ; k=1\nB -> C ; k=0.5\nC + A -> D ; k=0.25\nD -> A ; k=2\n");
  Vecd x0(4);
  x0 << 1, 0.5, 0.25, 0.1;
  Trajectory traj =
      simulate_trajectory(mech, plain_condition(mech, x0), 0.02, 20, 2, {0.001, 5});
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 1; t <= traj.num_steps(); t += 3) {
    StepProblem p = assemble_step_problem(mech, traj, t, 0.1);
    for (int trial = 0; trial < 5; ++trial) {
      Vecd w(4);
      for (int i = 0; i < 4; ++i) w[i] = unit(rng);
      double via_traj = fitting_error(mech, traj, t, fractional(w));
      double via_instance = residual_norm(p, w);
      CHECK(std::abs(via_traj - via_instance) <= 1e-12 * std::max(1.0, via_instance));
    }
  }
}

TEST_CASE("masking identity: binary mask equals the restricted mechanism prediction") {
  Mechanism mech = parse_mechanism(
      "species: A B C\nA -> B ; k=1\nB -> C ; k=0.5\nA + B -> C ; k=0.75\n");
  Vecd x0(3);
  x0 << 1, 0.4, 0;
  Condition cond = plain_condition(mech, x0);
  Trajectory traj = simulate_trajectory(mech, cond, 0.05, 10, 1, {});

  std::set<int> support{0, 2};
  SelectionVector mask = make_binary(support, 3, SelectionOrigin::exact);
  Restriction red = restrict(mech, support);
  Condition red_cond{0, x0, Vecd::Ones(2)};

  for (int t = 1; t <= traj.num_steps(); ++t) {
    Vecd r_red = reaction_rates(red.mechanism, traj.states[t - 1], red_cond);
    double direct = (traj.states[t] - traj.states[t - 1] -
                     (red.mechanism.M.cast<double>() * r_red) * traj.dt)
                        .norm();
    double masked = fitting_error(mech, traj, t, mask);
    CHECK(std::abs(direct - masked) <= 1e-12 * std::max(1.0, direct));
  }
}

TEST_CASE("tau monotone in epsilon, direction flips in the rate norm") {
  Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");
  Trajectory traj = decay_step(mech, 3.0, 0.1);
  double prev_rel = 0.0, prev_lit = 0.0;
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    double rel = assemble_step_problem(mech, traj, 1, eps, ToleranceMode::relative).tau;
    double lit = assemble_step_problem(mech, traj, 1, eps, ToleranceMode::paper_literal).tau;
    CHECK(rel >= prev_rel);
    CHECK(lit >= prev_lit);  // epsilon sits in the numerator either way
    prev_rel = rel;
    prev_lit = lit;
  }

  // A busier step raises the relative budget and shrinks the literal one.
  Trajectory slow = decay_step(mech, 1.0, 0.1);
  Trajectory fast = decay_step(mech, 3.0, 0.1);
  double rel_slow = assemble_step_problem(mech, slow, 1, 0.1, ToleranceMode::relative).tau;
  double rel_fast = assemble_step_problem(mech, fast, 1, 0.1, ToleranceMode::relative).tau;
  double lit_slow = assemble_step_problem(mech, slow, 1, 0.1, ToleranceMode::paper_literal).tau;
  double lit_fast = assemble_step_problem(mech, fast, 1, 0.1, ToleranceMode::paper_literal).tau;
  CHECK(rel_fast > rel_slow);
  CHECK(lit_fast < lit_slow);
}

TEST_CASE("scale covariance: k -> c k with dt -> dt/c is the same instance") {
  const double c = 7.5;
  Mechanism mech = parse_mechanism("species: A B C\nA -> B ; k=1\nB -> C ; k=0.5\n");
  Mechanism scaled = mech;
  for (Reaction& r : scaled.reactions) r.rate_constant *= c;
  scaled = make_mechanism(scaled.species, scaled.reactions);

  Vecd x0(3);
  x0 << 1, 0.2, 0;
  Trajectory traj = simulate_trajectory(mech, plain_condition(mech, x0), 0.1, 5, 1, {});
  Trajectory traj_scaled =
      simulate_trajectory(scaled, plain_condition(scaled, x0), 0.1 / c, 5, 1, {});

  for (int t = 1; t <= 5; ++t) {
    StepProblem p = assemble_step_problem(mech, traj, t, 0.1);
    StepProblem q = assemble_step_problem(scaled, traj_scaled, t, 0.1);
    CHECK((p.A - q.A).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((p.b - q.b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(p.tau - q.tau) <= 1e-12);
    std::mt19937_64 rng(t);
    for (int trial = 0; trial < 8; ++trial) {
      Vecd w(2);
      w << (rng() & 1), (rng() & 1);
      double margin = std::abs(residual_norm(p, w) - p.tau);
      if (margin > 1e-10)  // knife-edge ties may flip in the last ulp
        CHECK(is_feasible(p, w) == is_feasible(q, w));
    }
  }
}

TEST_CASE("selection vector helpers") {
  SelectionVector sel = make_binary({1, 3}, 5, SelectionOrigin::union_reduction);
  CHECK(cardinality_of(sel) == 2);
  CHECK(support_of(sel) == std::set<int>{1, 3});
  CHECK_THROWS_AS(make_binary({9}, 5, SelectionOrigin::exact), Error);
  CHECK_THROWS_AS(cardinality_of(fractional(Vecd::Constant(2, 0.5))), Error);
}

TEST_CASE("debug CSV carries the instance") {
  Mechanism mech = parse_mechanism("species: A B\nA -> B ; k=2\n");
  Trajectory traj = decay_step(mech, 3.0, 0.1);
  StepProblem p = assemble_step_problem(mech, traj, 1, 0.2);
  std::string csv = step_problem_csv(p);
  CHECK(csv.find("A\n") != std::string::npos);
  CHECK(csv.find("b\n") != std::string::npos);
  CHECK(csv.find("0.12") != std::string::npos);
}
