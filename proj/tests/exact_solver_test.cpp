#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crn/error.hpp"
#include "crn/exact_solver.hpp"
#include "test_support.hpp"

using namespace crn;

namespace {

StepProblem instance(Matd a, Vecd b, double tau) {
  StepProblem p;
  p.A = std::move(a);
  p.b = std::move(b);
  p.tau = tau;
  p.t = 1;
  return p;
}

}  // namespace

TEST_CASE("slack budget selects nothing") {
  Matd a(2, 4);
  a << 1, 2, 0, 1, 0, 1, 1, 2;
  Vecd b(2);
  b << 0.3, 0.1;
  StepProblem p = instance(a, b, 0.5);
  ExactSolution sol = solve_step_exact(p);
  CHECK(sol.status == ExactStatus::optimal);
  CHECK(sol.cardinality == 0);
  CHECK(sol.gap == 0.0);
  CHECK(support_of(sol.w).empty());
}

TEST_CASE("single dominant column is found") {
  Matd a = Matd::Zero(3, 5);
  a.col(2) << 1.0, -0.5, 0.25;       // equals b exactly
  a.col(0) << 1e-3, 1e-3, 0;         // nuisance columns
  a.col(1) << 0, 2e-3, -1e-3;
  a.col(4) << -1e-3, 0, 1e-3;
  Vecd b(3);
  b << 1.0, -0.5, 0.25;
  StepProblem p = instance(a, b, 0.05);
  ExactSolution sol = solve_step_exact(p);
  CHECK(sol.status == ExactStatus::optimal);
  CHECK(sol.cardinality == 1);
  CHECK(support_of(sol.w) == std::set<int>{2});

  ExactSolution oracle = brute_force_oracle(p);
  CHECK(oracle.cardinality == 1);
  CHECK(support_of(oracle.w) == std::set<int>{2});
}

TEST_CASE("brute force tie-breaks to the lexicographically smallest support") {
  SUBCASE("prefers fewer reactions") {
    Matd a(1, 1);
    a << 0.5;
    Vecd b(1);
    b << 0.1;
    StepProblem p = instance(a, b, 0.5);  // feasible both ways
    ExactSolution sol = brute_force_oracle(p);
    CHECK(sol.cardinality == 0);
    ExactSolution bb = solve_step_exact(p);
    CHECK(bb.cardinality == 0);
  }
  SUBCASE("equal cardinality goes to the smaller id") {
    Matd a(2, 3);
    a.col(0) << 1, 0;
    a.col(1) << 1, 1e-4;
    a.col(2) << 1, -1e-4;
    Vecd b(2);
    b << 1, 0;
    StepProblem p = instance(a, b, 0.01);
    CHECK(support_of(brute_force_oracle(p).w) == std::set<int>{0});
    CHECK(support_of(solve_step_exact(p).w) == std::set<int>{0});
  }
}

TEST_CASE("infeasible instance certified") {
  Matd a(2, 2);
  a.col(0) << 0.1, 0;
  a.col(1) << 0, 0.05;
  Vecd b(2);
  b << 10, 10;
  StepProblem p = instance(a, b, 0.5);
  CHECK(brute_force_oracle(p).status == ExactStatus::infeasible);
  ExactSolution sol = solve_step_exact(p);
  CHECK(sol.status == ExactStatus::infeasible);
}

TEST_CASE("oracle guard rails") {
  StepProblem p = instance(Matd::Zero(2, 21), Vecd::Zero(2), 1.0);
  CHECK_THROWS_AS(brute_force_oracle(p), Error);
  std::mt19937_64 rng(5);
  StepProblem q = testing::random_instance(rng, 4, 8);
  q.degenerate = true;
  CHECK_THROWS_AS(solve_step_exact(q), Error);
}

TEST_CASE("greedy incumbent") {
  SUBCASE("slack budget gives the empty selection") {
    Matd a(2, 3);
    a << 1, 0, 1, 0, 1, 1;
    Vecd b(2);
    b << 0.1, 0;
    auto sel = greedy_incumbent(instance(a, b, 0.2));
    REQUIRE(sel.has_value());
    CHECK(support_of(*sel).empty());
  }
  SUBCASE("picks the largest residual decrease first") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
      StepProblem p = testing::random_instance(rng, 4, 7);
      if (p.b.norm() <= p.tau + kFeasTol) continue;
      auto sel = greedy_incumbent(p);
      if (!sel) continue;
      auto support = support_of(*sel);
      if (support.empty()) continue;
      // oracle: recompute the argmax residual decrease for the first pick
      int best = -1;
      double best_norm = std::numeric_limits<double>::infinity();
      for (int i = 0; i < p.num_reactions(); ++i) {
        if (p.A.col(i).norm() == 0.0) continue;
        double n = (p.b - p.A.col(i)).norm();
        if (n < best_norm) {
          best_norm = n;
          best = i;
        }
      }
      CHECK(support.count(best) == 1);
    }
  }
  SUBCASE("returns nullopt when the full support fails") {
    Matd a(2, 2);
    a.col(0) << 0.1, 0;
    a.col(1) << 0, 0.05;
    Vecd b(2);
    b << 10, 10;
    CHECK_FALSE(greedy_incumbent(instance(a, b, 0.5)).has_value());
  }
}

TEST_CASE("branch-and-bound matches the oracle on random instances") {
  std::mt19937_64 rng(20240807);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    StepProblem p = testing::random_instance(rng, 5, 10);
    ExactSolution oracle = brute_force_oracle(p);
    ExactSolution bb = solve_step_exact(p);
    REQUIRE(bb.status != ExactStatus::node_limit);
    REQUIRE(bb.status == oracle.status);
    if (oracle.status == ExactStatus::optimal) {
      ++feasible;
      CHECK(bb.cardinality == oracle.cardinality);
      CHECK(support_of(bb.w) == support_of(oracle.w));  // tie-break agreement
      CHECK(is_feasible(p, bb.w.w));
      CHECK(is_feasible(p, oracle.w.w));
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 40);
  CHECK(infeasible > 10);
}

TEST_CASE("bound sandwich: relaxation <= optimum <= greedy") {
  std::mt19937_64 rng(20240808);
  for (int trial = 0; trial < 60; ++trial) {
    StepProblem p = testing::random_instance(rng, 5, 9);
    ExactSolution exact = solve_step_exact(p);
    if (exact.status != ExactStatus::optimal) continue;
    RelaxedSolution relax = solve_step_relaxed(p);
    CHECK(relax.objective <= exact.cardinality + 1e-6);
    auto greedy = greedy_incumbent(p);
    REQUIRE(greedy.has_value());
    CHECK(cardinality_of(*greedy) >= exact.cardinality);
  }
}

TEST_CASE("optimal cardinality is nonincreasing in tau") {
  std::mt19937_64 rng(20240809);
  for (int trial = 0; trial < 40; ++trial) {
    StepProblem p = testing::random_instance(rng, 5, 9);
    if (p.tau <= 0.0) continue;
    int prev = -1;
    for (double factor : {1.0, 1.5, 2.5, 8.0}) {
      StepProblem q = p;
      q.tau = p.tau * factor;
      ExactSolution sol = solve_step_exact(q);
      if (sol.status != ExactStatus::optimal) {
        prev = -1;
        continue;
      }
      if (prev >= 0) CHECK(sol.cardinality <= prev);
      prev = sol.cardinality;
    }
  }
}

TEST_CASE("node limit reports the incumbent and a gap") {
  std::mt19937_64 rng(20240810);
  StepProblem p = testing::random_instance(rng, 6, 12);
  while (p.b.norm() <= p.tau + kFeasTol || p.infeasible_at_full)
    p = testing::random_instance(rng, 6, 12);
  ExactLimits limits;
  limits.node_limit = 1;
  ExactSolution sol = solve_step_exact(p, limits);
  CHECK(sol.status == ExactStatus::node_limit);
  CHECK(sol.gap >= 0.0);
  CHECK(is_feasible(p, sol.w.w));  // greedy incumbent is always feasible here
  CHECK(sol.nodes_explored <= 1);
}

TEST_CASE("zero columns are never selected") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 30; ++trial) {
    StepProblem p = testing::random_instance(rng, 4, 8);
    ExactSolution sol = solve_step_exact(p);
    if (sol.status != ExactStatus::optimal) continue;
    for (int id : support_of(sol.w)) CHECK(p.A.col(id).norm() > 0.0);
  }
}
