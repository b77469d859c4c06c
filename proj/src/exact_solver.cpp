#include "crn/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <vector>

#include "crn/error.hpp"

namespace crn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool support_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

enum : std::int8_t { kFree = 0, kOne = 1, kZero = 2 };

struct Node {
  std::vector<std::int8_t> state;
  Vecd relax_w;          // fractional solution at this node, for branching
  double lambda = 0.0;   // final multiplier, warm-starts the children
  int bound = 0;         // certified integer lower bound on any completion
  int ones = 0;
  long seq = 0;          // FIFO tie-break for determinism
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;
  }
};

struct Incumbent {
  bool found = false;
  std::vector<int> support;
  int cardinality = 0;

  // Accepts strictly smaller cardinality, or the lexicographically smaller
  // support at equal cardinality.
  bool offer(const std::vector<int>& cand) {
    int card = static_cast<int>(cand.size());
    if (!found || card < cardinality ||
        (card == cardinality && support_less(cand, support))) {
      support = cand;
      cardinality = card;
      found = true;
      return true;
    }
    return false;
  }
};

}  // namespace

std::optional<SelectionVector> greedy_incumbent(const StepProblem& p, double feas_tol) {
  const int n = p.num_reactions();
  const double tau_eff = p.tau + feas_tol;
  std::set<int> support;
  Vecd r = p.b;
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i)
    if (p.A.col(i).norm() > 0.0) candidates.push_back(i);

  while (r.norm() > tau_eff) {
    int best = -1;
    double best_norm = kInf;
    for (int i : candidates) {
      if (support.count(i)) continue;
      double nn = (r - p.A.col(i)).norm();
      if (nn < best_norm) {
        best_norm = nn;
        best = i;
      }
    }
    if (best < 0) return std::nullopt;
    support.insert(best);
    r -= p.A.col(best);
  }
  return make_binary(support, n, SelectionOrigin::exact);
}

ExactSolution brute_force_oracle(const StepProblem& p, double feas_tol) {
  const int n = p.num_reactions();
  if (n > 20) throw Error("brute_force_oracle: more than 20 reactions");
  const double tau_eff = p.tau + feas_tol;

  ExactSolution sol;
  sol.w = zeros_selection(n);
  long checked = 1;
  if (p.b.norm() <= tau_eff) {
    sol.cardinality = 0;
    sol.status = ExactStatus::optimal;
    sol.nodes_explored = checked;
    return sol;
  }

  std::vector<int> idx;
  for (int k = 1; k <= n; ++k) {
    idx.resize(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      ++checked;
      Vecd r = p.b;
      for (int i : idx) r -= p.A.col(i);
      if (r.norm() <= tau_eff) {
        sol.w = make_binary(std::set<int>(idx.begin(), idx.end()), n, SelectionOrigin::exact);
        sol.cardinality = k;
        sol.status = ExactStatus::optimal;
        sol.nodes_explored = checked;
        return sol;
      }
      // next k-combination in lexicographic order
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  sol.status = ExactStatus::infeasible;
  sol.nodes_explored = checked;
  return sol;
}

namespace {

struct NormBound {
  int extra = 0;          // minimum additional selections needed
  bool infeasible = false;
  double fixed_residual = 0.0;
};

// Triangle-inequality bound: completions of the node's fixed-to-one set must
// cover ||b - A ones|| - tau with free column norms.
NormBound norm_bound(const StepProblem& p, const std::vector<std::int8_t>& state,
                     const std::vector<double>& col_norms, double tau_eff) {
  Vecd r = p.b;
  for (size_t i = 0; i < state.size(); ++i)
    if (state[i] == kOne) r -= p.A.col(static_cast<int>(i));
  NormBound nb;
  nb.fixed_residual = r.norm();
  double need = nb.fixed_residual - tau_eff - 1e-12 * std::max(1.0, nb.fixed_residual);
  if (need <= 0.0) return nb;
  std::vector<double> free_norms;
  for (size_t i = 0; i < state.size(); ++i)
    if (state[i] == kFree) free_norms.push_back(col_norms[i]);
  std::sort(free_norms.begin(), free_norms.end(), std::greater<>());
  double covered = 0.0;
  for (size_t m = 0; m < free_norms.size(); ++m) {
    covered += free_norms[m];
    if (covered >= need) {
      nb.extra = static_cast<int>(m) + 1;
      return nb;
    }
  }
  nb.infeasible = true;
  return nb;
}

std::vector<int> ones_of(const std::vector<std::int8_t>& state) {
  std::vector<int> out;
  for (size_t i = 0; i < state.size(); ++i)
    if (state[i] == kOne) out.push_back(static_cast<int>(i));
  return out;
}

// Lexicographically smallest support of the target cardinality reachable in
// this subtree (feasibility ignored): the fixed ones plus the smallest free
// ids. Used to avoid expanding subtrees that cannot improve the tie-break.
std::optional<std::vector<int>> lex_candidate(const std::vector<std::int8_t>& state,
                                              int target_card) {
  std::vector<int> cand = ones_of(state);
  if (static_cast<int>(cand.size()) > target_card) return std::nullopt;
  int missing = target_card - static_cast<int>(cand.size());
  for (size_t i = 0; i < state.size() && missing > 0; ++i)
    if (state[i] == kFree) {
      cand.push_back(static_cast<int>(i));
      --missing;
    }
  if (missing > 0) return std::nullopt;
  std::sort(cand.begin(), cand.end());
  return cand;
}

bool lex_prunable(const Node& node, const Incumbent& inc) {
  auto cand = lex_candidate(node.state, inc.cardinality);
  if (!cand) return true;
  return !support_less(*cand, inc.support);
}

}  // namespace

ExactSolution solve_step_exact(const StepProblem& p, const ExactLimits& limits) {
  if (p.degenerate)
    throw Error("solve_step_exact: degenerate step (condition " +
                std::to_string(p.condition_id) + ", t=" + std::to_string(p.t) + ")");
  if (limits.node_limit < 1) throw Error("solve_step_exact: node_limit must be >= 1");

  const int n = p.num_reactions();
  const double tau_eff = p.tau + limits.feas_tol;

  std::vector<double> col_norms(n);
  for (int i = 0; i < n; ++i) col_norms[i] = p.A.col(i).norm();

  Incumbent inc;
  if (auto greedy = greedy_incumbent(p, limits.feas_tol)) {
    auto s = support_of(*greedy);
    inc.offer(std::vector<int>(s.begin(), s.end()));
  }

  RelaxedOptions relax_opts;
  relax_opts.tol = limits.relax_tol;
  relax_opts.max_iter = limits.relax_max_iter;
  relax_opts.feas_tol = limits.feas_tol;

  auto relax_node = [&](const std::vector<std::int8_t>& state, const Vecd& warm,
                        double lambda_hint, double& cert_bound, Vecd& w_out,
                        double& lambda_out) -> bool {
    // returns false when the node is certified infeasible
    Vecd lo = Vecd::Zero(n), hi = Vecd::Ones(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] == kOne) lo[i] = 1.0;
      if (state[i] == kZero) hi[i] = 0.0;
    }
    RelaxedOptions o = relax_opts;
    o.lower = lo;
    o.upper = hi;
    o.warm_start = warm;
    o.lambda_hint = lambda_hint;
    RelaxedSolution rs = solve_step_relaxed(p, o);
    if (rs.certified_infeasible) return false;
    cert_bound = rs.certified_lower_bound;
    w_out = rs.w.w;
    lambda_out = rs.lambda;
    return true;
  };

  auto make_node = [&](std::vector<std::int8_t> state, const Vecd& warm, double lambda_hint,
                       long seq, std::optional<Node>& out) {
    out.reset();
    Node node;
    node.state = std::move(state);
    node.seq = seq;
    for (int i = 0; i < n; ++i)
      if (node.state[i] == kOne) ++node.ones;

    NormBound nb = norm_bound(p, node.state, col_norms, tau_eff);
    if (nb.fixed_residual <= tau_eff) inc.offer(ones_of(node.state));  // free -> 0 completion
    if (nb.infeasible) return;

    // The combinatorial bounds are free; only pay for the relaxation when the
    // node survives them.
    node.bound = node.ones + nb.extra;
    if (inc.found) {
      if (node.bound > inc.cardinality) return;
      if (node.bound == inc.cardinality && lex_prunable(node, inc)) return;
    }

    double cert = 0.0;
    if (!relax_node(node.state, warm, lambda_hint, cert, node.relax_w, node.lambda)) return;
    int relax_bound = static_cast<int>(std::ceil(cert - 1e-6));
    node.bound = std::max({relax_bound, node.ones, node.ones + nb.extra});

    // A near-integral relaxation gives a binary candidate for free.
    std::set<int> rounded;
    bool integral = true;
    for (int i = 0; i < n; ++i) {
      double v = node.relax_w[i];
      if (v > 1e-4 && v < 1.0 - 1e-4) {
        integral = false;
        break;
      }
      if (v >= 0.5) rounded.insert(i);
    }
    if (integral) {
      Vecd r = p.b;
      for (int i : rounded) r -= p.A.col(i);
      if (r.norm() <= tau_eff) inc.offer(std::vector<int>(rounded.begin(), rounded.end()));
    }

    if (inc.found) {
      if (node.bound > inc.cardinality) return;
      if (node.bound == inc.cardinality && lex_prunable(node, inc)) return;
    }
    out = std::move(node);
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
  long seq = 0;

  std::optional<Node> root;
  {
    std::vector<std::int8_t> state(n, kFree);
    for (int i = 0; i < n; ++i)
      if (col_norms[i] == 0.0) state[i] = kZero;
    make_node(std::move(state), Vecd(), 0.0, seq++, root);
  }
  if (root) heap.push(std::move(*root));

  ExactSolution sol;
  long nodes_explored = 0;

  auto finalize = [&](ExactStatus status, double gap) {
    sol.status = status;
    sol.nodes_explored = nodes_explored;
    sol.gap = gap;
    if (inc.found) {
      sol.w = make_binary(std::set<int>(inc.support.begin(), inc.support.end()), n,
                          SelectionOrigin::exact);
      sol.cardinality = inc.cardinality;
    } else {
      sol.w = zeros_selection(n);
      sol.cardinality = 0;
    }
    return sol;
  };

  while (!heap.empty()) {
    if (nodes_explored >= limits.node_limit) {
      double best_outstanding = heap.top().bound;
      double gap = inc.found ? std::max(0.0, inc.cardinality - best_outstanding) : kInf;
      return finalize(ExactStatus::node_limit, gap);
    }
    Node node = heap.top();
    heap.pop();
    if (inc.found) {
      if (node.bound > inc.cardinality) continue;
      if (node.bound == inc.cardinality && lex_prunable(node, inc)) continue;
    }
    ++nodes_explored;
    if (limits.debug_tree) {
      std::cerr << "node seq=" << node.seq << " bound=" << node.bound << " ones=" << node.ones
                << "\n";
    }

    // Most fractional free variable; all-integral nodes branch on the first
    // free one so the lex tie-break still sees every support.
    int branch = -1;
    double best_frac = kInf;
    for (int i = 0; i < n; ++i) {
      if (node.state[i] != kFree) continue;
      double frac = std::abs(node.relax_w[i] - 0.5);
      if (frac < best_frac - 1e-12) {
        best_frac = frac;
        branch = i;
      }
    }
    if (branch < 0) {
      // Leaf: fully fixed; the ones set was already offered via norm_bound.
      continue;
    }

    for (std::int8_t value : {kOne, kZero}) {
      std::vector<std::int8_t> state = node.state;
      state[branch] = value;
      std::optional<Node> child;
      make_node(std::move(state), node.relax_w, node.lambda, seq++, child);
      if (child) heap.push(std::move(*child));
    }
  }

  if (!inc.found) return finalize(ExactStatus::infeasible, 0.0);
  return finalize(ExactStatus::optimal, 0.0);
}

}  // namespace crn
