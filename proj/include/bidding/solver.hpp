#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "bidding/graph.hpp"
#include "bidding/shift.hpp"

namespace bidding {

/// Explicit 3|V|-node stochastic game: for each original vertex v a nature
/// node tossing a p-biased coin into a Max-controlled and a Min-controlled
/// copy, each wired to the nature nodes of v's successors.
struct RandomTurnGame {
  enum class NodeKind { Nature, MaxChoice, MinChoice };
  struct Node {
    NodeKind kind;
    VertexId original;
    std::vector<std::pair<int, double>> coin;  // nature only: (node, probability)
    std::vector<int> moves;                    // controlled only
  };
  double p = 0.5;
  int original_count = 0;
  std::vector<Node> nodes;

  int nature_node(VertexId v) const { return v; }
  int max_node(VertexId v) const { return original_count + v; }
  int min_node(VertexId v) const { return 2 * original_count + v; }
};

inline RandomTurnGame build_random_turn(const GameGraph& g, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(Errc::POutOfRange, "build_random_turn: p must lie strictly in (0,1)");
  RandomTurnGame rt;
  rt.p = p;
  rt.original_count = g.size();
  rt.nodes.resize(static_cast<size_t>(3 * g.size()));
  for (VertexId v = 0; v < g.size(); ++v) {
    auto& nat = rt.nodes[static_cast<size_t>(rt.nature_node(v))];
    nat.kind = RandomTurnGame::NodeKind::Nature;
    nat.original = v;
    nat.coin = {{rt.max_node(v), p}, {rt.min_node(v), 1.0 - p}};
    auto& mx = rt.nodes[static_cast<size_t>(rt.max_node(v))];
    mx.kind = RandomTurnGame::NodeKind::MaxChoice;
    mx.original = v;
    auto& mn = rt.nodes[static_cast<size_t>(rt.min_node(v))];
    mn.kind = RandomTurnGame::NodeKind::MinChoice;
    mn.original = v;
    for (VertexId u : g.successors(v)) {
      mx.moves.push_back(rt.nature_node(u));
      mn.moves.push_back(rt.nature_node(u));
    }
  }
  return rt;
}

/// Value and certificate of RT(G,p): the mean-payoff value, optimal positional
/// moves v+ / v-, potentials anchored at vertex 0, and strengths
/// St(v) = p(1-p)(Pot(v+) - Pot(v-)).
struct StochasticSolution {
  double p = 0.5;
  double value = 0.0;
  std::vector<VertexId> sigma_max;
  std::vector<VertexId> sigma_min;
  std::vector<double> pot;
  std::vector<double> strength;
  double s_max = 0.0;
  std::optional<double> s_min_pos;  // smallest strictly positive strength
};

namespace detail {

struct ChainEvaluation {
  Eigen::VectorXd gain;  // per-state long-run average
  Eigen::VectorXd bias;  // canonical bias: stationary-weighted zero on each recurrent class
  bool gain_constant = false;
};

// Recurrent classes of the chain v -> {sigma_max[v] w.p. p, sigma_min[v] w.p. 1-p}.
// Only positive-probability edges count as support (p can sit on a boundary).
inline void chain_structure(int n, double p, const std::vector<VertexId>& smax,
                            const std::vector<VertexId>& smin,
                            std::vector<int>* component_of, std::vector<std::vector<int>>* classes) {
  std::vector<std::vector<VertexId>> succ(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    if (p > 0.0) succ[static_cast<size_t>(v)].push_back(smax[static_cast<size_t>(v)]);
    if (p < 1.0 && (p == 0.0 || smin[static_cast<size_t>(v)] != smax[static_cast<size_t>(v)]))
      succ[static_cast<size_t>(v)].push_back(smin[static_cast<size_t>(v)]);
  }
  // Tiny n: repeated DFS closure is plenty. reach[v][u] = 1 if u reachable from v.
  std::vector<std::vector<char>> reach(static_cast<size_t>(n), std::vector<char>(static_cast<size_t>(n), 0));
  for (int v = 0; v < n; ++v) {
    std::vector<int> stack = {v};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (VertexId w : succ[static_cast<size_t>(u)]) {
        if (!reach[static_cast<size_t>(v)][static_cast<size_t>(w)]) {
          reach[static_cast<size_t>(v)][static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  component_of->assign(static_cast<size_t>(n), -1);
  classes->clear();
  // A state is recurrent iff every state it reaches can reach it back.
  for (int v = 0; v < n; ++v) {
    if ((*component_of)[static_cast<size_t>(v)] != -1) continue;
    bool recurrent = true;
    for (int u = 0; u < n && recurrent; ++u)
      if (reach[static_cast<size_t>(v)][static_cast<size_t>(u)] && !reach[static_cast<size_t>(u)][static_cast<size_t>(v)])
        recurrent = false;
    if (!recurrent) continue;
    std::vector<int> cls = {v};
    (*component_of)[static_cast<size_t>(v)] = static_cast<int>(classes->size());
    for (int u = 0; u < n; ++u) {
      if (u == v || (*component_of)[static_cast<size_t>(u)] != -1) continue;
      if (reach[static_cast<size_t>(v)][static_cast<size_t>(u)] && reach[static_cast<size_t>(u)][static_cast<size_t>(v)]) {
        cls.push_back(u);
        (*component_of)[static_cast<size_t>(u)] = static_cast<int>(classes->size());
      }
    }
    classes->push_back(std::move(cls));
  }
}

// Exact gain/bias of the fixed-policy chain. Handles transient states and
// multiple recurrent classes; the bias is the canonical one with zero
// stationary weight on every recurrent class.
inline ChainEvaluation evaluate_chain(const GameGraph& g, double p,
                                      const std::vector<VertexId>& smax,
                                      const std::vector<VertexId>& smin) {
  const int n = g.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    P(v, smax[static_cast<size_t>(v)]) += p;
    P(v, smin[static_cast<size_t>(v)]) += 1.0 - p;
  }
  Eigen::VectorXd w(n);
  for (int v = 0; v < n; ++v) w(v) = g.weight(v);

  std::vector<int> component_of;
  std::vector<std::vector<int>> classes;
  chain_structure(n, p, smax, smin, &component_of, &classes);
  if (classes.empty()) throw Error(Errc::SingularSystem, "chain has no recurrent class");

  // Stationary distribution and gain per recurrent class.
  std::vector<Eigen::VectorXd> stationary;
  std::vector<double> class_gain;
  for (const auto& cls : classes) {
    const int m = static_cast<int>(cls.size());
    Eigen::MatrixXd A(m + 1, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = P(cls[static_cast<size_t>(j)], cls[static_cast<size_t>(i)]) - (i == j ? 1.0 : 0.0);
    for (int j = 0; j < m; ++j) A(m, j) = 1.0;
    b(m) = 1.0;
    Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);
    if ((A * pi - b).norm() > 1e-9)
      throw Error(Errc::SingularSystem, "stationary distribution solve failed");
    double gain = 0.0;
    for (int i = 0; i < m; ++i) gain += pi(i) * w(cls[static_cast<size_t>(i)]);
    stationary.push_back(std::move(pi));
    class_gain.push_back(gain);
  }

  ChainEvaluation out;
  out.gain.resize(n);
  // Recurrent states take their class gain; transient states solve g = P g.
  std::vector<int> transient;
  for (int v = 0; v < n; ++v) {
    if (component_of[static_cast<size_t>(v)] >= 0)
      out.gain(v) = class_gain[static_cast<size_t>(component_of[static_cast<size_t>(v)])];
    else
      transient.push_back(v);
  }
  if (!transient.empty()) {
    const int t = static_cast<int>(transient.size());
    Eigen::MatrixXd A(t, t);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(t);
    std::vector<int> tindex(static_cast<size_t>(n), -1);
    for (int i = 0; i < t; ++i) tindex[static_cast<size_t>(transient[static_cast<size_t>(i)])] = i;
    for (int i = 0; i < t; ++i) {
      const int v = transient[static_cast<size_t>(i)];
      for (int j = 0; j < t; ++j) A(i, j) = (i == j ? 1.0 : 0.0) - P(v, transient[static_cast<size_t>(j)]);
      for (int u = 0; u < n; ++u)
        if (tindex[static_cast<size_t>(u)] < 0) b(i) += P(v, u) * out.gain(u);
    }
    Eigen::VectorXd gt = A.partialPivLu().solve(b);
    if ((A * gt - b).norm() > 1e-9) throw Error(Errc::SingularSystem, "transient gain solve failed");
    for (int i = 0; i < t; ++i) out.gain(transient[static_cast<size_t>(i)]) = gt(i);
  }

  // Bias: (I - P) h = w - g, one redundant row per recurrent class replaced by
  // the normalization  sum_i pi_i h_i = 0.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - P;
  Eigen::VectorXd b = w - out.gain;
  for (size_t c = 0; c < classes.size(); ++c) {
    const int row = *std::min_element(classes[c].begin(), classes[c].end());
    A.row(row).setZero();
    for (size_t i = 0; i < classes[c].size(); ++i) A(row, classes[c][i]) = stationary[c](static_cast<int>(i));
    b(row) = 0.0;
  }
  Eigen::VectorXd h = A.colPivHouseholderQr().solve(b);
  if ((A * h - b).norm() > 1e-8) throw Error(Errc::SingularSystem, "bias solve failed");
  out.bias = h;

  double gmin = out.gain.minCoeff(), gmax = out.gain.maxCoeff();
  out.gain_constant = (gmax - gmin) <= 1e-10 * std::max(1.0, std::abs(gmax));
  return out;
}

// Exact best response of Min against a fixed Max policy: multichain policy
// iteration, gain improvement first, bias improvement among gain-ties.
inline std::vector<VertexId> min_best_response(const GameGraph& g, double p,
                                               const std::vector<VertexId>& smax,
                                               std::vector<VertexId> smin,
                                               ChainEvaluation* final_eval) {
  const int n = g.size();
  const double scale = std::max(1.0, g.max_abs_weight());
  const double tol = 1e-11 * scale;
  for (int round = 0; round < 64 * n * n + 64; ++round) {
    ChainEvaluation ev = evaluate_chain(g, p, smax, smin);
    bool changed = false;
    // Gain phase.
    for (int v = 0; v < n; ++v) {
      VertexId cur = smin[static_cast<size_t>(v)];
      VertexId best = cur;
      for (VertexId u : g.successors(v))
        if (ev.gain(u) < ev.gain(best) - tol) best = u;
      if (best != cur) {
        smin[static_cast<size_t>(v)] = best;
        changed = true;
      }
    }
    if (changed) continue;
    // Bias phase among gain-optimal successors.
    for (int v = 0; v < n; ++v) {
      VertexId cur = smin[static_cast<size_t>(v)];
      double gbest = ev.gain(cur);
      VertexId best = cur;
      for (VertexId u : g.successors(v)) {
        if (ev.gain(u) > gbest + tol) continue;
        if (ev.bias(u) < ev.bias(best) - tol) best = u;
      }
      if (best != cur) {
        smin[static_cast<size_t>(v)] = best;
        changed = true;
      }
    }
    if (!changed) {
      if (final_eval) *final_eval = ev;
      return smin;
    }
  }
  throw Error(Errc::NoConvergence, "Min policy iteration exceeded its round budget");
}

}  // namespace detail

/// Potentials and strengths for a fixed positional strategy pair. The linear
/// system is the potential equation anchored so Pot(vertex 0) = 0; strengths
/// are anchor-free differences.
inline void compute_potentials(const GameGraph& g, double p, const std::vector<VertexId>& sigma_max,
                               const std::vector<VertexId>& sigma_min, StochasticSolution* sol) {
  detail::ChainEvaluation ev = detail::evaluate_chain(g, p, sigma_max, sigma_min);
  if (!ev.gain_constant)
    throw Error(Errc::SingularSystem,
                "potential equation needs a constant gain; strategy pair induces distinct class gains");
  const int n = g.size();
  sol->p = p;
  sol->value = ev.gain(0);
  sol->sigma_max = sigma_max;
  sol->sigma_min = sigma_min;
  sol->pot.resize(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) sol->pot[static_cast<size_t>(v)] = ev.bias(v) - ev.bias(0);
  sol->strength.resize(static_cast<size_t>(n));
  sol->s_max = 0.0;
  sol->s_min_pos.reset();
  for (int v = 0; v < n; ++v) {
    double st = p * (1.0 - p) *
                (sol->pot[static_cast<size_t>(sigma_max[static_cast<size_t>(v)])] -
                 sol->pot[static_cast<size_t>(sigma_min[static_cast<size_t>(v)])]);
    if (st < 0.0 && st > -1e-12) st = 0.0;
    sol->strength[static_cast<size_t>(v)] = st;
    sol->s_max = std::max(sol->s_max, st);
  }
  const double positive_floor = 1e-12 * std::max(1.0, sol->s_max);
  for (double st : sol->strength)
    if (st > positive_floor && (!sol->s_min_pos || st < *sol->s_min_pos)) sol->s_min_pos = st;
}

/// Mean-payoff value of RT(G,p) by strategy iteration on Max's positional
/// policy with an exact Min best response inside. p in {0,1} is handled as the
/// one-player limit where the coin always favors the same player.
inline StochasticSolution solve_mean_payoff(const GameGraph& g, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::POutOfRange, "solve_mean_payoff: p outside [0,1]");
  const int n = g.size();
  const double scale = std::max(1.0, g.max_abs_weight());
  const double tol = 1e-11 * scale;

  std::vector<VertexId> smax(static_cast<size_t>(n)), smin(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) smax[static_cast<size_t>(v)] = smin[static_cast<size_t>(v)] = g.successors(v).front();

  detail::ChainEvaluation ev;
  for (int round = 0; round < 64 * n * n + 64; ++round) {
    smin = detail::min_best_response(g, p, smax, smin, &ev);
    // Two-phase improvement for Max: raise the gain where possible, the bias
    // among gain ties otherwise. For p in (0,1) the gain is already constant
    // after the exact Min response; at p=1 this is plain multichain policy
    // iteration on Max's one-player problem.
    bool changed = false;
    for (int v = 0; v < n; ++v) {
      VertexId cur = smax[static_cast<size_t>(v)];
      VertexId best = cur;
      for (VertexId u : g.successors(v))
        if (ev.gain(u) > ev.gain(best) + tol) best = u;
      if (best != cur) {
        smax[static_cast<size_t>(v)] = best;
        changed = true;
      }
    }
    if (changed) continue;
    for (int v = 0; v < n; ++v) {
      VertexId cur = smax[static_cast<size_t>(v)];
      const double gbest = ev.gain(cur);
      VertexId best = cur;
      for (VertexId u : g.successors(v)) {
        if (ev.gain(u) < gbest - tol) continue;
        if (ev.bias(u) > ev.bias(best) + tol) best = u;
      }
      if (best != cur) {
        smax[static_cast<size_t>(v)] = best;
        changed = true;
      }
    }
    if (!changed) {
      if (!ev.gain_constant)
        throw Error(Errc::NoConvergence, "gain not constant at the stable policy pair");
      // The converged evaluation solves the optimality equation; build the
      // solution from its bias directly. Re-evaluating a tie-canonicalized
      // pair could re-anchor equal-gain recurrent classes independently and
      // lose the cross-class potential relation the Bellman form needs.
      StochasticSolution sol;
      sol.p = p;
      sol.value = ev.gain(0);
      sol.pot.resize(static_cast<size_t>(n));
      for (int v = 0; v < n; ++v) sol.pot[static_cast<size_t>(v)] = ev.bias(v) - ev.bias(0);
      sol.sigma_max.resize(static_cast<size_t>(n));
      sol.sigma_min.resize(static_cast<size_t>(n));
      sol.strength.resize(static_cast<size_t>(n));
      sol.s_max = 0.0;
      for (int v = 0; v < n; ++v) {
        VertexId bmax = g.successors(v).front(), bmin = g.successors(v).front();
        for (VertexId u : g.successors(v)) {
          if (sol.pot[static_cast<size_t>(u)] > sol.pot[static_cast<size_t>(bmax)] + tol) bmax = u;
          if (sol.pot[static_cast<size_t>(u)] < sol.pot[static_cast<size_t>(bmin)] - tol) bmin = u;
        }
        sol.sigma_max[static_cast<size_t>(v)] = bmax;
        sol.sigma_min[static_cast<size_t>(v)] = bmin;
        double st = p * (1.0 - p) *
                    (sol.pot[static_cast<size_t>(bmax)] - sol.pot[static_cast<size_t>(bmin)]);
        if (st < 0.0 && st > -1e-12) st = 0.0;
        sol.strength[static_cast<size_t>(v)] = st;
        sol.s_max = std::max(sol.s_max, st);
      }
      const double positive_floor = 1e-12 * std::max(1.0, sol.s_max);
      for (double st : sol.strength)
        if (st > positive_floor && (!sol.s_min_pos || st < *sol.s_min_pos)) sol.s_min_pos = st;
      // Optimality certificate: the anchored potentials must satisfy the
      // Bellman form of the potential equation at every vertex.
      double resid = 0.0;
      for (int v = 0; v < n; ++v) {
        double hi = -1e300, lo = 1e300;
        for (VertexId u : g.successors(v)) {
          hi = std::max(hi, sol.pot[static_cast<size_t>(u)]);
          lo = std::min(lo, sol.pot[static_cast<size_t>(u)]);
        }
        resid = std::max(resid, std::abs(sol.pot[static_cast<size_t>(v)] -
                                         (p * hi + (1.0 - p) * lo + g.weight(v) - sol.value)));
      }
      if (resid > 1e-9 * scale)
        throw Error(Errc::NoConvergence, "optimality certificate residual too large");
      return sol;
    }
  }
  throw Error(Errc::NoConvergence, "Max strategy iteration exceeded its round budget");
}

inline std::vector<std::pair<double, double>> value_curve(const GameGraph& g,
                                                          const std::vector<double>& p_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "value_curve: grid values must lie in (0,1)");
    out.emplace_back(p, solve_mean_payoff(g, p).value);
  }
  return out;
}

struct TaxmanTargets {
  std::optional<double> p_pure;  // absent when X <= Y: pure strategies are useless
  double p_mixed = 0.5;
};

/// Biases of the random-turn games equivalent to taxman bidding with budgets
/// X (Max) and Y (Min). The published value formulas behave like Richman at
/// one endpoint and poorman at the other in the reverse of the payment
/// convention, so the norms are taken with tau' = 1 - tau; both endpoints then
/// agree with the dedicated Richman/poorman results.
inline TaxmanTargets taxman_targets(double X, double Y, double tau) {
  if (!(X > 0.0 && Y > 0.0)) throw Error(Errc::NonPositiveBudget, "taxman_targets: budgets must be positive");
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(Errc::BadInput, "taxman_targets: tau outside [0,1]");
  const double tp = 1.0 - tau;
  const double nx = X + tp * Y;
  const double ny = Y + tp * X;
  TaxmanTargets t;
  if (X > Y) {
    t.p_pure = 1.0 - ny / nx;
    t.p_mixed = 1.0 - ny / (2.0 * nx);
  } else {
    t.p_pure.reset();
    t.p_mixed = nx / (2.0 * ny);
  }
  return t;
}

}  // namespace bidding
