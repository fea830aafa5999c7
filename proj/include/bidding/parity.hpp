#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "bidding/graph.hpp"
#include "bidding/mechanism.hpp"
#include "bidding/solver.hpp"

namespace bidding {

/// Strongly-connected arena with a parity label on every vertex. Player 1
/// wins a play iff the maximal index visited infinitely often is odd.
struct ParityGame {
  GameGraph graph;  // weights ignored; parity labels required on every vertex
  int max_index = 0;

  static ParityGame from_graph(const GameGraph& g) {
    if (!g.fully_labeled())
      throw Error(Errc::BadInput, "parity game requires a parity label on every vertex");
    ParityGame pg{g, 0};
    for (const auto& v : g.vertices()) pg.max_index = std::max(pg.max_index, *v.parity);
    return pg;
  }
};

/// Mean-payoff reduction: weight 1 exactly on the vertices of maximal index,
/// 0 elsewhere. Positive payoff forces infinitely many visits to a
/// top-index vertex.
inline GameGraph parity_to_mean_payoff(const ParityGame& pg) {
  RawGraph raw;
  for (const auto& v : pg.graph.vertices())
    raw.vertices.push_back({v.id, *v.parity == pg.max_index ? 1.0 : 0.0, v.parity});
  for (VertexId u = 0; u < pg.graph.size(); ++u)
    for (VertexId w : pg.graph.successors(u)) raw.edges.emplace_back(u, w);
  return validate_graph(raw);
}

struct PositiveValueCertificate {
  double value = 0.0;
  double lower_bound = 0.0;
};

/// For a nonnegative-weight graph with some positive weight: solver value plus
/// the analytic floor w(v0) * p^(n-1) / (n-1), where v0 is a positive-weight
/// vertex and n the vertex count. A single vertex loops on v0 forever, so the
/// floor degenerates to w(v0) itself.
inline PositiveValueCertificate positive_value_certificate(const GameGraph& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "certificate: p must lie in (0,1)");
  std::optional<VertexId> v0;
  for (const auto& v : g.vertices()) {
    if (v.weight < 0.0) throw Error(Errc::BadInput, "certificate: weights must be nonnegative");
    if (v.weight > 0.0 && !v0) v0 = v.id;
  }
  if (!v0) throw Error(Errc::AllZeroWeights, "certificate: all weights are zero");
  PositiveValueCertificate cert;
  cert.value = solve_mean_payoff(g, p).value;
  const int n = g.size();
  cert.lower_bound = n == 1 ? g.weight(*v0)
                            : g.weight(*v0) * std::pow(p, n - 1) / static_cast<double>(n - 1);
  if (!(cert.value >= cert.lower_bound - 1e-9) || !(cert.value > 0.0))
    throw Error(Errc::NoConvergence, "certificate: solver value fell below the analytic floor");
  return cert;
}

/// Verdict for one player. sure_win is absent when the even-cycle hypothesis
/// fails and no sound negative verdict exists.
struct ParityVerdict {
  int player = 1;
  bool hypothesis_met = false;  // highest index favors this player
  bool almost_sure_win = false;
  std::optional<bool> sure_win;
  double certificate_value = 0.0;  // positive random-turn value backing the verdict
};

namespace detail {

// True iff some cycle's maximal parity index is even (odd when
// want_even=false): for some index k of the wanted parity class, the subgraph
// induced by {parity <= k} contains a cycle through a vertex of index k.
inline bool cycle_with_top_parity(const GameGraph& g, bool want_even) {
  int max_idx = 0;
  for (const auto& v : g.vertices()) max_idx = std::max(max_idx, *v.parity);
  for (int k = want_even ? 0 : 1; k <= max_idx; k += 2) {
    // Induced subgraph on {v : parity(v) <= k}; look for a cycle visiting
    // parity exactly k.
    const int n = g.size();
    std::vector<char> in(n, 0);
    for (const auto& v : g.vertices()) in[static_cast<size_t>(v.id)] = *v.parity <= k ? 1 : 0;
    for (const auto& v : g.vertices()) {
      if (!in[static_cast<size_t>(v.id)] || *v.parity != k) continue;
      // BFS from v within the subgraph; a path back to v closes the cycle.
      std::vector<char> seen(n, 0);
      std::vector<VertexId> stack = {v.id};
      bool found = false;
      while (!stack.empty() && !found) {
        VertexId u = stack.back();
        stack.pop_back();
        for (VertexId w : g.successors(u)) {
          if (!in[static_cast<size_t>(w)]) continue;
          if (w == v.id) {
            found = true;
            break;
          }
          if (!seen[static_cast<size_t>(w)]) {
            seen[static_cast<size_t>(w)] = 1;
            stack.push_back(w);
          }
        }
      }
      if (found) return true;
    }
  }
  return false;
}

inline ParityGame role_swapped(const ParityGame& pg) {
  RawGraph raw;
  for (const auto& v : pg.graph.vertices()) raw.vertices.push_back({v.id, v.weight, *v.parity + 1});
  for (VertexId u = 0; u < pg.graph.size(); ++u)
    for (VertexId w : pg.graph.successors(u)) raw.edges.emplace_back(u, w);
  return ParityGame::from_graph(validate_graph(raw));
}

}  // namespace detail

/// Applies the qualitative verdict rules to one side: under all-pay Richman the
/// favored player almost-surely wins at any ratio and cannot surely win; under
/// all-pay poorman they almost-surely win at any ratio and surely win exactly
/// when their ratio exceeds one half. The negative sure half needs a cycle
/// whose top index belongs to the opponent; without one no sure verdict is
/// emitted.
inline ParityVerdict decide_parity_for(const ParityGame& pg, const BiddingMechanism& mech,
                                       double ratio, int player) {
  if (mech.kind != MechanismKind::AllPayRichman && mech.kind != MechanismKind::AllPayPoorman)
    throw Error(Errc::BadInput, "parity verdicts cover all-pay Richman and poorman only");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(Errc::BadInput, "parity: ratio must lie in (0,1)");

  ParityVerdict v;
  v.player = player;
  if (pg.max_index % 2 != 1) {
    v.hypothesis_met = false;
    return v;  // highest index favors the other player; no verdict from this side
  }
  v.hypothesis_met = true;

  // Soundness certificate: the reduced game has positive random-turn value at
  // the biases the mean-payoff equivalences associate with this mechanism/ratio.
  const GameGraph reduced = parity_to_mean_payoff(pg);
  const double p_mixed = mech.kind == MechanismKind::AllPayRichman
                             ? 0.5
                             : (ratio > 0.5 ? 1.0 - (1.0 - ratio) / (2.0 * ratio)
                                            : ratio / (2.0 * (1.0 - ratio)));
  v.certificate_value = positive_value_certificate(reduced, p_mixed).value;
  v.almost_sure_win = true;

  const bool even_cycle = detail::cycle_with_top_parity(pg.graph, /*want_even=*/true);
  if (mech.kind == MechanismKind::AllPayRichman) {
    if (even_cycle) v.sure_win = false;
  } else {
    if (ratio > 0.5) {
      positive_value_certificate(reduced, 1.0 - (1.0 - ratio) / ratio);  // pure-strategy backing
      v.sure_win = true;
    } else if (even_cycle) {
      v.sure_win = false;
    }
  }
  return v;
}

/// Both players' verdicts; Player 2's side is the standard role swap
/// (increment every index, flip the ratio).
inline std::pair<ParityVerdict, ParityVerdict> decide_parity(const ParityGame& pg,
                                                             const BiddingMechanism& mech,
                                                             double ratio) {
  ParityVerdict p1 = decide_parity_for(pg, mech, ratio, 1);
  ParityVerdict p2 = decide_parity_for(detail::role_swapped(pg), mech, 1.0 - ratio, 2);
  p2.player = 2;
  return {p1, p2};
}

}  // namespace bidding
