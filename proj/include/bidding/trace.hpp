#pragma once

#include <cstdint>
#include <vector>

#include "bidding/graph.hpp"
#include "bidding/mechanism.hpp"

namespace bidding {

/// One resolved auction: where it happened, what was bid, who moved where,
/// and the budgets after payments (and after the trace's declared
/// normalization cadence, if any).
struct StepRecord {
  VertexId vertex = 0;
  double bid_max = 0.0;
  double bid_min = 0.0;
  Player winner = Player::Min;
  VertexId move_to = 0;
  BudgetState budgets_after;
};

/// Per-step budget normalization applied by the engine after resolve_bidding.
/// Richman play conserves the budget sum and needs none; poorman-style play
/// over long horizons keeps Min pinned at 1 so raw doubles stay in range.
enum class NormalizationCadence { None, MinToOne };

struct PlayTrace {
  BiddingMechanism mechanism;
  BudgetState initial_budgets;
  VertexId start_vertex = 0;
  NormalizationCadence cadence = NormalizationCadence::None;
  uint64_t seed = 0;
  uint64_t trial = 0;
  std::vector<StepRecord> steps;
};

struct EnergyStats {
  std::vector<double> energy_prefix;  // energy_prefix[k] = sum of first k visited weights
  double payoff_estimate = 0.0;       // energy at the full horizon divided by N
  double tail_min_average = 0.0;      // min prefix average over the last ceil(N/2) prefixes
};

/// Energy prefix sums over the visited vertices plus two finite-horizon payoff
/// proxies. A finite trace cannot realize a lim inf; the tail minimum is the
/// conservative stand-in (it can only under-report Max's payoff).
inline EnergyStats energy_and_payoff(const std::vector<VertexId>& visited, const GameGraph& g) {
  if (visited.empty()) throw Error(Errc::BadInput, "energy_and_payoff: empty trace");
  const size_t n = visited.size();
  EnergyStats out;
  out.energy_prefix.resize(n + 1);
  out.energy_prefix[0] = 0.0;
  for (size_t i = 0; i < n; ++i)
    out.energy_prefix[i + 1] = out.energy_prefix[i] + g.weight(visited[i]);
  out.payoff_estimate = out.energy_prefix[n] / static_cast<double>(n);
  const size_t tail = (n + 1) / 2;  // ceil(n/2)
  double m = out.energy_prefix[n] / static_cast<double>(n);
  for (size_t k = n - tail + 1; k <= n; ++k)
    m = std::min(m, out.energy_prefix[k] / static_cast<double>(k));
  out.tail_min_average = m;
  return out;
}

inline std::vector<VertexId> visited_vertices(const PlayTrace& t) {
  std::vector<VertexId> v;
  v.reserve(t.steps.size());
  for (const auto& s : t.steps) v.push_back(s.vertex);
  return v;
}

inline EnergyStats energy_and_payoff(const PlayTrace& t, const GameGraph& g) {
  return energy_and_payoff(visited_vertices(t), g);
}

}  // namespace bidding
