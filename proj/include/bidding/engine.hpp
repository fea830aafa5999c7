#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>
#include <vector>

#include "bidding/graph.hpp"
#include "bidding/mechanism.hpp"
#include "bidding/rng.hpp"
#include "bidding/strategy.hpp"
#include "bidding/trace.hpp"

namespace bidding {

/// Draw slots per step: Max owns draws {0,1}, Min owns {2,3}. Slot 0/2 picks
/// the mixture branch, slot 1/3 feeds the uniform. Point masses consume no
/// randomness, so traces replay bit-identically whatever the opponents do.
inline double sample_bid(const BidAction& a, const RngKey& key, uint64_t step, int base_slot) {
  switch (a.dist) {
    case BidAction::Dist::PointMass:
      return a.point;
    case BidAction::Dist::Uniform:
      return rng_uniform01(key, step, static_cast<uint64_t>(base_slot + 1)) * a.upper;
    case BidAction::Dist::ZeroOrUniform: {
      if (rng_uniform01(key, step, static_cast<uint64_t>(base_slot)) < a.zero_prob) return 0.0;
      return rng_uniform01(key, step, static_cast<uint64_t>(base_slot + 1)) * a.upper;
    }
  }
  return 0.0;
}

inline NormalizationCadence default_cadence(const BiddingMechanism& mech) {
  switch (mech.kind) {
    case MechanismKind::FirstPricePoorman:
    case MechanismKind::AllPayPoorman:
      return NormalizationCadence::MinToOne;
    default:
      return NormalizationCadence::None;
  }
}

/// Runs `steps` biddings. The trace is a pure function of all arguments.
/// Responder strategies are legal only against opponents whose prescriptions
/// are point masses.
inline PlayTrace simulate(const GameGraph& g, const BiddingMechanism& mech,
                          const StrategyHandle& max_handle, const StrategyHandle& min_handle,
                          const BudgetState& budgets, VertexId start, int steps, uint64_t seed,
                          uint64_t trial = 0,
                          std::optional<NormalizationCadence> cadence_opt = std::nullopt) {
  const bool max_resp = max_handle.observability == Observability::Responder;
  const bool min_resp = min_handle.observability == Observability::Responder;
  if (max_resp && min_resp)
    throw Error(Errc::ResponderAgainstMixed, "two responders cannot face each other");
  if (max_resp && !min_handle.deterministic)
    throw Error(Errc::ResponderAgainstMixed, "responder paired with a mixed opponent");
  if (min_resp && !max_handle.deterministic)
    throw Error(Errc::ResponderAgainstMixed, "responder paired with a mixed opponent");
  if (start < 0 || start >= g.size()) throw Error(Errc::BadInput, "start vertex out of range");
  if (mech.kind == MechanismKind::Asymmetric && std::abs(budgets.min_budget - 1.0) > 1e-12)
    throw Error(Errc::BadInput, "asymmetric play requires Min's budget pinned to 1");

  const NormalizationCadence cadence = cadence_opt.value_or(default_cadence(mech));
  PlayTrace trace;
  trace.mechanism = mech;
  trace.start_vertex = start;
  trace.cadence = cadence;
  trace.seed = seed;
  trace.trial = trial;

  BudgetState state = budgets;
  if (cadence == NormalizationCadence::MinToOne) state = normalize_budgets(mech, state);
  trace.initial_budgets = state;

  auto fmax = max_handle.make();
  auto fmin = min_handle.make();
  RngKey key{seed, trial};
  VertexId v = start;
  trace.steps.reserve(static_cast<size_t>(steps));

  for (int i = 0; i < steps; ++i) {
    const StrategyContext cmax{v, state.max_budget, state.min_budget};
    const StrategyContext cmin{v, state.min_budget, state.max_budget};
    BidAction amax, amin;
    double x = 0.0, y = 0.0;
    const auto step = static_cast<uint64_t>(i);
    if (max_resp) {
      amin = fmin->act(cmin);
      y = sample_bid(amin, key, step, 2);
      amax = fmax->respond(cmax, y);
      x = amax.point;
    } else if (min_resp) {
      amax = fmax->act(cmax);
      x = sample_bid(amax, key, step, 0);
      amin = fmin->respond(cmin, x);
      y = amin.point;
    } else {
      amax = fmax->act(cmax);
      amin = fmin->act(cmin);
      x = sample_bid(amax, key, step, 0);
      y = sample_bid(amin, key, step, 2);
    }

    auto [winner, after] = resolve_bidding(mech, state, x, y);
    const VertexId move = winner == Player::Max ? amax.move_on_win : amin.move_on_win;
    if (!g.has_edge(v, move))
      throw Error(Errc::BadInput, "strategy moved along a non-edge");
    if (cadence == NormalizationCadence::MinToOne) after = normalize_budgets(mech, after);
    if (after.max_budget < 0.0 || after.min_budget < 0.0)
      throw Error(Errc::IllegalBid, "budgets went negative");
    if (!std::isfinite(after.max_budget) || !std::isfinite(after.min_budget))
      throw Error(Errc::BadInput,
                  "budget left double range at step " + std::to_string(i) +
                      "; the opponent's cumulative burn exceeds what raw doubles can carry");

    trace.steps.push_back({v, x, y, winner, move, after});
    fmax->after_step(state.max_budget, state.min_budget, x, y);
    fmin->after_step(state.min_budget, state.max_budget, y, x);
    state = after;
    v = move;
  }
  return trace;
}

/// Recomputes every StepRecord from its predecessor via resolve_bidding plus
/// the trace's declared cadence; returns the first step that disagrees.
inline std::optional<size_t> replay_mismatch(const PlayTrace& t) {
  BudgetState state = t.initial_budgets;
  VertexId v = t.start_vertex;
  for (size_t i = 0; i < t.steps.size(); ++i) {
    const StepRecord& rec = t.steps[i];
    if (rec.vertex != v) return i;
    BudgetState after;
    Player winner;
    try {
      auto res = resolve_bidding(t.mechanism, state, rec.bid_max, rec.bid_min);
      winner = res.first;
      after = res.second;
    } catch (const Error&) {
      return i;
    }
    if (t.cadence == NormalizationCadence::MinToOne) after = normalize_budgets(t.mechanism, after);
    if (winner != rec.winner || after.max_budget != rec.budgets_after.max_budget ||
        after.min_budget != rec.budgets_after.min_budget)
      return i;
    state = after;
    v = rec.move_to;
  }
  return std::nullopt;
}

struct TrialResult {
  double horizon_average = 0.0;
  double tail_min_average = 0.0;
  long max_win_steps = 0;  // biddings Max won (= biddings Min lost)
};

struct PayoffStats {
  int trials = 0;
  int horizon = 0;
  std::vector<TrialResult> per_trial;
  double mean_horizon = 0.0, min_horizon = 0.0, max_horizon = 0.0;
  double mean_tail_min = 0.0, min_tail_min = 0.0, max_tail_min = 0.0;
};

/// Monte Carlo payoff estimation. Trials derive independent streams from
/// (base_seed, trial), so the execution order (or thread count) cannot change
/// the aggregate.
inline PayoffStats estimate_payoff(const GameGraph& g, const BiddingMechanism& mech,
                                   const StrategyHandle& fmax, const StrategyHandle& fmin,
                                   const BudgetState& budgets, VertexId start, int steps,
                                   int trials, uint64_t base_seed, int threads = 1) {
  if (trials < 1) throw Error(Errc::BadInput, "estimate_payoff: need at least one trial");
  PayoffStats stats;
  stats.trials = trials;
  stats.horizon = steps;
  stats.per_trial.resize(static_cast<size_t>(trials));

  auto run_one = [&](int t) {
    PlayTrace tr = simulate(g, mech, fmax, fmin, budgets, start, steps, base_seed,
                            static_cast<uint64_t>(t));
    EnergyStats e = energy_and_payoff(tr, g);
    long max_wins = 0;
    for (const auto& rec : tr.steps)
      if (rec.winner == Player::Max) ++max_wins;
    stats.per_trial[static_cast<size_t>(t)] = {e.payoff_estimate, e.tail_min_average, max_wins};
  };

  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) run_one(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_one(t);
      });
    for (auto& th : pool) th.join();
  }

  stats.mean_horizon = stats.mean_tail_min = 0.0;
  stats.min_horizon = stats.min_tail_min = 1e300;
  stats.max_horizon = stats.max_tail_min = -1e300;
  for (const auto& r : stats.per_trial) {
    stats.mean_horizon += r.horizon_average;
    stats.mean_tail_min += r.tail_min_average;
    stats.min_horizon = std::min(stats.min_horizon, r.horizon_average);
    stats.max_horizon = std::max(stats.max_horizon, r.horizon_average);
    stats.min_tail_min = std::min(stats.min_tail_min, r.tail_min_average);
    stats.max_tail_min = std::max(stats.max_tail_min, r.tail_min_average);
  }
  stats.mean_horizon /= trials;
  stats.mean_tail_min /= trials;
  return stats;
}

}  // namespace bidding
