#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bidding/engine.hpp"
#include "bidding/graph.hpp"
#include "bidding/rng.hpp"
#include "bidding/solver.hpp"
#include "bidding/strategy.hpp"
#include "bidding/trace.hpp"

namespace bidding {

enum class LedgerVariant { APRichman, FPRichman, FPPoorman, AsymPure, AsymMixedHighW, AsymMixedLowW };

inline const char* ledger_variant_name(LedgerVariant v) {
  switch (v) {
    case LedgerVariant::APRichman: return "ap-richman";
    case LedgerVariant::FPRichman: return "fp-richman";
    case LedgerVariant::FPPoorman: return "fp-poorman";
    case LedgerVariant::AsymPure: return "asym-pure";
    case LedgerVariant::AsymMixedHighW: return "asym-mixed-highW";
    case LedgerVariant::AsymMixedLowW: return "asym-mixed-lowW";
  }
  return "?";
}

struct LedgerParams {
  LedgerVariant variant = LedgerVariant::APRichman;
  double mu = 0.0, nu = 0.0, c = 0.0, alpha = 0.0, W = 0.0;
  double s_max = 0.0, N = 0.0, B0 = 0.0, epsilon = 0.0;
  double delta = 0.0;  // FPRichman spare change, raw units
  int k0 = 0;
  std::shared_ptr<const StochasticSolution> sol;
};

/// Investment/gain sums and the derived combination H = mu*I+ - nu*G+.
/// The luck column moves only through luck_increment.
struct LedgerState {
  double mu = 0.0, nu = 0.0;
  double i_plus = 0.0;
  double g_plus = 0.0;
  double l = 0.0;
  double h() const { return mu * i_plus - nu * g_plus; }
};

/// Derives the LedgerParams matching a constructed strategy.
inline LedgerParams ledger_params_for(const StrategyHandle& h) {
  LedgerParams p;
  p.mu = h.params.mu;
  p.nu = h.params.nu;
  p.c = h.params.c;
  p.alpha = h.params.alpha;
  p.W = h.params.W;
  p.N = h.params.N;
  p.B0 = h.params.B0;
  p.epsilon = h.params.epsilon;
  p.delta = h.params.spare_change;
  p.k0 = h.params.k0;
  p.sol = h.sol;
  p.s_max = h.sol ? h.sol->s_max : 0.0;
  const std::string& s = h.spec;
  auto has = [&s](const char* prefix) { return s.rfind(prefix, 0) == 0 || s.find(std::string("(") + prefix) != std::string::npos; };
  if (has("ap-richman-mixed"))
    p.variant = LedgerVariant::APRichman;
  else if (has("fp-richman"))
    p.variant = LedgerVariant::FPRichman;
  else if (has("fp-poorman"))
    p.variant = LedgerVariant::FPPoorman;
  else if (has("asym-pure"))
    p.variant = LedgerVariant::AsymPure;
  else if (has("asym-mixed"))
    p.variant = h.params.W > 1.0 ? LedgerVariant::AsymMixedHighW : LedgerVariant::AsymMixedLowW;
  else
    throw Error(Errc::VariantMismatch, "no ledger variant for strategy " + s);
  return p;
}

// ---------------------------------------------------------------------------
// Luck.
// ---------------------------------------------------------------------------

inline bool variant_has_luck(LedgerVariant v) {
  return v == LedgerVariant::APRichman || v == LedgerVariant::AsymMixedHighW ||
         v == LedgerVariant::AsymMixedLowW;
}

/// Upper bound of the mixed strategy's bid support at budget B and strength s.
inline double luck_support_upper(const LedgerParams& p, double s, double B) {
  if (p.s_max <= 0.0) return 0.0;
  switch (p.variant) {
    case LedgerVariant::APRichman: return p.alpha * B * s / p.s_max;
    case LedgerVariant::AsymMixedHighW: return s / (p.W * p.s_max) * p.alpha * B;
    case LedgerVariant::AsymMixedLowW: return s / p.s_max * p.alpha * B;
    default: throw Error(Errc::VariantWithoutLuck, "pure variants have no luck ledger");
  }
}

/// Whether the mixed asymmetric strategy's deterministic overbid branch fires.
inline bool deterministic_branch(const LedgerParams& p, double s, double B) {
  if (s <= 0.0) return false;
  if (p.variant == LedgerVariant::AsymMixedHighW)
    return B > 2.0 * p.W * p.W * p.s_max / (p.alpha * s);
  if (p.variant == LedgerVariant::AsymMixedLowW) return B > 2.0 * p.s_max / (p.alpha * s);
  return false;
}

/// Per-step luck Delta L for a realized bid pair.
inline double luck_increment(LedgerVariant variant, const LedgerParams& p, double s, double B,
                             double x, double y) {
  if (!variant_has_luck(variant))
    throw Error(Errc::VariantWithoutLuck, "pure variants have no luck ledger");
  const double S = p.s_max;
  switch (variant) {
    case LedgerVariant::APRichman: {
      const double kick = 2.0 * S * (y - x) / (p.alpha * B);
      return x > y ? p.c * (s + kick) : (-s + kick);
    }
    case LedgerVariant::AsymMixedHighW: {
      const double drift = (p.W * y - x) / (p.alpha * B);
      if (x <= y) return 2.0 * p.W * S * drift - p.nu * s;
      if (x <= p.W * y) return 2.0 * p.W * S * drift + p.mu * s;
      return 2.0 * p.W * p.mu * S * drift + p.mu * s;
    }
    case LedgerVariant::AsymMixedLowW: {
      const double drift = (p.W * y - x) / (p.alpha * B);
      if (x <= p.W * y) return 2.0 * S * drift - p.nu * s;
      if (x <= y) return 2.0 * (1.0 + p.epsilon) * S * drift - p.nu * s;
      return 2.0 * (1.0 + p.epsilon) * S * drift + p.mu * s;
    }
    default: return 0.0;
  }
}

/// Almost-sure bound on |Delta L| for one step (used by the sampling check).
inline double luck_abs_bound(LedgerVariant variant, const LedgerParams& p) {
  switch (variant) {
    case LedgerVariant::APRichman: return 3.0 * p.c * p.s_max;
    case LedgerVariant::AsymMixedHighW:
      return 2.0 * p.s_max * (p.W * p.W + 1.0) * (p.mu + p.nu);
    case LedgerVariant::AsymMixedLowW:
      return (2.0 * (1.0 + p.epsilon) + p.mu + p.nu) * p.s_max;
    default: throw Error(Errc::VariantWithoutLuck, "pure variants have no luck ledger");
  }
}

/// Largest Min bid the expectation formulas cover: the opponent never profits
/// from bidding above the strategy's own support, and in the asymmetric game
/// her budget is pinned at 1.
inline double luck_legal_y_cap(LedgerVariant variant, const LedgerParams& p, double s, double B) {
  const double beta = luck_support_upper(p, s, B);
  if (variant == LedgerVariant::APRichman) return beta;
  return std::min(beta, 1.0);
}

/// Exact expectation of luck_increment over the strategy's bid distribution
/// at (s, B) against a Min bid y in [0, min(beta, budget cap)]. This is the
/// integral of the implemented increment, not a transcription of any
/// simplified form; the quadrature oracle in the tests must agree to 1e-8.
inline double expected_luck_closed_form(LedgerVariant variant, const LedgerParams& p, double s,
                                        double B, double y) {
  if (!variant_has_luck(variant))
    throw Error(Errc::VariantWithoutLuck, "pure variants have no luck ledger");
  if (!(s > 0.0)) throw Error(Errc::BadInput, "expected_luck_closed_form: need s > 0");
  const double S = p.s_max;
  const double beta = luck_support_upper(p, s, B);
  if (!(y >= 0.0 && y <= luck_legal_y_cap(variant, p, s, B) * (1.0 + 1e-12)))
    throw Error(Errc::YOutOfRange, "expected_luck_closed_form: y outside the legal range");

  switch (variant) {
    case LedgerVariant::APRichman:
      return S * (p.c - 1.0) * y * (beta - y) / (beta * p.alpha * B);
    case LedgerVariant::AsymMixedHighW: {
      if (deterministic_branch(p, s, B)) {
        const double x = s / (2.0 * p.W * S) * p.alpha * B;
        return 2.0 * p.W * p.mu * S * (p.W * y - x) / (p.alpha * B) + p.mu * s;
      }
      const double eps = p.epsilon;
      if (p.W * y > beta) return (beta - y) * eps * s / beta;
      return eps * s * y * (2.0 * p.W - 1.0 - p.W * p.W * y / beta) / beta;
    }
    case LedgerVariant::AsymMixedLowW: {
      const double eps = p.epsilon, W = p.W, nu = p.nu;
      if (deterministic_branch(p, s, B)) {
        const double x = s / (2.0 * S) * p.alpha * B;
        return 2.0 * (1.0 + eps) * S * (W * y - x) / (p.alpha * B) + p.mu * s;
      }
      // Point mass at zero with weight 1-nu, uniform on [0,beta] with weight nu.
      const double at_zero = 2.0 * S * W * y / (p.alpha * B) - nu * s;
      const double integral =
          s * ((1.0 - W) * (beta - 2.0 * y) + 2.0 * eps * W * y - eps * W * W * y * y / beta);
      return (1.0 - nu) * at_zero + nu * integral / beta;
    }
    default: return 0.0;
  }
}

// ---------------------------------------------------------------------------
// Trace invariants.
// ---------------------------------------------------------------------------

struct CheckReport {
  std::string name;
  bool passed = true;
  size_t steps = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  size_t worst_step = 0;
  std::optional<size_t> first_violation;
  size_t max_wins_off_vplus = 0;  // flagged: contribute to neither I+ nor G+
  // APRichman only: margin of the literal published inequality, whose base
  // case additionally needs 2*S_max <= 1; the checked margin is the anchored
  // telescoped form, which is valid for every parameter set.
  std::optional<double> worst_literal_margin;
};

namespace detail {

inline void require_matching_mechanism(LedgerVariant variant, const PlayTrace& trace) {
  MechanismKind want = MechanismKind::AllPayRichman;
  switch (variant) {
    case LedgerVariant::APRichman: want = MechanismKind::AllPayRichman; break;
    case LedgerVariant::FPRichman: want = MechanismKind::FirstPriceRichman; break;
    case LedgerVariant::FPPoorman: want = MechanismKind::FirstPricePoorman; break;
    case LedgerVariant::AsymPure:
    case LedgerVariant::AsymMixedHighW:
    case LedgerVariant::AsymMixedLowW: want = MechanismKind::Asymmetric; break;
  }
  if (trace.mechanism.kind != want)
    throw Error(Errc::VariantMismatch,
                std::string("ledger variant ") + ledger_variant_name(variant) +
                    " cannot audit a " + trace.mechanism.name() + " trace");
}

inline double log1pa(double alpha, double v) { return std::log(v) / std::log1p(alpha); }

inline double tolerance(double a, double b) {
  return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct LedgerWalk {
  LedgerState ledger;
  size_t off_vplus = 0;

  void account(const LedgerParams& p, const StepRecord& rec, double s) {
    if (rec.winner == Player::Max) {
      if (rec.move_to == p.sol->sigma_max[static_cast<size_t>(rec.vertex)])
        ledger.i_plus += s;
      else
        ++off_vplus;  // conservative: counted toward neither sum
    } else {
      ledger.g_plus += s;
    }
  }
};

}  // namespace detail

/// Replays a trace against the budget/ledger inequality proved for the
/// matching strategy construction. Margins are compared on the exponent (log)
/// scale so long traces cannot overflow.
inline CheckReport check_invariant(LedgerVariant variant, const PlayTrace& trace,
                                   const LedgerParams& p) {
  if (!p.sol) throw Error(Errc::BadInput, "check_invariant: ledger params carry no solution");
  if (!trace.steps.empty()) detail::require_matching_mechanism(variant, trace);
  CheckReport rep;
  rep.name = std::string("invariant:") + ledger_variant_name(variant);
  const double S = p.s_max;
  const double la = std::log1p(p.alpha);

  detail::LedgerWalk walk;
  walk.ledger.mu = p.mu;
  walk.ledger.nu = p.nu;

  BudgetState state = trace.initial_budgets;
  const double sum0 = state.sum();
  const double r0 = state.ratio();

  double worst_literal = std::numeric_limits<double>::infinity();
  if (variant == LedgerVariant::APRichman) walk.ledger.l = std::log(r0) / la;

  auto note = [&rep](double margin, size_t step) {
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = step;
    }
    if (margin < -1e-9 && !rep.first_violation) rep.first_violation = step;
  };

  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& rec = trace.steps[i];
    const double s = p.sol->strength[static_cast<size_t>(rec.vertex)];
    const BudgetState pre = state;

    switch (variant) {
      case LedgerVariant::APRichman: {
        const double B = pre.max_budget;
        const double beta = (S > 0.0) ? p.alpha * B * s / S : 0.0;
        const double y_eff = std::min(rec.bid_min, beta);
        if (S > 0.0 && B > 0.0)
          walk.ledger.l += luck_increment(variant, p, s, B, rec.bid_max, y_eff);
        walk.account(p, rec, s);
        const double ratio_after = rec.budgets_after.ratio();
        if (S > 0.0) {
          const double lhs = std::log(ratio_after) / la;
          const double anchored =
              lhs - std::log(r0) / la -
              ((walk.ledger.l - std::log(r0) / la) - walk.ledger.h()) / (2.0 * S);
          const double literal = lhs - (walk.ledger.l - walk.ledger.h()) / (2.0 * S);
          note(anchored, i);
          worst_literal = std::min(worst_literal, literal);
        }
        break;
      }
      case LedgerVariant::FPRichman: {
        walk.account(p, rec, s);
        if (S > 0.0) {
          const double main_after =
              rec.budgets_after.max_budget / rec.budgets_after.sum() - p.delta / sum0;
          const double margin = main_after <= 0.0
                                    ? -std::numeric_limits<double>::infinity()
                                    : detail::log1pa(p.alpha, main_after / p.B0) +
                                          walk.ledger.h() / S;
          note(margin, i);
        }
        break;
      }
      case LedgerVariant::FPPoorman: {
        walk.account(p, rec, s);
        if (S > 0.0) {
          const double surplus = rec.budgets_after.max_budget - p.W;
          const double shifted_h =
              walk.ledger.h() - p.N * detail::log1pa(p.alpha, p.epsilon);
          const double margin = surplus <= 0.0 ? -std::numeric_limits<double>::infinity()
                                               : p.N * detail::log1pa(p.alpha, surplus) + shifted_h;
          note(margin, i);
        }
        break;
      }
      case LedgerVariant::AsymPure: {
        walk.account(p, rec, s);
        if (S > 0.0) {
          const double margin =
              detail::log1pa(p.alpha, rec.budgets_after.max_budget / trace.initial_budgets.max_budget) +
              walk.ledger.h() / p.N;
          note(margin, i);
        }
        break;
      }
      case LedgerVariant::AsymMixedHighW:
      case LedgerVariant::AsymMixedLowW: {
        const double B = pre.max_budget;
        if (S > 0.0 && B > 0.0) {
          double y_eff = rec.bid_min;
          if (!deterministic_branch(p, s, B))
            y_eff = std::min(y_eff, luck_support_upper(p, s, B));
          walk.ledger.l += luck_increment(variant, p, s, B, rec.bid_max, y_eff);
        }
        walk.account(p, rec, s);
        if (S > 0.0) {
          const double denom =
              variant == LedgerVariant::AsymMixedHighW ? 2.0 * p.W * S : 2.0 * S;
          const double margin =
              detail::log1pa(p.alpha, rec.budgets_after.max_budget / trace.initial_budgets.max_budget) -
              (walk.ledger.l - walk.ledger.h()) / denom;
          note(margin, i);
        }
        break;
      }
    }
    state = rec.budgets_after;
  }

  rep.steps = trace.steps.size();
  rep.max_wins_off_vplus = walk.off_vplus;
  rep.passed = !rep.first_violation.has_value();
  if (variant == LedgerVariant::APRichman) rep.worst_literal_margin = worst_literal;
  if (rep.worst_margin == std::numeric_limits<double>::infinity()) rep.worst_margin = 0.0;
  return rep;
}

inline bool variant_has_h_bound(LedgerVariant v) {
  return v == LedgerVariant::AsymPure || v == LedgerVariant::FPPoorman ||
         v == LedgerVariant::AsymMixedHighW || v == LedgerVariant::AsymMixedLowW;
}

/// Lower bound on H (pure variants) or upper bound on L - H (mixed asymmetric
/// variants) with the constant M the corresponding derivation supplies.
inline CheckReport check_h_bound(LedgerVariant variant, const PlayTrace& trace,
                                 const LedgerParams& p) {
  if (!p.sol) throw Error(Errc::BadInput, "check_h_bound: ledger params carry no solution");
  if (!trace.steps.empty()) detail::require_matching_mechanism(variant, trace);
  if (!p.sol->s_min_pos)
    throw Error(Errc::NoPositiveStrength, "check_h_bound: no strictly positive strength");
  const double smin = *p.sol->s_min_pos;
  const double S = p.s_max;

  CheckReport rep;
  rep.name = std::string("h-bound:") + ledger_variant_name(variant);

  double M = 0.0;
  bool upper = false;  // true: check L-H <= M; false: check H >= M
  switch (variant) {
    case LedgerVariant::AsymPure:
      M = -p.N * detail::log1pa(p.alpha, p.N / (p.alpha * smin)) - p.nu * S;
      break;
    case LedgerVariant::FPPoorman:
      // Bound on the unshifted combination mu*I+ - nu*G+.
      M = -p.N * detail::log1pa(p.alpha, p.N / (p.alpha * smin)) - p.nu * S +
          p.N * detail::log1pa(p.alpha, p.epsilon);
      break;
    case LedgerVariant::AsymMixedHighW:
      M = 2.0 * p.W * S * detail::log1pa(p.alpha, 2.0 * p.W * p.W * S / (p.alpha * smin)) +
          (2.0 * p.W * p.W + 1.0) * p.mu * S + p.nu * S;
      upper = true;
      break;
    case LedgerVariant::AsymMixedLowW:
      M = 2.0 * S * detail::log1pa(p.alpha, 2.0 * S / (p.alpha * smin)) +
          (2.0 * p.W + 1.0) * p.mu * S + p.nu * S;
      upper = true;
      break;
    default:
      throw Error(Errc::VariantMismatch, "check_h_bound: variant carries no H bound");
  }

  detail::LedgerWalk walk;
  walk.ledger.mu = p.mu;
  walk.ledger.nu = p.nu;
  BudgetState state = trace.initial_budgets;

  auto note = [&rep](double margin, size_t step) {
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = step;
    }
    if (margin < -1e-9 && !rep.first_violation) rep.first_violation = step;
  };

  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& rec = trace.steps[i];
    const double s = p.sol->strength[static_cast<size_t>(rec.vertex)];
    const BudgetState pre = state;
    if (upper && S > 0.0 && pre.max_budget > 0.0) {
      double y_eff = rec.bid_min;
      if (!deterministic_branch(p, s, pre.max_budget))
        y_eff = std::min(y_eff, luck_support_upper(p, s, pre.max_budget));
      walk.ledger.l += luck_increment(variant, p, s, pre.max_budget, rec.bid_max, y_eff);
    }
    walk.account(p, rec, s);
    note(upper ? M - (walk.ledger.l - walk.ledger.h()) : walk.ledger.h() - M, i);
    state = rec.budgets_after;
  }
  rep.steps = trace.steps.size();
  rep.max_wins_off_vplus = walk.off_vplus;
  rep.passed = !rep.first_violation.has_value();
  if (rep.worst_margin == std::numeric_limits<double>::infinity()) rep.worst_margin = 0.0;
  return rep;
}

/// Reconstructs the W-asymmetric play a poorman lift simulated: bids divided
/// by Min's budget, the mirror advanced through resolve_bidding so the result
/// replays exactly. The asymmetric invariant checkers run on this trace.
inline PlayTrace lifted_asym_trace(const PlayTrace& poorman, double W) {
  PlayTrace t;
  t.mechanism = BiddingMechanism::asymmetric(W);
  t.cadence = NormalizationCadence::None;
  t.seed = poorman.seed;
  t.trial = poorman.trial;
  t.start_vertex = poorman.start_vertex;
  BudgetState outer = poorman.initial_budgets;
  BudgetState inner{outer.max_budget / outer.min_budget - W, 1.0};
  if (!(inner.max_budget > 0.0))
    throw Error(Errc::RatioTooSmall, "lifted_asym_trace: W at or above the initial ratio");
  t.initial_budgets = inner;
  for (const StepRecord& rec : poorman.steps) {
    const double C = outer.min_budget;
    const double x = rec.bid_max / C;
    const double y = rec.bid_min / C;
    auto [winner, after] = resolve_bidding(t.mechanism, inner, x, y);
    t.steps.push_back({rec.vertex, x, y, winner, rec.move_to, after});
    inner = after;
    outer = rec.budgets_after;
  }
  return t;
}

/// Replays the poorman lift and checks B/C - W >= mirror at every step.
inline CheckReport check_lift_invariant(const PlayTrace& trace, double W) {
  CheckReport rep;
  rep.name = "lift-invariant";
  BudgetState state = trace.initial_budgets;
  double mirror = state.max_budget / state.min_budget - W;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& rec = trace.steps[i];
    const double C = state.min_budget;
    mirror += -rec.bid_max / C + W * (rec.bid_min / C);
    state = rec.budgets_after;
    const double lhs = state.max_budget / state.min_budget - W;
    const double margin = lhs - mirror;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = i;
    }
    if (margin < -1e-12 * std::max(1.0, std::abs(mirror)) && !rep.first_violation)
      rep.first_violation = i;
  }
  rep.steps = trace.steps.size();
  rep.passed = !rep.first_violation.has_value();
  if (rep.worst_margin == std::numeric_limits<double>::infinity()) rep.worst_margin = 0.0;
  return rep;
}

/// Budget-sum conservation along Richman traces (transfers only).
inline CheckReport check_conservation(const PlayTrace& trace) {
  CheckReport rep;
  rep.name = "conservation";
  const double sum0 = trace.initial_budgets.sum();
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const double drift = std::abs(trace.steps[i].budgets_after.sum() - sum0);
    const double margin = 1e-12 * std::max(1.0, sum0) - drift;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = i;
    }
    if (drift > 1e-12 * std::max(1.0, sum0) && !rep.first_violation) rep.first_violation = i;
  }
  rep.steps = trace.steps.size();
  rep.passed = !rep.first_violation.has_value();
  if (rep.worst_margin == std::numeric_limits<double>::infinity()) rep.worst_margin = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Path inequality (potentials vs energy vs ledger) and path enumeration.
// ---------------------------------------------------------------------------

struct MagicResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

namespace detail {

inline VertexId pot_argmax(const GameGraph& g, const std::vector<double>& pot, VertexId v) {
  VertexId best = g.successors(v).front();
  for (VertexId u : g.successors(v))
    if (pot[static_cast<size_t>(u)] > pot[static_cast<size_t>(best)] + 1e-11) best = u;
  return best;
}

inline VertexId pot_argmin(const GameGraph& g, const std::vector<double>& pot, VertexId v) {
  VertexId best = g.successors(v).front();
  for (VertexId u : g.successors(v))
    if (pot[static_cast<size_t>(u)] < pot[static_cast<size_t>(best)] - 1e-11) best = u;
  return best;
}

}  // namespace detail

/// Evaluates  Pot(v0) - Pot(vn) + (n-1)*MP <= energy + ((nu+mu)/(nu*mu)) *
/// (G+*nu - I+*mu)  on one finite path. Steps into the potential-argmax
/// successor count as investments, all others as gains. The mean-payoff value
/// is recovered from the potential equation at vertex 0.
inline MagicResult check_magic(const GameGraph& g, double p, double nu, double mu,
                               const std::vector<VertexId>& path, const std::vector<double>& pot,
                               const std::vector<double>& strength) {
  if (path.empty()) throw Error(Errc::InvalidPath, "check_magic: empty path");
  if (std::abs(p - nu / (nu + mu)) > 1e-12)
    throw Error(Errc::BadInput, "check_magic: p must equal nu/(nu+mu)");
  for (size_t i = 0; i + 1 < path.size(); ++i)
    if (!g.has_edge(path[i], path[i + 1]))
      throw Error(Errc::InvalidPath, "check_magic: missing edge in path");

  const VertexId v0 = 0;
  const VertexId vplus0 = detail::pot_argmax(g, pot, v0);
  const VertexId vminus0 = detail::pot_argmin(g, pot, v0);
  const double value = p * pot[static_cast<size_t>(vplus0)] +
                       (1.0 - p) * pot[static_cast<size_t>(vminus0)] + g.weight(v0) -
                       pot[static_cast<size_t>(v0)];

  double energy = 0.0, iplus = 0.0, gplus = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const VertexId v = path[i];
    energy += g.weight(v);
    if (path[i + 1] == detail::pot_argmax(g, pot, v))
      iplus += strength[static_cast<size_t>(v)];
    else
      gplus += strength[static_cast<size_t>(v)];
  }

  MagicResult r;
  r.lhs = pot[static_cast<size_t>(path.front())] - pot[static_cast<size_t>(path.back())] +
          static_cast<double>(path.size() - 1) * value;
  r.rhs = energy + (nu + mu) / (nu * mu) * (gplus * nu - iplus * mu);
  r.holds = r.lhs <= r.rhs + detail::tolerance(r.lhs, r.rhs);
  return r;
}

/// All directed paths with exactly `edges` edges (so edges+1 vertices).
inline std::vector<std::vector<VertexId>> enumerate_paths(const GameGraph& g, int edges) {
  if (edges < 0 || edges > 12) throw Error(Errc::TooLong, "enumerate_paths: length capped at 12");
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> cur;
  std::function<void(VertexId, int)> dfs = [&](VertexId v, int remaining) {
    cur.push_back(v);
    if (remaining == 0) {
      out.push_back(cur);
    } else {
      for (VertexId u : g.successors(v)) dfs(u, remaining - 1);
    }
    cur.pop_back();
  };
  for (VertexId v = 0; v < g.size(); ++v) dfs(v, edges);
  return out;
}

struct MagicSweep {
  size_t paths_checked = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  bool all_hold = true;
};

/// Incremental DFS over every path with 1..max_edges edges, checking the path
/// inequality at each prefix. Slack is rhs - lhs.
inline MagicSweep magic_exhaustive(const GameGraph& g, const StochasticSolution& sol, double nu,
                                   double mu, int max_edges) {
  MagicSweep sweep;
  const double value = sol.value;
  const auto& pot = sol.pot;
  const auto& st = sol.strength;
  std::function<void(VertexId, VertexId, double, double, double, int)> dfs =
      [&](VertexId first, VertexId v, double energy, double iplus, double gplus, int depth) {
        if (depth > 0) {
          const double lhs = pot[static_cast<size_t>(first)] - pot[static_cast<size_t>(v)] +
                             static_cast<double>(depth) * value;
          const double rhs = energy + (nu + mu) / (nu * mu) * (gplus * nu - iplus * mu);
          const double slack = rhs - lhs;
          ++sweep.paths_checked;
          if (slack < sweep.worst_slack) sweep.worst_slack = slack;
          if (lhs > rhs + detail::tolerance(lhs, rhs)) sweep.all_hold = false;
        }
        if (depth == max_edges) return;
        const VertexId vplus = sol.sigma_max[static_cast<size_t>(v)];
        for (VertexId u : g.successors(v)) {
          const double s = st[static_cast<size_t>(v)];
          dfs(first, u, energy + g.weight(v), iplus + (u == vplus ? s : 0.0),
              gplus + (u == vplus ? 0.0 : s), depth + 1);
        }
      };
  for (VertexId v = 0; v < g.size(); ++v) dfs(v, v, 0.0, 0.0, 0.0, 0);
  return sweep;
}

// ---------------------------------------------------------------------------
// Sampling check of the luck drift and its per-step bound.
// ---------------------------------------------------------------------------

struct SubmartingaleState {
  double B = 0.0;
  double s = 0.0;
  double y = 0.0;
};

struct SubmartingaleRow {
  SubmartingaleState state;
  double mean = 0.0;
  double stddev = 0.0;
  double max_abs = 0.0;
  double bound = 0.0;
  bool mean_ok = true;   // mean >= -3*sigma/sqrt(trials)
  bool bound_ok = true;  // every |sample| within the stated bound
};

inline std::vector<SubmartingaleRow> empirical_submartingale(LedgerVariant variant,
                                                             const LedgerParams& p,
                                                             const std::vector<SubmartingaleState>& grid,
                                                             int trials, uint64_t seed) {
  if (!variant_has_luck(variant))
    throw Error(Errc::VariantWithoutLuck, "pure variants have no luck ledger");
  std::vector<SubmartingaleRow> rows;
  rows.reserve(grid.size());
  const double bound = luck_abs_bound(variant, p);
  uint64_t counter = 0;
  for (const auto& st : grid) {
    SubmartingaleRow row;
    row.state = st;
    row.bound = bound;
    double sum = 0.0, sumsq = 0.0;
    if (st.s <= 0.0) {
      rows.push_back(row);  // degenerate strength: every increment is zero
      continue;
    }
    const bool det = deterministic_branch(p, st.s, st.B);
    const double beta = luck_support_upper(p, st.s, st.B);
    for (int t = 0; t < trials; ++t) {
      RngKey key{seed, counter};
      StepRng rng(key, static_cast<uint64_t>(t));
      double x;
      if (det) {
        x = variant == LedgerVariant::AsymMixedHighW
                ? st.s / (2.0 * p.W * p.s_max) * p.alpha * st.B
                : st.s / (2.0 * p.s_max) * p.alpha * st.B;
      } else if (variant == LedgerVariant::AsymMixedLowW) {
        x = rng.bernoulli(1.0 - p.nu) ? 0.0 : rng.uniform01() * beta;
      } else {
        x = rng.uniform01() * beta;
      }
      const double dl = luck_increment(variant, p, st.s, st.B, x, st.y);
      sum += dl;
      sumsq += dl * dl;
      row.max_abs = std::max(row.max_abs, std::abs(dl));
      if (std::abs(dl) > bound * (1.0 + 1e-12)) row.bound_ok = false;
    }
    ++counter;
    row.mean = sum / trials;
    const double var = std::max(0.0, sumsq / trials - row.mean * row.mean);
    row.stddev = std::sqrt(var);
    row.mean_ok = row.mean >= -3.0 * row.stddev / std::sqrt(static_cast<double>(trials)) - 1e-12;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bidding
