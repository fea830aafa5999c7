#pragma once

#include <map>
#include <memory>
#include <string>

#include "bidding/engine.hpp"
#include "bidding/solver.hpp"
#include "bidding/strategy.hpp"

namespace bidding {

enum class StrategyClass { Pure, Mixed };

/// The random-turn bias a mechanism/budget pair maps to under the mean-payoff
/// equivalences. Ratios at which only a limit game exists map to the boundary
/// biases 0 and 1, which the solver treats as one-player games.
inline double derived_bias(const BiddingMechanism& mech, StrategyClass cls, const BudgetState& b) {
  const double B = b.max_budget, C = b.min_budget;
  if (!(B > 0.0 && C > 0.0)) throw Error(Errc::NonPositiveBudget, "derived_bias: budgets must be positive");
  switch (mech.kind) {
    case MechanismKind::FirstPriceRichman: return 0.5;
    case MechanismKind::FirstPricePoorman: return B / (B + C);
    case MechanismKind::AllPayRichman: return cls == StrategyClass::Mixed ? 0.5 : 0.0;
    case MechanismKind::AllPayPoorman:
      if (cls == StrategyClass::Mixed) return B > C ? 1.0 - C / (2.0 * B) : B / (2.0 * C);
      return B > C ? 1.0 - C / B : 0.0;
    case MechanismKind::Taxman: {
      TaxmanTargets t = taxman_targets(B, C, mech.tau);
      if (cls == StrategyClass::Mixed) return t.p_mixed;
      return t.p_pure.value_or(0.0);
    }
    case MechanismKind::Asymmetric: {
      const double W = mech.W;
      if (cls == StrategyClass::Mixed) return W > 1.0 ? 1.0 - 1.0 / (2.0 * W) : W / 2.0;
      return W > 1.0 ? 1.0 - 1.0 / W : 0.0;
    }
  }
  throw Error(Errc::BadInput, "derived_bias: unknown mechanism");
}

namespace detail {

inline std::map<std::string, double> parse_kv(const std::string& s) {
  std::map<std::string, double> kv;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t eq = s.find('=', pos);
    if (eq == std::string::npos) throw Error(Errc::BadInput, "expected k=v in: " + s);
    size_t end = s.find(',', eq);
    if (end == std::string::npos) end = s.size();
    kv[s.substr(pos, eq - pos)] = std::stod(s.substr(eq + 1, end - eq - 1));
    pos = end == s.size() ? end : end + 1;
  }
  return kv;
}

inline double kv_get(const std::map<std::string, double>& kv, const std::string& key,
                     const std::string& ctx) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(Errc::BadInput, ctx + " needs " + key + "=");
  return it->second;
}

inline double kv_get_or(const std::map<std::string, double>& kv, const std::string& key,
                        double fallback, const std::string& ctx) {
  auto it = kv.find(key);
  if (it != kv.end()) return it->second;
  if (fallback > 0.0) return fallback;
  throw Error(Errc::BadInput, ctx + " needs " + key + "=");
}

}  // namespace detail

/// Builds a strategy from its textual spec. Supported:
///   zero | all-in | uniform-random | const-frac:q=Q | min-counter
///   fp-richman:eps=E | fp-poorman:eps=E | ap-richman-mixed:eps=E
///   asym-pure:W=w,eps=E | asym-responder:W=w,eps=E | asym-mixed:W=w,eps=E
///   ap-poorman-pure:W=w,eps=E | ap-poorman-mixed:W=w,eps=E   (poorman lifts)
///   dual:SPEC  (Min plays SPEC as Max on the weight-negated graph)
/// Budgets are the game's initial budgets from Max's perspective.
inline StrategyHandle build_strategy(const std::string& spec, Player role,
                                     std::shared_ptr<const GameGraph> g,
                                     const BiddingMechanism& mech, const BudgetState& budgets,
                                     double default_eps = 0.0) {
  auto solve_shared = [&g](double p) {
    return std::make_shared<const StochasticSolution>(solve_mean_payoff(*g, p));
  };

  if (spec.rfind("dual:", 0) == 0) {
    if (role != Player::Min)
      throw Error(Errc::BadInput, "dual: builds a Min strategy from a Max construction");
    const std::string inner = spec.substr(5);
    return dual_min_strategy(*g, [&](std::shared_ptr<const GameGraph> gneg) {
      BudgetState swapped{budgets.min_budget, budgets.max_budget};
      StrategyHandle h =
          build_strategy(inner, Player::Max, std::move(gneg), mech, swapped, default_eps);
      return h;
    });
  }

  auto name_of = [&spec]() { return spec.substr(0, spec.find(':')); };
  auto args_of = [&spec]() {
    auto pos = spec.find(':');
    return pos == std::string::npos ? std::string() : spec.substr(pos + 1);
  };
  const std::string name = name_of();

  if (name == "zero") return zero_bidder(solve_shared(0.5), role);
  if (name == "all-in") return all_in_bidder(solve_shared(0.5), role);
  if (name == "uniform-random") return uniform_random_bidder(solve_shared(0.5), role);
  if (name == "const-frac")
    return fraction_bidder(detail::kv_get(detail::parse_kv(args_of()), "q", name),
                           solve_shared(0.5), role);
  if (name == "min-counter") {
    if (role != Player::Min) throw Error(Errc::BadInput, "min-counter plays Min");
    return ap_richman_min_counter(g, solve_shared(0.5));
  }

  if (role != Player::Min) {
    auto kv = detail::parse_kv(args_of());
    if (name == "fp-richman") {
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      return fp_richman_strategy(g, solve_shared(1.0 / (2.0 + eps)), eps, budgets);
    }
    if (name == "fp-poorman") {
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      const double B0 = budgets.max_budget / budgets.min_budget;  // Min-normalized
      if (!(B0 > eps)) throw Error(Errc::BudgetBelowW, "fp-poorman: need B0 > eps");
      return fp_poorman_strategy(g, solve_shared((B0 - eps) / (B0 + 1.0)), B0, eps);
    }
    if (name == "ap-richman-mixed") {
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      return ap_richman_mixed(g, solve_shared(1.0 / (2.0 + eps)), eps);
    }
    if (name == "asym-pure") {
      const double W = detail::kv_get(kv, "W", name);
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      return asym_pure_max(g, solve_shared(1.0 - (1.0 + eps) / (W + eps)), W, eps);
    }
    if (name == "asym-responder") {
      const double W = detail::kv_get(kv, "W", name);
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      return asym_responder_max(g, solve_shared((1.0 - eps) * W), W, eps);
    }
    if (name == "asym-mixed") {
      const double W = detail::kv_get(kv, "W", name);
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      const double p = W > 1.0 ? (2.0 * W - 1.0) / (2.0 * W + eps) : (W - eps) / 2.0;
      return asym_mixed_max(g, solve_shared(p), W, eps);
    }
    if (name == "ap-poorman-pure" || name == "ap-poorman-mixed") {
      const double W = detail::kv_get(kv, "W", name);
      const double eps = detail::kv_get_or(kv, "eps", default_eps, name);
      const double B0 = budgets.max_budget, C0 = budgets.min_budget;
      StrategyHandle asym;
      if (name == "ap-poorman-pure") {
        asym = asym_pure_max(g, solve_shared(1.0 - (1.0 + eps) / (W + eps)), W, eps);
      } else {
        const double p = W > 1.0 ? (2.0 * W - 1.0) / (2.0 * W + eps) : (W - eps) / 2.0;
        asym = asym_mixed_max(g, solve_shared(p), W, eps);
      }
      return poorman_lift(asym, W, B0, C0);
    }
  }

  throw Error(Errc::BadInput, "unknown strategy spec: " + spec + " for " +
                                  (role == Player::Max ? std::string("Max") : std::string("Min")));
}

}  // namespace bidding
