#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "bidding/graph.hpp"
#include "bidding/mechanism.hpp"
#include "bidding/shift.hpp"
#include "bidding/solver.hpp"

namespace bidding {

enum class Observability { Standard, Responder };

/// A prescribed bid distribution plus the move to make upon winning.
/// ZeroOrUniform is the two-component mixture used by the low-W construction:
/// bid 0 with probability zero_prob, otherwise uniform on [0, upper].
struct BidAction {
  enum class Dist { PointMass, Uniform, ZeroOrUniform };
  Dist dist = Dist::PointMass;
  double point = 0.0;
  double upper = 0.0;
  double zero_prob = 0.0;
  VertexId move_on_win = 0;

  static BidAction point_mass(double b, VertexId move) {
    BidAction a;
    a.dist = Dist::PointMass;
    a.point = b;
    a.move_on_win = move;
    return a;
  }
  static BidAction uniform(double beta, VertexId move) {
    BidAction a;
    a.dist = Dist::Uniform;
    a.upper = beta;
    a.move_on_win = move;
    return a;
  }
  static BidAction zero_or_uniform(double q, double beta, VertexId move) {
    BidAction a;
    a.dist = Dist::ZeroOrUniform;
    a.zero_prob = q;
    a.upper = beta;
    a.move_on_win = move;
    return a;
  }

  bool is_point_mass() const { return dist == Dist::PointMass; }

  /// Exact textual form, used to compare prescriptions bit for bit.
  std::string descriptor() const {
    char buf[128];
    switch (dist) {
      case Dist::PointMass:
        std::snprintf(buf, sizeof buf, "pm:%.17g>%d", point, move_on_win);
        break;
      case Dist::Uniform:
        std::snprintf(buf, sizeof buf, "unif:%.17g>%d", upper, move_on_win);
        break;
      case Dist::ZeroOrUniform:
        std::snprintf(buf, sizeof buf, "mix:%.17g:%.17g>%d", zero_prob, upper, move_on_win);
        break;
    }
    return buf;
  }
};

/// What a strategy sees when asked to bid: the current vertex and both
/// budgets from its own perspective. The constructions below use only the own
/// budget; the opponent's is exposed because the engine does not hide it.
struct StrategyContext {
  VertexId vertex = 0;
  double own_budget = 0.0;
  double opp_budget = 0.0;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual BidAction act(const StrategyContext& ctx) = 0;
  /// Responder entry point: sees the opponent's realized bid.
  virtual BidAction respond(const StrategyContext&, double /*opponent_bid*/) {
    throw Error(Errc::BadInput, "strategy is not a responder");
  }
  /// Post-step hook, own-centric. Only budget-mirror strategies use it.
  virtual void after_step(double /*own_before*/, double /*opp_before*/, double /*own_bid*/,
                          double /*opp_bid*/) {}
};

struct StrategyParams {
  double epsilon = 0.0;
  double c = 0.0;      // 1 + epsilon where applicable
  double alpha = 0.0;  // shift_inverse of the construction-specific growth target
  double W = 0.0;
  double N = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double spare_change = 0.0;  // never bid; in the same units as the budgets
  int k0 = 0;
  double p = 0.5;   // bias of the random-turn game the strengths came from
  double B0 = 0.0;  // initial own budget in the strategy's working units
  bool trivial = false;  // all strengths zero: the strategy bids 0 everywhere
};

/// Constructed strategy plus everything a checker needs to audit its play.
struct StrategyHandle {
  std::string spec;
  Observability observability = Observability::Standard;
  bool deterministic = true;
  StrategyParams params;
  std::shared_ptr<const GameGraph> graph;
  std::shared_ptr<const StochasticSolution> sol;
  std::function<std::unique_ptr<Strategy>()> instantiate;

  std::unique_ptr<Strategy> make() const { return instantiate(); }
};

namespace detail {

inline double strength_share(const StochasticSolution& sol, VertexId v) {
  if (sol.s_max <= 0.0) return 0.0;
  return sol.strength[static_cast<size_t>(v)] / sol.s_max;
}

template <typename F>
class LambdaStrategy : public Strategy {
 public:
  explicit LambdaStrategy(F f) : f_(std::move(f)) {}
  BidAction act(const StrategyContext& ctx) override { return f_(ctx); }

 private:
  F f_;
};

template <typename F>
std::function<std::unique_ptr<Strategy>()> stateless(F f) {
  return [f]() { return std::make_unique<LambdaStrategy<F>>(f); };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// First-price Richman: deterministic scaled-by-strength bidding.
// ---------------------------------------------------------------------------

/// Max bids alpha * (s/S_max) * B_main where B_main is the own budget minus a
/// fixed spare change chosen so B_main starts at (1+alpha)^{-k0}. Budgets are
/// interpreted in ratio units (the Richman sum is invariant, so the spare
/// change is a constant in raw units too).
inline StrategyHandle fp_richman_strategy(std::shared_ptr<const GameGraph> g,
                                          std::shared_ptr<const StochasticSolution> sol,
                                          double epsilon, const BudgetState& initial) {
  if (!(epsilon > 0.0)) throw Error(Errc::BadInput, "fp-richman: epsilon must be positive");
  const double r = initial.ratio();
  if (!(r > 0.0 && r < 1.0)) throw Error(Errc::BadInput, "fp-richman: initial ratio must lie in (0,1)");
  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 + epsilon;
  p.alpha = shift_inverse(1.0 + epsilon);
  p.mu = 1.0 + epsilon;
  p.nu = 1.0;
  p.p = sol->p;
  p.trivial = sol->s_max <= 0.0;

  // Largest main budget of the form (1+alpha)^{-k} that fits under r.
  const double la = std::log1p(p.alpha);
  int k0 = static_cast<int>(std::ceil(-std::log(r) / la - 1e-12));
  if (k0 < 1) k0 = 1;
  while (std::pow(1.0 + p.alpha, -k0) > r) ++k0;
  p.k0 = k0;
  const double sum = initial.sum();
  const double main_ratio = std::pow(1.0 + p.alpha, -k0);
  p.spare_change = (r - main_ratio) * sum;  // raw units; the Richman sum never changes
  p.B0 = main_ratio;

  const double alpha = p.alpha;
  const double delta_raw = p.spare_change;
  auto solp = sol;
  auto act = [alpha, delta_raw, solp](const StrategyContext& ctx) {
    const double share = detail::strength_share(*solp, ctx.vertex);
    const double main = std::max(0.0, ctx.own_budget - delta_raw);
    return BidAction::point_mass(alpha * share * main,
                                 solp->sigma_max[static_cast<size_t>(ctx.vertex)]);
  };

  StrategyHandle h;
  h.spec = "fp-richman:eps=" + std::to_string(epsilon);
  h.deterministic = true;
  h.params = p;
  h.graph = std::move(g);
  h.sol = solp;
  h.instantiate = detail::stateless(act);
  return h;
}

// ---------------------------------------------------------------------------
// First-price poorman: bids proportional to the budget surplus over W.
// ---------------------------------------------------------------------------

/// Works in Min-normalized units (opponent pinned to 1); the play engine keeps
/// poorman budgets in that shape after every step. Bids (alpha*s/N)(B - W)
/// with W = B0 - epsilon and N = max(W,1)*S_max.
inline StrategyHandle fp_poorman_strategy(std::shared_ptr<const GameGraph> g,
                                          std::shared_ptr<const StochasticSolution> sol, double B0,
                                          double epsilon) {
  if (!(epsilon > 0.0 && B0 > epsilon))
    throw Error(Errc::BadInput, "fp-poorman: need B0 > epsilon > 0");
  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 + epsilon;
  p.alpha = shift_inverse(1.0 + epsilon);
  p.W = B0 - epsilon;
  p.N = std::max(p.W, 1.0) * std::max(sol->s_max, 0.0);
  p.mu = 1.0 + epsilon;
  p.nu = B0 - epsilon;
  p.p = sol->p;
  p.B0 = B0;
  p.trivial = sol->s_max <= 0.0;
  if (!(B0 > p.W)) throw Error(Errc::BudgetBelowW, "fp-poorman: initial budget not above W");

  const double alpha = p.alpha, W = p.W, N = p.N;
  auto solp = sol;
  auto act = [alpha, W, N, solp](const StrategyContext& ctx) {
    const VertexId v = ctx.vertex;
    const double s = solp->strength[static_cast<size_t>(v)];
    const double bid = (N > 0.0) ? (alpha * s / N) * (ctx.own_budget - W) : 0.0;
    return BidAction::point_mass(std::max(0.0, bid), solp->sigma_max[static_cast<size_t>(v)]);
  };

  StrategyHandle h;
  h.spec = "fp-poorman:eps=" + std::to_string(epsilon);
  h.deterministic = true;
  h.params = p;
  h.graph = std::move(g);
  h.sol = solp;
  h.instantiate = detail::stateless(act);
  return h;
}

// ---------------------------------------------------------------------------
// All-pay Richman, mixed: uniform bids on [0, alpha*B*s/S_max].
// ---------------------------------------------------------------------------

inline StrategyHandle ap_richman_mixed(std::shared_ptr<const GameGraph> g,
                                       std::shared_ptr<const StochasticSolution> sol,
                                       double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::BadInput, "ap-richman-mixed: epsilon must be positive");
  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 + epsilon;
  p.alpha = shift_inverse(1.0 + epsilon);
  p.mu = 1.0 + epsilon;  // ledger weights: H = c*I+ - G+
  p.nu = 1.0;
  p.p = sol->p;
  p.trivial = sol->s_max <= 0.0;

  const double alpha = p.alpha;
  auto solp = sol;
  auto act = [alpha, solp](const StrategyContext& ctx) {
    const double share = detail::strength_share(*solp, ctx.vertex);
    return BidAction::uniform(alpha * ctx.own_budget * share,
                              solp->sigma_max[static_cast<size_t>(ctx.vertex)]);
  };

  StrategyHandle h;
  h.spec = "ap-richman-mixed:eps=" + std::to_string(epsilon);
  h.deterministic = false;
  h.params = p;
  h.graph = std::move(g);
  h.sol = solp;
  h.instantiate = detail::stateless(act);
  return h;
}

// ---------------------------------------------------------------------------
// All-pay Richman Min counter: matches any affordable deterministic Max bid.
// ---------------------------------------------------------------------------

/// Responder playing Min. Sees Max's realized bid b; bids b when affordable
/// (winning the tie at zero net cost) and 0 otherwise. Loses at most
/// ceil(B0/C0)+1 biddings against any pure Max.
inline StrategyHandle ap_richman_min_counter(std::shared_ptr<const GameGraph> g,
                                             std::shared_ptr<const StochasticSolution> sol) {
  class Counter : public Strategy {
   public:
    explicit Counter(std::shared_ptr<const StochasticSolution> sol) : sol_(std::move(sol)) {}
    BidAction act(const StrategyContext&) override {
      throw Error(Errc::BadInput, "min-counter must see the opponent bid first");
    }
    BidAction respond(const StrategyContext& ctx, double b) override {
      const VertexId move = sol_->sigma_min[static_cast<size_t>(ctx.vertex)];
      if (b > ctx.own_budget) return BidAction::point_mass(0.0, move);
      return BidAction::point_mass(b, move);
    }

   private:
    std::shared_ptr<const StochasticSolution> sol_;
  };

  StrategyHandle h;
  h.spec = "min-counter";
  h.observability = Observability::Responder;
  h.deterministic = true;
  h.graph = std::move(g);
  h.sol = sol;
  h.instantiate = [sol]() { return std::make_unique<Counter>(sol); };
  return h;
}

// ---------------------------------------------------------------------------
// Asymmetric games (Min pinned to 1): pure, responder, and mixed Max.
// ---------------------------------------------------------------------------

inline StrategyHandle asym_pure_max(std::shared_ptr<const GameGraph> g,
                                    std::shared_ptr<const StochasticSolution> sol, double W,
                                    double epsilon) {
  if (!(W > 1.0)) throw Error(Errc::WNotAboveOne, "asym-pure: W must exceed 1");
  if (!(epsilon > 0.0)) throw Error(Errc::BadInput, "asym-pure: epsilon must be positive");
  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 + epsilon;
  p.alpha = shift_inverse(1.0 + epsilon);
  p.W = W;
  p.N = std::max(sol->s_max, (W - 1.0) * sol->s_max);
  p.mu = 1.0 + epsilon;
  p.nu = W - 1.0;
  p.p = sol->p;
  p.trivial = sol->s_max <= 0.0;

  const double alpha = p.alpha, N = p.N;
  auto solp = sol;
  auto act = [alpha, N, solp](const StrategyContext& ctx) {
    const double s = solp->strength[static_cast<size_t>(ctx.vertex)];
    const double bid = (N > 0.0) ? (s / N) * alpha * ctx.own_budget : 0.0;
    return BidAction::point_mass(bid, solp->sigma_max[static_cast<size_t>(ctx.vertex)]);
  };

  StrategyHandle h;
  h.spec = "asym-pure:W=" + std::to_string(W) + ",eps=" + std::to_string(epsilon);
  h.deterministic = true;
  h.params = p;
  h.graph = std::move(g);
  h.sol = solp;
  h.instantiate = detail::stateless(act);
  return h;
}

/// Responder for W <= 1: stays out when Min's bid exceeds (s/N)*alpha*B,
/// otherwise overbids by the factor (1 + epsilon*W). Legal only against a
/// deterministic Min.
inline StrategyHandle asym_responder_max(std::shared_ptr<const GameGraph> g,
                                         std::shared_ptr<const StochasticSolution> sol, double W,
                                         double epsilon) {
  if (!(W > 0.0 && W <= 1.0)) throw Error(Errc::BadInput, "asym-responder: need W in (0,1]");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(Errc::BadInput, "asym-responder: need epsilon in (0,1)");
  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 / (1.0 - epsilon);
  p.alpha = shift_inverse(1.0 / (1.0 - epsilon));
  p.W = W;
  p.N = (1.0 + epsilon * W) * sol->s_max;
  p.mu = 1.0 / (1.0 - epsilon) - W;
  p.nu = W;
  p.p = sol->p;
  p.trivial = sol->s_max <= 0.0;

  class Responder : public Strategy {
   public:
    Responder(std::shared_ptr<const StochasticSolution> sol, double alpha, double N, double epsW)
        : sol_(std::move(sol)), alpha_(alpha), N_(N), epsW_(epsW) {}
    BidAction act(const StrategyContext&) override {
      throw Error(Errc::BadInput, "asym-responder must see the opponent bid first");
    }
    BidAction respond(const StrategyContext& ctx, double y) override {
      const VertexId move = sol_->sigma_max[static_cast<size_t>(ctx.vertex)];
      const double s = sol_->strength[static_cast<size_t>(ctx.vertex)];
      const double threshold = (N_ > 0.0) ? (s / N_) * alpha_ * ctx.own_budget : 0.0;
      if (y > threshold) return BidAction::point_mass(0.0, move);
      return BidAction::point_mass(y + epsW_ * y, move);
    }

   private:
    std::shared_ptr<const StochasticSolution> sol_;
    double alpha_, N_, epsW_;
  };

  StrategyHandle h;
  h.spec = "asym-responder:W=" + std::to_string(W) + ",eps=" + std::to_string(epsilon);
  h.observability = Observability::Responder;
  h.deterministic = true;
  h.params = p;
  h.graph = std::move(g);
  h.sol = sol;
  const double alpha = p.alpha, N = p.N, epsW = epsilon * W;
  h.instantiate = [sol, alpha, N, epsW]() { return std::make_unique<Responder>(sol, alpha, N, epsW); };
  return h;
}

/// Mixed asymmetric Max. For W > 1: uniform on [0, (s/(W*S_max))*alpha*B] with
/// a deterministic overbid branch once B > 2*W^2*S_max/(alpha*s). For W <= 1:
/// bid 0 with probability 1-W+epsilon, else uniform on [0, (s/S_max)*alpha*B],
/// with the deterministic branch at B > 2*S_max/(alpha*s).
inline StrategyHandle asym_mixed_max(std::shared_ptr<const GameGraph> g,
                                     std::shared_ptr<const StochasticSolution> sol, double W,
                                     double epsilon) {
  if (!(W > 0.0)) throw Error(Errc::BadInput, "asym-mixed: W must be positive");
  if (!(epsilon > 0.0)) throw Error(Errc::BadInput, "asym-mixed: epsilon must be positive");
  const bool high = W > 1.0;
  if (!high && !(epsilon < W))
    throw Error(Errc::EpsilonTooLarge, "asym-mixed: need epsilon < W when W <= 1");

  StrategyParams p;
  p.epsilon = epsilon;
  p.c = 1.0 + epsilon;
  p.alpha = shift_inverse(1.0 + epsilon);
  p.W = W;
  p.p = sol->p;
  p.trivial = sol->s_max <= 0.0;
  if (high) {
    p.mu = 1.0 + epsilon;
    p.nu = 2.0 * W - 1.0;
  } else {
    p.mu = 2.0 - W + epsilon;
    p.nu = W - epsilon;
  }

  const double alpha = p.alpha;
  auto solp = sol;
  auto act = [alpha, W, high, epsilon, solp](const StrategyContext& ctx) {
    const VertexId move = solp->sigma_max[static_cast<size_t>(ctx.vertex)];
    const double s = solp->strength[static_cast<size_t>(ctx.vertex)];
    const double S = solp->s_max;
    const double B = ctx.own_budget;
    if (S <= 0.0 || s <= 0.0) {
      if (high) return BidAction::uniform(0.0, move);
      return BidAction::zero_or_uniform(1.0 - W + epsilon, 0.0, move);
    }
    if (high) {
      if (B > 2.0 * W * W * S / (alpha * s))
        return BidAction::point_mass(s / (2.0 * W * S) * alpha * B, move);
      return BidAction::uniform(s / (W * S) * alpha * B, move);
    }
    if (B > 2.0 * S / (alpha * s))
      return BidAction::point_mass(s / (2.0 * S) * alpha * B, move);
    return BidAction::zero_or_uniform(1.0 - W + epsilon, (s / S) * alpha * B, move);
  };

  StrategyHandle h;
  h.spec = "asym-mixed:W=" + std::to_string(W) + ",eps=" + std::to_string(epsilon);
  h.deterministic = false;
  h.params = p;
  h.graph = std::move(g);
  h.sol = solp;
  h.instantiate = detail::stateless(act);
  return h;
}

// ---------------------------------------------------------------------------
// Poorman lift: play an asymmetric strategy inside an all-pay poorman game.
// ---------------------------------------------------------------------------

/// Simulates the W-asymmetric game with budget mirror B~ (started at
/// B0/C0 - W) while bidding x = x~ * C in the poorman game. The invariant
/// B/C - W >= B~ holds at every step and is what the certifier replays.
inline StrategyHandle poorman_lift(const StrategyHandle& asym, double W, double B0, double C0) {
  if (!(B0 > 0.0 && C0 > 0.0)) throw Error(Errc::NonPositiveBudget, "poorman-lift: budgets must be positive");
  if (!(W < B0 / C0)) throw Error(Errc::RatioTooSmall, "poorman-lift: need W < B0/C0");

  const double mirror0 = B0 / C0 - W;

  class Lift : public Strategy {
   public:
    Lift(std::unique_ptr<Strategy> inner, double W, double mirror0)
        : inner_(std::move(inner)), W_(W), mirror_(mirror0) {}
    BidAction act(const StrategyContext& ctx) override {
      StrategyContext asym_ctx{ctx.vertex, mirror_, 1.0};
      BidAction a = inner_->act(asym_ctx);
      const double C = ctx.opp_budget;
      a.point *= C;
      a.upper *= C;
      return a;
    }
    void after_step(double, double opp_before, double own_bid, double opp_bid) override {
      // Same expression shape as the asymmetric resolve_bidding update, so a
      // checker replaying the simulated game reproduces this mirror bit for
      // bit (the engine keeps C at exactly 1 under the poorman cadence).
      const double C = opp_before;
      mirror_ = mirror_ - own_bid / C + W_ * (opp_bid / C);
    }
    double mirror() const { return mirror_; }

   private:
    std::unique_ptr<Strategy> inner_;
    double W_;
    double mirror_;
  };

  StrategyHandle h;
  h.spec = "lift(" + asym.spec + "):W=" + std::to_string(W);
  h.observability = asym.observability;
  h.deterministic = asym.deterministic;
  h.params = asym.params;
  h.params.W = W;
  h.params.B0 = mirror0;
  h.graph = asym.graph;
  h.sol = asym.sol;
  auto inner_make = asym.instantiate;
  h.instantiate = [inner_make, W, mirror0]() {
    return std::make_unique<Lift>(inner_make(), W, mirror0);
  };
  return h;
}

// ---------------------------------------------------------------------------
// Duality: Min plays a Max construction on the weight-negated game.
// ---------------------------------------------------------------------------

/// The builder receives the negated graph and must produce a Max strategy for
/// it; the wrapper plays it from Min's seat unchanged (the engine already
/// presents each side an own-centric view).
inline StrategyHandle dual_min_strategy(
    const GameGraph& g,
    const std::function<StrategyHandle(std::shared_ptr<const GameGraph>)>& builder) {
  auto gneg = std::make_shared<GameGraph>(g.negated());
  StrategyHandle inner = builder(gneg);
  StrategyHandle h = inner;
  h.spec = "dual(" + inner.spec + ")";
  return h;
}

// ---------------------------------------------------------------------------
// Roster heuristics for empirical opponents.
// ---------------------------------------------------------------------------

/// Moves for heuristics: the side's optimal positional move from a solution.
inline VertexId roster_move(const StochasticSolution& sol, Player role, VertexId v) {
  return role == Player::Max ? sol.sigma_max[static_cast<size_t>(v)]
                             : sol.sigma_min[static_cast<size_t>(v)];
}

inline StrategyHandle zero_bidder(std::shared_ptr<const StochasticSolution> sol, Player role) {
  StrategyHandle h;
  h.spec = "zero";
  h.deterministic = true;
  h.sol = sol;
  h.instantiate = detail::stateless([sol, role](const StrategyContext& ctx) {
    return BidAction::point_mass(0.0, roster_move(*sol, role, ctx.vertex));
  });
  return h;
}

/// Bids the entire current budget every round.
inline StrategyHandle all_in_bidder(std::shared_ptr<const StochasticSolution> sol, Player role) {
  StrategyHandle h;
  h.spec = "all-in";
  h.deterministic = true;
  h.sol = sol;
  h.instantiate = detail::stateless([sol, role](const StrategyContext& ctx) {
    return BidAction::point_mass(ctx.own_budget, roster_move(*sol, role, ctx.vertex));
  });
  return h;
}

inline StrategyHandle fraction_bidder(double q, std::shared_ptr<const StochasticSolution> sol,
                                      Player role) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::BadInput, "const-frac: fraction outside [0,1]");
  StrategyHandle h;
  h.spec = "const-frac:q=" + std::to_string(q);
  h.deterministic = true;
  h.sol = sol;
  h.instantiate = detail::stateless([q, sol, role](const StrategyContext& ctx) {
    return BidAction::point_mass(q * ctx.own_budget, roster_move(*sol, role, ctx.vertex));
  });
  return h;
}

inline StrategyHandle uniform_random_bidder(std::shared_ptr<const StochasticSolution> sol,
                                            Player role) {
  StrategyHandle h;
  h.spec = "uniform-random";
  h.deterministic = false;
  h.sol = sol;
  h.instantiate = detail::stateless([sol, role](const StrategyContext& ctx) {
    return BidAction::uniform(ctx.own_budget, roster_move(*sol, role, ctx.vertex));
  });
  return h;
}

}  // namespace bidding
