#pragma once

#include <cmath>
#include <string>

#include "bidding/errors.hpp"

namespace bidding {

enum class Player { Max, Min };

enum class MechanismKind {
  FirstPriceRichman,
  FirstPricePoorman,
  AllPayRichman,
  AllPayPoorman,
  Taxman,
  Asymmetric,
};

/// Payment scheme. Taxman carries tau in [0,1]; Asymmetric carries W > 0.
/// Taxman follows the classical convention: the winner pays tau*b to the bank
/// and (1-tau)*b to the opponent, so tau=0 is first-price Richman and tau=1 is
/// first-price poorman.
struct BiddingMechanism {
  MechanismKind kind = MechanismKind::AllPayRichman;
  double tau = 0.0;
  double W = 1.0;

  static BiddingMechanism fp_richman() { return {MechanismKind::FirstPriceRichman, 0.0, 1.0}; }
  static BiddingMechanism fp_poorman() { return {MechanismKind::FirstPricePoorman, 0.0, 1.0}; }
  static BiddingMechanism ap_richman() { return {MechanismKind::AllPayRichman, 0.0, 1.0}; }
  static BiddingMechanism ap_poorman() { return {MechanismKind::AllPayPoorman, 0.0, 1.0}; }
  static BiddingMechanism taxman(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(Errc::BadInput, "taxman: tau must lie in [0,1]");
    return {MechanismKind::Taxman, tau, 1.0};
  }
  static BiddingMechanism asymmetric(double W) {
    if (!(W > 0.0)) throw Error(Errc::BadInput, "asymmetric: W must be positive");
    return {MechanismKind::Asymmetric, 0.0, W};
  }

  bool is_richman() const {
    return kind == MechanismKind::FirstPriceRichman || kind == MechanismKind::AllPayRichman;
  }
  bool is_poorman() const {
    return kind == MechanismKind::FirstPricePoorman || kind == MechanismKind::AllPayPoorman;
  }

  std::string name() const {
    switch (kind) {
      case MechanismKind::FirstPriceRichman: return "fp-richman";
      case MechanismKind::FirstPricePoorman: return "fp-poorman";
      case MechanismKind::AllPayRichman: return "ap-richman";
      case MechanismKind::AllPayPoorman: return "ap-poorman";
      case MechanismKind::Taxman: return "taxman:tau=" + std::to_string(tau);
      case MechanismKind::Asymmetric: return "asymmetric:W=" + std::to_string(W);
    }
    return "?";
  }
};

/// Raw budgets of the two players. Normalization is always an explicit call,
/// never a side effect, so checkers see exactly what the play produced.
struct BudgetState {
  double max_budget = 0.0;
  double min_budget = 0.0;

  double sum() const { return max_budget + min_budget; }
  double ratio() const { return max_budget / (max_budget + min_budget); }
};

/// One auction. Ties go to Min; his bid y and Max's bid x must be legal for
/// the current budgets. Returns the winner and the post-payment budgets.
inline std::pair<Player, BudgetState> resolve_bidding(const BiddingMechanism& mech,
                                                      const BudgetState& b, double x, double y) {
  const double kSlack = 1e-9;  // absorbs rounding in normalized views
  if (!(x >= 0.0) || x > b.max_budget * (1.0 + kSlack) + 1e-300)
    throw Error(Errc::IllegalBid, "Max bid " + std::to_string(x) + " outside [0, " +
                                      std::to_string(b.max_budget) + "]");
  const double min_cap = mech.kind == MechanismKind::Asymmetric ? 1.0 : b.min_budget;
  if (!(y >= 0.0) || y > min_cap * (1.0 + kSlack) + 1e-300)
    throw Error(Errc::IllegalBid, "Min bid " + std::to_string(y) + " outside [0, " +
                                      std::to_string(min_cap) + "]");

  const bool max_wins = x > y;
  BudgetState out = b;
  switch (mech.kind) {
    case MechanismKind::FirstPriceRichman:
      if (max_wins) {
        out.max_budget = b.max_budget - x;
        out.min_budget = b.min_budget + x;
      } else {
        out.max_budget = b.max_budget + y;
        out.min_budget = b.min_budget - y;
      }
      break;
    case MechanismKind::FirstPricePoorman:
      if (max_wins)
        out.max_budget = b.max_budget - x;
      else
        out.min_budget = b.min_budget - y;
      break;
    case MechanismKind::AllPayRichman:
      out.max_budget = b.max_budget - x + y;
      out.min_budget = b.min_budget + x - y;
      break;
    case MechanismKind::AllPayPoorman:
      out.max_budget = b.max_budget - x;
      out.min_budget = b.min_budget - y;
      break;
    case MechanismKind::Taxman:
      // Winner pays tau*b to the bank, (1-tau)*b to the opponent.
      if (max_wins) {
        out.max_budget = b.max_budget - x;
        out.min_budget = b.min_budget + (1.0 - mech.tau) * x;
      } else {
        out.max_budget = b.max_budget + (1.0 - mech.tau) * y;
        out.min_budget = b.min_budget - y;
      }
      break;
    case MechanismKind::Asymmetric:
      // Min's budget is pinned at 1 by definition of the scheme.
      out.max_budget = b.max_budget - x + mech.W * y;
      out.min_budget = 1.0;
      break;
  }
  if (out.max_budget < 0.0 && out.max_budget > -1e-15) out.max_budget = 0.0;
  if (out.min_budget < 0.0 && out.min_budget > -1e-15) out.min_budget = 0.0;
  return {max_wins ? Player::Max : Player::Min, out};
}

/// Richman family: rescale so the budgets sum to 1. Poorman and asymmetric:
/// rescale so Min holds exactly 1. The ratio is preserved exactly.
inline BudgetState normalize_budgets(const BiddingMechanism& mech, const BudgetState& b) {
  BudgetState out = b;
  switch (mech.kind) {
    case MechanismKind::FirstPriceRichman:
    case MechanismKind::AllPayRichman:
    case MechanismKind::Taxman: {
      const double s = b.sum();
      if (!(s > 0.0)) throw Error(Errc::DegenerateBudget, "normalize: budget sum is zero");
      out.max_budget = b.max_budget / s;
      out.min_budget = b.min_budget / s;
      break;
    }
    case MechanismKind::FirstPricePoorman:
    case MechanismKind::AllPayPoorman:
    case MechanismKind::Asymmetric: {
      if (!(b.min_budget > 0.0))
        throw Error(Errc::DegenerateBudget, "normalize: Min budget is zero under poorman scaling");
      out.max_budget = b.max_budget / b.min_budget;
      out.min_budget = 1.0;
      break;
    }
  }
  return out;
}

}  // namespace bidding
