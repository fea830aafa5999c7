#pragma once

#include <stdexcept>
#include <string>

namespace bidding {

enum class Errc {
  NotStronglyConnected,
  NoSuccessor,
  NonFiniteWeight,
  IllegalBid,
  DegenerateBudget,
  POutOfRange,
  NoConvergence,
  SingularSystem,
  NonPositiveBudget,
  DomainError,
  DegenerateStrengths,
  BudgetBelowW,
  ResponderAgainstMixed,
  WNotAboveOne,
  EpsilonTooLarge,
  RatioTooSmall,
  VariantWithoutLuck,
  YOutOfRange,
  VariantMismatch,
  NoPositiveStrength,
  InvalidPath,
  TooLong,
  AllZeroWeights,
  HypothesisUnmet,
  BadInput,
};

/// Library-wide exception; carries a machine-checkable code plus a message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotStronglyConnected: return "NotStronglyConnected";
    case Errc::NoSuccessor: return "NoSuccessor";
    case Errc::NonFiniteWeight: return "NonFiniteWeight";
    case Errc::IllegalBid: return "IllegalBid";
    case Errc::DegenerateBudget: return "DegenerateBudget";
    case Errc::POutOfRange: return "POutOfRange";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NonPositiveBudget: return "NonPositiveBudget";
    case Errc::DomainError: return "DomainError";
    case Errc::DegenerateStrengths: return "DegenerateStrengths";
    case Errc::BudgetBelowW: return "BudgetBelowW";
    case Errc::ResponderAgainstMixed: return "ResponderAgainstMixed";
    case Errc::WNotAboveOne: return "WNotAboveOne";
    case Errc::EpsilonTooLarge: return "EpsilonTooLarge";
    case Errc::RatioTooSmall: return "RatioTooSmall";
    case Errc::VariantWithoutLuck: return "VariantWithoutLuck";
    case Errc::YOutOfRange: return "YOutOfRange";
    case Errc::VariantMismatch: return "VariantMismatch";
    case Errc::NoPositiveStrength: return "NoPositiveStrength";
    case Errc::InvalidPath: return "InvalidPath";
    case Errc::TooLong: return "TooLong";
    case Errc::AllZeroWeights: return "AllZeroWeights";
    case Errc::HypothesisUnmet: return "HypothesisUnmet";
    case Errc::BadInput: return "BadInput";
  }
  return "Unknown";
}

}  // namespace bidding
