#include "orbitforge/errors.hpp"

#include <sstream>

namespace orbitforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::syntax: return "SyntaxError";
    case Errc::unknown_identifier: return "UnknownIdentifier";
    case Errc::domain: return "DomainError";
    case Errc::singularity: return "SingularityError";
    case Errc::base_point_mismatch: return "BasePointMismatch";
    case Errc::order_mismatch: return "OrderMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::conditioning: return "ConditioningError";
    case Errc::param: return "ParamError";
    case Errc::not_quasi_ap: return "NotQuasiAP";
    case Errc::domain_escape: return "DomainEscape";
    case Errc::non_invertible: return "NonInvertible";
    case Errc::not_increasing: return "NotIncreasing";
    case Errc::hypothesis_violation: return "HypothesisViolation";
    case Errc::singular_matrix: return "SingularMatrix";
    case Errc::condition1_fails: return "Condition1Fails";
    case Errc::tolerance_unreachable: return "ToleranceUnreachable";
    case Errc::not_monotone: return "NotMonotone";
  }
  return "Error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

namespace {

std::string syntax_message(std::size_t position, const std::string& expected) {
  std::ostringstream os;
  os << "at position " << position << ", expected " << expected;
  return os.str();
}

std::string hypothesis_message(const std::string& hypothesis, double measured, double limit) {
  std::ostringstream os;
  os.precision(17);
  os << "hypothesis '" << hypothesis << "' not established (measured " << measured
     << ", limit " << limit << ")";
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::string expected)
    : Error(Errc::syntax, syntax_message(position, expected)),
      position_(position),
      expected_(std::move(expected)) {}

DomainEscape::DomainEscape(const std::string& message, double when, double where)
    : Error(Errc::domain_escape, message), when_(when), where_(where) {}

HypothesisViolation::HypothesisViolation(std::string hypothesis, double measured, double limit)
    : Error(Errc::hypothesis_violation, hypothesis_message(hypothesis, measured, limit)),
      hypothesis_(std::move(hypothesis)),
      measured_(measured),
      limit_(limit) {}

}  // namespace orbitforge
