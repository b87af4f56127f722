#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orbitforge {

enum class Errc {
  syntax,
  unknown_identifier,
  domain,
  singularity,
  base_point_mismatch,
  order_mismatch,
  length_mismatch,
  conditioning,
  param,
  not_quasi_ap,
  domain_escape,
  non_invertible,
  not_increasing,
  hypothesis_violation,
  singular_matrix,
  condition1_fails,
  tolerance_unreachable,
  not_monotone,
};

std::string_view errc_name(Errc code) noexcept;

// Base of every error thrown by the library. The code identifies the
// failure class; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected);
  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class DomainEscape : public Error {
 public:
  // `when` is an escape time for flows or an iterate index for maps.
  DomainEscape(const std::string& message, double when, double where);
  double when() const noexcept { return when_; }
  double where() const noexcept { return where_; }

 private:
  double when_;
  double where_;
};

class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string hypothesis, double measured, double limit);
  const std::string& hypothesis() const noexcept { return hypothesis_; }
  double measured() const noexcept { return measured_; }
  double limit() const noexcept { return limit_; }

 private:
  std::string hypothesis_;
  double measured_;
  double limit_;
};

}  // namespace orbitforge
