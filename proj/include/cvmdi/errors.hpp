#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvmdi {

enum class ErrorKind {
  Domain,                 // argument outside its mathematical domain
  ZeroProbability,        // heralding event with P_PS^k = 0
  Unphysical,             // covariance matrix violates the uncertainty principle
  NumericalDegeneracy,    // discriminant / eigenvalue problem ill-conditioned
  UnsupportedOrder,       // moment order beyond the closed forms
  TruncationInsufficient, // Fock cutoff too small for the requested state
  TargetUnreachable,      // key-rate target never met
  NoSecureRegion,         // optimizer found no positive objective
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cvmdi
