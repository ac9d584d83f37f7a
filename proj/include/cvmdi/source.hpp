#pragma once

#include <cmath>

namespace cvmdi {

/// Two-mode squeezed coherent source followed by a k-photon subtraction tap.
///
/// Quadratures are in shot-noise units (vacuum variance 1). The coherent
/// seed is displaced along x so that each mode's x-mean is `d` before
/// squeezing; `tau` is the transmittance of the subtraction beam splitter.
struct SqueezedSourceParams {
  double r = 0.0;
  double d = 0.0;
  double tau = 1.0;
  int k = 0;

  double mu() const { return std::cosh(r); }
  double nu() const { return std::sinh(r); }

  /// mu^2 - tau nu^2, strictly positive for any valid parameter set.
  double denom() const {
    const double n = nu();
    return mu() * mu() - tau * n * n;
  }

  /// Subtraction gain nu^2 (1 - tau) / (mu^2 - tau nu^2), in [0, 1).
  double A() const {
    const double n = nu();
    return n * n * (1.0 - tau) / denom();
  }

  /// Throws Error{Domain} when r < 0, d < 0, tau outside [0,1], k < 0 or
  /// any field is non-finite.
  void validate() const;

  /// Squeezing that gives a TMSV of quadrature variance V = cosh 2r.
  static double squeezing_for_variance(double variance);
};

}  // namespace cvmdi
