#pragma once

#include <Eigen/Dense>

#include "cvmdi/source.hpp"

namespace cvmdi {

/// Point (x1, p1, x2, p2) of two-mode phase space, shot-noise units.
struct PhasePoint {
  double x1 = 0.0;
  double p1 = 0.0;
  double x2 = 0.0;
  double p2 = 0.0;
};

/// Generalized Laguerre polynomial L_n^alpha(x) by the three-term
/// recurrence. L_n^alpha is identically 0 for n < 0.
double laguerre(int n, int alpha, double x);

/// t^n L_n^alpha(-c / t), evaluated by the same recurrence multiplied
/// through by powers of t. Finite at t = 0, where it equals c^n / n!.
/// For c >= 0 and t >= 0 every term of the recurrence is non-negative.
double scaled_laguerre(int n, int alpha, double t, double c);

/// Symplectic form for quadrature ordering (x1, p1, x2, p2).
Eigen::Matrix4d symplectic_form();

/// Beam-splitter action on (x_a, p_a, x_b, p_b): the transmitted port keeps
/// sqrt(tau), the reflected port picks up -sqrt(1 - tau).
Eigen::Matrix4d bs_symplectic(double tau);

/// Wigner density of a single-mode Fock state |n>, normalized under dx dp / (4 pi).
double wigner_fock(double x, double p, int n);

/// Wigner density of the two-mode squeezed coherent state, normalized under
/// the measure dx1 dp1 / (4 pi) dx2 dp2 / (4 pi).
double wigner_tmsc(const PhasePoint& pt, const SqueezedSourceParams& params);

/// Normalized Wigner density of the k-photon-subtracted state. Throws
/// Error{ZeroProbability} when the heralding probability vanishes.
double wigner_pstmsc(const PhasePoint& pt, const SqueezedSourceParams& params);

}  // namespace cvmdi
