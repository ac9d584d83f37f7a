#pragma once

#include <Eigen/Dense>

#include "cvmdi/source.hpp"

namespace cvmdi {

/// Probabilities at or below this are treated as an impossible heralding event.
inline constexpr double kMinProbability = 1e-300;

/// Subtraction orders above this are rejected unless the caller raises the cap.
inline constexpr int kDefaultMaxSubtraction = 16;

/// Two-mode covariance matrix with no x-p cross terms:
///
///   | vax  0    vcx  0   |
///   | 0    vap  0    vcp |
///   | vcx  0    vbx  0   |
///   | 0    vcp  0    vbp |
///
/// plus the x-means of both modes (p-means vanish for these states).
struct TwoModeCM {
  double vax = 1.0;
  double vap = 1.0;
  double vbx = 1.0;
  double vbp = 1.0;
  double vcx = 0.0;
  double vcp = 0.0;
  double mean_x1 = 0.0;
  double mean_x2 = 0.0;

  Eigen::Matrix4d matrix() const;

  /// Sigma + i Omega >= 0 up to `tol` on the smallest eigenvalue.
  bool is_physical(double tol = 1e-9) const;

  static TwoModeCM tmsv(double r);
  static TwoModeCM thermal(double v);
};

/// Heralding probability of detecting exactly k photons on the tap.
/// Returns 1 for k = 0 and 0 for k >= 1 in the r = d = 0 limit.
double subtraction_probability(const SqueezedSourceParams& params, int max_k = kDefaultMaxSubtraction);

/// Covariance matrix and means of the normalized k-subtracted state.
/// Throws Error{ZeroProbability} when the heralding probability vanishes.
TwoModeCM pstmsc_covariance(const SqueezedSourceParams& params, int max_k = kDefaultMaxSubtraction);

/// Symmetrically ordered moment <x1^i p1^j x2^m p2^n> for i+j+m+n <= 2.
/// Higher orders throw Error{UnsupportedOrder}.
double low_order_moment(const SqueezedSourceParams& params, int i, int j, int m, int n);

}  // namespace cvmdi
