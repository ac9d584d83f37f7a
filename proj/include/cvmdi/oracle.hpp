#pragma once

#include <Eigen/Dense>

#include "cvmdi/nongaussian.hpp"
#include "cvmdi/phase_space.hpp"

namespace cvmdi::oracle {

/// Leakage above which a truncated state is rejected.
inline constexpr double kMaxLeakage = 1e-8;

/// Two-mode state in a truncated photon-number basis: amplitudes(n1, n2)
/// for n1, n2 in [0, N].
struct FockTwoModeState {
  Eigen::MatrixXcd amplitudes;

  int truncation() const { return static_cast<int>(amplitudes.rows()) - 1; }
  double norm_squared() const { return amplitudes.squaredNorm(); }
  /// Probability carried by levels above N - margin in either mode.
  double tail_probability(int margin = 5) const;
};

struct Projection {
  FockTwoModeState state;  // normalized
  double probability = 0.0;
  double bs_norm_error = 0.0;  // |norm after mixing - norm before|
};

struct OracleResult {
  TwoModeCM cm;
  double probability = 0.0;
  double leakage = 0.0;
  int truncation = 0;
};

/// Cutoff guideline that keeps leakage of S12(r) D(d) D(d)|00> below 1e-8.
int suggested_truncation(double r, double d);

/// exp(m) by scaling and squaring with a Taylor core. Exposed for tests.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m);

/// S12(r) D1 D2 |00> with x-means d per mode before squeezing. The squeezer
/// is exponentiated per photon-difference sector on a cutoff padded by 10
/// levels and then cropped. Throws Error{TruncationInsufficient} when the
/// leakage exceeds kMaxLeakage.
FockTwoModeState build_tmsc_fock(double r, double d, int truncation);

/// Mixes mode 2 with a vacuum ancilla on a beam splitter of transmittance
/// tau, then projects the ancilla on |k>. Throws Error{ZeroProbability}
/// below 1e-300.
Projection apply_bs_and_project(const FockTwoModeState& state, double tau, int k);

/// Symmetrically ordered <x1^i p1^j x2^m p2^n> with x = a + a^dag,
/// p = i(a^dag - a). Total order <= 4.
double fock_moment(const FockTwoModeState& state, int i, int j, int m, int n);

/// Wigner density reconstructed from displaced parity, normalized under
/// dx1 dp1 / (4 pi) dx2 dp2 / (4 pi).
double fock_wigner(const FockTwoModeState& state, const PhasePoint& pt);

/// Composition of the above; truncation <= 0 selects suggested_truncation.
OracleResult oracle_covariance(double r, double d, double tau, int k, int truncation = 0);

}  // namespace cvmdi::oracle
