#pragma once

#include "cvmdi/channel.hpp"
#include "cvmdi/nongaussian.hpp"
#include "cvmdi/source.hpp"

namespace cvmdi {

struct SymplecticSpectrum {
  double lambda1 = 1.0;  // larger
  double lambda2 = 1.0;
};

/// Alice's single-mode CM after Bob's heterodyne; diagonal for these states.
struct SingleModeCM {
  double vx = 1.0;
  double vp = 1.0;
};

struct KeyRateResult {
  double p_ps = 0.0;
  double i_ab = 0.0;     // bits/pulse
  double chi_be = 0.0;   // bits/pulse
  double key_rate = 0.0; // bits/pulse, negative when insecure
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  NoiseBreakdown noise;
};

/// CM shared by Alice and Bob after the relay: Alice's block is kept,
/// the correlations pick up sqrt(T) and Bob's block becomes T (V_B + chi_tot).
/// The result is centered.
TwoModeCM effective_cm(const TwoModeCM& source_cm, const NoiseBreakdown& noise);

/// Heterodyne-heterodyne mutual information in bits.
double mutual_information(const TwoModeCM& cm);

/// Throws Error{NumericalDegeneracy} when the discriminant is clearly negative.
SymplecticSpectrum symplectic_eigenvalues(const TwoModeCM& cm);

SingleModeCM conditional_cm_after_heterodyne(const TwoModeCM& cm);

/// Entropy of a thermal state with mean photon number x, in bits.
double entropy_G(double x);

/// Holevo information between Bob's heterodyne outcomes and Eve, in bits.
double holevo_bound(const TwoModeCM& cm);

/// Full pipeline: heralding probability, source CM, equivalent channel,
/// effective CM, I_AB and chi_BE. Negative rates are returned as-is.
KeyRateResult secret_key_rate(const SqueezedSourceParams& source, const ChannelParams& channel);

}  // namespace cvmdi
