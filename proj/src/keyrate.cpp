#include "cvmdi/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

constexpr double kPureTol = 1e-9;

// Conditional variance V_A - V_C^2 / (V_B + 1) for one quadrature.
double conditional_variance(double va, double vb, double vc) {
  const double v = va - vc * vc / (vb + 1.0);
  if (!(v > 0.0)) throw Error(ErrorKind::Unphysical, "non-positive conditional variance");
  return v;
}

// G((lambda - 1) / 2) with the near-pure clamp.
double entropy_of_eigenvalue(double lambda) {
  if (lambda < 1.0 + kPureTol) return 0.0;
  return entropy_G(0.5 * (lambda - 1.0));
}

}  // namespace

TwoModeCM effective_cm(const TwoModeCM& source_cm, const NoiseBreakdown& noise) {
  const double st = std::sqrt(noise.T);
  TwoModeCM out;
  out.vax = source_cm.vax;
  out.vap = source_cm.vap;
  out.vcx = st * source_cm.vcx;
  out.vcp = st * source_cm.vcp;
  out.vbx = noise.T * (source_cm.vbx + noise.chi_tot);
  out.vbp = noise.T * (source_cm.vbp + noise.chi_tot);
  return out;
}

double mutual_information(const TwoModeCM& cm) {
  const double cond_x = conditional_variance(cm.vax, cm.vbx, cm.vcx);
  const double cond_p = conditional_variance(cm.vap, cm.vbp, cm.vcp);
  // (V + 1)/2 on both numerator and denominator: heterodyne adds a vacuum unit
  const double ix = 0.5 * std::log2((cm.vax + 1.0) / (cond_x + 1.0));
  const double ip = 0.5 * std::log2((cm.vap + 1.0) / (cond_p + 1.0));
  return ix + ip;
}

SymplecticSpectrum symplectic_eigenvalues(const TwoModeCM& cm) {
  const double det_a = cm.vax * cm.vap;
  const double det_b = cm.vbx * cm.vbp;
  const double det_c = cm.vcx * cm.vcp;
  const double det_sigma = (cm.vax * cm.vbx - cm.vcx * cm.vcx) * (cm.vap * cm.vbp - cm.vcp * cm.vcp);
  const double delta = det_a + det_b + 2.0 * det_c;
  // lambda^2 are the eigenvalues of X P; trace^2 - 4 det written without cancellation
  const double diff = det_a - det_b;
  const double off = (cm.vax * cm.vcp + cm.vcx * cm.vbp) * (cm.vcx * cm.vap + cm.vbx * cm.vcp);
  double disc = diff * diff + 4.0 * off;
  if (disc < 0.0) {
    if (disc < -1e-9 * std::max(1.0, delta * delta)) {
      throw Error(ErrorKind::NumericalDegeneracy, "negative discriminant in symplectic spectrum");
    }
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  SymplecticSpectrum s;
  s.lambda1 = std::sqrt(0.5 * (delta + root));
  s.lambda2 = s.lambda1 > 0.0 ? std::sqrt(std::max(0.0, det_sigma)) / s.lambda1 : 0.0;
  return s;
}

SingleModeCM conditional_cm_after_heterodyne(const TwoModeCM& cm) {
  return SingleModeCM{conditional_variance(cm.vax, cm.vbx, cm.vcx), conditional_variance(cm.vap, cm.vbp, cm.vcp)};
}

double entropy_G(double x) {
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

double holevo_bound(const TwoModeCM& cm) {
  const SymplecticSpectrum s = symplectic_eigenvalues(cm);
  const SingleModeCM cond = conditional_cm_after_heterodyne(cm);
  const double lambda3 = std::sqrt(cond.vx * cond.vp);
  const double chi = entropy_of_eigenvalue(s.lambda1) + entropy_of_eigenvalue(s.lambda2) -
                     entropy_of_eigenvalue(lambda3);
  return std::max(0.0, chi);
}

KeyRateResult secret_key_rate(const SqueezedSourceParams& source, const ChannelParams& channel) {
  source.validate();
  channel.validate();
  KeyRateResult res;
  res.p_ps = subtraction_probability(source);
  const TwoModeCM source_cm = pstmsc_covariance(source);
  res.noise = noise_breakdown(channel);
  const TwoModeCM cm = effective_cm(source_cm, res.noise);

  res.i_ab = mutual_information(cm);
  const SymplecticSpectrum s = symplectic_eigenvalues(cm);
  const SingleModeCM cond = conditional_cm_after_heterodyne(cm);
  res.lambda1 = s.lambda1;
  res.lambda2 = s.lambda2;
  res.lambda3 = std::sqrt(cond.vx * cond.vp);
  res.chi_be = holevo_bound(cm);
  res.key_rate = res.p_ps * (channel.beta * res.i_ab - res.chi_be);
  return res;
}

}  // namespace cvmdi
