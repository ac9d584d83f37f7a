#include "cvmdi/nongaussian.hpp"

#include <cmath>
#include <string>

#include "cvmdi/errors.hpp"
#include "cvmdi/phase_space.hpp"

namespace cvmdi {

Eigen::Matrix4d TwoModeCM::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = vax;
  m(1, 1) = vap;
  m(2, 2) = vbx;
  m(3, 3) = vbp;
  m(0, 2) = m(2, 0) = vcx;
  m(1, 3) = m(3, 1) = vcp;
  return m;
}

bool TwoModeCM::is_physical(double tol) const {
  const Eigen::Matrix4cd h =
      matrix().cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

TwoModeCM TwoModeCM::tmsv(double r) {
  const double v = std::cosh(2.0 * r);
  const double c = std::sinh(2.0 * r);
  return TwoModeCM{v, v, v, v, c, -c, 0.0, 0.0};
}

TwoModeCM TwoModeCM::thermal(double v) { return TwoModeCM{v, v, v, v, 0.0, 0.0, 0.0, 0.0}; }

namespace {

void check_order(const SqueezedSourceParams& params, int max_k) {
  params.validate();
  if (params.k > max_k) {
    throw Error(ErrorKind::Domain,
                "subtraction order " + std::to_string(params.k) + " exceeds cap " + std::to_string(max_k));
  }
}

// Laguerre ratios of the moment generating function. With t = nu^2 and
// c = d^2 (mu+nu)^2 / (4 D) the Laguerre argument is -c / t, and
//   R1 = L^1_{k-1} / L_k = t * rho1,   R2 = L^2_{k-2} / L_k = t^2 * rho2.
// Working with rho1, rho2 keeps every expression finite as nu -> 0.
struct MomentTerms {
  double mu, nu, tau, d, den, t, c;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double scaled_lk = 1.0;

  explicit MomentTerms(const SqueezedSourceParams& p)
      : mu(p.mu()), nu(p.nu()), tau(p.tau), d(p.d), den(p.denom()), t(nu * nu) {
    c = d * d * (mu + nu) * (mu + nu) / (4.0 * den);
    scaled_lk = scaled_laguerre(p.k, 0, t, c);
    if (scaled_lk > 0.0) {
      rho1 = scaled_laguerre(p.k - 1, 1, t, c) / scaled_lk;
      rho2 = scaled_laguerre(p.k - 2, 2, t, c) / scaled_lk;
    }
  }
};

}  // namespace

double subtraction_probability(const SqueezedSourceParams& params, int max_k) {
  check_order(params, max_k);
  const MomentTerms m(params);
  const double prob =
      std::pow((1.0 - m.tau) / m.den, params.k) * m.scaled_lk / m.den * std::exp(-(1.0 - m.tau) * m.c);
  return prob;
}

TwoModeCM pstmsc_covariance(const SqueezedSourceParams& params, int max_k) {
  const double prob = subtraction_probability(params, max_k);
  if (!(prob > kMinProbability)) {
    throw Error(ErrorKind::ZeroProbability, "covariance undefined: heralding probability is 0");
  }
  const MomentTerms m(params);
  const double mu = m.mu, nu = m.nu, tau = m.tau, d = m.d, den = m.den, t = m.t;
  const double st = std::sqrt(tau);
  const double r1 = t * m.rho1;
  const double spread = m.rho2 - m.rho1 * m.rho1;  // (R2 - R1^2) / t^2
  const double base = (mu * mu + tau * nu * nu) / den;
  const double mpn2 = (mu + nu) * (mu + nu);

  TwoModeCM cm;
  cm.vap = base + 2.0 * mu * mu / den * r1;
  cm.vax = cm.vap + d * d * mu * mu * mpn2 / (den * den) * t * spread;
  cm.vbp = base + 2.0 * nu * nu * tau / den * r1;
  cm.vbx = cm.vbp + d * d * mpn2 * tau / (den * den) * t * t * spread;
  cm.vcp = -2.0 * mu * nu * st / den * (1.0 + r1);
  cm.vcx = 2.0 * mu * nu * st / den * (1.0 + r1) + d * d * mu * mpn2 * st / (den * den) * nu * t * spread;
  cm.mean_x1 = d * (mu + tau * nu) / den + d * mu * (mu + nu) * nu / den * m.rho1;
  cm.mean_x2 = d * st * (mu + nu) / den * (1.0 + r1);
  return cm;
}

double low_order_moment(const SqueezedSourceParams& params, int i, int j, int m, int n) {
  if (i < 0 || j < 0 || m < 0 || n < 0) throw Error(ErrorKind::Domain, "moment exponents must be >= 0");
  const int order = i + j + m + n;
  if (order > 2) {
    throw Error(ErrorKind::UnsupportedOrder,
                "closed forms cover total order <= 2, requested " + std::to_string(order));
  }
  if (order == 0) return 1.0;
  const TwoModeCM cm = pstmsc_covariance(params);
  // any odd total power of p vanishes, and so do all x-p cross terms
  if ((j + n) % 2 == 1) return 0.0;
  if (i == 1 && m == 0) return cm.mean_x1;
  if (m == 1 && i == 0) return cm.mean_x2;
  if (i == 2) return cm.vax + cm.mean_x1 * cm.mean_x1;
  if (m == 2) return cm.vbx + cm.mean_x2 * cm.mean_x2;
  if (i == 1 && m == 1) return cm.vcx + cm.mean_x1 * cm.mean_x2;
  if (j == 2) return cm.vap;
  if (n == 2) return cm.vbp;
  return cm.vcp;  // j == 1 && n == 1
}

}  // namespace cvmdi
