#include "cvmdi/phase_space.hpp"

#include <cmath>

#include "cvmdi/errors.hpp"
#include "cvmdi/nongaussian.hpp"

namespace cvmdi {

double laguerre(int n, int alpha, double x) {
  if (n < 0) return 0.0;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double scaled_laguerre(int n, int alpha, double t, double c) {
  if (n < 0) return 0.0;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = t * (1.0 + alpha) + c;
  for (int j = 1; j < n; ++j) {
    const double next =
        (((2.0 * j + 1.0 + alpha) * t + c) * cur - (j + alpha) * t * t * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

Eigen::Matrix4d bs_symplectic(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorKind::Domain, "beam-splitter transmittance must lie in [0,1]");
  }
  const double t = std::sqrt(tau);
  const double s = std::sqrt(1.0 - tau);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = t;
  m(0, 2) = m(1, 3) = s;
  m(2, 0) = m(3, 1) = -s;
  m(2, 2) = m(3, 3) = t;
  return m;
}

double wigner_fock(double x, double p, int n) {
  if (n < 0) throw Error(ErrorKind::Domain, "Fock index must be >= 0");
  const double rho = x * x + p * p;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * sign * std::exp(-0.5 * rho) * laguerre(n, 0, rho);
}

double wigner_tmsc(const PhasePoint& pt, const SqueezedSourceParams& params) {
  const double mu = params.mu();
  const double nu = params.nu();
  const double d = params.d;
  const double sq = pt.x1 * pt.x1 + pt.p1 * pt.p1 + pt.x2 * pt.x2 + pt.p2 * pt.p2;
  const double expo = -d * d - 0.5 * (mu * mu + nu * nu) * sq +
                      2.0 * mu * nu * (pt.x1 * pt.x2 - pt.p1 * pt.p2) +
                      d * (mu - nu) * (pt.x1 + pt.x2);
  return 4.0 * std::exp(expo);
}

namespace {

// Unnormalized k-subtracted Wigner density (-A)^k W^0 L_k(|xi12|^2 / (nu^2 D)).
double wigner_pstmsc_unnormalized(const PhasePoint& pt, const SqueezedSourceParams& params) {
  const double mu = params.mu();
  const double nu = params.nu();
  const double tau = params.tau;
  const double d = params.d;
  const double den = params.denom();
  const double st = std::sqrt(tau);

  const double re_xi = nu * nu * st * pt.x2 - mu * nu * pt.x1 - 0.5 * d * (mu - nu);
  const double im_xi = nu * nu * st * pt.p2 + mu * nu * pt.p1;
  const double xi_sq = re_xi * re_xi + im_xi * im_xi;

  const double expo = -d * d - 0.5 * (mu * mu + nu * nu) * (pt.x1 * pt.x1 + pt.p1 * pt.p1) -
                      0.5 * (mu * mu - (1.0 - 2.0 * tau) * nu * nu) * (pt.x2 * pt.x2 + pt.p2 * pt.p2) +
                      2.0 * mu * nu * st * (pt.x1 * pt.x2 - pt.p1 * pt.p2) +
                      d * (mu - nu) * (pt.x1 + st * pt.x2) + (1.0 - tau) / den * xi_sq;
  const double w0 = 4.0 / den * std::exp(expo);

  const int k = params.k;
  // (-A)^k L_k(y / nu^2) = (-(1-tau)/D)^k * nu^{2k} L_k(y / nu^2)
  const double poly = std::pow(-(1.0 - tau) / den, k) * scaled_laguerre(k, 0, nu * nu, -xi_sq / den);
  return w0 * poly;
}

}  // namespace

double wigner_pstmsc(const PhasePoint& pt, const SqueezedSourceParams& params) {
  params.validate();
  const double prob = subtraction_probability(params);
  if (!(prob > kMinProbability)) {
    throw Error(ErrorKind::ZeroProbability, "k-photon subtraction has probability 0 at these parameters");
  }
  return wigner_pstmsc_unnormalized(pt, params) / prob;
}

}  // namespace cvmdi
