#include "cvmdi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cvmdi/errors.hpp"

namespace cvmdi::oracle {

namespace {

using cd = std::complex<double>;

constexpr int kSqueezePadding = 10;
constexpr int kDisplacementPadding = 30;

template <typename Matrix>
Matrix expm_impl(const Matrix& m) {
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m / std::ldexp(1.0, squarings);

  // Horner form of the degree-18 Taylor polynomial; ||scaled|| <= 1/2
  const auto n = m.rows();
  Matrix result = Matrix::Identity(n, n);
  for (int j = 18; j >= 1; --j) {
    result = Matrix::Identity(n, n) + (scaled * result) / static_cast<double>(j);
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Single-mode quadrature operators on `dim` levels.
Eigen::MatrixXcd annihilation(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Weyl-symmetrized x^nx p^np: average over all distinct orderings.
Eigen::MatrixXcd symmetrized_monomial(int nx, int np, int dim) {
  const Eigen::MatrixXcd a = annihilation(dim);
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd x = a + ad;
  const Eigen::MatrixXcd p = cd(0.0, 1.0) * (ad - a);

  std::vector<char> seq(nx, 'x');
  seq.insert(seq.end(), np, 'p');
  std::sort(seq.begin(), seq.end());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  int count = 0;
  do {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(dim, dim);
    for (char c : seq) prod = prod * (c == 'x' ? x : p);
    sum += prod;
    ++count;
  } while (std::next_permutation(seq.begin(), seq.end()));
  return sum / static_cast<double>(count);
}

Eigen::MatrixXcd embed(const Eigen::MatrixXcd& amps, int dim) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  out.topLeftCorner(amps.rows(), amps.cols()) = amps;
  return out;
}

}  // namespace

double FockTwoModeState::tail_probability(int margin) const {
  const int n = truncation();
  const int cut = std::max(0, n - margin + 1);
  double tail = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i >= cut || j >= cut) tail += std::norm(amplitudes(i, j));
    }
  }
  return tail;
}

int suggested_truncation(double r, double d) {
  return static_cast<int>(std::ceil(10.0 + 20.0 * (r + d)));
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) { return expm_impl(m); }
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) { return expm_impl(m); }

FockTwoModeState build_tmsc_fock(double r, double d, int truncation) {
  if (r < 0.0 || d < 0.0) throw Error(ErrorKind::Domain, "r and d must be >= 0");
  if (truncation < 1) throw Error(ErrorKind::Domain, "truncation must be >= 1");
  const int padded = truncation + kSqueezePadding;
  const int dim = padded + 1;

  // coherent amplitude d/2 gives <x> = d
  const double alpha = 0.5 * d;
  std::vector<double> coh(dim);
  coh[0] = std::exp(-0.5 * alpha * alpha);
  for (int n = 1; n < dim; ++n) coh[n] = coh[n - 1] * alpha / std::sqrt(static_cast<double>(n));

  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(dim, dim);
  // r (a^dag b^dag - a b) conserves n1 - n2; exponentiate each sector
  for (int delta = -padded; delta <= padded; ++delta) {
    const int off1 = std::max(delta, 0);
    const int off2 = std::max(-delta, 0);
    const int len = padded - std::max(off1, off2) + 1;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(len, len);
    for (int j = 0; j + 1 < len; ++j) {
      const double amp = r * std::sqrt(static_cast<double>((j + off1 + 1) * (j + off2 + 1)));
      gen(j + 1, j) = amp;
      gen(j, j + 1) = -amp;
    }
    Eigen::VectorXd in(len);
    for (int j = 0; j < len; ++j) in(j) = coh[j + off1] * coh[j + off2];
    const Eigen::VectorXd out = expm(gen) * in;
    for (int j = 0; j < len; ++j) psi(j + off1, j + off2) = out(j);
  }

  FockTwoModeState state;
  state.amplitudes = psi.topLeftCorner(truncation + 1, truncation + 1).cast<cd>();
  const double leakage = (1.0 - state.norm_squared()) + state.tail_probability();
  if (leakage > kMaxLeakage) {
    throw Error(ErrorKind::TruncationInsufficient,
                "cutoff " + std::to_string(truncation) + " leaks " + std::to_string(leakage));
  }
  return state;
}

Projection apply_bs_and_project(const FockTwoModeState& state, double tau, int k) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::Domain, "tau must lie in [0,1]");
  if (k < 0) throw Error(ErrorKind::Domain, "k must be >= 0");
  const int n_max = state.truncation();
  const int dim = n_max + 1;
  const double theta = std::acos(std::sqrt(tau));

  // Three-mode tensor (n1, n2', n_ancilla); mixing conserves n2 + n_ancilla,
  // and with the ancilla in vacuum only column 0 of each sector block is needed.
  std::vector<cd> mixed(static_cast<size_t>(dim) * dim * dim, cd(0.0, 0.0));
  auto at = [&](int a, int b, int c) -> cd& { return mixed[(static_cast<size_t>(a) * dim + b) * dim + c]; };
  for (int total = 0; total <= n_max; ++total) {
    // basis j = ancilla photons, mode 2 holds total - j
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(total + 1, total + 1);
    for (int j = 0; j < total; ++j) {
      // a2 a_anc^dag |total-j, j>
      const double amp = theta * std::sqrt(static_cast<double>((total - j) * (j + 1)));
      gen(j + 1, j) = -amp;
      gen(j, j + 1) = amp;
    }
    const Eigen::MatrixXd block = expm(gen);
    for (int n1 = 0; n1 <= n_max; ++n1) {
      const cd amp = state.amplitudes(n1, total);
      if (amp == cd(0.0, 0.0)) continue;
      for (int j = 0; j <= total; ++j) at(n1, total - j, j) += amp * block(j, 0);
    }
  }

  double norm_after = 0.0;
  for (const cd& v : mixed) norm_after += std::norm(v);
  const double norm_before = state.norm_squared();

  Projection proj;
  proj.bs_norm_error = std::abs(norm_after - norm_before);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  if (k <= n_max) {
    for (int n1 = 0; n1 <= n_max; ++n1) {
      for (int n2 = 0; n2 + k <= n_max; ++n2) out(n1, n2) = at(n1, n2, k);
    }
  }
  proj.probability = out.squaredNorm() / norm_before;
  if (!(proj.probability > kMinProbability)) {
    throw Error(ErrorKind::ZeroProbability, "ancilla never holds " + std::to_string(k) + " photons");
  }
  proj.state.amplitudes = out / std::sqrt(out.squaredNorm());
  return proj;
}

double fock_moment(const FockTwoModeState& state, int i, int j, int m, int n) {
  if (i < 0 || j < 0 || m < 0 || n < 0) throw Error(ErrorKind::Domain, "moment exponents must be >= 0");
  const int order = i + j + m + n;
  if (order > 4) throw Error(ErrorKind::UnsupportedOrder, "oracle moments limited to total order 4");
  // pad so that the operator products act exactly on the truncated state
  const int dim = state.truncation() + 1 + order;
  const Eigen::MatrixXcd psi = embed(state.amplitudes, dim);
  const Eigen::MatrixXcd op1 = symmetrized_monomial(i, j, dim);
  const Eigen::MatrixXcd op2 = symmetrized_monomial(m, n, dim);
  const Eigen::MatrixXcd applied = op1 * psi * op2.transpose();
  const cd value = psi.conjugate().cwiseProduct(applied).sum() / psi.squaredNorm();
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw Error(ErrorKind::NumericalDegeneracy, "moment has non-negligible imaginary part");
  }
  return value.real();
}

double fock_wigner(const FockTwoModeState& state, const PhasePoint& pt) {
  const int dim = state.truncation() + 1 + kDisplacementPadding;
  const Eigen::MatrixXcd a = annihilation(dim);
  const Eigen::MatrixXcd ad = a.adjoint();
  // D(-beta) with beta = (x + i p) / 2
  auto shift = [&](double x, double p) {
    const cd beta(0.5 * x, 0.5 * p);
    return expm(Eigen::MatrixXcd(-beta * ad + std::conj(beta) * a));
  };
  const Eigen::MatrixXcd psi = embed(state.amplitudes, dim);
  const Eigen::MatrixXcd shifted = shift(pt.x1, pt.p1) * psi * shift(pt.x2, pt.p2).transpose();
  double parity = 0.0;
  for (int n1 = 0; n1 < dim; ++n1) {
    for (int n2 = 0; n2 < dim; ++n2) {
      const double sign = ((n1 + n2) % 2 == 0) ? 1.0 : -1.0;
      parity += sign * std::norm(shifted(n1, n2));
    }
  }
  return 4.0 * parity / psi.squaredNorm();
}

OracleResult oracle_covariance(double r, double d, double tau, int k, int truncation) {
  const int n_cut = truncation > 0 ? truncation : suggested_truncation(r, d);
  const FockTwoModeState source = build_tmsc_fock(r, d, n_cut);
  const Projection proj = apply_bs_and_project(source, tau, k);
  const FockTwoModeState& st = proj.state;

  const double mx1 = fock_moment(st, 1, 0, 0, 0);
  const double mx2 = fock_moment(st, 0, 0, 1, 0);
  const double mp1 = fock_moment(st, 0, 1, 0, 0);
  const double mp2 = fock_moment(st, 0, 0, 0, 1);

  OracleResult res;
  res.truncation = n_cut;
  res.probability = proj.probability;
  res.leakage = (1.0 - source.norm_squared()) + source.tail_probability();
  res.cm.mean_x1 = mx1;
  res.cm.mean_x2 = mx2;
  res.cm.vax = fock_moment(st, 2, 0, 0, 0) - mx1 * mx1;
  res.cm.vap = fock_moment(st, 0, 2, 0, 0) - mp1 * mp1;
  res.cm.vbx = fock_moment(st, 0, 0, 2, 0) - mx2 * mx2;
  res.cm.vbp = fock_moment(st, 0, 0, 0, 2) - mp2 * mp2;
  res.cm.vcx = fock_moment(st, 1, 0, 1, 0) - mx1 * mx2;
  res.cm.vcp = fock_moment(st, 0, 1, 0, 1) - mp1 * mp2;
  return res;
}

}  // namespace cvmdi::oracle
