#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvmdi/source.hpp"

namespace testing {

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)/sqrt(2 pi)) via Golub-Welsch.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = std::sqrt(static_cast<double>(i));
    jacobi(i - 1, i) = jacobi(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {nodes, weights};
}

inline double rel_dev(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1.0); }

struct Sampler {
  std::mt19937_64 gen;
  explicit Sampler(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1p-53); }
  int integer(int lo, int hi) { return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

inline cvmdi::SqueezedSourceParams params(double r, double d, double tau, int k) {
  cvmdi::SqueezedSourceParams p;
  p.r = r;
  p.d = d;
  p.tau = tau;
  p.k = k;
  return p;
}

}  // namespace testing
