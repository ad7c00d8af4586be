#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace maj {

// Deterministic random source. mt19937_64 output is fixed by the standard
// and the derived doubles avoid std distributions, whose streams differ
// across library implementations.
struct Rng {
  std::mt19937_64 eng;
  bool have_spare = false;
  double spare = 0.0;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }

  double gauss() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u = 0.0;
    while (u == 0.0) u = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double t = 6.283185307179586476925286766559 * uniform();
    spare = r * std::sin(t);
    have_spare = true;
    return r * std::cos(t);
  }

  std::complex<double> cgauss() { return {gauss(), gauss()}; }

  // Haar-distributed unitary via QR of a Gaussian matrix with phase fixing.
  Eigen::MatrixXcd unitary(int d) {
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = cgauss();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
      std::complex<double> dk = r(k, k);
      double a = std::abs(dk);
      q.col(k) *= a > 0.0 ? dk / a : 1.0;
    }
    return q;
  }

  // Uniform point on the probability simplex, sorted descending.
  Eigen::VectorXd simplex_sorted(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) {
      double u = 0.0;
      while (u == 0.0) u = uniform();
      v[i] = -std::log(u);
    }
    v /= v.sum();
    std::sort(v.data(), v.data() + d, std::greater<double>());
    return v;
  }
};

}  // namespace maj
