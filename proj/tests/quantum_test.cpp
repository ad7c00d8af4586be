#include <cmath>

#include "doctest.h"
#include "maj/errors.hpp"
#include "maj/quantum.hpp"
#include "maj/rng.hpp"
#include "oracles.hpp"

using namespace maj;

namespace {

Eigen::MatrixXcd diag_density(const std::vector<double>& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  return m;
}

Eigen::MatrixXcd random_density(Rng& rng, int d) {
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.cgauss();
  Eigen::MatrixXcd m = a * a.adjoint();
  return m / m.trace().real();
}

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("hermitian spectrum sorts, validates, clamps") {
  Eigen::VectorXd vals;
  Eigen::MatrixXcd vecs;
  hermitian_spectrum(diag_density({0.2, 0.5, 0.3}), vals, vecs);
  CHECK(vals[0] == doctest::Approx(0.5));
  CHECK(vals[1] == doctest::Approx(0.3));
  CHECK(vals[2] == doctest::Approx(0.2));
  Eigen::MatrixXcd recon = vecs * vals.asDiagonal() * vecs.adjoint();
  CHECK((recon - diag_density({0.2, 0.5, 0.3})).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::MatrixXcd nonherm(2, 2);
  nonherm << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(hermitian_spectrum(nonherm, vals, vecs), InputError);
  CHECK_THROWS_AS(hermitian_spectrum(diag_density({0.5, -0.1}), vals, vecs),
                  InputError);

  hermitian_spectrum(diag_density({1.0, -1e-13}), vals, vecs);
  CHECK(vals[1] == 0.0);
}

TEST_CASE("spectral scale on matrix and scale backed densities") {
  Density rho = density_from_matrix(diag_density({0.5, 0.3, 0.2}));
  StepFunction s = spectral_scale(rho);
  REQUIRE(s.pieces.size() == 3);
  CHECK(s.pieces[0].value == doctest::Approx(0.5));
  CHECK(s.pieces[0].width == doctest::Approx(1.0));
  CHECK(trace_of(rho) == doctest::Approx(1.0));

  Density coarse = density_from_matrix(diag_density({0.5, 0.5}), 0.25);
  StepFunction sc = spectral_scale(coarse);
  REQUIRE(sc.pieces.size() == 1);
  CHECK(sc.pieces[0].width == doctest::Approx(0.5));  // two atoms of 0.25
  CHECK(trace_of(coarse) == doctest::Approx(0.25));

  Density flat = density_from_scale(canonical({{1.0, 1.0}}), FactorKind::TypeII1);
  CHECK(spectral_scale(flat).pieces.size() == 1);
  CHECK(trace_of(flat) == doctest::Approx(1.0));
  // II1 scales cannot occupy more than the unit trace
  CHECK_THROWS_AS(density_from_scale(canonical({{0.5, 3.0}}), FactorKind::TypeII1),
                  InputError);
}

TEST_CASE("quantum majorization matches the classical decision") {
  Density pure = density_from_matrix(diag_density({1.0, 0.0}));
  Density flat = density_from_matrix(diag_density({0.5, 0.5}));
  CHECK(q_majorizes(pure, flat));
  CHECK(q_submajorizes(pure, flat));
  CHECK(!q_submajorizes(flat, pure));

  // basis independence
  Rng rng(31);
  Eigen::MatrixXcd u = rng.unitary(2);
  Density rot = density_from_matrix(u * diag_density({1.0, 0.0}) * u.adjoint());
  CHECK(q_majorizes(rot, flat));
}

TEST_CASE("channel synthesis maps source onto target") {
  Rng rng(32);
  Density rho = density_from_matrix(diag_density({0.7, 0.3}));
  Eigen::MatrixXcd u = rng.unitary(2);
  Density sigma =
      density_from_matrix(u * diag_density({0.5, 0.5}) * u.adjoint());
  KrausChannel ch = synthesize_dss_channel(rho, sigma);
  CHECK(trace_norm(ch.apply(rho.matrix) - sigma.matrix) <= 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ch.completeness());
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(ch.dual_completeness());
  CHECK(es2.eigenvalues().maxCoeff() <= 1.0 + 1e-10);

  CHECK_THROWS_AS(synthesize_dss_channel(sigma, rho), NotSubmajorized);
}

TEST_CASE("channel synthesis across degenerate spectra") {
  Density rho = density_from_matrix(diag_density({0.5, 0.25, 0.25}));
  Density sigma = density_from_matrix(diag_density({0.4, 0.35, 0.25}));
  KrausChannel ch = synthesize_dss_channel(rho, sigma);
  CHECK(trace_norm(ch.apply(rho.matrix) - sigma.matrix) <= 1e-9);

  // strict submajorization with trace loss
  Density half = density_from_matrix(diag_density({0.3, 0.2}), 1.0);
  Density src = density_from_matrix(diag_density({0.9, 0.1}));
  KrausChannel ch2 = synthesize_dss_channel(src, half);
  CHECK(trace_norm(ch2.apply(src.matrix) - half.matrix) <= 1e-9);
}

TEST_CASE("random channel synthesis property") {
  Rng rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform() * 3);
    Eigen::VectorXd p = rng.simplex_sorted(d);
    // mix the spectrum down, then rotate both states
    Eigen::VectorXd q = p;
    for (int s = 0; s < d; ++s) {
      int i = static_cast<int>(rng.uniform() * d);
      int j = static_cast<int>(rng.uniform() * d);
      if (i == j) continue;
      double lam = 0.5 * rng.uniform();
      double qi = q[i], qj = q[j];
      q[i] = (1.0 - lam) * qi + lam * qj;
      q[j] = lam * qi + (1.0 - lam) * qj;
    }
    Eigen::MatrixXcd ur = rng.unitary(d), us = rng.unitary(d);
    Density rho = density_from_matrix(
        ur * Eigen::MatrixXcd(p.cast<cxd>().asDiagonal()) * ur.adjoint());
    Density sigma = density_from_matrix(
        us * Eigen::MatrixXcd(q.cast<cxd>().asDiagonal()) * us.adjoint());
    KrausChannel ch = synthesize_dss_channel(rho, sigma);
    CHECK(trace_norm(ch.apply(rho.matrix) - sigma.matrix) <= 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ch.completeness());
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_CASE("orbit quantities on commuting pairs") {
  Density rho = density_from_matrix(diag_density({0.6, 0.4}));
  Density sigma = density_from_matrix(diag_density({0.8, 0.2}));
  CHECK(orbit_l1_distance(rho, sigma) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(orbit_fidelity(rho, sigma) ==
        doctest::Approx(0.9756630355021699).epsilon(1e-12));
  // sorted-aligned diagonal pair attains both bounds
  CHECK(fidelity(rho.matrix, sigma.matrix) ==
        doctest::Approx(orbit_fidelity(rho, sigma)).epsilon(1e-10));
  CHECK(trace_norm(rho.matrix - sigma.matrix) ==
        doctest::Approx(orbit_l1_distance(rho, sigma)).epsilon(1e-10));
}

TEST_CASE("orbit bounds against sampled unitaries") {
  Rng rng(34);
  for (int trial = 0; trial < 8; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform() * 3);
    Density rho = density_from_matrix(random_density(rng, d));
    Density sigma = density_from_matrix(random_density(rng, d));
    double best_l1 = orbit_l1_distance(rho, sigma);
    double best_f = orbit_fidelity(rho, sigma);
    for (int s = 0; s < 50; ++s) {
      Eigen::MatrixXcd u = rng.unitary(d);
      Eigen::MatrixXcd moved = u * sigma.matrix * u.adjoint();
      CHECK(trace_norm(rho.matrix - moved) >= best_l1 - 1e-9);
      CHECK(fidelity(rho.matrix, moved) <= best_f + 1e-9);
    }
  }
}

TEST_CASE("renyi entropies of the two-thirds one-third state") {
  Density rho = density_from_matrix(diag_density({2.0 / 3.0, 1.0 / 3.0}));
  CHECK(renyi_entropy(rho, 0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(renyi_entropy(rho, 0.5) == doctest::Approx(0.6641348853709763).epsilon(1e-12));
  CHECK(renyi_entropy(rho, 1.0) == doctest::Approx(0.6365141682948128).epsilon(1e-12));
  CHECK(renyi_entropy(rho, 2.0) == doctest::Approx(0.587786664902119).epsilon(1e-12));
  CHECK_THROWS_AS(renyi_entropy(rho, -0.5), InputError);

  // II1 tracial state has zero entropy at every order
  Density tau = density_from_scale(canonical({{1.0, 1.0}}), FactorKind::TypeII1);
  for (double a : {0.0, 0.5, 1.0, 2.0})
    CHECK(renyi_entropy(tau, a) == doctest::Approx(0.0));
  CHECK(renyi_of_scale(canonical({{0.5, 2.0}}), 1.0) ==
        doctest::Approx(0.6931471805599453));
}

TEST_CASE("fidelity and trace norm basics") {
  Eigen::MatrixXcd p0 = diag_density({1.0, 0.0});
  Eigen::MatrixXcd p1 = diag_density({0.0, 1.0});
  CHECK(fidelity(p0, p0) == doctest::Approx(1.0));
  CHECK(fidelity(p0, p1) == doctest::Approx(0.0));
  Eigen::MatrixXcd sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(trace_norm(sx) == doctest::Approx(2.0));
  CHECK(fidelity(diag_density({0.6, 0.4}), diag_density({0.8, 0.2})) ==
        doctest::Approx(0.9756630355021699).epsilon(1e-12));
}

TEST_CASE("kron and partial traces use the A-major layout") {
  Eigen::MatrixXcd a = diag_density({1.0, 0.0});
  Eigen::MatrixXcd b = diag_density({0.0, 1.0});
  Eigen::MatrixXcd ab = kron(a, b);
  CHECK(ab(1, 1).real() == doctest::Approx(1.0));  // index 0*2+1
  CHECK(partial_trace_b(ab, 2, 2).isApprox(a, 1e-14));
  CHECK(partial_trace_a(ab, 2, 2).isApprox(b, 1e-14));

  Rng rng(35);
  Eigen::MatrixXcd ra = random_density(rng, 2), rb = random_density(rng, 3);
  Eigen::MatrixXcd prod = kron(ra, rb);
  CHECK(partial_trace_b(prod, 2, 3).isApprox(ra, 1e-12));
  CHECK(partial_trace_a(prod, 2, 3).isApprox(rb, 1e-12));
}

}  // TEST_SUITE
