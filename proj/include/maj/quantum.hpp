#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "maj/stepfn.hpp"

namespace maj {

using cxd = std::complex<double>;

// Ambient algebra a density lives on. TypeI is a matrix algebra whose
// minimal projections carry trace_unit each; II1 has normalized trace
// (scales live on [0,1]); IIinf has an infinite semifinite trace with
// trace_unit fixing the scale normalization.
enum class FactorKind { TypeI, TypeII1, TypeIIinf };

struct FactorModel {
  FactorKind kind = FactorKind::TypeI;
  int dim = 0;  // TypeI only
  double trace_unit = 1.0;
};

// Positive element with finite trace: a concrete matrix on TypeI, a spectral
// scale on the semifinite models.
struct Density {
  FactorModel factor;
  Eigen::MatrixXcd matrix;  // when matrix_backed
  StepFunction scale_fn;    // otherwise
  bool matrix_backed = false;
};

Density density_from_matrix(const Eigen::MatrixXcd& m, double trace_unit = 1.0);
Density density_from_scale(const StepFunction& s, FactorKind kind, double trace_unit = 1.0);

struct QuantumOptions {
  double rank_cutoff = 1e-12;   // relative eigenvalue cutoff for support
  double cluster_gap = 1e-10;   // eigenvalues closer than this are degenerate
  double hermitian_tol = 1e-10; // max allowed asymmetry before rejection
  double psd_tol = 1e-10;       // relative dip below zero tolerated
};

// Eigenvalues in decreasing order with matching eigenvector columns.
// Rejects non-hermitian (beyond hermitian_tol) and non-PSD input; clamps
// small negative eigenvalues to zero.
void hermitian_spectrum(const Eigen::MatrixXcd& m, Eigen::VectorXd& values,
                        Eigen::MatrixXcd& vectors, const QuantumOptions& opt = {});

// The decreasing eigenvalue function against the trace: for TypeI each
// eigenvalue occupies width trace_unit; scale-backed densities return their
// scale unchanged. Eigenvalues below rank_cutoff * max are dropped.
StepFunction spectral_scale(const Density& rho, const QuantumOptions& opt = {});

double trace_of(const Density& rho);

// Spectral-scale Lorenz dominance; majorization adds equal traces.
bool q_submajorizes(const Density& rho, const Density& sigma, double tol = 1e-9,
                    const QuantumOptions& opt = {});
bool q_majorizes(const Density& rho, const Density& sigma, double tol = 1e-9,
                 const QuantumOptions& opt = {});

struct KrausChannel {
  std::vector<Eigen::MatrixXcd> kraus;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  // sum K K^dag and sum K^dag K, for checking (sub)unitality in tests
  Eigen::MatrixXcd completeness() const;
  Eigen::MatrixXcd dual_completeness() const;
};

// Builds a completely positive map T with T(rho) = sigma, sum K^dag K <= 1
// and sum K K^dag <= 1, for matrix-backed densities of equal trace and equal
// trace units. Reduces to doubly substochastic synthesis between the
// spectra; entries of the classical map are averaged over degenerate
// eigenvalue clusters (gap < cluster_gap) so the channel does not depend on
// the arbitrary eigenbasis inside a degenerate subspace. Throws
// NotSubmajorized when the spectra fail submajorization.
KrausChannel synthesize_dss_channel(const Density& rho, const Density& sigma,
                                    double tol = 1e-9, const QuantumOptions& opt = {});

// inf over the unitary orbit of ||rho - u sigma u*||_1, which equals the L1
// distance of the spectral scales.
double orbit_l1_distance(const Density& rho, const Density& sigma,
                         const QuantumOptions& opt = {});

// sup over the unitary orbit of the fidelity; equals the sorted-aligned
// scale overlap integral of sqrt(scale_rho * scale_sigma). Unit traces
// required.
double orbit_fidelity(const Density& rho, const Density& sigma,
                      const QuantumOptions& opt = {});

// Renyi entropy of order alpha >= 0 of a unit-trace density: alpha = 1 is
// von Neumann, alpha = 0 the log of the trace of the support projection.
double renyi_entropy(const Density& rho, double alpha, const QuantumOptions& opt = {});

// Same on a bare unit-integral scale.
double renyi_of_scale(const StepFunction& s, double alpha);

// Uhlmann fidelity and trace norm for concrete matrices.
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
double trace_norm(const Eigen::MatrixXcd& m);

// Kronecker product and partial traces over a dA x dB split, with the first
// factor as the row-major outer index.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
Eigen::MatrixXcd partial_trace_b(const Eigen::MatrixXcd& m, int da, int db);
Eigen::MatrixXcd partial_trace_a(const Eigen::MatrixXcd& m, int da, int db);

}  // namespace maj
