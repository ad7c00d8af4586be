#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "maj/quantum.hpp"
#include "maj/stepfn.hpp"

namespace maj {

// Pure state of a bipartite system in Schmidt form: descending positive
// coefficients and orthonormal local frames. The full vector is
// sum_k coeffs[k] * frame_a.col(k) (x) frame_b.col(k), with the A index
// major: component (i, j) sits at i * dB + j.
struct BipartitePureState {
  Eigen::VectorXd coeffs;
  Eigen::MatrixXcd frame_a;
  Eigen::MatrixXcd frame_b;
  FactorModel factor_a{FactorKind::TypeI, 0, 1.0};
  FactorModel factor_b{FactorKind::TypeI, 0, 1.0};

  int dim_a() const { return static_cast<int>(frame_a.rows()); }
  int dim_b() const { return static_cast<int>(frame_b.rows()); }
  int schmidt_rank() const { return static_cast<int>(coeffs.size()); }
};

// Schmidt decomposition of a raw vector; coefficients below 1e-13 of the top
// one are dropped. The norm must be 1 within 1e-9 (then renormalized).
BipartitePureState state_from_vector(const Eigen::VectorXcd& v, int da, int db);

// Schmidt triples (coeff, a index, b index); indices must be distinct on
// each side.
BipartitePureState state_from_schmidt(const std::vector<std::tuple<double, int, int>>& triples,
                                      int da, int db);

Eigen::MatrixXcd state_matrix(const BipartitePureState& psi);  // dA x dB
Eigen::VectorXcd state_vector(const BipartitePureState& psi);

StepFunction marginal_scale_a(const BipartitePureState& psi);
StepFunction marginal_scale_b(const BipartitePureState& psi);

BipartitePureState apply_local(const BipartitePureState& psi, const Eigen::MatrixXcd& ua,
                               const Eigen::MatrixXcd& ub);

// Exact LOCC convertibility psi -> phi: the target marginal majorizes the
// source marginal.
bool locc_convertible(const BipartitePureState& psi, const BipartitePureState& phi,
                      double tol = 1e-9);

// One measurement step: outcome labels with matching Kraus operators,
// together summing to the identity (checked by the simulator).
struct Instrument {
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXcd> kraus;
};

// An instrument applied when the transcript so far equals `on`; a case
// without `on` is the default. First match wins.
struct ProtocolCase {
  std::optional<std::vector<std::string>> on;
  Instrument instrument;
};

struct ProtocolRound {
  char party = 'A';  // 'A' or 'B'
  std::vector<ProtocolCase> cases;
};

struct LoccProtocol {
  std::vector<ProtocolRound> rounds;
};

// Two-round protocol converting psi into phi exactly: an A-side instrument
// from a Birkhoff decomposition of the doubly stochastic map carrying the
// target spectrum onto the source spectrum, then a correcting B unitary per
// outcome. Throws NotConvertible when majorization fails, InputError when
// local dimensions differ.
LoccProtocol synthesize_nielsen_protocol(const BipartitePureState& psi,
                                         const BipartitePureState& phi, double tol = 1e-9);

struct SimBranch {
  std::vector<std::string> transcript;
  double probability = 0.0;
  Eigen::MatrixXcd state;  // normalized dA x dB coefficient matrix
};

// Runs the protocol on the state, keeping every branch with probability
// above 1e-14. Validates instrument completeness per round and case.
std::vector<SimBranch> simulate_protocol(const BipartitePureState& psi,
                                         const LoccProtocol& protocol);

// |<phi|branch>| for a normalized branch matrix.
double overlap_with(const BipartitePureState& phi, const Eigen::MatrixXcd& branch);

// Stochastic-LOCC conversion: possible iff the Schmidt rank does not
// increase.
bool slocc_convertible(const BipartitePureState& psi, const BipartitePureState& phi,
                       double tol = 1e-9);

// Best achievable squared overlap with phi under SLOCC from psi: the Lorenz
// curve of phi's marginal evaluated at psi's trace-weighted Schmidt rank,
// clipped to 1.
double slocc_fidelity(const BipartitePureState& psi, const BipartitePureState& phi);

// Best fidelity to the target reachable by exact LOCC from the source, as a
// function of the marginal scales: maximizes the overlap integral of
// sqrt(omega * target) over scales omega majorizing the source. Both scales
// must have unit integral.
double conversion_fidelity(const StepFunction& source, const StepFunction& target);

double locc_conversion_fidelity(const BipartitePureState& psi,
                                const BipartitePureState& phi);

struct MonotoneReport {
  std::vector<double> alphas;
  std::vector<double> renyi;       // entanglement Renyi entropies
  double traced_rank = 0.0;        // trace-weighted Schmidt rank
  LorenzCurve lorenz;              // of the A marginal scale
};

// Computes the table from the A marginal and cross-checks against the B
// marginal (the two scales agree for a pure state).
MonotoneReport monotones(const BipartitePureState& psi, const std::vector<double>& alphas);

// vec of the positive square root in the ambient basis; the B marginal is
// the transpose of the A marginal and both equal rho for unit trace.
BipartitePureState canonical_purification(const Density& rho);

// Decomposes a doubly stochastic matrix (uniform masses) into permutations
// with positive weights by iterated perfect matching. perm[i] = source index
// feeding row i. Weights sum to 1 within the residual tolerance; throws
// BirkhoffResidual when more mass remains unexplained.
struct BirkhoffTerm {
  double weight = 0.0;
  std::vector<int> perm;
};
std::vector<BirkhoffTerm> birkhoff_decompose(Eigen::MatrixXd d, double entry_threshold = 1e-12,
                                             double residual_tol = 1e-9);

}  // namespace maj
