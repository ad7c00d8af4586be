#include "maj/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "maj/classical.hpp"
#include "maj/errors.hpp"

namespace maj {

namespace {

constexpr double kTraceTol = 1e-8;      // unit-trace preconditions
constexpr double kChannelTol = 1e-9;    // trace-norm slack on channel action

void require_unit_trace(const Density& rho, const char* who) {
  if (std::abs(trace_of(rho) - 1.0) > kTraceTol)
    throw InputError(std::string(who) + " requires a unit-trace density");
}

// Consecutive indices whose eigenvalues sit closer than the cluster gap.
std::vector<std::pair<int, int>> clusters(const Eigen::VectorXd& vals, double gap) {
  std::vector<std::pair<int, int>> out;
  int start = 0;
  for (int i = 1; i <= vals.size(); ++i) {
    if (i == vals.size() || vals[i - 1] - vals[i] > gap) {
      out.push_back({start, i});
      start = i;
    }
  }
  return out;
}

}  // namespace

Density density_from_matrix(const Eigen::MatrixXcd& m, double trace_unit) {
  if (m.rows() != m.cols()) throw InputError("density matrix must be square");
  if (m.rows() == 0) throw InputError("density matrix must be nonempty");
  if (!(trace_unit > 0.0) || !std::isfinite(trace_unit))
    throw InputError("trace_unit must be positive and finite");
  Density d;
  d.factor = {FactorKind::TypeI, static_cast<int>(m.rows()), trace_unit};
  d.matrix = m;
  d.matrix_backed = true;
  return d;
}

Density density_from_scale(const StepFunction& s, FactorKind kind, double trace_unit) {
  if (kind == FactorKind::TypeII1 && s.total_width() > 1.0 + 1e-9)
    throw InputError("scale support exceeds the normalized trace of the II1 model");
  if (!(trace_unit > 0.0) || !std::isfinite(trace_unit))
    throw InputError("trace_unit must be positive and finite");
  Density d;
  d.factor = {kind, 0, trace_unit};
  d.scale_fn = s;
  d.matrix_backed = false;
  return d;
}

void hermitian_spectrum(const Eigen::MatrixXcd& m, Eigen::VectorXd& values,
                        Eigen::MatrixXcd& vectors, const QuantumOptions& opt) {
  if (m.rows() != m.cols()) throw InputError("matrix must be square");
  double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > opt.hermitian_tol * scale)
    throw InputError("matrix is not hermitian within tolerance");
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  Eigen::VectorXd v = es.eigenvalues();
  double top = std::max(v.cwiseAbs().maxCoeff(), 0.0);
  if (v.minCoeff() < -opt.psd_tol * std::max(top, 1.0))
    throw InputError("matrix is not positive semidefinite within tolerance");
  const Eigen::Index n = v.size();
  values.resize(n);
  vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values[i] = std::max(v[n - 1 - i], 0.0);
    vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
}

StepFunction spectral_scale(const Density& rho, const QuantumOptions& opt) {
  if (!rho.matrix_backed) return rho.scale_fn;
  Eigen::VectorXd vals;
  Eigen::MatrixXcd vecs;
  hermitian_spectrum(rho.matrix, vals, vecs, opt);
  double cutoff = opt.rank_cutoff * (vals.size() ? vals[0] : 0.0);
  std::vector<Piece> ps;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > cutoff) ps.push_back({vals[i], rho.factor.trace_unit});
  return canonical(std::move(ps));
}

double trace_of(const Density& rho) {
  if (rho.matrix_backed) return rho.matrix.trace().real() * rho.factor.trace_unit;
  return rho.scale_fn.integral();
}

bool q_submajorizes(const Density& rho, const Density& sigma, double tol,
                    const QuantumOptions& opt) {
  return dominates(spectral_scale(rho, opt), spectral_scale(sigma, opt), tol);
}

bool q_majorizes(const Density& rho, const Density& sigma, double tol,
                 const QuantumOptions& opt) {
  double tr = trace_of(rho), ts = trace_of(sigma);
  if (std::abs(tr - ts) > tol * std::max({tr, ts, 1.0})) return false;
  return q_submajorizes(rho, sigma, tol, opt);
}

Eigen::MatrixXcd KrausChannel::apply(const Eigen::MatrixXcd& rho) const {
  if (kraus.empty()) throw InputError("channel has no Kraus operators");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kraus[0].rows(), kraus[0].rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

Eigen::MatrixXcd KrausChannel::completeness() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kraus[0].rows(), kraus[0].rows());
  for (const auto& k : kraus) out += k * k.adjoint();
  return out;
}

Eigen::MatrixXcd KrausChannel::dual_completeness() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kraus[0].cols(), kraus[0].cols());
  for (const auto& k : kraus) out += k.adjoint() * k;
  return out;
}

KrausChannel synthesize_dss_channel(const Density& rho, const Density& sigma,
                                    double tol, const QuantumOptions& opt) {
  if (!rho.matrix_backed || !sigma.matrix_backed)
    throw InputError("channel synthesis needs matrix-backed densities");
  if (std::abs(rho.factor.trace_unit - sigma.factor.trace_unit) >
      1e-12 * std::max(rho.factor.trace_unit, sigma.factor.trace_unit))
    throw InputError("channel synthesis needs equal trace units");

  Eigen::VectorXd p, q;
  Eigen::MatrixXcd u, v;
  hermitian_spectrum(rho.matrix, p, u, opt);
  hermitian_spectrum(sigma.matrix, q, v, opt);

  const double tu = rho.factor.trace_unit;
  std::vector<double> pv(p.data(), p.data() + p.size());
  std::vector<double> qv(q.data(), q.data() + q.size());
  std::vector<double> pm(pv.size(), tu), qm(qv.size(), tu);
  WeightedVector fw = weighted(pv, pm), gw = weighted(qv, qm);
  StochasticMap M = synthesize_dss(fw, gw, tol);  // throws NotSubmajorized

  // Average over degenerate clusters on both sides so the channel is
  // well-defined on degenerate subspaces regardless of eigenbasis choice.
  auto pc = clusters(p, opt.cluster_gap);
  auto qc = clusters(q, opt.cluster_gap);
  Eigen::MatrixXd A = M.matrix;
  for (const auto& [qs, qe] : qc)
    for (const auto& [ps, pe] : pc) {
      double mean = A.block(qs, ps, qe - qs, pe - ps).mean();
      A.block(qs, ps, qe - qs, pe - ps).setConstant(mean);
    }

  KrausChannel ch;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (A(i, j) <= 1e-15) continue;
      ch.kraus.push_back(std::sqrt(A(i, j)) * v.col(i) * u.col(j).adjoint());
    }
  if (ch.kraus.empty())
    ch.kraus.push_back(Eigen::MatrixXcd::Zero(sigma.matrix.rows(), rho.matrix.rows()));

  double act = trace_norm(ch.apply(rho.matrix) - sigma.matrix) * tu;
  if (act > kChannelTol * std::max(trace_of(sigma), 1.0))
    throw NumericError("channel action misses the target beyond tolerance");
  return ch;
}

double orbit_l1_distance(const Density& rho, const Density& sigma,
                         const QuantumOptions& opt) {
  return l1_distance(spectral_scale(rho, opt), spectral_scale(sigma, opt));
}

double orbit_fidelity(const Density& rho, const Density& sigma, const QuantumOptions& opt) {
  require_unit_trace(rho, "orbit_fidelity");
  require_unit_trace(sigma, "orbit_fidelity");
  return scale_fidelity(spectral_scale(rho, opt), spectral_scale(sigma, opt));
}

double renyi_of_scale(const StepFunction& s, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InputError("Renyi order must be finite and nonnegative");
  if (s.pieces.empty()) throw InputError("scale has empty support");
  if (alpha == 0.0) return std::log(s.total_width());
  if (std::abs(alpha - 1.0) < 1e-12) {
    double acc = 0.0;
    for (const auto& p : s.pieces) acc -= p.value * std::log(p.value) * p.width;
    return acc;
  }
  double acc = 0.0;
  for (const auto& p : s.pieces) acc += std::pow(p.value, alpha) * p.width;
  return std::log(acc) / (1.0 - alpha);
}

double renyi_entropy(const Density& rho, double alpha, const QuantumOptions& opt) {
  require_unit_trace(rho, "renyi_entropy");
  return renyi_of_scale(spectral_scale(rho, opt), alpha);
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  QuantumOptions opt;
  Eigen::VectorXd pr, ps;
  Eigen::MatrixXcd ur, us;
  hermitian_spectrum(rho, pr, ur, opt);
  hermitian_spectrum(sigma, ps, us, opt);
  Eigen::MatrixXcd sr = ur * pr.cwiseSqrt().asDiagonal() * ur.adjoint();
  Eigen::MatrixXcd ss = us * ps.cwiseSqrt().asDiagonal() * us.adjoint();
  return (sr * ss).jacobiSvd().singularValues().sum();
}

double trace_norm(const Eigen::MatrixXcd& m) {
  return m.jacobiSvd().singularValues().sum();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd partial_trace_b(const Eigen::MatrixXcd& m, int da, int db) {
  if (m.rows() != da * db || m.cols() != da * db)
    throw InputError("matrix does not match the factor dimensions");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

Eigen::MatrixXcd partial_trace_a(const Eigen::MatrixXcd& m, int da, int db) {
  if (m.rows() != da * db || m.cols() != da * db)
    throw InputError("matrix does not match the factor dimensions");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(db, db);
  for (int k = 0; k < db; ++k)
    for (int l = 0; l < db; ++l)
      for (int i = 0; i < da; ++i) out(k, l) += m(i * db + k, i * db + l);
  return out;
}

}  // namespace maj
