#include "maj/locc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "maj/classical.hpp"
#include "maj/errors.hpp"

namespace maj {

namespace {

constexpr double kBranchPrune = 1e-14;
constexpr double kCompletenessTol = 1e-10;

void require_unitary(const Eigen::MatrixXcd& u, const char* who) {
  if (u.rows() != u.cols()) throw InputError(std::string(who) + " must be square");
  double dev = (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols()))
                   .cwiseAbs()
                   .maxCoeff();
  if (dev > 1e-10) throw InputError(std::string(who) + " is not unitary");
}

// Extends orthonormal columns to a full orthonormal basis, deterministically,
// by orthogonalizing coordinate vectors against what is already there.
Eigen::MatrixXcd complete_frame(const Eigen::MatrixXcd& frame) {
  const Eigen::Index d = frame.rows(), r = frame.cols();
  Eigen::MatrixXcd u(d, d);
  u.leftCols(r) = frame;
  Eigen::Index have = r;
  for (Eigen::Index e = 0; e < d && have < d; ++e) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < have; ++c) v -= u.col(c) * u.col(c).dot(v);
    if (v.norm() > 1e-8) u.col(have++) = v / v.norm();
  }
  if (have < d) throw NumericError("frame completion failed");
  return u;
}

Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double cut = 1e-12 * (s.size() ? s[0] : 0.0);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cut)
      out += (1.0 / s[i]) * svd.matrixV().col(i) * svd.matrixU().col(i).adjoint();
  return out;
}

// Nearest unitary: snap every singular value to 1.
Eigen::MatrixXcd polar_unitary(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

BipartitePureState state_from_vector(const Eigen::VectorXcd& v, int da, int db) {
  if (da < 1 || db < 1) throw InputError("dimensions must be positive");
  if (v.size() != static_cast<Eigen::Index>(da) * db)
    throw InputError("vector length does not match the dimensions");
  double nrm = v.norm();
  if (std::abs(nrm - 1.0) > 1e-9) throw InputError("state vector must be normalized");
  Eigen::MatrixXcd m(da, db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) m(i, j) = v[static_cast<Eigen::Index>(i) * db + j];
  m /= nrm;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double cut = 1e-13 * (s.size() ? s[0] : 0.0);
  int r = 0;
  while (r < s.size() && s[r] > cut) ++r;
  if (r == 0) throw InputError("state vector has no support");
  BipartitePureState psi;
  psi.coeffs = s.head(r);
  psi.coeffs /= psi.coeffs.norm();
  psi.frame_a = svd.matrixU().leftCols(r);
  psi.frame_b = svd.matrixV().conjugate().leftCols(r);
  psi.factor_a.dim = da;
  psi.factor_b.dim = db;
  return psi;
}

BipartitePureState state_from_schmidt(
    const std::vector<std::tuple<double, int, int>>& triples, int da, int db) {
  if (triples.empty()) throw InputError("at least one Schmidt term is required");
  std::vector<std::tuple<double, int, int>> ts = triples;
  std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) > std::get<0>(b);
  });
  double norm2 = 0.0;
  std::vector<bool> seen_a(static_cast<std::size_t>(da)), seen_b(static_cast<std::size_t>(db));
  for (const auto& [c, i, j] : ts) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw InputError("Schmidt coefficients must be positive and finite");
    if (i < 0 || i >= da || j < 0 || j >= db)
      throw InputError("Schmidt index out of range");
    if (seen_a[static_cast<std::size_t>(i)] || seen_b[static_cast<std::size_t>(j)])
      throw InputError("Schmidt indices must be distinct per side");
    seen_a[static_cast<std::size_t>(i)] = seen_b[static_cast<std::size_t>(j)] = true;
    norm2 += c * c;
  }
  if (std::abs(norm2 - 1.0) > 1e-9) throw InputError("Schmidt coefficients must be normalized");
  BipartitePureState psi;
  const int r = static_cast<int>(ts.size());
  psi.coeffs.resize(r);
  psi.frame_a = Eigen::MatrixXcd::Zero(da, r);
  psi.frame_b = Eigen::MatrixXcd::Zero(db, r);
  for (int k = 0; k < r; ++k) {
    psi.coeffs[k] = std::get<0>(ts[static_cast<std::size_t>(k)]) / std::sqrt(norm2);
    psi.frame_a(std::get<1>(ts[static_cast<std::size_t>(k)]), k) = 1.0;
    psi.frame_b(std::get<2>(ts[static_cast<std::size_t>(k)]), k) = 1.0;
  }
  psi.factor_a.dim = da;
  psi.factor_b.dim = db;
  return psi;
}

Eigen::MatrixXcd state_matrix(const BipartitePureState& psi) {
  return psi.frame_a * psi.coeffs.asDiagonal() * psi.frame_b.transpose();
}

Eigen::VectorXcd state_vector(const BipartitePureState& psi) {
  Eigen::MatrixXcd m = state_matrix(psi);
  Eigen::VectorXcd v(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v[static_cast<Eigen::Index>(i) * m.cols() + j] = m(i, j);
  return v;
}

StepFunction marginal_scale_a(const BipartitePureState& psi) {
  std::vector<Piece> ps;
  for (Eigen::Index k = 0; k < psi.coeffs.size(); ++k)
    ps.push_back({psi.coeffs[k] * psi.coeffs[k], psi.factor_a.trace_unit});
  return canonical(std::move(ps));
}

StepFunction marginal_scale_b(const BipartitePureState& psi) {
  std::vector<Piece> ps;
  for (Eigen::Index k = 0; k < psi.coeffs.size(); ++k)
    ps.push_back({psi.coeffs[k] * psi.coeffs[k], psi.factor_b.trace_unit});
  return canonical(std::move(ps));
}

BipartitePureState apply_local(const BipartitePureState& psi, const Eigen::MatrixXcd& ua,
                               const Eigen::MatrixXcd& ub) {
  require_unitary(ua, "local operator on A");
  require_unitary(ub, "local operator on B");
  if (ua.cols() != psi.frame_a.rows() || ub.cols() != psi.frame_b.rows())
    throw InputError("local operator dimension mismatch");
  BipartitePureState out = psi;
  out.frame_a = ua * psi.frame_a;
  out.frame_b = ub * psi.frame_b;
  return out;
}

bool locc_convertible(const BipartitePureState& psi, const BipartitePureState& phi,
                      double tol) {
  StepFunction sp = marginal_scale_a(psi), st = marginal_scale_a(phi);
  double tp = sp.integral(), tt = st.integral();
  if (std::abs(tp - tt) > tol * std::max({tp, tt, 1.0})) return false;
  return dominates(st, sp, tol);
}

std::vector<BirkhoffTerm> birkhoff_decompose(Eigen::MatrixXd d, double entry_threshold,
                                             double residual_tol) {
  const Eigen::Index n = d.rows();
  if (d.cols() != n) throw InputError("Birkhoff decomposition needs a square matrix");
  if ((d.array() < -1e-12).any())
    throw InputError("matrix has negative entries");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(d.row(i).sum() - 1.0) > 1e-9 || std::abs(d.col(i).sum() - 1.0) > 1e-9)
      throw InputError("matrix is not doubly stochastic");
  d = d.cwiseMax(0.0);

  std::vector<BirkhoffTerm> terms;
  std::vector<int> row_of_col(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n));
  std::function<bool(Eigen::Index, double)> augment_at = [&](Eigen::Index r,
                                                             double thresh) -> bool {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (seen[static_cast<std::size_t>(c)] || d(r, c) <= thresh) continue;
      seen[static_cast<std::size_t>(c)] = 1;
      int& owner = row_of_col[static_cast<std::size_t>(c)];
      if (owner < 0 || augment_at(owner, thresh)) {
        owner = static_cast<int>(r);
        return true;
      }
    }
    return false;
  };

  const double floor_threshold = 0.0;
  const std::size_t max_terms = static_cast<std::size_t>(n) * static_cast<std::size_t>(n) +
                                static_cast<std::size_t>(n);
  while (terms.size() < max_terms) {
    double remaining = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) remaining = std::max(remaining, d.row(r).sum());
    if (remaining <= 1e-13) break;
    bool perfect = false;
    for (double thresh : {entry_threshold, floor_threshold}) {
      std::fill(row_of_col.begin(), row_of_col.end(), -1);
      perfect = true;
      for (Eigen::Index r = 0; r < n && perfect; ++r) {
        std::fill(seen.begin(), seen.end(), 0);
        perfect = augment_at(r, thresh);
      }
      if (perfect) break;
    }
    if (!perfect) break;
    BirkhoffTerm t;
    t.perm.assign(static_cast<std::size_t>(n), -1);
    for (Eigen::Index c = 0; c < n; ++c)
      t.perm[static_cast<std::size_t>(row_of_col[static_cast<std::size_t>(c)])] =
          static_cast<int>(c);
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < n; ++r)
      alpha = std::min(alpha, d(r, t.perm[static_cast<std::size_t>(r)]));
    if (!(alpha > 0.0)) break;
    t.weight = alpha;
    for (Eigen::Index r = 0; r < n; ++r) {
      double& e = d(r, t.perm[static_cast<std::size_t>(r)]);
      e = std::max(e - alpha, 0.0);
    }
    terms.push_back(std::move(t));
  }

  double residual = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) residual = std::max(residual, d.row(r).sum());
  if (residual > residual_tol)
    throw BirkhoffResidual("Birkhoff decomposition left unexplained mass", residual);
  return terms;
}

LoccProtocol synthesize_nielsen_protocol(const BipartitePureState& psi,
                                         const BipartitePureState& phi, double tol) {
  const int da = psi.dim_a(), db = psi.dim_b();
  if (da != phi.dim_a() || db != phi.dim_b())
    throw InputError("protocol synthesis needs equal local dimensions");
  if (std::abs(psi.factor_a.trace_unit - phi.factor_a.trace_unit) > 1e-12)
    throw InputError("protocol synthesis needs equal trace units");
  if (!locc_convertible(psi, phi, tol))
    throw NotConvertible("target marginal does not majorize source marginal");

  std::vector<double> p(static_cast<std::size_t>(da), 0.0), q(p), ones(p.size(), 1.0);
  for (Eigen::Index k = 0; k < psi.coeffs.size(); ++k)
    p[static_cast<std::size_t>(k)] = psi.coeffs[k] * psi.coeffs[k];
  for (Eigen::Index k = 0; k < phi.coeffs.size(); ++k)
    q[static_cast<std::size_t>(k)] = phi.coeffs[k] * phi.coeffs[k];

  StochasticMap dmap = synthesize_ds(weighted(q, ones), weighted(p, ones), tol);
  std::vector<BirkhoffTerm> terms = birkhoff_decompose(dmap.matrix);

  Eigen::MatrixXcd u_psi = complete_frame(psi.frame_a);
  Eigen::MatrixXcd u_phi = complete_frame(phi.frame_a);
  // Inverting against the spectrum reassembled from the decomposition keeps
  // the instrument complete to machine precision; it agrees with p up to the
  // synthesis tolerance.
  Eigen::VectorXd p_eff = Eigen::VectorXd::Zero(da);
  for (const auto& t : terms)
    for (int i = 0; i < da; ++i)
      p_eff[i] += t.weight * q[static_cast<std::size_t>(t.perm[static_cast<std::size_t>(i)])];
  Eigen::VectorXd sq(da), inv_c = Eigen::VectorXd::Zero(da);
  for (int i = 0; i < da; ++i) sq[i] = std::sqrt(q[static_cast<std::size_t>(i)]);
  for (Eigen::Index k = 0; k < psi.coeffs.size(); ++k) {
    if (p_eff[k] < 0.5 * p[static_cast<std::size_t>(k)])
      throw NumericError("decomposition lost a near-zero Schmidt direction");
    inv_c[k] = 1.0 / std::sqrt(p_eff[k]);
  }
  Eigen::MatrixXcd phi_sqrt = u_phi * sq.asDiagonal() * u_phi.adjoint();
  Eigen::MatrixXcd psi_inv_sqrt = u_psi * inv_c.asDiagonal() * u_psi.adjoint();

  Eigen::MatrixXcd m_psi = state_matrix(psi);
  Eigen::MatrixXcd m_phi = state_matrix(phi);

  Instrument measure;
  std::vector<ProtocolCase> corrections;
  for (std::size_t x = 0; x < terms.size(); ++x) {
    Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(da, da);
    for (int i = 0; i < da; ++i) perm(i, terms[x].perm[static_cast<std::size_t>(i)]) = 1.0;
    Eigen::MatrixXcd u = u_psi * perm * u_phi.adjoint();
    Eigen::MatrixXcd kx = std::sqrt(terms[x].weight) * phi_sqrt * u.adjoint() * psi_inv_sqrt;
    std::string label = std::to_string(x);
    measure.labels.push_back(label);
    measure.kraus.push_back(kx);

    Eigen::MatrixXcd mb = kx * m_psi;
    double nb = mb.norm();
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(db, db);
    if (nb * nb > kBranchPrune) {
      Eigen::MatrixXcd wt = polar_unitary(pseudo_inverse(mb / nb) * m_phi);
      Eigen::MatrixXcd corrected = mb * wt;
      double fid = std::abs((m_phi.adjoint() * corrected).trace()) / corrected.norm();
      if (fid < 1.0 - 1e-9)
        throw NumericError("branch correction missed the target state");
      w = wt.transpose();
    }
    ProtocolCase c;
    c.on = std::vector<std::string>{label};
    c.instrument.labels = {"c"};
    c.instrument.kraus = {w};
    corrections.push_back(std::move(c));
  }

  if (psi.schmidt_rank() < da) {
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(da, da);
    for (int k = 0; k < psi.schmidt_rank(); ++k)
      proj += u_psi.col(k) * u_psi.col(k).adjoint();
    measure.labels.push_back("null");
    measure.kraus.push_back(Eigen::MatrixXcd::Identity(da, da) - proj);
    ProtocolCase c;
    c.on = std::vector<std::string>{"null"};
    c.instrument.labels = {"c"};
    c.instrument.kraus = {Eigen::MatrixXcd::Identity(db, db)};
    corrections.push_back(std::move(c));
  }

  LoccProtocol proto;
  ProtocolRound r1;
  r1.party = 'A';
  ProtocolCase all;
  all.instrument = std::move(measure);
  r1.cases.push_back(std::move(all));
  proto.rounds.push_back(std::move(r1));
  ProtocolRound r2;
  r2.party = 'B';
  r2.cases = std::move(corrections);
  proto.rounds.push_back(std::move(r2));
  return proto;
}

std::vector<SimBranch> simulate_protocol(const BipartitePureState& psi,
                                         const LoccProtocol& protocol) {
  for (std::size_t ri = 0; ri < protocol.rounds.size(); ++ri) {
    const auto& round = protocol.rounds[ri];
    if (round.party != 'A' && round.party != 'B')
      throw InputError("round party must be A or B");
    if (round.cases.empty()) throw InputError("round has no instrument cases");
    for (const auto& c : round.cases) {
      const auto& ins = c.instrument;
      if (ins.kraus.empty() || ins.kraus.size() != ins.labels.size())
        throw InputError("instrument must pair one label with each Kraus operator");
      Eigen::Index dim = ins.kraus[0].cols();
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
      for (const auto& k : ins.kraus) {
        if (k.cols() != dim)
          throw InputError("instrument Kraus operators must share an input dimension");
        sum += k.adjoint() * k;
      }
      double dev = (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
      if (dev > kCompletenessTol)
        throw InputError("instrument in round " + std::to_string(ri) +
                         " does not sum to the identity");
    }
  }

  std::vector<SimBranch> branches;
  branches.push_back({{}, 1.0, state_matrix(psi)});
  double pruned = 0.0;
  for (const auto& round : protocol.rounds) {
    std::vector<SimBranch> next;
    for (auto& br : branches) {
      const ProtocolCase* chosen = nullptr;
      for (const auto& c : round.cases) {
        if (!c.on.has_value()) {
          if (!chosen) chosen = &c;
        } else if (*c.on == br.transcript) {
          chosen = &c;
          break;
        }
      }
      if (!chosen)
        throw InputError("no instrument case matches a transcript");
      const auto& ins = chosen->instrument;
      for (std::size_t o = 0; o < ins.kraus.size(); ++o) {
        const auto& k = ins.kraus[o];
        Eigen::MatrixXcd m;
        if (round.party == 'A') {
          if (k.cols() != br.state.rows())
            throw InputError("Kraus operator does not fit the A side");
          m = k * br.state;
        } else {
          if (k.cols() != br.state.cols())
            throw InputError("Kraus operator does not fit the B side");
          m = br.state * k.transpose();
        }
        double pr = m.squaredNorm();
        if (pr < kBranchPrune) {
          pruned += pr;
          continue;
        }
        SimBranch nb;
        nb.transcript = br.transcript;
        nb.transcript.push_back(ins.labels[o]);
        nb.probability = pr;
        nb.state = std::move(m);
        next.push_back(std::move(nb));
      }
    }
    branches = std::move(next);
  }

  double total = pruned;
  for (auto& br : branches) {
    total += br.probability;
    br.state /= br.state.norm();
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericError("branch probabilities do not sum to one");
  return branches;
}

double overlap_with(const BipartitePureState& phi, const Eigen::MatrixXcd& branch) {
  Eigen::MatrixXcd m = state_matrix(phi);
  if (m.rows() != branch.rows() || m.cols() != branch.cols())
    throw InputError("branch dimensions do not match the reference state");
  return std::abs((m.adjoint() * branch).trace());
}

bool slocc_convertible(const BipartitePureState& psi, const BipartitePureState& phi,
                       double tol) {
  double rp = marginal_scale_a(psi).total_width();
  double rt = marginal_scale_a(phi).total_width();
  return rp >= rt - tol * std::max(1.0, rt);
}

double slocc_fidelity(const BipartitePureState& psi, const BipartitePureState& phi) {
  double r = marginal_scale_a(psi).total_width();
  double v = lorenz(marginal_scale_a(phi)).at(r);
  return std::min(v, 1.0);
}

double conversion_fidelity(const StepFunction& source, const StepFunction& target) {
  if (std::abs(source.integral() - 1.0) > 1e-9 || std::abs(target.integral() - 1.0) > 1e-9)
    throw InputError("conversion fidelity needs unit-integral scales");
  LorenzCurve lp = lorenz(source), lq = lorenz(target);
  std::vector<double> knots;
  knots.insert(knots.end(), lp.knots_t.begin(), lp.knots_t.end());
  knots.insert(knots.end(), lq.knots_t.begin(), lq.knots_t.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              knots.end());

  // Water-filling blocks: from the current knot, the optimal block ends at
  // the latest knot maximizing the slope ratio dP/dQ; on each block the
  // optimizer is proportional to the target, contributing sqrt(dP * dQ).
  double a = 0.0, fid = 0.0;
  while (true) {
    double pa = lp.at(a), qa = lq.at(a);
    double best_c = -1.0, best_t = -1.0, best_dp = 0.0, best_dq = 0.0;
    for (double t : knots) {
      if (t <= a + 1e-15) continue;
      double dq = lq.at(t) - qa;
      if (dq <= 1e-15) continue;
      double dp = std::max(lp.at(t) - pa, 0.0);
      double c = dp / dq;
      double tie = 1e-12 * (1.0 + std::abs(best_c));
      if (c > best_c + tie || (c > best_c - tie && t > best_t)) {
        best_c = c;
        best_t = t;
        best_dp = dp;
        best_dq = dq;
      }
    }
    if (best_t < 0.0) break;
    fid += std::sqrt(best_dp * best_dq);
    a = best_t;
  }
  return std::clamp(fid, 0.0, 1.0);
}

double locc_conversion_fidelity(const BipartitePureState& psi, const BipartitePureState& phi) {
  return conversion_fidelity(marginal_scale_a(psi), marginal_scale_a(phi));
}

MonotoneReport monotones(const BipartitePureState& psi, const std::vector<double>& alphas) {
  StepFunction sa = marginal_scale_a(psi), sb = marginal_scale_b(psi);
  if (l1_distance(sa, sb) > 1e-10 * std::max(sa.integral(), 1.0))
    throw NumericError("marginal scales of the two sides disagree");
  MonotoneReport rep;
  rep.alphas = alphas;
  for (double a : alphas) rep.renyi.push_back(renyi_of_scale(sa, a));
  rep.traced_rank = sa.total_width();
  rep.lorenz = lorenz(sa);
  return rep;
}

BipartitePureState canonical_purification(const Density& rho) {
  if (!rho.matrix_backed)
    throw InputError("canonical purification needs a matrix-backed density");
  if (std::abs(trace_of(rho) - 1.0) > 1e-8)
    throw InputError("canonical purification needs a unit-trace density");
  Eigen::VectorXd vals;
  Eigen::MatrixXcd vecs;
  hermitian_spectrum(rho.matrix, vals, vecs);
  Eigen::MatrixXcd root = vecs * vals.cwiseSqrt().asDiagonal() * vecs.adjoint();
  const int d = static_cast<int>(root.rows());
  Eigen::VectorXcd v(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v[static_cast<Eigen::Index>(i) * d + j] = root(i, j);
  v *= std::sqrt(rho.factor.trace_unit);
  return state_from_vector(v, d, d);
}

}  // namespace maj
