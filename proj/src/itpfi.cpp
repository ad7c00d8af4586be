#include "maj/itpfi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "maj/errors.hpp"
#include "maj/locc.hpp"
#include "maj/quantum.hpp"
#include "maj/rng.hpp"

namespace maj {

StepFunction powers_marginal_scale(double lambda, int n, int cap) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InputError("powers_marginal_scale: lambda must lie in [0, 1]");
  if (n < 1) throw InputError("powers_marginal_scale: n must be positive");
  if (n > cap)
    throw InputError("powers_marginal_scale: n exceeds cap " +
                     std::to_string(cap) +
                     "; binomial widths would lose exactness");
  double norm = std::pow(1.0 + lambda, n);
  std::vector<Piece> ps;
  ps.reserve(static_cast<std::size_t>(n) + 1);
  double binom = 1.0;  // n choose k, exact below the cap
  double pw = 1.0;     // lambda^k
  for (int k = 0; k <= n; ++k) {
    double v = pw / norm;
    if (v > 0.0) ps.push_back({v, binom});
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    pw *= lambda;
  }
  return canonical(std::move(ps));
}

StepFunction distill_target_scale(const StepFunction& s, double n) {
  if (!(n >= 1.0)) throw InputError("distill_target_scale: n must be >= 1");
  if (std::abs(s.integral() - 1.0) > 1e-9)
    throw InputError("distill_target_scale: input scale must have unit integral");
  if (s.total_width() > 1.0 + 1e-9)
    throw InputError(
        "distill_target_scale: support exceeds the unit trace bound");
  std::vector<Piece> ps;
  ps.reserve(s.pieces.size());
  for (const Piece& p : s.pieces) ps.push_back({p.value * n, p.width / n});
  StepFunction out = canonical(std::move(ps));
  // Undoing the trace rescale must give back the input.
  StepFunction back = scale_product(out, StepFunction{{{1.0 / n, n}}});
  if (l1_distance(back, s) > 1e-12 * std::max(1.0, s.integral()))
    throw NumericError("distill_target_scale: rescale self-check failed");
  return out;
}

std::vector<std::pair<int, double>> trivialization_trend(
    double lambda, const StepFunction& psi_marg, const StepFunction& phi_marg,
    const std::vector<int>& n_list, int cap) {
  if (std::abs(psi_marg.integral() - 1.0) > 1e-9 ||
      std::abs(phi_marg.integral() - 1.0) > 1e-9)
    throw InputError("trivialization_trend: marginals must have unit integral");
  std::vector<std::pair<int, double>> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    StepFunction cat = powers_marginal_scale(lambda, n, cap);
    double f = conversion_fidelity(scale_product(cat, psi_marg),
                                   scale_product(cat, phi_marg));
    out.emplace_back(n, f);
  }
  return out;
}

namespace {

// Sign operator of a Hermitian matrix, with sign(0) taken as +1 so the
// result is always a +-1-valued observable. The input may be indefinite.
Eigen::MatrixXcd sign_operator(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      ((h + h.adjoint()) * 0.5).eval());
  if (es.info() != Eigen::Success)
    throw NumericError("chsh_seesaw: eigendecomposition failed");
  Eigen::VectorXd s(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s[i] = es.eigenvalues()[i] < 0.0 ? -1.0 : 1.0;
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd random_observable(Rng& rng, int d) {
  Eigen::MatrixXcd u = rng.unitary(d);
  Eigen::VectorXd s(d);
  for (int i = 0; i < d; ++i) s[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return u * s.asDiagonal() * u.adjoint();
}

}  // namespace

double chsh_seesaw(const Eigen::MatrixXcd& rho, int da, int db,
                   const SeesawOptions& opt) {
  if (da < 1 || db < 1 || rho.rows() != da * db || rho.cols() != da * db)
    throw InputError("chsh_seesaw: state shape does not match the local dims");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8 ||
      std::abs(rho.trace().imag()) > 1e-8)
    throw InputError("chsh_seesaw: state must have unit trace");
  {
    Eigen::VectorXd vals;
    Eigen::MatrixXcd vecs;
    hermitian_spectrum(rho, vals, vecs, {});
  }
  if (opt.restarts < 1 || opt.iters < 1)
    throw InputError("chsh_seesaw: restarts and iters must be positive");

  Eigen::MatrixXcd ia = Eigen::MatrixXcd::Identity(da, da);
  Eigen::MatrixXcd ib = Eigen::MatrixXcd::Identity(db, db);
  auto eff_a = [&](const Eigen::MatrixXcd& x) {
    return partial_trace_b(rho * kron(ia, x), da, db);
  };
  auto eff_b = [&](const Eigen::MatrixXcd& x) {
    return partial_trace_a(rho * kron(x, ib), da, db);
  };

  Rng rng(opt.seed);
  double best = -4.0;
  for (int r = 0; r < opt.restarts; ++r) {
    Eigen::MatrixXcd b1 = random_observable(rng, db);
    Eigen::MatrixXcd b2 = random_observable(rng, db);
    Eigen::MatrixXcd a1, a2;
    double beta = -4.0;
    for (int it = 0; it < opt.iters; ++it) {
      // Alice best response: A_i = sign of the operator it multiplies.
      Eigen::MatrixXcd e1 = eff_a(b1 + b2);
      Eigen::MatrixXcd e2 = eff_a(b1 - b2);
      a1 = sign_operator(e1);
      a2 = sign_operator(e2);
      // Bob best response against the new pair.
      Eigen::MatrixXcd g1 = eff_b(a1 + a2);
      Eigen::MatrixXcd g2 = eff_b(a1 - a2);
      b1 = sign_operator(g1);
      b2 = sign_operator(g2);
      double next = ((b1 * g1).trace() + (b2 * g2).trace()).real();
      if (std::abs(next - beta) < opt.conv_tol) {
        beta = next;
        break;
      }
      beta = next;
    }
    best = std::max(best, beta);
  }
  return best;
}

}  // namespace maj
