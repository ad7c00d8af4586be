#include "maj/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "maj/errors.hpp"

namespace maj {

namespace {

constexpr double kConstraintTol = 1e-12;  // row/column sum slack, absolute
constexpr double kActionTol = 1e-10;      // relative L1 slack on Tf = g

double vec_total(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double approx_gcd(double a, double b, double eps) {
  while (b > eps) {
    double t = std::fmod(a, b);
    a = b;
    b = t;
  }
  return a;
}

// Refined atom in sorted order: which original atom it came from.
struct RefinedGrid {
  std::vector<double> values;  // sorted descending
  std::vector<int> atom;       // original atom index, -1 for padding/sink
};

RefinedGrid expand_sorted(const std::vector<double>& values,
                          const std::vector<long long>& counts) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  RefinedGrid g;
  for (int idx : order)
    for (long long c = 0; c < counts[idx]; ++c) {
      g.values.push_back(values[idx]);
      g.atom.push_back(idx);
    }
  return g;
}

// Chain of two-point averaging steps driving x onto y (both sorted
// descending, equal sums, x majorizing y). Each step is applied to the rows
// of R as well, so R accumulates (chain matrix) * (initial R).
void averaging_chain(Eigen::VectorXd& x, const Eigen::VectorXd& y, Eigen::MatrixXd& R) {
  const long long n = x.size();
  const double scale = std::max({x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff(), 1.0});
  const double eps = 1e-14 * scale;
  long long hi = n - 1;  // largest index that can still satisfy x_j > y_j
  long long steps = 0, max_steps = 2 * n + 16;
  while (true) {
    long long j = -1;
    for (long long r = hi; r >= 0; --r)
      if (x[r] > y[r] + eps) {
        j = r;
        break;
      }
    if (j < 0) break;
    long long k = -1;
    for (long long r = j + 1; r < n; ++r)
      if (x[r] < y[r] - eps) {
        k = r;
        break;
      }
    if (k < 0) break;  // nothing left to receive; residual checked by caller
    double over = x[j] - y[j], under = y[k] - x[k];
    double delta = std::min(over, under);
    double lam = 1.0 - delta / (x[j] - x[k]);
    Eigen::RowVectorXd rj = R.row(j), rk = R.row(k);
    R.row(j) = lam * rj + (1.0 - lam) * rk;
    R.row(k) = (1.0 - lam) * rj + lam * rk;
    if (over <= under) {
      x[k] += delta;
      x[j] = y[j];
    } else {
      x[j] -= delta;
      x[k] = y[k];
    }
    hi = j;
    if (++steps > max_steps)
      throw NumericError("averaging chain failed to converge");
  }
}

void verify_action(const StochasticMap& T, const WeightedVector& f,
                   const WeightedVector& g) {
  Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.size());
  Eigen::VectorXd out = T.apply(fv);
  double err = 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    err += g.masses[static_cast<std::size_t>(i)] * std::abs(out[i] - g.values[static_cast<std::size_t>(i)]);
  double denom = std::max(f.total_integral(), g.total_integral());
  if (denom > 0.0 && err > kActionTol * denom)
    throw NumericError("synthesized map misses its target beyond tolerance");
}

}  // namespace

double WeightedVector::total_integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += values[j] * masses[j];
  return s;
}

ExtendedReal WeightedVector::total_mass() const {
  if (infinite_tail) return ExtendedReal::inf();
  return {vec_total(masses), false};
}

ExtendedReal WeightedVector::cosupport_mass() const {
  if (infinite_tail) return ExtendedReal::inf();
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] == 0.0) s += masses[j];
  return {s, false};
}

WeightedVector weighted(std::vector<double> values, std::vector<double> masses,
                        bool infinite_tail) {
  if (values.size() != masses.size())
    throw InputError("values and masses must have equal length");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("values must be finite and nonnegative");
  for (double m : masses)
    if (!std::isfinite(m) || m <= 0.0)
      throw InputError("masses must be finite and positive");
  return {std::move(values), std::move(masses), infinite_tail};
}

StepFunction scale_of(const WeightedVector& f) {
  std::vector<Piece> ps;
  ps.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f.values[j] > 0.0) ps.push_back({f.values[j], f.masses[j]});
  return canonical(std::move(ps));
}

bool check_submajorization(const WeightedVector& f, const WeightedVector& g, double tol) {
  return dominates(scale_of(f), scale_of(g), tol);
}

bool check_majorization(const WeightedVector& f, const WeightedVector& g, double tol) {
  double sf = f.total_integral(), sg = g.total_integral();
  if (std::abs(sf - sg) > tol * std::max({sf, sg, 1.0})) return false;
  return check_submajorization(f, g, tol);
}

bool is_doubly_substochastic(const StochasticMap& T, double tol) {
  const auto& M = T.matrix;
  if (M.rows() != T.target_masses.size() || M.cols() != T.source_masses.size())
    throw InputError("matrix shape does not match the mass lists");
  if ((M.array() < -tol).any()) return false;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (M.row(i).sum() > 1.0 + tol) return false;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    double wc = T.target_masses.dot(M.col(j));
    if (wc > T.source_masses[j] + tol * std::max(1.0, T.source_masses[j])) return false;
  }
  return true;
}

bool is_doubly_stochastic(const StochasticMap& T, double tol) {
  const auto& M = T.matrix;
  if (M.rows() != T.target_masses.size() || M.cols() != T.source_masses.size())
    throw InputError("matrix shape does not match the mass lists");
  if ((M.array() < -tol).any()) return false;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (std::abs(M.row(i).sum() - 1.0) > tol) return false;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    double wc = T.target_masses.dot(M.col(j));
    if (std::abs(wc - T.source_masses[j]) > tol * std::max(1.0, T.source_masses[j])) return false;
  }
  return true;
}

namespace detail {

Refinement common_refinement(const std::vector<double>& a, const std::vector<double>& b,
                             long long cap) {
  double mmax = 0.0;
  for (double m : a) mmax = std::max(mmax, m);
  for (double m : b) mmax = std::max(mmax, m);
  if (mmax <= 0.0) throw NumericError("no masses to refine");
  double g = 0.0;
  const double eps = 1e-9 * mmax;
  for (double m : a) g = g == 0.0 ? m : approx_gcd(std::max(g, m), std::min(g, m), eps);
  for (double m : b) g = g == 0.0 ? m : approx_gcd(std::max(g, m), std::min(g, m), eps);
  if (g <= eps) throw NumericError("masses admit no common refinement unit");
  Refinement r;
  r.unit = g;
  long long total = 0;
  auto convert = [&](const std::vector<double>& ms, std::vector<long long>& out) {
    for (double m : ms) {
      long long c = std::llround(m / g);
      if (c < 1 || std::abs(c * g - m) > 1e-9 * mmax)
        throw NumericError("mass is not a near-integer multiple of the refinement unit");
      total += c;
      if (total > cap) throw NumericError("refinement exceeds the atom cap");
      out.push_back(c);
    }
  };
  convert(a, r.counts_a);
  convert(b, r.counts_b);
  return r;
}

}  // namespace detail

StochasticMap synthesize_ds(const WeightedVector& f, const WeightedVector& g, double tol) {
  if (f.infinite_tail || g.infinite_tail)
    throw InputError("doubly stochastic synthesis needs finite total mass");
  double mu = vec_total(f.masses), nu = vec_total(g.masses);
  if (std::abs(mu - nu) > tol * std::max({mu, nu, 1.0}))
    throw InputError("total masses differ: no doubly stochastic map can exist");
  if (!check_majorization(f, g, tol))
    throw NotMajorized("source does not majorize target");

  auto ref = detail::common_refinement(f.masses, g.masses);
  long long ns = std::accumulate(ref.counts_a.begin(), ref.counts_a.end(), 0LL);
  long long nt = std::accumulate(ref.counts_b.begin(), ref.counts_b.end(), 0LL);
  if (ns != nt) throw NumericError("refined spaces disagree in atom count");
  if (ns * static_cast<long long>(std::max(f.size(), g.size())) > 20000000LL)
    throw NumericError("refined synthesis problem too large");

  RefinedGrid src = expand_sorted(f.values, ref.counts_a);
  RefinedGrid tgt = expand_sorted(g.values, ref.counts_b);
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(src.values.data(), ns);
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(tgt.values.data(), nt);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(ns, static_cast<Eigen::Index>(f.size()));
  for (long long r = 0; r < ns; ++r) R(r, src.atom[static_cast<std::size_t>(r)]) = 1.0;

  averaging_chain(x, y, R);

  StochasticMap T;
  T.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()),
                                   static_cast<Eigen::Index>(f.size()));
  for (long long r = 0; r < nt; ++r)
    T.matrix.row(tgt.atom[static_cast<std::size_t>(r)]) += R.row(r);
  for (std::size_t i = 0; i < g.size(); ++i)
    T.matrix.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(ref.counts_b[i]);
  T.source_masses = Eigen::Map<const Eigen::VectorXd>(f.masses.data(), f.size());
  T.target_masses = Eigen::Map<const Eigen::VectorXd>(g.masses.data(), g.size());

  if (!is_doubly_stochastic(T, kConstraintTol))
    throw NumericError("synthesized map drifted off the doubly stochastic constraints");
  verify_action(T, f, g);
  return T;
}

StochasticMap synthesize_dss(const WeightedVector& f, const WeightedVector& g, double tol) {
  if (!check_submajorization(f, g, tol))
    throw NotSubmajorized("source does not submajorize target");

  std::vector<int> sj, ti;  // original indices of supp f and supp g
  std::vector<double> sv, sm, tv, tm;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f.values[j] > 0.0) {
      sj.push_back(static_cast<int>(j));
      sv.push_back(f.values[j]);
      sm.push_back(f.masses[j]);
    }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.values[i] > 0.0) {
      ti.push_back(static_cast<int>(i));
      tv.push_back(g.values[i]);
      tm.push_back(g.masses[i]);
    }

  StochasticMap T;
  T.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()),
                                   static_cast<Eigen::Index>(f.size()));
  T.source_masses = Eigen::Map<const Eigen::VectorXd>(f.masses.data(), f.size());
  T.target_masses = Eigen::Map<const Eigen::VectorXd>(g.masses.data(), g.size());
  if (sv.empty()) return T;  // f vanishes, so does g (submajorization)

  auto ref = detail::common_refinement(sm, tm);
  const double u = ref.unit;
  long long nx = std::accumulate(ref.counts_a.begin(), ref.counts_a.end(), 0LL);
  long long ny = std::accumulate(ref.counts_b.begin(), ref.counts_b.end(), 0LL);
  double sum_f = f.total_integral(), sum_g = g.total_integral();
  double delta = std::max(sum_f - sum_g, 0.0);
  double ymin = tv.empty() ? std::numeric_limits<double>::infinity()
                           : *std::min_element(tv.begin(), tv.end());
  long long n_sink = std::max(nx - ny, 0LL);
  if (delta > 1e-15 * std::max(sum_f, 1.0)) {
    long long need = static_cast<long long>(std::ceil(delta / (u * ymin) - 1e-12));
    n_sink = std::max({n_sink, need, 1LL});
  }
  long long N = ny + n_sink;
  if (N * static_cast<long long>(sv.size()) > 20000000LL)
    throw NumericError("refined synthesis problem too large");

  RefinedGrid src = expand_sorted(sv, ref.counts_a);
  RefinedGrid tgt = expand_sorted(tv, ref.counts_b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  for (long long r = 0; r < nx; ++r) x[r] = src.values[static_cast<std::size_t>(r)];
  Eigen::VectorXd y(N);
  double sup_sum = 0.0;
  for (long long r = 0; r < ny; ++r) {
    y[r] = tgt.values[static_cast<std::size_t>(r)];
    sup_sum += y[r];
  }
  if (n_sink > 0) {
    double vs = (x.sum() - sup_sum) / static_cast<double>(n_sink);
    vs = std::max(vs, 0.0);
    for (long long r = ny; r < N; ++r) y[r] = vs;
  }

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, static_cast<Eigen::Index>(sv.size()));
  for (long long r = 0; r < nx; ++r) R(r, src.atom[static_cast<std::size_t>(r)]) = 1.0;

  averaging_chain(x, y, R);

  for (long long r = 0; r < ny; ++r) {
    int local = tgt.atom[static_cast<std::size_t>(r)];
    Eigen::Index row = ti[static_cast<std::size_t>(local)];
    for (std::size_t c = 0; c < sv.size(); ++c)
      T.matrix(row, sj[c]) += R(r, static_cast<Eigen::Index>(c)) /
                              static_cast<double>(ref.counts_b[static_cast<std::size_t>(local)]);
  }

  if (!is_doubly_substochastic(T, kConstraintTol))
    throw NumericError("synthesized map drifted off the substochastic constraints");
  verify_action(T, f, g);
  return T;
}

DsExtension ds_extension_exists(const StochasticMap& T, const std::vector<bool>& omega,
                                bool source_tail, bool target_tail, double tol) {
  const auto& M = T.matrix;
  if (static_cast<Eigen::Index>(omega.size()) != M.cols())
    throw InputError("omega mask must cover every source atom");
  if (!is_doubly_substochastic(T, 1e-9))
    throw InputError("map is not doubly substochastic");
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (!omega[static_cast<std::size_t>(j)]) continue;
    double wc = T.target_masses.dot(M.col(j));
    if (std::abs(wc - T.source_masses[j]) > 1e-9 * std::max(1.0, T.source_masses[j]))
      throw InputError("map does not preserve integrals on omega");
  }

  DsExtension out;
  double off = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    if (!omega[static_cast<std::size_t>(j)]) off += T.source_masses[j];
  out.cosupport_source = source_tail ? ExtendedReal::inf() : ExtendedReal{off, false};

  Eigen::VectorXd row_on_omega = Eigen::VectorXd::Zero(M.rows());
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    if (omega[static_cast<std::size_t>(j)]) row_on_omega += M.col(j);
  double deficit = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    deficit += T.target_masses[i] * std::max(1.0 - row_on_omega[i], 0.0);
  out.deficit_target = target_tail ? ExtendedReal::inf() : ExtendedReal{deficit, false};

  if (out.cosupport_source.infinite || out.deficit_target.infinite) {
    out.exists = out.cosupport_source.infinite && out.deficit_target.infinite;
    return out;
  }
  double lhs = out.cosupport_source.value, rhs = out.deficit_target.value;
  out.exists = std::abs(lhs - rhs) <= tol * std::max({lhs, rhs, 1.0});
  if (!out.exists) return out;

  StochasticMap ext = T;
  if (lhs > 0.0) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (omega[static_cast<std::size_t>(j)]) continue;
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        ext.matrix(i, j) =
            std::max(1.0 - row_on_omega[i], 0.0) * T.source_masses[j] / lhs;
    }
  }
  out.extension = std::move(ext);
  return out;
}

}  // namespace maj
