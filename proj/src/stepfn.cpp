#include "maj/stepfn.hpp"

#include <algorithm>
#include <cmath>

#include "maj/errors.hpp"

namespace maj {

namespace {

constexpr double kMergeRelTol = 1e-12;

bool mergeable(double a, double b) {
  return std::abs(a - b) <= kMergeRelTol * std::max(a, b);
}

// Two-pointer walk over the union of breakpoints of two canonical step
// functions; emits (value_f, value_g, segment_length) with value 0 past
// either support.
template <class Fn>
void walk_segments(const StepFunction& f, const StepFunction& g, Fn&& emit) {
  std::size_t i = 0, j = 0;
  double f_end = f.pieces.empty() ? 0.0 : f.pieces[0].width;
  double g_end = g.pieces.empty() ? 0.0 : g.pieces[0].width;
  double pos = 0.0;
  while (i < f.pieces.size() || j < g.pieces.size()) {
    bool fa = i < f.pieces.size();
    bool ga = j < g.pieces.size();
    double vf = fa ? f.pieces[i].value : 0.0;
    double vg = ga ? g.pieces[j].value : 0.0;
    double next = fa && ga ? std::min(f_end, g_end) : (fa ? f_end : g_end);
    if (next > pos) emit(vf, vg, next - pos);
    pos = next;
    if (fa && f_end <= pos) {
      ++i;
      if (i < f.pieces.size()) f_end += f.pieces[i].width;
    }
    if (ga && g_end <= pos) {
      ++j;
      if (j < g.pieces.size()) g_end += g.pieces[j].width;
    }
  }
}

}  // namespace

double StepFunction::total_width() const {
  double w = 0.0;
  for (const auto& p : pieces) w += p.width;
  return w;
}

double StepFunction::integral() const {
  double s = 0.0;
  for (const auto& p : pieces) s += p.value * p.width;
  return s;
}

double StepFunction::at(double r) const {
  if (r < 0.0) throw InputError("step function argument must be nonnegative");
  double acc = 0.0;
  for (const auto& p : pieces) {
    acc += p.width;
    if (r < acc) return p.value;
  }
  return 0.0;
}

StepFunction canonical(std::vector<Piece> pieces) {
  for (const auto& p : pieces) {
    if (!std::isfinite(p.value) || p.value < 0.0)
      throw InputError("piece value must be finite and nonnegative");
    if (!std::isfinite(p.width) || p.width <= 0.0)
      throw InputError("piece width must be finite and positive");
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.value > b.value; });
  StepFunction out;
  for (const auto& p : pieces) {
    if (!out.pieces.empty() && mergeable(out.pieces.back().value, p.value)) {
      Piece& q = out.pieces.back();
      double w = q.width + p.width;
      q.value = (q.value * q.width + p.value * p.width) / w;
      q.width = w;
    } else {
      out.pieces.push_back(p);
    }
  }
  std::erase_if(out.pieces, [](const Piece& p) { return p.value <= 0.0; });
  return out;
}

StepFunction distribution(const StepFunction& f) {
  const auto& ps = f.pieces;
  std::vector<double> W(ps.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    cum += ps[i].width;
    W[i] = cum;
  }
  // level W[r] is held for t in [next smaller value, value at r); iterating
  // r from the bottom piece up emits levels in decreasing order
  std::vector<Piece> out;
  out.reserve(ps.size());
  for (std::size_t r = ps.size(); r-- > 0;) {
    double below = (r + 1 < ps.size()) ? ps[r + 1].value : 0.0;
    out.push_back({W[r], ps[r].value - below});
  }
  return canonical(std::move(out));
}

StepFunction rearrange(const StepFunction& f) { return distribution(distribution(f)); }

double LorenzCurve::at(double t) const {
  if (t < 0.0) throw InputError("lorenz argument must be nonnegative");
  if (knots_t.empty()) return 0.0;
  if (t >= knots_t.back()) return knots_L.back();
  auto it = std::upper_bound(knots_t.begin(), knots_t.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - knots_t.begin());
  if (hi == 0) return knots_L.front();
  double t0 = knots_t[hi - 1], t1 = knots_t[hi];
  double l0 = knots_L[hi - 1], l1 = knots_L[hi];
  return l0 + (l1 - l0) * (t - t0) / (t1 - t0);
}

LorenzCurve lorenz(const StepFunction& f) {
  LorenzCurve c;
  c.knots_t.push_back(0.0);
  c.knots_L.push_back(0.0);
  double w = 0.0, s = 0.0;
  for (const auto& p : f.pieces) {
    w += p.width;
    s += p.value * p.width;
    c.knots_t.push_back(w);
    c.knots_L.push_back(s);
  }
  return c;
}

bool dominates(const StepFunction& f, const StepFunction& g, double tol) {
  LorenzCurve lf = lorenz(f), lg = lorenz(g);
  double slack = tol * std::max({lf.total(), lg.total(), 1.0});
  for (double t : lf.knots_t)
    if (lf.at(t) < lg.at(t) - slack) return false;
  for (double t : lg.knots_t)
    if (lf.at(t) < lg.at(t) - slack) return false;
  return true;
}

double convex_integral(const StepFunction& f, const std::function<double(double)>& phi) {
  if (std::abs(phi(0.0)) > 1e-12)
    throw InputError("phi(0) must vanish: the domain has an infinite zero tail");
  double s = 0.0;
  for (const auto& p : f.pieces) s += phi(p.value) * p.width;
  return s;
}

double hockey_stick(const StepFunction& f, double t) {
  if (t < 0.0) throw InputError("hockey-stick level must be nonnegative");
  double s = 0.0;
  for (const auto& p : f.pieces) s += std::max(p.value - t, 0.0) * p.width;
  return s;
}

double l1_distance(const StepFunction& f, const StepFunction& g) {
  double s = 0.0;
  walk_segments(f, g, [&](double vf, double vg, double len) { s += std::abs(vf - vg) * len; });
  return s;
}

StepFunction scale_product(const StepFunction& f, const StepFunction& g) {
  std::vector<Piece> prod;
  prod.reserve(f.pieces.size() * g.pieces.size());
  for (const auto& a : f.pieces)
    for (const auto& b : g.pieces) prod.push_back({a.value * b.value, a.width * b.width});
  return canonical(std::move(prod));
}

double scale_fidelity(const StepFunction& f, const StepFunction& g) {
  double s = 0.0;
  walk_segments(f, g, [&](double vf, double vg, double len) { s += std::sqrt(vf * vg) * len; });
  return s;
}

}  // namespace maj
