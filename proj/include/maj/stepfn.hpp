#pragma once

#include <functional>
#include <vector>

namespace maj {

// One level set of a decreasing step function: `value` held over `width`
// units of measure.
struct Piece {
  double value = 0.0;
  double width = 0.0;
};

// Canonical decreasing right-continuous step function on [0, inf) with
// finitely many pieces. Values are strictly decreasing and positive, widths
// positive; the function is 0 past the last piece. Everything downstream
// (Lorenz curves, spectral scales, distribution functions) is one of these.
struct StepFunction {
  std::vector<Piece> pieces;

  double total_width() const;
  double integral() const;
  double max_value() const { return pieces.empty() ? 0.0 : pieces.front().value; }
  // Evaluates the function at r >= 0 (right-continuous, 0 past the support).
  double at(double r) const;
  bool operator==(const StepFunction&) const = default;
};

// Sorts, merges values within relative 1e-12 (width-weighted), drops zeros.
// Rejects negative values, non-positive widths, non-finite entries.
StepFunction canonical(std::vector<Piece> pieces);

// Distribution function D_f(t) = measure{f > t}, itself a canonical
// decreasing step function of t.
StepFunction distribution(const StepFunction& f);

// Decreasing rearrangement as the double distribution function. Identity on
// canonical input; exposed because the involution is worth exercising.
StepFunction rearrange(const StepFunction& f);

// Piecewise-linear concave curve L(t) = integral of f over [0, t], constant
// past the support. knots_t starts at 0.
struct LorenzCurve {
  std::vector<double> knots_t;
  std::vector<double> knots_L;

  double at(double t) const;
  double total() const { return knots_L.empty() ? 0.0 : knots_L.back(); }
};

LorenzCurve lorenz(const StepFunction& f);

// L_f >= L_g everywhere, checked at the union of knots with additive slack
// tol * max(total integral of either side).
bool dominates(const StepFunction& f, const StepFunction& g, double tol = 1e-9);

// integral of phi(f) with phi convex, phi(0) = 0. The zero requirement comes
// from the infinite zero tail of the domain.
double convex_integral(const StepFunction& f, const std::function<double(double)>& phi);

// integral of (f - t)_+ for t >= 0.
double hockey_stick(const StepFunction& f, double t);

// integral of |f - g| over [0, inf).
double l1_distance(const StepFunction& f, const StepFunction& g);

// Level sets of the pointwise product f(s)g(u) under product measure: piece
// values multiply, widths multiply. The scale of a tensor product.
StepFunction scale_product(const StepFunction& f, const StepFunction& g);

// integral of sqrt(f * g) over the common domain; 1 iff the functions agree
// as unit-integral scales.
double scale_fidelity(const StepFunction& f, const StepFunction& g);

// A nonnegative quantity that may be infinite; used for cosupport masses of
// measure spaces with a symbolic infinite tail.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal inf() { return {0.0, true}; }
  ExtendedReal operator+(const ExtendedReal& o) const {
    if (infinite || o.infinite) return inf();
    return {value + o.value, false};
  }
};

}  // namespace maj
