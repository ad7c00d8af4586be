#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "maj/stepfn.hpp"

namespace maj {

// A nonnegative function on a discrete measure space: value f_j on an atom
// of mass mu_j. infinite_tail marks extra atoms of infinite total mass where
// f vanishes (the cosupport tail); it never carries function values.
struct WeightedVector {
  std::vector<double> values;
  std::vector<double> masses;
  bool infinite_tail = false;

  std::size_t size() const { return values.size(); }
  double total_integral() const;
  ExtendedReal total_mass() const;
  // mass where the function vanishes, including the symbolic tail
  ExtendedReal cosupport_mass() const;
};

// Validates sizes, positivity of masses, nonnegativity of values.
WeightedVector weighted(std::vector<double> values, std::vector<double> masses,
                        bool infinite_tail = false);

// The decreasing rearrangement of f as a step function (zero values drop out;
// they only matter through the space they occupy, which the Lorenz curve
// ignores).
StepFunction scale_of(const WeightedVector& f);

// Lorenz dominance of f over g: L_f >= L_g with slack tol * max total.
bool check_submajorization(const WeightedVector& f, const WeightedVector& g,
                           double tol = 1e-9);

// Submajorization plus equal integrals (same slack).
bool check_majorization(const WeightedVector& f, const WeightedVector& g,
                        double tol = 1e-9);

// Positive linear map between discrete spaces in matrix form: rows index
// target atoms, columns source atoms, action (Tf)_i = sum_j T_ij f_j.
// Doubly substochastic means row sums <= 1 (subunital) and mass-weighted
// column sums sum_i nu_i T_ij <= mu_j (integrals never increase); doubly
// stochastic means both hold with equality.
struct StochasticMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd source_masses;
  Eigen::VectorXd target_masses;

  Eigen::VectorXd apply(const Eigen::VectorXd& values) const { return matrix * values; }
};

// Constraint checks with absolute slack tol on each row/column sum.
bool is_doubly_substochastic(const StochasticMap& T, double tol = 1e-12);
bool is_doubly_stochastic(const StochasticMap& T, double tol = 1e-12);

// Constructs a doubly stochastic T with Tf = g. Requires finite spaces of
// equal total mass; throws NotMajorized when f does not majorize g. Built by
// refining both spaces to a common atom mass, running a chain of two-point
// averaging steps on the sorted refined vectors, and coarsening back.
StochasticMap synthesize_ds(const WeightedVector& f, const WeightedVector& g,
                            double tol = 1e-9);

// Constructs a doubly substochastic T with Tf = g under submajorization
// only. Columns outside supp f and rows outside supp g are zero. Internally
// pads the target with a sink that absorbs the integral surplus, synthesizes
// a doubly stochastic map, and drops the sink rows.
StochasticMap synthesize_dss(const WeightedVector& f, const WeightedVector& g,
                             double tol = 1e-9);

struct DsExtension {
  bool exists = false;
  ExtendedReal cosupport_source;  // mass of X outside Omega
  ExtendedReal deficit_target;    // integral of 1 - T(chi_Omega) over Y
  // Present when exists and both sides are finite: a doubly stochastic map on
  // the full spaces agreeing with T on functions supported in Omega.
  std::optional<StochasticMap> extension;
};

// Decides whether a doubly substochastic T that preserves integrals on the
// sub-space spanned by the atoms in `omega` extends to a doubly stochastic
// map of the full spaces. The criterion is the balance identity
// mu(X \ Omega) = integral over Y of (1 - T chi_Omega) dnu, compared as
// extended reals (f and g supply the symbolic tails). Throws InputError when
// T is not substochastic or not integral-preserving on omega.
DsExtension ds_extension_exists(const StochasticMap& T, const std::vector<bool>& omega,
                                bool source_tail, bool target_tail, double tol = 1e-9);

namespace detail {

// Common refinement of two mass lists: finds a unit u such that every mass
// is an integer multiple within relative 1e-9, with the total atom count
// capped. Throws NumericError when no such unit exists or the cap is hit.
struct Refinement {
  double unit = 0.0;
  std::vector<long long> counts_a;
  std::vector<long long> counts_b;
};
Refinement common_refinement(const std::vector<double>& a, const std::vector<double>& b,
                             long long cap = 1000000);

}  // namespace detail

}  // namespace maj
