#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "maj/stepfn.hpp"

namespace maj {

// Spectral scale of the n-fold product state with one-site weights
// (1, lambda)/(1+lambda): level lambda^k/(1+lambda)^n with multiplicity
// n choose k. Exact in double up to the cap.
StepFunction powers_marginal_scale(double lambda, int n, int cap = 30);

// Scale of the same state reinterpreted against a trace scaled down by n:
// levels multiply by n, widths divide by n. Input must have unit integral
// and support width at most 1.
StepFunction distill_target_scale(const StepFunction& s, double n);

// Best conversion fidelity between psi and phi after adjoining n copies of
// the lambda product state as a catalyst, for each n in n_list.
std::vector<std::pair<int, double>> trivialization_trend(
    double lambda, const StepFunction& psi_marg, const StepFunction& phi_marg,
    const std::vector<int>& n_list, int cap = 30);

struct SeesawOptions {
  int restarts = 16;
  int iters = 200;
  double conv_tol = 1e-10;
  std::uint64_t seed = 1;
};

// Largest CHSH value of rho on C^da (x) C^db over +-1-valued observables,
// by alternating sign-operator updates from random starts. Returns the best
// value found; it is a lower bound that is tight in practice at these sizes.
double chsh_seesaw(const Eigen::MatrixXcd& rho, int da, int db,
                   const SeesawOptions& opt = {});

}  // namespace maj
