#include <cmath>
#include <numeric>

#include "doctest.h"
#include "maj/classical.hpp"
#include "maj/errors.hpp"
#include "maj/rng.hpp"
#include "oracles.hpp"

using namespace maj;

namespace {

// y = random mixture of x by a chain of two-point averaging steps, so y is
// always majorized by x (unit masses).
std::vector<double> mix_down(Rng& rng, std::vector<double> x, int steps) {
  for (int s = 0; s < steps; ++s) {
    std::size_t i = static_cast<std::size_t>(rng.uniform() * x.size());
    std::size_t j = static_cast<std::size_t>(rng.uniform() * x.size());
    if (i == j) continue;
    double lam = 0.5 * rng.uniform();
    double xi = x[i], xj = x[j];
    x[i] = (1.0 - lam) * xi + lam * xj;
    x[j] = lam * xi + (1.0 - lam) * xj;
  }
  return x;
}

std::vector<double> random_probs(Rng& rng, int d) {
  Eigen::VectorXd v = rng.simplex_sorted(d);
  return {v.data(), v.data() + d};
}

void check_ds_action(const StochasticMap& t, const WeightedVector& f,
                     const WeightedVector& g) {
  Eigen::VectorXd vf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vf[static_cast<Eigen::Index>(i)] = f.values[i];
  Eigen::VectorXd got = t.apply(vf);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err += std::abs(got[static_cast<Eigen::Index>(i)] - g.values[i]) * g.masses[i];
  CHECK(err <= 1e-9 * std::max(1.0, f.total_integral()));
}

}  // namespace

TEST_SUITE("classical") {

TEST_CASE("weighted vector validation and scale") {
  CHECK_THROWS_AS(weighted({1.0}, {0.0}), InputError);
  CHECK_THROWS_AS(weighted({1.0}, {1.0, 2.0}), InputError);
  CHECK_THROWS_AS(weighted({-1.0}, {1.0}), InputError);

  WeightedVector f = weighted({1.0, 3.0, 2.0, 0.0}, {1.0, 0.5, 2.0, 4.0});
  StepFunction s = scale_of(f);
  REQUIRE(s.pieces.size() == 3);
  CHECK(s.pieces[0].value == 3.0);
  CHECK(s.pieces[0].width == 0.5);
  CHECK(s.pieces[1].value == 2.0);
  CHECK(s.pieces[1].width == 2.0);
  CHECK(s.pieces[2].value == 1.0);
  CHECK(s.pieces[2].width == 1.0);
  CHECK(f.total_integral() == doctest::Approx(6.5));
  CHECK(!f.total_mass().infinite);
  CHECK(f.total_mass().value == doctest::Approx(7.5));
  CHECK(f.cosupport_mass().value == doctest::Approx(4.0));
  CHECK(weighted({1.0}, {1.0}, true).cosupport_mass().infinite);
}

TEST_CASE("majorization checks on knowns") {
  WeightedVector pure = weighted({1.0, 0.0}, {1.0, 1.0});
  WeightedVector flat = weighted({0.5, 0.5}, {1.0, 1.0});
  CHECK(check_submajorization(pure, flat));
  CHECK(check_majorization(pure, flat));
  CHECK(!check_submajorization(flat, pure));
  CHECK(!check_majorization(flat, pure));

  // strict submajorization without equal integrals
  WeightedVector big = weighted({1.0, 0.5}, {1.0, 1.0});
  WeightedVector small = weighted({0.9, 0.4}, {1.0, 1.0});
  CHECK(check_submajorization(big, small));
  CHECK(!check_majorization(big, small));

  // incomparable pair
  WeightedVector a = weighted({0.9, 0.0}, {1.0, 1.0});
  CHECK(!check_submajorization(a, flat));
  CHECK(!check_submajorization(flat, a));
}

TEST_CASE("synthesize_ds on the pure-to-flat example") {
  WeightedVector f = weighted({1.0, 0.0}, {1.0, 1.0});
  WeightedVector g = weighted({0.5, 0.5}, {1.0, 1.0});
  StochasticMap t = synthesize_ds(f, g);
  CHECK(is_doubly_stochastic(t, 1e-12));
  CHECK(t.matrix(0, 0) == doctest::Approx(0.5));
  CHECK(t.matrix(1, 0) == doctest::Approx(0.5));
  check_ds_action(t, f, g);
  CHECK_THROWS_AS(synthesize_ds(g, f), NotMajorized);
}

TEST_CASE("synthesize_ds with unequal masses") {
  WeightedVector f = weighted({2.0, 0.0}, {0.5, 1.5});
  WeightedVector g = weighted({0.7, 0.3}, {1.0, 1.0});
  REQUIRE(check_majorization(f, g));
  StochasticMap t = synthesize_ds(f, g);
  CHECK(is_doubly_stochastic(t, 1e-10));
  check_ds_action(t, f, g);

  // mass totals differ -> input error
  WeightedVector h = weighted({0.4, 0.3}, {1.0, 2.0});
  CHECK_THROWS_AS(synthesize_ds(f, h), InputError);
}

TEST_CASE("common refinement limits") {
  detail::Refinement r = detail::common_refinement({1.0, 0.5}, {0.25, 1.25});
  CHECK(r.unit == doctest::Approx(0.25));
  CHECK(r.counts_a == std::vector<long long>{4, 2});
  CHECK(r.counts_b == std::vector<long long>{1, 5});
  CHECK_THROWS_AS(detail::common_refinement({1.0}, {3.14159265358979}, 1000),
                  NumericError);
  CHECK_THROWS_AS(detail::common_refinement({1.0}, {1e-7}, 1000000), NumericError);
}

TEST_CASE("random ds synthesis agrees with the transform oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform() * 5);
    std::vector<double> x = random_probs(rng, d);
    std::vector<double> y = mix_down(rng, x, 2 * d);
    std::vector<double> ones(static_cast<std::size_t>(d), 1.0);
    WeightedVector f = weighted(x, ones);
    WeightedVector g = weighted(y, ones);
    REQUIRE(oracle::tt_feasible(x, y));
    StochasticMap t = synthesize_ds(f, g);
    CHECK(is_doubly_stochastic(t, 1e-10));
    check_ds_action(t, f, g);
  }
}

TEST_CASE("synthesize_dss handles strict surplus and supports") {
  WeightedVector f = weighted({1.0, 0.5}, {1.0, 1.0});
  WeightedVector g = weighted({0.7, 0.2}, {1.0, 1.0});
  StochasticMap t = synthesize_dss(f, g);
  CHECK(is_doubly_substochastic(t, 1e-10));
  check_ds_action(t, f, g);

  // source zero column must stay zero
  WeightedVector f0 = weighted({1.0, 0.0}, {1.0, 1.0});
  WeightedVector g0 = weighted({0.6, 0.2}, {1.0, 1.0});
  StochasticMap t0 = synthesize_dss(f0, g0);
  CHECK(is_doubly_substochastic(t0, 1e-10));
  check_ds_action(t0, f0, g0);
  CHECK(std::abs(t0.matrix(0, 1)) + std::abs(t0.matrix(1, 1)) == 0.0);

  // target zero row must stay zero
  WeightedVector g1 = weighted({0.7, 0.0}, {1.0, 1.0});
  StochasticMap t1 = synthesize_dss(f, g1);
  CHECK(is_doubly_substochastic(t1, 1e-10));
  CHECK(std::abs(t1.matrix(1, 0)) + std::abs(t1.matrix(1, 1)) == 0.0);

  CHECK_THROWS_AS(synthesize_dss(g, f), NotSubmajorized);
}

TEST_CASE("random dss synthesis under shrunk mixtures") {
  Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform() * 4);
    std::vector<double> x = random_probs(rng, d);
    std::vector<double> y = mix_down(rng, x, d);
    double gamma = 0.3 + 0.7 * rng.uniform();
    for (double& v : y) v *= gamma;
    std::vector<double> ones(static_cast<std::size_t>(d), 1.0);
    WeightedVector f = weighted(x, ones);
    WeightedVector g = weighted(y, ones);
    REQUIRE(check_submajorization(f, g));
    StochasticMap t = synthesize_dss(f, g);
    CHECK(is_doubly_substochastic(t, 1e-10));
    check_ds_action(t, f, g);
  }
}

TEST_CASE("extension obstruction on the size-3 shift") {
  // T shifts atoms 2,3 of the source onto a 2-atom target; substochastic
  // and integral-preserving on omega = {2,3}, but the missing unit of
  // source mass has nowhere to go.
  StochasticMap t;
  t.matrix.resize(2, 3);
  t.matrix << 0, 1, 0, 0, 0, 1;
  t.source_masses = Eigen::VectorXd::Ones(3);
  t.target_masses = Eigen::VectorXd::Ones(2);
  std::vector<bool> omega{false, true, true};
  DsExtension ext = ds_extension_exists(t, omega, false, false);
  CHECK(!ext.exists);
  CHECK(ext.cosupport_source.value == doctest::Approx(1.0));
  CHECK(ext.deficit_target.value == doctest::Approx(0.0));

  // balanced variant: add a third target atom; now the deficit matches
  StochasticMap tb;
  tb.matrix.resize(3, 3);
  tb.matrix << 0, 1, 0, 0, 0, 1, 0, 0, 0;
  tb.source_masses = Eigen::VectorXd::Ones(3);
  tb.target_masses = Eigen::VectorXd::Ones(3);
  DsExtension extb = ds_extension_exists(tb, omega, false, false);
  CHECK(extb.exists);
  REQUIRE(extb.extension.has_value());
  CHECK(is_doubly_stochastic(*extb.extension, 1e-12));
  // agreement on omega columns
  CHECK((extb.extension->matrix.col(1) - tb.matrix.col(1)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((extb.extension->matrix.col(2) - tb.matrix.col(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("extension with symbolic tails") {
  StochasticMap t;
  t.matrix.resize(2, 2);
  t.matrix << 1, 0, 0, 1;
  t.source_masses = Eigen::VectorXd::Ones(2);
  t.target_masses = Eigen::VectorXd::Ones(2);
  std::vector<bool> omega{true, true};

  // both sides carry infinite tails: extendable in the symbolic sense
  DsExtension both = ds_extension_exists(t, omega, true, true);
  CHECK(both.exists);
  CHECK(both.cosupport_source.infinite);
  CHECK(!both.extension.has_value());

  // infinite source surplus, zero target deficit: impossible
  DsExtension lop = ds_extension_exists(t, omega, true, false);
  CHECK(!lop.exists);

  // balanced finite identity: trivially extendable (it is already DS)
  DsExtension fin = ds_extension_exists(t, omega, false, false);
  CHECK(fin.exists);
}

TEST_CASE("extension input validation") {
  StochasticMap bad;
  bad.matrix.resize(2, 2);
  bad.matrix << 0.9, 0.9, 0.9, 0.9;  // row sums 1.8
  bad.source_masses = Eigen::VectorXd::Ones(2);
  bad.target_masses = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(ds_extension_exists(bad, {true, true}, false, false), InputError);

  StochasticMap notip;
  notip.matrix.resize(2, 2);
  notip.matrix << 0.5, 0, 0, 0.5;  // substochastic but loses mass on omega
  notip.source_masses = Eigen::VectorXd::Ones(2);
  notip.target_masses = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(ds_extension_exists(notip, {true, true}, false, false), InputError);
}

TEST_CASE("hull oracle sanity at small dimension") {
  CHECK(oracle::hull_member({0.7, 0.3}, {0.5, 0.5}));
  CHECK(oracle::hull_member({0.7, 0.3}, {0.3, 0.7}));
  CHECK(!oracle::hull_member({0.7, 0.3}, {0.8, 0.2}));
  CHECK(oracle::hull_member({0.5, 0.3, 0.2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK(!oracle::hull_member({0.5, 0.3, 0.2}, {0.6, 0.3, 0.1}));
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> x = random_probs(rng, 3);
    std::vector<double> y = mix_down(rng, x, 6);
    CHECK(oracle::hull_member(x, y));
    CHECK(oracle::tt_feasible(x, y) == oracle::hull_member(x, y));
  }
}

}  // TEST_SUITE
