#include <cmath>
#include <vector>

#include "doctest.h"
#include "maj/errors.hpp"
#include "maj/itpfi.hpp"
#include "maj/quantum.hpp"
#include "maj/rng.hpp"
#include "oracles.hpp"

using namespace maj;

namespace {

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& v) {
  return v * v.adjoint();
}

Eigen::VectorXcd lambda_state(double lambda) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[0] = 1.0 / std::sqrt(1.0 + lambda);
  v[3] = std::sqrt(lambda / (1.0 + lambda));
  return v;
}

Eigen::MatrixXcd random_density4(Rng& rng) {
  Eigen::MatrixXcd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.cgauss();
  Eigen::MatrixXcd m = a * a.adjoint();
  return m / m.trace().real();
}

}  // namespace

TEST_SUITE("itpfi") {

TEST_CASE("product state scales") {
  StepFunction flat = powers_marginal_scale(1.0, 3);
  REQUIRE(flat.pieces.size() == 1);
  CHECK(flat.pieces[0].value == doctest::Approx(0.125));
  CHECK(flat.pieces[0].width == doctest::Approx(8.0));

  StepFunction one = powers_marginal_scale(0.5, 1);
  REQUIRE(one.pieces.size() == 2);
  CHECK(one.pieces[0].value == doctest::Approx(2.0 / 3.0));
  CHECK(one.pieces[1].value == doctest::Approx(1.0 / 3.0));

  StepFunction two = powers_marginal_scale(0.5, 2);
  REQUIRE(two.pieces.size() == 3);
  CHECK(two.pieces[0].value == doctest::Approx(4.0 / 9.0));
  CHECK(two.pieces[0].width == doctest::Approx(1.0));
  CHECK(two.pieces[1].value == doctest::Approx(2.0 / 9.0));
  CHECK(two.pieces[1].width == doctest::Approx(2.0));
  CHECK(two.pieces[2].value == doctest::Approx(1.0 / 9.0));

  StepFunction degen = powers_marginal_scale(0.0, 7);
  REQUIRE(degen.pieces.size() == 1);
  CHECK(degen.pieces[0].value == doctest::Approx(1.0));
  CHECK(degen.pieces[0].width == doctest::Approx(1.0));

  for (double lam : {0.0, 0.1, 0.5, 0.9, 1.0})
    for (int n : {1, 5, 15, 30})
      CHECK(powers_marginal_scale(lam, n).integral() ==
            doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(powers_marginal_scale(0.5, 31), InputError);
  CHECK_THROWS_AS(powers_marginal_scale(1.2, 2), InputError);
  CHECK_THROWS_AS(powers_marginal_scale(-0.1, 2), InputError);
  CHECK_THROWS_AS(powers_marginal_scale(0.5, 0), InputError);
}

TEST_CASE("entropies add across copies") {
  for (double lam : {0.3, 0.7, 1.0}) {
    StepFunction single = powers_marginal_scale(lam, 1);
    for (int n : {2, 5, 9}) {
      StepFunction many = powers_marginal_scale(lam, n);
      for (double alpha : {0.0, 0.5, 1.0, 2.0})
        CHECK(renyi_of_scale(many, alpha) ==
              doctest::Approx(n * renyi_of_scale(single, alpha)).epsilon(1e-10));
    }
  }
}

TEST_CASE("rescaling against a smaller trace") {
  StepFunction unif = canonical({{1.0, 1.0}});
  StepFunction half = distill_target_scale(unif, 2.0);
  REQUIRE(half.pieces.size() == 1);
  CHECK(half.pieces[0].value == doctest::Approx(2.0));
  CHECK(half.pieces[0].width == doctest::Approx(0.5));

  StepFunction same = distill_target_scale(unif, 1.0);
  CHECK(l1_distance(same, unif) <= 1e-12);

  StepFunction skew = canonical({{1.5, 0.5}, {0.5, 0.5}});
  StepFunction out = distill_target_scale(skew, 2.0);
  REQUIRE(out.pieces.size() == 2);
  CHECK(out.pieces[0].value == doctest::Approx(3.0));
  CHECK(out.pieces[0].width == doctest::Approx(0.25));
  CHECK(out.pieces[1].value == doctest::Approx(1.0));
  CHECK(out.pieces[1].width == doctest::Approx(0.25));

  // multiplying back by the flat scale of total width n recovers the input
  StepFunction back = scale_product(out, canonical({{0.5, 2.0}}));
  CHECK(l1_distance(back, skew) <= 1e-12);

  CHECK_THROWS_AS(distill_target_scale(canonical({{2.0, 1.0}}), 2.0), InputError);
  CHECK_THROWS_AS(distill_target_scale(canonical({{0.5, 2.0}}), 2.0), InputError);
}

TEST_CASE("catalyst trend values") {
  StepFunction point = canonical({{1.0, 1.0}});
  StepFunction bell = canonical({{0.5, 2.0}});

  auto t05 = trivialization_trend(0.5, point, bell, {1, 2});
  REQUIRE(t05.size() == 2);
  CHECK(t05[0].first == 1);
  CHECK(t05[0].second == doctest::Approx(0.804737854124365).epsilon(1e-12));
  CHECK(t05[1].second == doctest::Approx(0.8102809710982162).epsilon(1e-12));

  auto t03 = trivialization_trend(0.3, point, bell, {1, 2, 4, 8, 20});
  CHECK(std::abs(t03[0].second - 0.84185) < 1e-5);
  CHECK(std::abs(t03[1].second - 0.856684) < 1e-5);
  CHECK(std::abs(t03[2].second - 0.906321) < 1e-5);
  CHECK(std::abs(t03[3].second - 0.947809) < 1e-5);
  CHECK(std::abs(t03[4].second - 0.980538) < 1e-5);

  // a maximally mixed one-site factor never helps this pair
  auto t10 = trivialization_trend(1.0, point, bell, {1, 5, 20});
  for (const auto& [n, f] : t10)
    CHECK(f == doctest::Approx(0.7071067811865476).epsilon(1e-9));
  auto t00 = trivialization_trend(0.0, point, bell, {1, 5, 20});
  for (const auto& [n, f] : t00)
    CHECK(f == doctest::Approx(0.7071067811865476).epsilon(1e-9));
}

TEST_CASE("catalyst trend is monotone and fixes identical pairs") {
  StepFunction point = canonical({{1.0, 1.0}});
  StepFunction bell = canonical({{0.5, 2.0}});
  std::vector<int> ns;
  for (int n = 1; n <= 10; ++n) ns.push_back(n);
  for (double lam : {0.3, 0.5, 1.0}) {
    auto tr = trivialization_trend(lam, point, bell, ns);
    for (std::size_t k = 1; k < tr.size(); ++k)
      CHECK(tr[k].second >= tr[k - 1].second - 1e-9);
  }
  for (const auto& [n, f] : trivialization_trend(0.5, bell, bell, {1, 3, 7}))
    CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlation seesaw on known states") {
  SeesawOptions opt;
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(chsh_seesaw(pure_density(bell), 2, 2, opt) -
                 2.8284271247461903) < 1e-6);

  Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(4);
  prod[0] = 1.0;
  CHECK(std::abs(chsh_seesaw(pure_density(prod), 2, 2, opt) - 2.0) < 1e-6);

  CHECK(std::abs(chsh_seesaw(pure_density(lambda_state(0.5)), 2, 2, opt) -
                 2.748737083745107) < 1e-6);

  for (double lam : {0.25, 0.75}) {
    double expect = 2.0 * std::sqrt(1.0 + 4.0 * lam / ((1.0 + lam) * (1.0 + lam)));
    CHECK(std::abs(chsh_seesaw(pure_density(lambda_state(lam)), 2, 2, opt) -
                   expect) < 1e-6);
  }
}

TEST_CASE("seesaw respects the global bound and the exact two-qubit value") {
  Rng rng(46);
  SeesawOptions opt;
  opt.restarts = 24;
  double lim = 2.0 * std::sqrt(2.0);
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::MatrixXcd rho = random_density4(rng);
    double got = chsh_seesaw(rho, 2, 2, opt);
    double exact = oracle::chsh_exact(rho);
    CHECK(got <= lim + 1e-9);
    CHECK(got <= exact + 1e-9);
    CHECK(got >= exact - 1e-6);
  }
  // planar scan agrees for the partially entangled family
  for (double lam : {0.3, 0.8}) {
    Eigen::MatrixXcd rho = pure_density(lambda_state(lam));
    CHECK(std::abs(chsh_seesaw(rho, 2, 2, opt) - oracle::chsh_xz_scan(rho)) <
          1e-3);
  }
}

TEST_CASE("seesaw is deterministic and validates input") {
  Rng rng(47);
  Eigen::MatrixXcd rho = random_density4(rng);
  SeesawOptions opt;
  opt.seed = 99;
  double a = chsh_seesaw(rho, 2, 2, opt);
  double b = chsh_seesaw(rho, 2, 2, opt);
  CHECK(a == b);

  CHECK_THROWS_AS(chsh_seesaw(2.0 * rho, 2, 2), InputError);
  CHECK_THROWS_AS(chsh_seesaw(rho, 2, 3), InputError);
  SeesawOptions bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(chsh_seesaw(rho, 2, 2, bad), InputError);
}

}  // TEST_SUITE
