#include "doctest.h"
#include "helpers.hpp"
#include "../oracles.hpp"

#include "ems/design.hpp"
#include "ems/entropy.hpp"
#include "ems/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ems;

TEST_SUITE("entropy") {

TEST_CASE("prob_distribution examples") {
  CHECK(prob_distribution(vec({1, 0, 0, 0})).p.isApprox(vec({1, 0, 0, 0})));
  CHECK(prob_distribution(vec({1, 1, 1, 1})).p.isApprox(vec({0.25, 0.25, 0.25, 0.25})));
  const auto p = prob_distribution(vec({2, 1})).p;
  CHECK(p(0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_ERRC(prob_distribution(Eigen::VectorXd::Zero(3)), Errc::ZeroVector);
  CHECK_ERRC(prob_distribution(vec({1e-16, 0})), Errc::ZeroVector);
}

TEST_CASE("prob_distribution sums to one under fuzzing") {
  Rng rng(101);
  for (int t = 0; t < 500; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + rng.index(40));
    Eigen::VectorXd v(n);
    const double scale = std::pow(10.0, 12.0 * rng.uniform() - 6.0);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
    const auto p = prob_distribution(v).p;
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);
  }
}

TEST_CASE("shannon_entropy examples") {
  auto r = shannon_entropy(vec({5, 0, 0}));
  CHECK(r.entropy == 0.0);
  CHECK(r.theoretical_dimension == 1);
  CHECK(r.vector_length == 3);

  r = shannon_entropy(vec({1, 1, 1, 1}));
  CHECK(r.entropy == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(r.theoretical_dimension == 4);

  // -(0.8 ln 0.8 + 0.2 ln 0.2), 30-digit reference value.
  r = shannon_entropy(vec({2, 1}));
  CHECK(std::abs(r.entropy - 0.500402423538187879533) < 1e-15);
  CHECK(r.theoretical_dimension == 2);

  CHECK_ERRC(shannon_entropy(Eigen::VectorXd::Zero(2)), Errc::ZeroVector);
}

TEST_CASE("entropy agrees with a long double reference") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng.index(63));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal() * (rng.uniform() < 0.3 ? 0.0 : 1.0);
    if (v.squaredNorm() == 0.0) v(0) = 1.0;
    CHECK(std::abs(entropy_nats(v) - static_cast<double>(oracle::entropy(v))) < 1e-13);
  }
}

TEST_CASE("entropy bounds, equality only for equal magnitudes") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng.index(30));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    const double h = entropy_nats(v);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
    // Random magnitudes are never all equal, so the bound is strict.
    CHECK(h < std::log(static_cast<double>(n)) - 1e-6);

    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = rng.sign() * 2.5;
    CHECK(std::abs(entropy_nats(u) - std::log(static_cast<double>(n))) < 1e-12);
    CHECK(shannon_entropy(u).theoretical_dimension == static_cast<std::size_t>(n));
  }
}

TEST_CASE("entropy is scale invariant") {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(10);
    for (Eigen::Index i = 0; i < 10; ++i) v(i) = rng.normal();
    for (double beta : {-3.0, 1e-5, 7.0, 1e6}) CHECK(std::abs(entropy_nats(beta * v) - entropy_nats(v)) < 1e-12);
  }
}

TEST_CASE("theoretical dimension is one exactly for one-hot vectors") {
  for (Eigen::Index n = 1; n <= 20; ++n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v(i) = -3.0;
      CHECK(shannon_entropy(v).theoretical_dimension == 1);
    }
    Eigen::VectorXd two = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n, 2));
    two(0) = 1.0;
    two(1) = 1e-3;
    CHECK(shannon_entropy(two).theoretical_dimension == 2);
  }
  CHECK(theoretical_dimension(100.0, 8) == 8);
  CHECK(theoretical_dimension(0.0, 8) == 1);
}

TEST_CASE("check_bounds examples") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
  c(0) = 1.0;
  auto b = check_bounds(c, vec({1, 1, 1, 1}));
  CHECK(b.h_c == 0.0);
  CHECK(b.k_est == 1);
  CHECK(b.h_y == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(b.m == 4);
  CHECK(b.meff == 4);
  CHECK(b.entropy_bounds_pass);
  CHECK(b.meff_cond_pass);

  b = check_bounds(Eigen::VectorXd::Ones(8), vec({1, 0, 0, 0}));
  CHECK(b.k_est == 8);
  CHECK(b.h_y == 0.0);
  CHECK_FALSE(b.entropy_bounds_pass);
  CHECK_FALSE(b.meff_cond_pass);

  // Reference values from a 30-digit evaluation.
  Eigen::VectorXd c3 = Eigen::VectorXd::Zero(8);
  c3(0) = 3.0;
  c3(1) = 1.0;
  b = check_bounds(c3, vec({1, 1, 1, 0.5}));
  CHECK(std::abs(b.h_c - 0.325082973391448) < 1e-14);
  CHECK(std::abs(b.h_y - 1.285293024120099) < 1e-14);
  CHECK(b.k_est == 2);
  CHECK(b.meff == 4);
  CHECK(b.entropy_bounds_pass);
  CHECK(b.meff_cond_pass);

  CHECK_ERRC(check_bounds(Eigen::VectorXd::Zero(3), vec({1, 1})), Errc::ZeroVector);
  CHECK_ERRC(check_bounds(vec({1, 1}), Eigen::VectorXd::Zero(3)), Errc::ZeroVector);
}

TEST_CASE("check_bounds treats H(y) = ln K as a failure") {
  // k_est = 2 and H(y) = ln 2 exactly.
  const auto b = check_bounds(vec({1, 1, 0, 0}), vec({1, 1, 0}));
  CHECK(b.k_est == 2);
  CHECK(b.h_y == doctest::Approx(std::log(2.0)));
  CHECK_FALSE(b.entropy_bounds_pass);
}

TEST_CASE("mutual_coherence examples") {
  CHECK(mutual_coherence(Eigen::MatrixXd::Identity(3, 3)) == 0.0);
  Eigen::MatrixXd par(2, 2);
  par << 1, 1, 0, 0;
  CHECK(mutual_coherence(par) == doctest::Approx(1.0));
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  CHECK(std::abs(mutual_coherence(a) - 0.707106781186547524) < 1e-15);

  Eigen::MatrixXd z(2, 3);
  z << 1, 0, 1, 0, 0, 1;
  CHECK_ERRC(mutual_coherence(z), Errc::ZeroColumn);
  CHECK_ERRC(mutual_coherence(Eigen::MatrixXd::Ones(3, 1)), Errc::InvalidSize);
}

TEST_CASE("mutual_coherence is invariant to column permutation and scaling") {
  const Eigen::MatrixXd a = random_gaussian_matrix(5, 9, 21);
  const double mu = mutual_coherence(a);
  CHECK(mu >= 0.0);
  CHECK(mu <= 1.0);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Eigen::Index> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    Eigen::MatrixXd b(5, 9);
    for (Eigen::Index j = 0; j < 9; ++j) b.col(j) = (0.1 + 10.0 * rng.uniform()) * rng.sign() * a.col(perm[j]);
    CHECK(mutual_coherence(b) == doctest::Approx(mu).epsilon(1e-14));
  }
}

TEST_CASE("spark_bruteforce examples") {
  CHECK(spark_bruteforce(Eigen::MatrixXd::Identity(3, 3)) == 4);
  Eigen::MatrixXd dup(3, 4);
  dup << 1, 2, 1, 0, 0, 1, 0, 3, 5, 1, 5, 1;
  CHECK(spark_bruteforce(dup) == 2);
  CHECK(spark_bruteforce(random_gaussian_matrix(3, 6, 99)) == 4);
  Eigen::MatrixXd zero_col = Eigen::MatrixXd::Identity(3, 4);
  CHECK(spark_bruteforce(zero_col) == 1);
  CHECK_ERRC(spark_bruteforce(Eigen::MatrixXd::Ones(2, 15)), Errc::TooLarge);
}

TEST_CASE("spark_bruteforce agrees with an LU rank enumeration") {
  Rng rng(5);
  for (int t = 0; t < 60; ++t) {
    const auto m = static_cast<Eigen::Index>(2 + rng.index(4));
    const auto n = static_cast<Eigen::Index>(m + 1 + rng.index(static_cast<std::uint64_t>(8 - m)));
    Eigen::MatrixXd a = random_gaussian_matrix(m, n, 1000 + static_cast<std::uint64_t>(t));
    // Plant a dependency in half of the cases: a combination of j columns.
    if (t % 2 == 0) {
      const auto j = static_cast<Eigen::Index>(1 + rng.index(static_cast<std::uint64_t>(m)));
      Eigen::VectorXd comb = Eigen::VectorXd::Zero(m);
      for (Eigen::Index i = 0; i < j; ++i) comb += rng.normal() * a.col(i);
      a.col(n - 1) = comb;
    }
    CHECK(spark_bruteforce(a) == oracle::spark(a));
  }
}

TEST_CASE("empirical_rip_deltas examples") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 4);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 3);
  c(0, 0) = 2.0;
  c(1, 1) = -1.0;
  c(0, 2) = 0.3;
  c(1, 2) = 0.4;
  CHECK(empirical_rip_deltas(a, c).cwiseAbs().maxCoeff() < 1e-15);

  const Eigen::VectorXd z = empirical_rip_deltas(Eigen::MatrixXd::Zero(2, 4), c);
  CHECK(z.isApprox(Eigen::VectorXd::Ones(3)));

  const Eigen::MatrixXd g = random_gaussian_matrix(5, 8, 17);
  const Eigen::MatrixXd onehot = Eigen::MatrixXd::Identity(8, 8);
  const Eigen::VectorXd d = empirical_rip_deltas(g, onehot);
  for (Eigen::Index j = 0; j < 8; ++j) CHECK(d(j) == doctest::Approx(std::abs(g.col(j).squaredNorm() - 1.0)));

  c.col(1).setZero();
  CHECK_ERRC(empirical_rip_deltas(a, c), Errc::ZeroColumn);
  CHECK_ERRC(empirical_rip_deltas(a, Eigen::MatrixXd::Ones(3, 2)), Errc::DimensionMismatch);
}

}  // TEST_SUITE
