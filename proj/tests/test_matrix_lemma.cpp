#include <catch2/catch.hpp>

#include <cmath>

#include "spinlab/matrix_lemma.hpp"

using namespace spinlab;

TEST_CASE("identity matrix", "[matrix_lemma]") {
  SddMatrix m{Matrix::identity(3), 1.0};
  auto rep = verify_inverse_positivity(m);
  CHECK(rep.pass);
  CHECK(rep.min_entry == 0.0);
  CHECK(rep.max_row_sum == Approx(1.0));
  CHECK(rep.residual_inf < 1e-14);
}

TEST_CASE("2x2 closed form", "[matrix_lemma]") {
  Matrix a(2, 2);
  a(0, 0) = 2.0; a(0, 1) = -1.0;
  a(1, 0) = -1.0; a(1, 1) = 2.0;
  SddMatrix m{a, 1.0};
  auto rep = verify_inverse_positivity(m);
  CHECK(rep.pass);
  Matrix inv = inverse(a);
  CHECK(inv(0, 0) == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(inv(0, 1) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(rep.max_row_sum == Approx(1.0).epsilon(1e-14));
  CHECK(rep.row_sum_limit == Approx(1.0));
}

TEST_CASE("invariant violations throw typed errors", "[matrix_lemma]") {
  Matrix a(2, 2);
  a(0, 0) = 2.0; a(0, 1) = 0.5;  // positive off-diagonal
  a(1, 0) = -1.0; a(1, 1) = 2.0;
  SddMatrix m{a, 0.5};
  CHECK_THROWS_AS(verify_inverse_positivity(m), Error);

  Matrix b(2, 2);
  b(0, 0) = 1.0; b(0, 1) = -0.9;
  b(1, 0) = -0.9; b(1, 1) = 1.0;
  SddMatrix weak{b, 0.5};  // margin only 0.1
  CHECK_THROWS_AS(verify_inverse_positivity(weak), Error);
}

TEST_CASE("random corpus passes at 1e-10", "[matrix_lemma]") {
  auto rows = run_matrix_corpus(100, 32, 424242, 1e-10, 2);
  for (const auto& r : rows) {
    CHECK(r.pass);
    CHECK(r.min_entry >= -1e-10);
    CHECK(r.max_row_sum <= 1.0 / r.delta + 1e-10);
  }
}

TEST_CASE("corpus is deterministic in the seed", "[matrix_lemma]") {
  auto a = run_matrix_corpus(20, 16, 7, 1e-10, 2);
  auto b = run_matrix_corpus(20, 16, 7, 1e-10, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].size == b[i].size);
    CHECK(a[i].min_entry == b[i].min_entry);
    CHECK(a[i].max_row_sum == b[i].max_row_sum);
  }
}

TEST_CASE("hypothesis scaling: (cA, c delta) passes iff (A, delta) does", "[matrix_lemma]") {
  CounterRng rng(99);
  for (int t = 0; t < 10; ++t) {
    SddMatrix m = random_sdd_matrix(rng, 6, 0.4);
    for (double c : {0.5, 3.0}) {
      Matrix scaled = m.a;
      for (std::size_t i = 0; i < scaled.rows(); ++i)
        for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= c;
      SddMatrix ms{scaled, c * m.delta};
      auto r1 = verify_inverse_positivity(m);
      auto r2 = verify_inverse_positivity(ms);
      CHECK(r1.pass == r2.pass);
    }
  }
}

TEST_CASE("semigroup probe", "[matrix_lemma]") {
  SECTION("identity decays without sign change") {
    SddMatrix m{Matrix::identity(2), 1.0};
    auto rep = semigroup_invariance_probe(m, {1.0, 1.0}, 5.0, 0.25);
    CHECK(rep.pass);
    CHECK(rep.min_over_time >= 0.0);
  }
  SECTION("coupled 2x2 stays nonnegative from (1,0)") {
    Matrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = -1.0;
    a(1, 0) = -1.0; a(1, 1) = 2.0;
    SddMatrix m{a, 1.0};
    auto rep = semigroup_invariance_probe(m, {1.0, 0.0}, 8.0, 0.2);
    CHECK(rep.pass);
    // eigen-decomposition: y_1(t) = (e^{-t} - e^{-3t})/2, nonnegative
    CHECK(rep.min_over_time >= -1e-15);
  }
  SECTION("zero start stays zero") {
    SddMatrix m{Matrix::identity(2), 1.0};
    auto rep = semigroup_invariance_probe(m, {0.0, 0.0}, 2.0, 0.25);
    CHECK(rep.min_over_time == 0.0);
  }
  SECTION("unstable step rejected") {
    SddMatrix m{Matrix::identity(2), 1.0};
    CHECK_THROWS_AS(semigroup_invariance_probe(m, {1.0, 1.0}, 2.0, 0.9), Error);
  }
}
