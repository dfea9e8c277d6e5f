#include <catch2/catch.hpp>

#include <cmath>

#include "oracles.hpp"
#include "spinlab/inequalities.hpp"
#include "spinlab/model.hpp"
#include "spinlab/quadrature.hpp"

using namespace spinlab;

namespace {

ModelSpec small_spec(int n, double c2, double coupling, double delta, SignPattern pat,
                     std::uint64_t seed = 0) {
  ModelSpec s;
  s.n_sites = n;
  s.c2 = c2;
  s.coupling_C = coupling;
  s.alpha = 1.0;
  s.delta = delta;
  s.sign_pattern = pat;
  s.sign_seed = seed;
  return s;
}

Matrix doubled_density_matrix(const DoubledModel& d) {
  const int n = d.n_sites();
  Matrix q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q(i, j) = d.couplings()(i, j);
      if (i == j) q(i, j) += 2.0 * d.potentials()[i].c2;
    }
  return q;
}

}  // namespace

TEST_CASE("fkg: constant tilt changes nothing", "[inequalities]") {
  OneDimensionalDensity nu{[](double z) { return 0.5 * z * z; }, 10.0};
  auto r = check_fkg(nu, [](double z) { return z; }, [](double) { return 1.0; });
  CHECK(std::abs(r.violation) < 1e-10);
  CHECK(r.pass);
}

TEST_CASE("fkg: Gaussian linear tilt hits the closed form", "[inequalities]") {
  // nu = N(0,1), f(z) = z, psi(z) = z: tilted mean is exactly -1
  OneDimensionalDensity nu{[](double z) { return 0.5 * z * z; }, 12.0};
  auto r = check_fkg(nu, [](double z) { return z; }, [](double z) { return z; });
  CHECK(r.violation == Approx(-1.0).epsilon(1e-9));  // lhs - rhs = -1 - 0
  CHECK(r.pass);
}

TEST_CASE("fkg: cubic observable under arctan tilt", "[inequalities]") {
  OneDimensionalDensity nu{[](double z) { return 0.5 * z * z; }, 12.0};
  auto r = check_fkg(nu, [](double z) { return z * z * z; },
                     [](double z) { return std::atan(z); });
  CHECK(r.pass);
  CHECK(r.violation <= 0.0);
}

TEST_CASE("fkg: opposite monotonicity is rejected", "[inequalities]") {
  OneDimensionalDensity nu{[](double z) { return 0.5 * z * z; }, 8.0};
  CHECK_THROWS_AS(
      check_fkg(nu, [](double z) { return z; }, [](double z) { return -z; }), Error);
}

TEST_CASE("gks ghost: decoupled when no positive couplings", "[inequalities]") {
  LatticeModel m = build_model(small_spec(2, 0.3, 0.5, 0.8, SignPattern::AllNegative));
  GhostModel g = make_ghost(m, {0.2, -0.4});
  CHECK(g.omega.empty());
  auto r = check_gks_ghost(g, 0, 1);
  CHECK(std::abs(r.violation) < 1e-12);
  CHECK(r.pass);
}

TEST_CASE("gks ghost: Gaussian n=2 against branch-sum closed form", "[inequalities]") {
  LatticeModel m = build_model(small_spec(2, 0.25, 0.6, 0.9, SignPattern::AllPositive));
  GhostModel g = make_ghost(m, {0.5, -0.3});
  // closed form from the two Gaussian branches
  Matrix qo = doubled_density_matrix(g.original);
  Matrix qa = doubled_density_matrix(g.attractive);
  double lzo = oracles::gaussian_log_partition(qo);
  double lza = oracles::gaussian_log_partition(qa);
  double eo = oracles::gaussian_cov(qo)(0, 1);
  double ea = oracles::gaussian_cov(qa)(0, 1);
  double wp = 1.0 / (1.0 + std::exp(lzo - lza));
  double wm = 1.0 - wp;
  double cov_sigma = (wp * ea - wm * eo) - (wp * ea + wm * eo) * (wp - wm);
  auto r = check_gks_ghost(g, 0, 1);
  CHECK(r.violation == Approx(-cov_sigma).margin(1e-10));
  CHECK(r.pass);
  CHECK(cov_sigma >= -1e-12);
}

TEST_CASE("gks ghost: quartic n=3 mixed signs", "[inequalities]") {
  ModelSpec s = small_spec(3, 0.1, 0.5, 0.7, SignPattern::SeededRandom, 17);
  s.c4 = 0.3;
  LatticeModel m = build_model(s);
  GhostModel g = make_ghost(m, {0.4, 0.0, -0.8});
  auto r = check_gks_ghost(g, 0, 2);
  CHECK(r.pass);
}

TEST_CASE("domination: coincides for all-negative couplings", "[inequalities]") {
  LatticeModel m = build_model(small_spec(2, 0.2, 0.4, 0.8, SignPattern::AllNegative));
  auto r = check_domination(m, {0.3, 0.3}, 0, 1);
  CHECK(r.pass);
  CHECK(r.violation <= 1e-12);
}

TEST_CASE("domination: Gaussian n=2 closed form both sides", "[inequalities]") {
  LatticeModel m = build_model(small_spec(2, 0.3, 0.7, 0.8, SignPattern::AllPositive));
  DoubledModel orig = double_model(m, {0.0, 0.0}, DoubledVariant::Original);
  DoubledModel attr = double_model(m, {0.0, 0.0}, DoubledVariant::Attractive);
  double co = oracles::gaussian_cov(doubled_density_matrix(orig))(0, 1);
  double ca = oracles::gaussian_cov(doubled_density_matrix(attr))(0, 1);
  CHECK(std::abs(co) <= ca + 1e-12);
  auto r = check_domination(m, {0.0, 0.0}, 0, 1);
  CHECK(r.violation == Approx(std::abs(co) - ca).margin(1e-9));
  CHECK(r.pass);
}

TEST_CASE("domination: quartic with cosine, random q corpus", "[inequalities]") {
  auto res = run_suite("domination", 12, 99, 2);
  CHECK(res.pass);
  CHECK(res.worst_violation <= 1e-9);
}

TEST_CASE("lebowitz: product measure gives zero both sides", "[inequalities]") {
  LatticeModel m = build_model(small_spec(4, 0.4, 0.0, 1.0, SignPattern::AllPositive));
  DoubledModel attr = double_model(m, {0.1, -0.2, 0.3, 0.0}, DoubledVariant::Attractive);
  auto r = check_lebowitz(attr, 0, 1, 2, 3);
  CHECK(std::abs(r.violation) < 1e-10);
}

TEST_CASE("lebowitz: Gaussian attractive n=4 is Wick-tight", "[inequalities]") {
  LatticeModel m =
      build_model(small_spec(4, 0.2, 0.4, 0.8, SignPattern::SeededRandom, 23));
  DoubledModel attr = double_model(m, {0.0, 0.0, 0.0, 0.0}, DoubledVariant::Attractive);
  auto r = check_lebowitz(attr, 0, 1, 2, 3);
  CHECK(std::abs(r.violation) <= 1e-9);
  CHECK(r.pass);
}

TEST_CASE("lebowitz: quartic attractive corpus", "[inequalities]") {
  auto res = run_suite("lebowitz", 12, 5, 2);
  CHECK(res.pass);
  CHECK(res.worst_violation <= 1e-9);
}

TEST_CASE("simon: zero coupling gives zero both sides", "[inequalities]") {
  LatticeModel m = build_model(small_spec(3, 0.4, 0.0, 1.0, SignPattern::AllPositive));
  DoubledModel attr = double_model(m, {0.0, 0.0, 0.0}, DoubledVariant::Attractive);
  auto r = check_simon(attr, {0}, 0, 2);
  CHECK(std::abs(r.violation) < 1e-10);
}

TEST_CASE("simon: Gaussian attractive n=3 closed form", "[inequalities]") {
  LatticeModel m = build_model(small_spec(3, 0.25, 0.5, 0.9, SignPattern::AllPositive));
  DoubledModel attr = double_model(m, {0.0, 0.0, 0.0}, DoubledVariant::Attractive);
  Matrix cov = oracles::gaussian_cov(doubled_density_matrix(attr));
  // closed-form two-term bound across A = {0} with per-bond weight 2|K_ln|
  double rhs = 0.0;
  for (int l : {0})
    for (int n : {1, 2})
      rhs += 2.0 * std::abs(attr.couplings()(l, n)) *
             (cov(0, l) * cov(n, 2) + cov(0, n) * cov(l, 2));
  double closed_violation = cov(0, 2) - rhs;
  auto r = check_simon(attr, {0}, 0, 2);
  CHECK(r.violation == Approx(closed_violation).margin(1e-9));
  CHECK(r.pass);
}

TEST_CASE("simon: weak-coupling Gaussian n=2 stays within the bond-doubled bound",
          "[inequalities]") {
  // with the per-bond weight 2|K_01| the bound holds for every coupling strength;
  // with weight |K_01| it would fail here, so this pins the convention
  LatticeModel m = build_model(small_spec(2, 0.5, 0.05, 1.2, SignPattern::AllPositive));
  DoubledModel attr = double_model(m, {0.0, 0.0}, DoubledVariant::Attractive);
  Matrix cov = oracles::gaussian_cov(doubled_density_matrix(attr));
  double w = std::abs(attr.couplings()(0, 1));
  double two_term = cov(0, 0) * cov(1, 1) + cov(0, 1) * cov(0, 1);
  CHECK(cov(0, 1) <= 2.0 * w * two_term + 1e-12);   // doubled: holds
  CHECK(cov(0, 1) > 1.0 * w * two_term);            // undoubled: fails at weak coupling
  auto r = check_simon(attr, {0}, 0, 1);
  CHECK(r.pass);
}

TEST_CASE("simon: quartic attractive corpus", "[inequalities]") {
  auto res = run_suite("simon", 12, 31, 2);
  CHECK(res.pass);
  CHECK(res.worst_violation <= 1e-9);
}

TEST_CASE("zegarlinski identity", "[inequalities]") {
  ModelSpec s = small_spec(4, 0.3, 0.5, 0.9, SignPattern::AllPositive);
  LatticeModel m = build_model(s);
  DoubledModel attr = double_model(m, {0.0, 0.0, 0.0, 0.0}, DoubledVariant::Attractive);
  BlockScheme two{{ {0, 1}, {2, 3} }};
  DoubledModel masked2 = mask_to_blocks(attr, two);

  SECTION("m = 0 is exact") {
    auto r = check_zegarlinski_identity(masked2, two, 0, 0, 3);
    CHECK(r.violation == 0.0);
  }
  SECTION("Gaussian m = 1 within 1e-8") {
    auto r = check_zegarlinski_identity(masked2, two, 1, 0, 3);
    CHECK(r.violation <= 1e-8);
    CHECK(r.pass);
  }
  SECTION("quartic three blocks m = 2") {
    ModelSpec sq = s;
    sq.c4 = 0.25;
    sq.c2 = 0.05;
    LatticeModel mq = build_model(sq);
    DoubledModel attr_q = double_model(mq, {0.4, -0.2, 0.1, 0.6}, DoubledVariant::Attractive);
    BlockScheme three{{ {0, 1}, {2}, {3} }};
    DoubledModel masked3 = mask_to_blocks(attr_q, three);
    // masking removed the couplings between non-adjacent blocks
    CHECK(masked3.couplings()(0, 3) == 0.0);
    CHECK(masked3.couplings()(1, 3) == 0.0);
    auto r = check_zegarlinski_identity(masked3, three, 2, 0, 3, {}, "");
    CHECK(r.violation <= 1e-8);
  }
  SECTION("sign flip on the first block negates the factor pointwise") {
    BlockScheme three{{ {0, 1}, {2}, {3} }};
    DoubledModel masked3 = mask_to_blocks(attr, three);
    double p[4] = {0.7, -0.4, 1.2, 0.5};
    double flipped[4] = {-0.7, 0.4, 1.2, 0.5};
    double f1 = block_tanh_factor(masked3, three, 1, std::span<const double>(p, 4));
    double f1_flipped =
        block_tanh_factor(masked3, three, 1, std::span<const double>(flipped, 4));
    CHECK(f1 == Approx(-f1_flipped).epsilon(1e-15));
  }
}

TEST_CASE("truncation gap", "[inequalities]") {
  SECTION("zero coupling: zero gap against zero mass") {
    LatticeModel m = build_model(small_spec(4, 0.4, 0.0, 1.0, SignPattern::AllPositive));
    auto r = check_truncation_gap(m, {0.0, 0.0, 0.0, 0.0}, 0, 3, 0.5);
    CHECK(std::abs(r.violation) < 1e-10);
  }
  SECTION("Gaussian instance passes with the moment bound") {
    LatticeModel m =
        build_model(small_spec(4, 0.2, 0.5, 0.8, SignPattern::SeededRandom, 41));
    auto r = check_truncation_gap(m, {0.1, -0.3, 0.2, 0.4}, 0, 3, 0.5);
    CHECK(r.pass);
  }
  SECTION("quartic instance passes") {
    ModelSpec s = small_spec(4, 0.1, 0.5, 0.8, SignPattern::AllPositive);
    s.c4 = 0.3;
    LatticeModel m = build_model(s);
    auto r = check_truncation_gap(m, {0.0, 0.5, -0.5, 0.2}, 0, 3, 0.4);
    CHECK(r.pass);
  }
}

TEST_CASE("suite runners are deterministic and pass", "[inequalities]") {
  for (const auto& suite : all_suites()) {
    auto a = run_suite(suite, 3, 12345, 2);
    auto b = run_suite(suite, 3, 12345, 1);
    INFO("suite " << suite << " worst " << a.worst_violation);
    CHECK(a.pass);
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t t = 0; t < a.reports.size(); ++t)
      CHECK(a.reports[t].violation == b.reports[t].violation);
  }
}

TEST_CASE("sampled variants agree at three standard errors", "[inequalities]") {
  ChainConfig cfg;
  cfg.seed = 4242;
  cfg.burn_in = 800;
  cfg.measure = 8000;

  SECTION("domination on a 8-site chain") {
    ModelSpec s = small_spec(8, 0.2, 0.4, 0.8, SignPattern::SeededRandom, 3);
    s.c4 = 0.1;
    LatticeModel m = build_model(s);
    std::vector<double> q(8, 0.25);
    auto r = check_domination_sampled(m, q, 1, 5, cfg);
    CHECK(r.provenance == Provenance::Sampled);
    CHECK(r.pass);
  }
  SECTION("lebowitz on a 6-site attractive chain") {
    ModelSpec s = small_spec(6, 0.3, 0.3, 0.9, SignPattern::AllPositive);
    LatticeModel m = build_model(s);
    DoubledModel attr =
        double_model(m, std::vector<double>(6, 0.0), DoubledVariant::Attractive);
    auto r = check_lebowitz_sampled(attr, 0, 2, 3, 5, cfg);
    CHECK(r.pass);
  }
  SECTION("simon on a 5-site attractive chain") {
    ModelSpec s = small_spec(5, 0.3, 0.3, 0.9, SignPattern::AllNegative);
    LatticeModel m = build_model(s);
    DoubledModel attr =
        double_model(m, std::vector<double>(5, 0.2), DoubledVariant::Attractive);
    auto r = check_simon_sampled(attr, {0, 1}, 0, 4, cfg);
    CHECK(r.pass);
  }
}
