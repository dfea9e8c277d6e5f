#include <catch2/catch.hpp>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "spinlab/model.hpp"
#include "spinlab/quadrature.hpp"
#include "spinlab/sampler.hpp"

using namespace spinlab;

namespace {

ModelSpec spec_for(int n, double c2, double coupling, double delta,
                   SignPattern pat = SignPattern::AllPositive) {
  ModelSpec s;
  s.n_sites = n;
  s.c2 = c2;
  s.coupling_C = coupling;
  s.alpha = 1.0;
  s.delta = delta;
  s.sign_pattern = pat;
  return s;
}

Matrix density_matrix(const LatticeModel& m) {
  const int n = m.n_sites();
  Matrix q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q(i, j) = 0.5 * m.interaction().entries(i, j);
      if (i == j) q(i, j) += m.potentials()[i].c2;
    }
  return q;
}

}  // namespace

TEST_CASE("product Gaussian pair covariance is consistent with zero", "[sampler]") {
  LatticeModel m = build_model(spec_for(4, 0.5, 0.0, 1.0));
  ChainConfig cfg;
  cfg.seed = 2024;
  cfg.burn_in = 500;
  cfg.measure = 8000;
  auto r = run_chains(m, cfg, {{0, 1}});
  const auto& row = r.table.rows[0];
  CHECK(std::abs(row.cov) <= 3.0 * row.se);
  CHECK(row.se > 0.0);
}

TEST_CASE("Gaussian chain matches the closed form within 3 SE", "[sampler]") {
  LatticeModel m = build_model(spec_for(8, 0.3, 0.4, 0.8));
  Matrix cov = oracles::gaussian_cov(density_matrix(m));
  ChainConfig cfg;
  cfg.seed = 31337;
  cfg.burn_in = 1500;
  cfg.measure = 30000;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8 && j - i <= 4; ++j) pairs.push_back({i, j});
  auto r = run_chains(m, cfg, pairs);
  CHECK(!r.stats.flagged);
  for (const auto& row : r.table.rows) {
    INFO("pair " << row.i << "," << row.j);
    CHECK(std::abs(row.cov - cov(row.i, row.j)) <= 3.0 * row.se);
  }
}

TEST_CASE("quartic with cosine matches the quadrature oracle", "[sampler]") {
  ModelSpec s = spec_for(3, 0.1, 0.5, 0.7, SignPattern::SeededRandom);
  s.sign_seed = 3;
  s.c4 = 0.25;
  s.bounded_B = 0.3;
  s.bounded_omega = 1.4;
  LatticeModel m = build_model(s);
  auto exact01 = covariance_exact(m, 0, 1);
  auto exact02 = covariance_exact(m, 0, 2);
  ChainConfig cfg;
  cfg.seed = 777;
  cfg.burn_in = 2000;
  cfg.measure = 40000;
  auto r = run_chains(m, cfg, {{0, 1}, {0, 2}});
  CHECK(std::abs(r.table.rows[0].cov - exact01.value) <= 3.0 * r.table.rows[0].se);
  CHECK(std::abs(r.table.rows[1].cov - exact02.value) <= 3.0 * r.table.rows[1].se);
}

TEST_CASE("same seed and config give identical results", "[sampler]") {
  LatticeModel m = build_model(spec_for(6, 0.2, 0.3, 0.6));
  ChainConfig cfg;
  cfg.seed = 5;
  cfg.burn_in = 200;
  cfg.measure = 2000;
  cfg.threads = 2;
  auto a = run_chains(m, cfg, {{0, 3}, {1, 4}});
  cfg.threads = 1;
  auto b = run_chains(m, cfg, {{0, 3}, {1, 4}});
  for (std::size_t k = 0; k < a.table.rows.size(); ++k) {
    CHECK(a.table.rows[k].cov == b.table.rows[k].cov);
    CHECK(a.table.rows[k].se == b.table.rows[k].se);
  }
}

TEST_CASE("doubled measure is centered", "[sampler]") {
  ModelSpec s = spec_for(3, 0.2, 0.5, 0.8, SignPattern::SeededRandom);
  s.c4 = 0.2;
  LatticeModel m = build_model(s);
  DoubledModel d = double_model(m, {0.7, -0.4, 1.2}, DoubledVariant::Original);
  GibbsDensity g = make_density(d);
  ChainConfig cfg;
  cfg.seed = 11;
  cfg.burn_in = 1000;
  cfg.measure = 20000;
  std::vector<std::function<double(const std::vector<double>&)>> means;
  for (int i = 0; i < 3; ++i)
    means.push_back([i](const std::vector<double>& x) { return x[i]; });
  auto r = run_chains(g, cfg, {{0, 1}}, means);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(r.extra_means[i]) <= 3.0 * std::max(r.extra_ses[i], 1e-12));
}

TEST_CASE("frozen kernel satisfies detailed balance on a coarse binning", "[sampler]") {
  LatticeModel m = build_model(spec_for(2, 0.5, 0.4, 1.0));
  GibbsDensity g = make_density(m);
  ChainConfig cfg;
  cfg.seed = 99;
  ChainDriver drv(g, cfg, 0);
  for (int t = 0; t < 2000; ++t) drv.sweep(true);  // adapt, then freeze

  auto bin_of = [](double v) {
    int b = static_cast<int>(std::floor((v + 2.0) / 1.0));
    return std::min(3, std::max(0, b));
  };
  std::map<std::pair<int, int>, long> flux;
  int prev = -1;
  const long steps = 400000;
  for (long t = 0; t < steps; ++t) {
    drv.sweep(false);
    int state = bin_of(drv.state()[0]) * 4 + bin_of(drv.state()[1]);
    if (prev >= 0 && state != prev) flux[{std::min(prev, state), std::max(prev, state)}] +=
        (prev < state ? 1 : -1);
    prev = state;
  }
  for (auto& [key, net] : flux) {
    // net flux between coarse bins should be zero within Monte Carlo noise
    CHECK(std::abs(static_cast<double>(net)) <= 5.0 * std::sqrt(static_cast<double>(steps) / 8.0));
  }
}

TEST_CASE("moment probe", "[sampler]") {
  SECTION("a = 0 gives exactly 1") {
    LatticeModel m = build_model(spec_for(2, 0.3, 0.2, 1.0));
    ChainConfig cfg;
    cfg.seed = 4;
    cfg.burn_in = 200;
    cfg.measure = 2000;
    auto r = moment_probe(m, cfg, 0, 0.0);
    CHECK(r.exp_moment == 1.0);
    CHECK(r.even_moments[0] == 1.0);
  }
  SECTION("Gaussian single site matches the closed form") {
    // density ~ exp(-(m/2) x^2) with m = M_00 = delta: E[e^{a x^2}] = sqrt(m/(m-2a))
    LatticeModel m = build_model(spec_for(1, 0.0, 0.0, 1.6));
    double a = 0.4;  // < delta/2 = 0.8
    double closed = std::sqrt(1.6 / (1.6 - 2.0 * a));
    ChainConfig cfg;
    cfg.seed = 21;
    cfg.burn_in = 2000;
    cfg.measure = 60000;
    auto r = moment_probe(m, cfg, 0, a);
    CHECK(std::abs(r.exp_moment - closed) <= 3.0 * r.exp_moment_se);
    // quadrature cross-check of the same closed form, box sized for the tilt
    GibbsDensity d = make_density(m);
    QuadratureSpec qs;
    qs.box = {default_box_halfwidth(d.envelope_rate - a, 0.0)};
    auto q = expect_callable(d,
                             [a](std::span<const double> z) { return std::exp(a * z[0] * z[0]); },
                             qs);
    CHECK(q.values[0] == Approx(closed).epsilon(1e-9));
    // even moments: E[x^2] = 1/m for this density
    CHECK(std::abs(r.even_moments[1] - 1.0 / 1.6) <= 3.0 * r.even_moment_ses[1]);
  }
  SECTION("exponent beyond delta/2 rejected") {
    LatticeModel m = build_model(spec_for(1, 0.0, 0.0, 1.0));
    ChainConfig cfg;
    CHECK_THROWS_AS(moment_probe(m, cfg, 0, 0.51), Error);
  }
}

TEST_CASE("divergence guard names site and sweep", "[sampler]") {
  GibbsDensity g;
  g.n = 1;
  g.phi = [](int, double) { return 0.0; };
  g.quad_diag = {-0.2};  // repulsive: the chain escapes to infinity
  g.pair_w = Matrix(1, 1);
  g.box = {2.0};
  ChainConfig cfg;
  cfg.seed = 1;
  cfg.burn_in = 0;
  cfg.measure = 100000;
  cfg.n_chains = 2;
  try {
    run_chains(g, cfg, {{0, 0}});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.site == 0);
    CHECK(e.sweep >= 0);
  }
}

TEST_CASE("tiny effective sample size gets flagged", "[sampler]") {
  LatticeModel m = build_model(spec_for(2, 0.3, 0.2, 1.0));
  ChainConfig cfg;
  cfg.seed = 8;
  cfg.burn_in = 0;
  cfg.measure = 400;
  cfg.proposal_sigma = 1e-4;  // glacial mixing, no adaptation without burn-in
  auto r = run_chains(m, cfg, {{0, 1}});
  CHECK(r.stats.flagged);
}

TEST_CASE("acceptance lands in the target band after adaptation", "[sampler]") {
  LatticeModel m = build_model(spec_for(4, 0.4, 0.3, 0.9));
  ChainConfig cfg;
  cfg.seed = 15;
  cfg.burn_in = 3000;
  cfg.measure = 6000;
  auto r = run_chains(m, cfg, {{0, 1}});
  for (double acc : r.stats.acceptance) {
    CHECK(acc >= 0.25);
    CHECK(acc <= 0.55);
  }
}
