#pragma once

// Exact oracle for lattices of up to 4 sites: tensor-product Gauss-Legendre
// quadrature on a truncated box, refined until successive node counts agree.
//
// The density is evaluated in factorized form. Per-site factors and per-pair
// coupling factors are tabulated once per grid, each table shifted by its own
// log-maximum, and the tensor sum accumulates in double when the shift
// bookkeeping provably cannot underflow, in extended precision otherwise.
// Moments are ratios, so all shifts cancel; log Z is reported with the
// shifts restored.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spinlab/linalg.hpp"
#include "spinlab/model.hpp"
#include "spinlab/parallel.hpp"

namespace spinlab {

struct QuadratureSpec {
  int nodes = 20;            // starting nodes per site
  int refine_factor = 2;
  double rel_tol = 1e-9;
  int max_refinements = 6;
  std::vector<double> box;   // per-site half-widths; empty = take from the density
  int threads = 1;
};

struct QuadratureError : Error {
  QuadratureError(const std::string& what, std::vector<double> last, std::vector<double> prev)
      : Error("quadrature", what), last_values(std::move(last)), prev_values(std::move(prev)) {}
  std::vector<double> last_values;
  std::vector<double> prev_values;
};

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_m.
inline void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(m);
  weights.resize(m);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[m - 1 - i] = weights[i];
  }
}

using Monomial = std::array<int, 4>;  // per-site exponents, unused sites zero

struct QuadratureResult {
  std::vector<double> values;
  std::vector<double> errors;           // |last - previous| per value
  double log_z = 0.0;
  int nodes_used = 0;
  std::vector<std::vector<double>> levels;  // values at every refinement level
};

namespace detail {

constexpr int kMaxDeg = 8;

template <typename Real>
struct Grid {
  int n = 0;
  int m[4] = {1, 1, 1, 1};
  std::vector<double> z[4];
  std::vector<Real> g[4];            // site factor x quadrature weight, shifted
  std::vector<Real> zpow[4];         // z^p, p = 0..kMaxDeg, layout [a * (kMaxDeg+1) + p]
  std::vector<Real> pair[4][4];      // coupling factors, shifted; empty = factor 1
  long double shift = 0.0L;          // total of all log shifts
};

// Worst-case log distance between the per-table shifted product and the true
// peak; if it stays well inside double range the fast path is safe.
inline double shift_gap_bound(const GibbsDensity& d) {
  double gap = 0.0;
  for (int k = 0; k < d.n; ++k)
    for (int l = k + 1; l < d.n; ++l)
      gap += std::abs(d.pair_w(k, l)) * d.box[k] * d.box[l];
  return gap;
}

template <typename Real>
Grid<Real> build_grid(const GibbsDensity& d, int nodes, const std::vector<double>& box_override) {
  Grid<Real> gr;
  gr.n = d.n;
  std::vector<double> t, w;
  gauss_legendre(nodes, t, w);
  for (int k = 0; k < 4; ++k) {
    if (k >= d.n) {
      gr.m[k] = 1;
      gr.z[k] = {0.0};
      gr.g[k] = {Real(1)};
      gr.zpow[k].assign(kMaxDeg + 1, Real(0));
      gr.zpow[k][0] = Real(1);
      continue;
    }
    const double L = box_override.empty() ? d.box[k] : box_override[k];
    gr.m[k] = nodes;
    gr.z[k].resize(nodes);
    gr.g[k].resize(nodes);
    gr.zpow[k].resize(static_cast<std::size_t>(nodes) * (kMaxDeg + 1));
    std::vector<double> lg(nodes);
    double smax = -1e300;
    for (int a = 0; a < nodes; ++a) {
      double z = L * t[a];
      gr.z[k][a] = z;
      lg[a] = -d.phi(k, z) - d.quad_diag[k] * z * z;
      smax = std::max(smax, lg[a]);
    }
    for (int a = 0; a < nodes; ++a) {
      gr.g[k][a] = static_cast<Real>(
          static_cast<long double>(L * w[a]) * expl(static_cast<long double>(lg[a]) - smax));
      Real zp = Real(1);
      for (int p = 0; p <= kMaxDeg; ++p) {
        gr.zpow[k][a * (kMaxDeg + 1) + p] = zp;
        zp *= static_cast<Real>(gr.z[k][a]);
      }
    }
    gr.shift += smax;
  }
  for (int k = 0; k < d.n; ++k)
    for (int l = k + 1; l < d.n; ++l) {
      double wkl = d.pair_w(k, l);
      if (wkl == 0.0) continue;
      long double smax = -1e300L;
      std::vector<long double> raw(static_cast<std::size_t>(gr.m[k]) * gr.m[l]);
      for (int a = 0; a < gr.m[k]; ++a)
        for (int b = 0; b < gr.m[l]; ++b) {
          long double e = -static_cast<long double>(wkl) * gr.z[k][a] * gr.z[l][b];
          raw[a * gr.m[l] + b] = e;
          smax = std::max(smax, e);
        }
      std::vector<Real> tab(raw.size());
      for (std::size_t idx = 0; idx < raw.size(); ++idx)
        tab[idx] = static_cast<Real>(expl(raw[idx] - smax));
      gr.pair[k][l] = std::move(tab);
      gr.shift += smax;
    }
  return gr;
}

template <typename Real>
const std::vector<Real>* tab(const Grid<Real>& g, int k, int l) {
  return g.pair[k][l].empty() ? nullptr : &g.pair[k][l];
}

template <typename Real>
long double pairwise_ld(const std::vector<Real>& v) {
  std::vector<long double> tmp(v.begin(), v.end());
  return pairwise_sum(tmp);
}

// One pass over the full tensor grid, accumulating the partition sum and the
// requested monomials. Outermost axis is chunked across threads; per-slice
// partials are merged with a fixed-order pairwise sum.
template <typename Real>
void accumulate_monomials(const Grid<Real>& gr, const std::vector<Monomial>& monos, int threads,
                          long double& z_out, std::vector<long double>& mono_out) {
  const int nm = static_cast<int>(monos.size());
  const int m0 = gr.m[0], m1 = gr.m[1], m2 = gr.m[2], m3 = gr.m[3];
  const auto *t01 = tab(gr, 0, 1), *t02 = tab(gr, 0, 2), *t03 = tab(gr, 0, 3);
  const auto *t12 = tab(gr, 1, 2), *t13 = tab(gr, 1, 3), *t23 = tab(gr, 2, 3);

  int maxdeg3 = 0;
  for (const auto& mo : monos) maxdeg3 = std::max(maxdeg3, mo[3]);

  std::vector<Real> part_z(m0, Real(0));
  std::vector<Real> part_m(static_cast<std::size_t>(m0) * nm, Real(0));

  parallel_for(m0, threads, [&](std::size_t a0) {
    Real zacc = Real(0);
    std::vector<Real> macc(nm, Real(0));
    std::vector<Real> h(m3), s(maxdeg3 + 1);
    const Real g0 = gr.g[0][a0];
    for (int a1 = 0; a1 < m1; ++a1) {
      Real w01 = g0 * gr.g[1][a1];
      if (t01) w01 *= (*t01)[a0 * m1 + a1];
      for (int a2 = 0; a2 < m2; ++a2) {
        Real w012 = w01 * gr.g[2][a2];
        if (t02) w012 *= (*t02)[a0 * m2 + a2];
        if (t12) w012 *= (*t12)[a1 * m2 + a2];
        for (int a3 = 0; a3 < m3; ++a3) {
          Real hh = gr.g[3][a3];
          if (t03) hh *= (*t03)[a0 * m3 + a3];
          if (t13) hh *= (*t13)[a1 * m3 + a3];
          if (t23) hh *= (*t23)[a2 * m3 + a3];
          h[a3] = hh;
        }
        for (int p = 0; p <= maxdeg3; ++p) {
          Real sp = Real(0);
          for (int a3 = 0; a3 < m3; ++a3) sp += h[a3] * gr.zpow[3][a3 * (kMaxDeg + 1) + p];
          s[p] = sp;
        }
        zacc += w012 * s[0];
        for (int im = 0; im < nm; ++im) {
          const Monomial& mo = monos[im];
          macc[im] += w012 * gr.zpow[0][a0 * (kMaxDeg + 1) + mo[0]] *
                      gr.zpow[1][a1 * (kMaxDeg + 1) + mo[1]] *
                      gr.zpow[2][a2 * (kMaxDeg + 1) + mo[2]] * s[mo[3]];
        }
      }
    }
    part_z[a0] = zacc;
    for (int im = 0; im < nm; ++im) part_m[a0 * nm + im] = macc[im];
  });

  z_out = pairwise_ld(part_z);
  mono_out.assign(nm, 0.0L);
  std::vector<Real> col(m0);
  for (int im = 0; im < nm; ++im) {
    for (int a0 = 0; a0 < m0; ++a0) col[a0] = part_m[a0 * nm + im];
    mono_out[im] = pairwise_ld(col);
  }
}

// Generic observable path; each fn sees the first n coordinates. Weights far
// below the peak are skipped without evaluating the observables.
template <typename Real>
void accumulate_callables(const Grid<Real>& gr,
                          std::span<const std::function<double(std::span<const double>)>> fns,
                          int threads, long double& z_out, std::vector<long double>& f_out) {
  const int m0 = gr.m[0], m1 = gr.m[1], m2 = gr.m[2], m3 = gr.m[3];
  const auto *t01 = tab(gr, 0, 1), *t02 = tab(gr, 0, 2), *t03 = tab(gr, 0, 3);
  const auto *t12 = tab(gr, 1, 2), *t13 = tab(gr, 1, 3), *t23 = tab(gr, 2, 3);

  // seed the skip threshold with the weight at the per-site maxima,
  // a valid lower bound on the grid peak
  Real w_seed;
  {
    int am[4];
    for (int k = 0; k < 4; ++k) {
      am[k] = 0;
      for (int a = 1; a < gr.m[k]; ++a)
        if (gr.g[k][a] > gr.g[k][am[k]]) am[k] = a;
    }
    w_seed = gr.g[0][am[0]] * gr.g[1][am[1]] * gr.g[2][am[2]] * gr.g[3][am[3]];
    if (t01) w_seed *= (*t01)[am[0] * m1 + am[1]];
    if (t02) w_seed *= (*t02)[am[0] * m2 + am[2]];
    if (t03) w_seed *= (*t03)[am[0] * m3 + am[3]];
    if (t12) w_seed *= (*t12)[am[1] * m2 + am[2]];
    if (t13) w_seed *= (*t13)[am[1] * m3 + am[3]];
    if (t23) w_seed *= (*t23)[am[2] * m3 + am[3]];
  }

  const int nf = static_cast<int>(fns.size());
  std::vector<Real> part_z(m0, Real(0)), part_f(static_cast<std::size_t>(m0) * nf, Real(0));
  parallel_for(m0, threads, [&](std::size_t a0) {
    Real zacc = Real(0), wmax = w_seed;
    std::vector<Real> facc(nf, Real(0));
    const Real cutoff = Real(1e-22);
    double zvec[4];
    zvec[0] = gr.z[0][a0];
    const Real g0 = gr.g[0][a0];
    for (int a1 = 0; a1 < m1; ++a1) {
      zvec[1] = gr.z[1][a1];
      Real w01 = g0 * gr.g[1][a1];
      if (t01) w01 *= (*t01)[a0 * m1 + a1];
      for (int a2 = 0; a2 < m2; ++a2) {
        zvec[2] = gr.z[2][a2];
        Real w012 = w01 * gr.g[2][a2];
        if (t02) w012 *= (*t02)[a0 * m2 + a2];
        if (t12) w012 *= (*t12)[a1 * m2 + a2];
        for (int a3 = 0; a3 < m3; ++a3) {
          Real hh = w012 * gr.g[3][a3];
          if (t03) hh *= (*t03)[a0 * m3 + a3];
          if (t13) hh *= (*t13)[a1 * m3 + a3];
          if (t23) hh *= (*t23)[a2 * m3 + a3];
          zacc += hh;
          if (hh > wmax) wmax = hh;
          if (hh <= cutoff * wmax) continue;
          zvec[3] = gr.z[3][a3];
          std::span<const double> zs(zvec, static_cast<std::size_t>(gr.n));
          for (int e = 0; e < nf; ++e) facc[e] += hh * static_cast<Real>(fns[e](zs));
        }
      }
    }
    part_z[a0] = zacc;
    for (int e = 0; e < nf; ++e) part_f[a0 * nf + e] = facc[e];
  });
  z_out = pairwise_ld(part_z);
  f_out.assign(nf, 0.0L);
  std::vector<Real> col(m0);
  for (int e = 0; e < nf; ++e) {
    for (int a0 = 0; a0 < m0; ++a0) col[a0] = part_f[a0 * nf + e];
    f_out[e] = pairwise_ld(col);
  }
}

inline bool converged(const std::vector<double>& prev, const std::vector<double>& cur,
                      double rel_tol) {
  double vmax = 0.0;
  for (double v : cur) vmax = std::max(vmax, std::abs(v));
  // each value converges relative to its own magnitude or to a tenth of the
  // family scale, whichever is larger; chasing full relative precision on the
  // smallest moment of a set would sit below the summation noise
  double floor = std::max(0.1 * vmax, 1e-6);
  for (std::size_t i = 0; i < cur.size(); ++i)
    if (std::abs(cur[i] - prev[i]) > rel_tol * std::max(std::abs(cur[i]), floor)) return false;
  return true;
}

inline int max_nodes_for(int n) {
  switch (n) {
    case 1: return 5120;
    case 2: return 2560;
    case 3: return 720;
    default: return 320;
  }
}

// double is safe while the product of shifted tables stays far above the
// smallest normal double; 500 in log leaves two hundred decades of headroom
inline bool fast_path_ok(const GibbsDensity& d) { return shift_gap_bound(d) < 500.0; }

struct LevelOut {
  long double z;
  std::vector<long double> monos;
  long double shift;
};

inline LevelOut run_level_monomials(const GibbsDensity& d, int nodes,
                                    const std::vector<Monomial>& monos,
                                    const QuadratureSpec& spec) {
  LevelOut out;
  if (fast_path_ok(d)) {
    auto gr = build_grid<double>(d, nodes, spec.box);
    accumulate_monomials<double>(gr, monos, spec.threads, out.z, out.monos);
    out.shift = gr.shift;
  } else {
    auto gr = build_grid<long double>(d, nodes, spec.box);
    accumulate_monomials<long double>(gr, monos, spec.threads, out.z, out.monos);
    out.shift = gr.shift;
  }
  return out;
}

inline LevelOut run_level_callables(
    const GibbsDensity& d, int nodes,
    std::span<const std::function<double(std::span<const double>)>> fns,
    const QuadratureSpec& spec) {
  LevelOut out;
  if (fast_path_ok(d)) {
    auto gr = build_grid<double>(d, nodes, spec.box);
    accumulate_callables<double>(gr, fns, spec.threads, out.z, out.monos);
    out.shift = gr.shift;
  } else {
    auto gr = build_grid<long double>(d, nodes, spec.box);
    accumulate_callables<long double>(gr, fns, spec.threads, out.z, out.monos);
    out.shift = gr.shift;
  }
  return out;
}

}  // namespace detail

// Expectations of a list of monomials under the density, all in one sweep.
//
// The node ladder grows by refine_factor. A level is accepted when it agrees
// either with the previous ladder level or with a slightly larger companion
// grid; past the convergence onset both certify the same thing, and the
// companion avoids paying for one more full doubling just to certify.
inline QuadratureResult expect_monomials(const GibbsDensity& d, const std::vector<Monomial>& monos,
                                         const QuadratureSpec& spec = {}) {
  require(d.n >= 1 && d.n <= 4, "n_sites", "quadrature oracle covers 1..4 sites");
  for (const auto& mo : monos) {
    int deg = mo[0] + mo[1] + mo[2] + mo[3];
    require(deg <= detail::kMaxDeg, "observable", "monomial degree exceeds 8");
  }
  QuadratureResult res;
  int m = spec.nodes;
  const int cap = detail::max_nodes_for(d.n);
  std::vector<double> prev;
  auto level_values = [&](int nodes) {
    auto lo = detail::run_level_monomials(d, nodes, monos, spec);
    std::vector<double> vals(monos.size());
    for (std::size_t i = 0; i < monos.size(); ++i)
      vals[i] = static_cast<double>(lo.monos[i] / lo.z);
    res.log_z = static_cast<double>(logl(lo.z) + lo.shift);
    return vals;
  };
  auto finish = [&](const std::vector<double>& a, const std::vector<double>& b, int nodes) {
    res.values = b;
    res.errors.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) res.errors[i] = std::abs(b[i] - a[i]);
    res.nodes_used = nodes;
  };
  for (int level = 0; level <= spec.max_refinements; ++level) {
    if (m > cap) break;
    auto vals = level_values(m);
    res.levels.push_back(vals);
    res.nodes_used = m;
    if (level > 0 && detail::converged(prev, vals, spec.rel_tol)) {
      finish(prev, vals, m);
      return res;
    }
    int companion = m + std::max(8, m / 8);
    if (companion <= cap) {
      auto cvals = level_values(companion);
      if (detail::converged(vals, cvals, spec.rel_tol)) {
        finish(vals, cvals, companion);
        return res;
      }
    }
    prev = std::move(vals);
    m *= spec.refine_factor;
  }
  if (res.levels.size() < 2)
    throw QuadratureError("node budget exhausted before two refinement levels", prev, prev);
  throw QuadratureError("quadrature did not converge within the node budget",
                        res.levels.back(), res.levels[res.levels.size() - 2]);
}

// Expectations of general observables (slower path, no factorized inner sums).
inline QuadratureResult expect_callables(
    const GibbsDensity& d,
    const std::vector<std::function<double(std::span<const double>)>>& fns,
    const QuadratureSpec& spec = {}) {
  require(d.n >= 1 && d.n <= 4, "n_sites", "quadrature oracle covers 1..4 sites");
  QuadratureResult res;
  int m = spec.nodes;
  const int cap = detail::max_nodes_for(d.n);
  std::vector<double> prev;
  auto values_at = [&](int nodes) {
    auto lo = detail::run_level_callables(d, nodes, fns, spec);
    res.log_z = static_cast<double>(logl(lo.z) + lo.shift);
    std::vector<double> vals(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i)
      vals[i] = static_cast<double>(lo.monos[i] / lo.z);
    return vals;
  };
  auto finish = [&](const std::vector<double>& a, const std::vector<double>& b, int nodes) {
    res.values = b;
    res.errors.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) res.errors[i] = std::abs(b[i] - a[i]);
    res.nodes_used = nodes;
  };
  for (int level = 0; level <= spec.max_refinements; ++level) {
    if (m > cap) break;
    auto vals = values_at(m);
    res.levels.push_back(vals);
    res.nodes_used = m;
    if (level > 0 && detail::converged(prev, vals, spec.rel_tol)) {
      finish(prev, vals, m);
      return res;
    }
    int companion = m + std::max(8, m / 8);
    if (companion <= cap) {
      auto cvals = values_at(companion);
      if (detail::converged(vals, cvals, spec.rel_tol)) {
        finish(vals, cvals, companion);
        return res;
      }
    }
    prev = std::move(vals);
    m *= spec.refine_factor;
  }
  if (res.levels.size() < 2)
    throw QuadratureError("node budget exhausted before two refinement levels", prev, prev);
  throw QuadratureError("quadrature did not converge within the node budget",
                        res.levels.back(), res.levels[res.levels.size() - 2]);
}

inline QuadratureResult expect_callable(const GibbsDensity& d,
                                        const std::function<double(std::span<const double>)>& fn,
                                        const QuadratureSpec& spec = {}) {
  return expect_callables(d, {fn}, spec);
}

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

inline ValueWithError expectation(const GibbsDensity& d, const Monomial& mono,
                                  const QuadratureSpec& spec = {}) {
  auto r = expect_monomials(d, {mono}, spec);
  return {r.values[0], r.errors[0]};
}

inline ValueWithError covariance_exact(const GibbsDensity& d, int i, int j,
                                       const QuadratureSpec& spec = {}) {
  Monomial mi{0, 0, 0, 0}, mj{0, 0, 0, 0}, mij{0, 0, 0, 0};
  mi[i] = 1;
  mj[j] = 1;
  mij[i] += 1;
  mij[j] += 1;
  auto r = expect_monomials(d, {mij, mi, mj}, spec);
  ValueWithError out;
  out.value = r.values[0] - r.values[1] * r.values[2];
  out.error = r.errors[0] + std::abs(r.values[1]) * r.errors[2] + std::abs(r.values[2]) * r.errors[1];
  return out;
}

inline ValueWithError covariance_exact(const LatticeModel& m, int i, int j,
                                       const QuadratureSpec& spec = {}) {
  return covariance_exact(make_density(m), i, j, spec);
}

inline ValueWithError covariance_exact(const DoubledModel& m, int i, int j,
                                       const QuadratureSpec& spec = {}) {
  return covariance_exact(make_density(m), i, j, spec);
}

// ---------------------------------------------------------------------------
// ghost expectations: exact two-term sum over the +/-1 ghost spin

struct GhostMoments {
  // E[mono], E[mono * sigma] for each requested monomial, plus E[sigma]
  std::vector<double> plain;
  std::vector<double> with_sigma;
  double sigma_mean = 0.0;
  double err = 0.0;  // worst refinement gap across the branch moments
};

inline GhostMoments ghost_moments(const GhostModel& g, const std::vector<Monomial>& monos,
                                  const QuadratureSpec& spec = {}) {
  auto orig = expect_monomials(make_density(g.original), monos, spec);   // sigma = -1
  auto attr = expect_monomials(make_density(g.attractive), monos, spec); // sigma = +1
  // branch weights Z_+ / (Z_+ + Z_-) computed from the log partition sums
  double dl = attr.log_z - orig.log_z;
  double wp = 1.0 / (1.0 + std::exp(-dl));
  double wm = 1.0 - wp;
  GhostMoments out;
  out.plain.resize(monos.size());
  out.with_sigma.resize(monos.size());
  for (std::size_t k = 0; k < monos.size(); ++k) {
    out.plain[k] = wp * attr.values[k] + wm * orig.values[k];
    out.with_sigma[k] = wp * attr.values[k] - wm * orig.values[k];
    out.err = std::max({out.err, attr.errors[k], orig.errors[k]});
  }
  out.sigma_mean = std::tanh(dl / 2.0);
  return out;
}

// ---------------------------------------------------------------------------
// doubling identity: cov_mu(x_i, x_j) against the nested (q, p) representation

struct DoublingCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |lhs - rhs| / max(|lhs|, 1e-12)
};

namespace detail {

// Unnormalized joint sum over the (q, p) grid with f in {1, p_i p_j}.
// Contraction order keeps the cost at O(mq mp^3 + mq^2 mp^2 + mq^3 mp).
struct DoublingAccumulator {
  int n;
  int mq, mp;
  std::vector<double> zq, wq, zp, wp;
  // per-site joint tables G[k][a][b] = wp_b * exp(-psi_k(q_a + p_b) - psi_k(q_a - p_b)
  //                                              - K_kk p_b^2 - shift_k)
  std::vector<std::vector<long double>> site;
  // q-side per-site factor: wq_a * exp(-M_kk q_a^2 - 2 lin_k q_a - shift)
  std::vector<std::vector<long double>> qsite;
  std::vector<std::vector<long double>> qpair;  // exp(-2 M_kl q q' - shift) for k < l
  std::vector<std::vector<long double>> ppair;  // exp(-2 M_kl p p' - shift) for k < l

  long double sum(int pi, int pj) const {  // pi, pj: sites carrying a p factor, -1 = none
    auto prow = [&](int k, int a) { return &site[k][static_cast<std::size_t>(a) * mp]; };
    auto pfac = [&](int k, int b) {
      long double f = 1.0L;
      if (k == pi) f *= zp[b];
      if (k == pj) f *= zp[b];
      return f;
    };
    if (n == 2) {
      // D[a0][b1] = sum_b0 G0[a0][b0] f0 * P01[b0][b1], then contract with G1
      std::vector<long double> D(static_cast<std::size_t>(mq) * mp);
      for (int a0 = 0; a0 < mq; ++a0) {
        const long double* r0 = prow(0, a0);
        for (int b1 = 0; b1 < mp; ++b1) {
          long double s = 0.0L;
          for (int b0 = 0; b0 < mp; ++b0) s += r0[b0] * pfac(0, b0) * ppair[0][b0 * mp + b1];
          D[static_cast<std::size_t>(a0) * mp + b1] = s;
        }
      }
      long double total = 0.0L;
      for (int a0 = 0; a0 < mq; ++a0)
        for (int a1 = 0; a1 < mq; ++a1) {
          long double qw = qsite[0][a0] * qsite[1][a1] * qpair[0][a0 * mq + a1];
          const long double* r1 = prow(1, a1);
          long double inner = 0.0L;
          for (int b1 = 0; b1 < mp; ++b1)
            inner += D[static_cast<std::size_t>(a0) * mp + b1] * r1[b1] * pfac(1, b1);
          total += qw * inner;
        }
      return total;
    }
    // n == 3
    // D[a0][b1][b2] = sum_b0 G0[a0][b0] f0 * P01[b0][b1] * P02[b0][b2]
    std::vector<long double> D(static_cast<std::size_t>(mq) * mp * mp);
    for (int a0 = 0; a0 < mq; ++a0) {
      const long double* r0 = prow(0, a0);
      for (int b1 = 0; b1 < mp; ++b1)
        for (int b2 = 0; b2 < mp; ++b2) {
          long double s = 0.0L;
          for (int b0 = 0; b0 < mp; ++b0)
            s += r0[b0] * pfac(0, b0) * ppair[0][b0 * mp + b1] * ppair[1][b0 * mp + b2];
          D[(static_cast<std::size_t>(a0) * mp + b1) * mp + b2] = s;
        }
    }
    // E[a0][a1][b2] = sum_b1 D[a0][b1][b2] * G1[a1][b1] f1 * P12[b1][b2]
    std::vector<long double> E(static_cast<std::size_t>(mq) * mq * mp);
    for (int a0 = 0; a0 < mq; ++a0)
      for (int a1 = 0; a1 < mq; ++a1) {
        const long double* r1 = prow(1, a1);
        for (int b2 = 0; b2 < mp; ++b2) {
          long double s = 0.0L;
          for (int b1 = 0; b1 < mp; ++b1)
            s += D[(static_cast<std::size_t>(a0) * mp + b1) * mp + b2] * r1[b1] * pfac(1, b1) *
                 ppair[2][b1 * mp + b2];
          E[(static_cast<std::size_t>(a0) * mq + a1) * mp + b2] = s;
        }
      }
    // total = sum_q qweights * sum_b2 E * G2[a2][b2] f2
    long double total = 0.0L;
    for (int a0 = 0; a0 < mq; ++a0)
      for (int a1 = 0; a1 < mq; ++a1)
        for (int a2 = 0; a2 < mq; ++a2) {
          long double qw = qsite[0][a0] * qsite[1][a1] * qsite[2][a2] * qpair[0][a0 * mq + a1] *
                           qpair[1][a0 * mq + a2] * qpair[2][a1 * mq + a2];
          const long double* r2 = prow(2, a2);
          long double s = 0.0L;
          for (int b2 = 0; b2 < mp; ++b2)
            s += E[(static_cast<std::size_t>(a0) * mq + a1) * mp + b2] * r2[b2] * pfac(2, b2);
          total += qw * s;
        }
    return total;
  }
};

inline DoublingAccumulator build_doubling(const LatticeModel& model, int mq, int mp) {
  const int n = model.n_sites();
  DoublingAccumulator acc;
  acc.n = n;
  acc.mq = mq;
  acc.mp = mp;
  std::vector<double> tq, wq, tp, wp;
  gauss_legendre(mq, tq, wq);
  gauss_legendre(mp, tp, wp);
  GibbsDensity dx = make_density(model);  // reuse its per-site boxes
  const Matrix& M = model.interaction().entries;

  acc.zq.resize(mq);
  acc.wq.resize(mq);
  acc.zp.resize(mp);
  acc.wp.resize(mp);
  acc.site.resize(n);
  acc.qsite.resize(n);
  double Lbox = 0.0;
  for (int k = 0; k < n; ++k) Lbox = std::max(Lbox, dx.box[k]);
  for (int a = 0; a < mq; ++a) {
    acc.zq[a] = Lbox * tq[a];
    acc.wq[a] = Lbox * wq[a];
  }
  for (int b = 0; b < mp; ++b) {
    acc.zp[b] = Lbox * tp[b];
    acc.wp[b] = Lbox * wp[b];
  }
  for (int k = 0; k < n; ++k) {
    const auto& psi = model.potentials()[k];
    std::vector<double> lg(static_cast<std::size_t>(mq) * mp);
    double smax = -1e300;
    for (int a = 0; a < mq; ++a)
      for (int b = 0; b < mp; ++b) {
        double q = acc.zq[a], p = acc.zp[b];
        double e = -psi.symmetrized(q, p) - M(k, k) * p * p;
        lg[a * mp + b] = e;
        smax = std::max(smax, e);
      }
    acc.site[k].resize(static_cast<std::size_t>(mq) * mp);
    for (int a = 0; a < mq; ++a)
      for (int b = 0; b < mp; ++b)
        acc.site[k][a * mp + b] =
            static_cast<long double>(acc.wp[b]) * expl(static_cast<long double>(lg[a * mp + b]) - smax);

    std::vector<double> lq(mq);
    double qmax = -1e300;
    for (int a = 0; a < mq; ++a) {
      double q = acc.zq[a];
      lq[a] = -M(k, k) * q * q - 2.0 * model.linear_coeff(k) * q;
      qmax = std::max(qmax, lq[a]);
    }
    acc.qsite[k].resize(mq);
    for (int a = 0; a < mq; ++a)
      acc.qsite[k][a] =
          static_cast<long double>(acc.wq[a]) * expl(static_cast<long double>(lq[a]) - qmax);
  }
  auto pair_table = [](const std::vector<double>& z, double coeff) {
    const int m = static_cast<int>(z.size());
    std::vector<long double> tab(static_cast<std::size_t>(m) * m);
    long double smax = -1e300L;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        long double e = -static_cast<long double>(coeff) * z[a] * z[b];
        tab[a * m + b] = e;
        smax = std::max(smax, e);
      }
    for (auto& e : tab) e = expl(e - smax);
    return tab;
  };
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      acc.qpair.push_back(pair_table(acc.zq, 2.0 * M(k, l)));
      acc.ppair.push_back(pair_table(acc.zp, 2.0 * M(k, l)));
    }
  return acc;
}

}  // namespace detail

inline DoublingCheckResult doubling_identity_check(const LatticeModel& model, int i, int j,
                                                   const QuadratureSpec& spec = {}) {
  require(model.n_sites() >= 2 && model.n_sites() <= 3, "n_sites",
          "doubling check covers 2..3 sites");
  QuadratureSpec sx = spec;
  sx.rel_tol = std::min(spec.rel_tol, 1e-10);
  DoublingCheckResult out;
  out.lhs = covariance_exact(model, i, j, sx).value;

  auto rhs_at = [&](int mq, int mp) {
    auto acc = detail::build_doubling(model, mq, mp);
    long double den = acc.sum(-1, -1);
    long double num = acc.sum(i, j);
    return 2.0 * static_cast<double>(num / den);
  };
  int mq = model.n_sites() == 2 ? 32 : 24;
  int mp = mq + 8;
  double prev = rhs_at(mq, mp);
  double cur = rhs_at(mq * 3 / 2, mp * 3 / 2);
  int tries = 0;
  double scale = std::max({std::abs(cur), std::abs(out.lhs), 1e-6});
  while (std::abs(cur - prev) > 1e-9 * scale && tries < 3) {
    mq = mq * 3 / 2;
    mp = mp * 3 / 2;
    prev = cur;
    cur = rhs_at(mq * 3 / 2, mp * 3 / 2);
    ++tries;
    scale = std::max({std::abs(cur), std::abs(out.lhs), 1e-6});
  }
  out.rhs = cur;
  out.gap = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), 1e-12);
  return out;
}

}  // namespace spinlab
