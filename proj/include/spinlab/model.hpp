#pragma once

// One-dimensional lattice models of unbounded continuous spins.
//
// A finite window of Z carries per-site potentials psi(z) = c4 z^4 + c2 z^2
// + B cos(omega z), a symmetric interaction matrix with algebraically
// decaying off-diagonal entries and a pinned diagonal-dominance margin,
// an optional linear field, and fixed spin values on a finite collar
// outside the window. The energy of a configuration x is
//
//   U(x) = sum_i psi_i(x_i) + 1/2 sum_{i,j} M_ij x_i x_j
//        + sum_i x_i (b_i + sum_{j outside} M_ij x_j).
//
// Doubling the variables (x = q + p, y = q - p) produces the conditional
// measure over p with symmetrized even potentials and the quadratic form
// written without the 1/2 (its coupling count is twice the pair sum).
// The attractive variant keeps the diagonal and replaces every
// off-diagonal coupling by one that rewards aligned spins.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "spinlab/linalg.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

// ---------------------------------------------------------------------------
// single-site potentials

struct SingleSitePotential {
  double c4 = 0.0;     // quartic coefficient of the convex part
  double c2 = 0.0;     // quadratic coefficient of the convex part
  double B = 0.0;      // amplitude of the bounded cosine part
  double omega = 1.0;  // frequency of the bounded part
  bool min_at_zero = true;  // the convex part has its global minimum at 0

  double convex(double z) const {
    double z2 = z * z;
    return c4 * z2 * z2 + c2 * z2;
  }
  double bounded(double z) const { return B == 0.0 ? 0.0 : B * std::cos(omega * z); }
  double value(double z) const { return convex(z) + bounded(z); }
  double derivative(double z) const {
    return 4.0 * c4 * z * z * z + 2.0 * c2 * z - B * omega * std::sin(omega * z);
  }

  // q-symmetrized potential psi(q + p) + psi(q - p); even in p.
  double symmetrized(double q, double p) const { return value(q + p) + value(q - p); }
};

// ---------------------------------------------------------------------------
// interaction matrix

enum class SignPattern { AllPositive, AllNegative, SeededRandom };

struct InteractionMatrix {
  int n_sites = 0;
  double coupling_C = 0.0;  // kernel constant
  double alpha = 1.0;       // decay exponent; |M_ij| <= C / (|i-j|^(2+alpha) + 1)
  SignPattern pattern = SignPattern::AllPositive;
  std::uint64_t sign_seed = 0;
  double delta = 1.0;            // diagonal dominance margin, pinned exactly
  std::vector<long> positions;   // site positions in Z (default 0..n-1)
  Matrix entries;

  double kernel(double dist) const {
    return coupling_C / (std::pow(dist, 2.0 + alpha) + 1.0);
  }

  int sign(long pos_i, long pos_j) const {
    switch (pattern) {
      case SignPattern::AllPositive: return 1;
      case SignPattern::AllNegative: return -1;
      default: return pair_sign(sign_seed, pos_i, pos_j);
    }
  }

  // Signed coupling between an interior site and an arbitrary lattice position.
  double coupling_to(int i, long pos_j) const {
    long d = std::labs(positions[static_cast<std::size_t>(i)] - pos_j);
    if (d == 0) return entries(i, i);
    return sign(positions[static_cast<std::size_t>(i)], pos_j) * kernel(static_cast<double>(d));
  }
};

inline InteractionMatrix make_interaction(std::vector<long> positions, double coupling_C,
                                          double alpha, SignPattern pattern,
                                          std::uint64_t sign_seed, double delta) {
  require(delta > 0.0, "delta", "margin must be positive");
  require(alpha > 0.0, "alpha", "decay exponent must be positive");
  require(coupling_C >= 0.0, "coupling_C", "kernel constant must be nonnegative");
  require(!positions.empty(), "n_sites", "need at least one site");

  InteractionMatrix m;
  m.n_sites = static_cast<int>(positions.size());
  m.coupling_C = coupling_C;
  m.alpha = alpha;
  m.pattern = pattern;
  m.sign_seed = sign_seed;
  m.delta = delta;
  m.positions = std::move(positions);

  const int n = m.n_sites;
  m.entries = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      long d = std::labs(m.positions[i] - m.positions[j]);
      double v = m.sign(m.positions[i], m.positions[j]) * m.kernel(static_cast<double>(d));
      m.entries(i, j) = v;
      m.entries(j, i) = v;
    }
  // diagonal pinned to the off-diagonal row mass plus the margin
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row += std::abs(m.entries(i, j));
    m.entries(i, i) = row + delta;
  }
  return m;
}

// ---------------------------------------------------------------------------
// boundary condition: fixed spins on a finite collar, zero beyond

struct BoundaryCondition {
  int width = 0;
  std::vector<double> left;   // values at positions -1, -2, ..., -width
  std::vector<double> right;  // values at positions n, n+1, ..., n+width-1
};

struct ModelSpec {
  int n_sites = 1;
  double c2 = 0.0;
  double c4 = 0.0;
  double bounded_B = 0.0;
  double bounded_omega = 1.0;
  double coupling_C = 0.0;
  double alpha = 1.0;
  SignPattern sign_pattern = SignPattern::AllPositive;
  std::uint64_t sign_seed = 0;
  double delta = 1.0;
  std::vector<double> field;  // empty = no linear term; one entry per site otherwise
  BoundaryCondition collar;
};

class LatticeModel;
LatticeModel build_model(const ModelSpec& spec);

class LatticeModel {
 public:
  LatticeModel() = default;

  int n_sites() const { return inter_.n_sites; }
  const std::vector<SingleSitePotential>& potentials() const { return psi_; }
  const InteractionMatrix& interaction() const { return inter_; }
  const std::vector<double>& field() const { return field_; }
  const BoundaryCondition& boundary() const { return bc_; }

  // boundary field per site: sum over collar sites of M_ij x_j
  const std::vector<double>& boundary_field() const { return boundary_field_; }
  // sum over collar sites of |M_ij| |x_j|; finite by construction and exposed
  const std::vector<double>& tempered_sums() const { return tempered_sums_; }

  double energy(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n_sites(), "x", "configuration length mismatch");
    for (double v : x) require(std::isfinite(v), "x", "configuration must be finite");
    const int n = n_sites();
    double u = 0.0;
    for (int i = 0; i < n; ++i) u += psi_[i].value(x[i]);
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += inter_.entries(i, j) * x[i] * x[j];
    u += 0.5 * quad;
    for (int i = 0; i < n; ++i) {
      double b = field_.empty() ? 0.0 : field_[i];
      u += x[i] * (b + boundary_field_[i]);
    }
    return u;
  }

  // total linear coefficient seen by site i (field plus boundary)
  double linear_coeff(int i) const {
    return (field_.empty() ? 0.0 : field_[i]) + boundary_field_[i];
  }

 private:
  friend LatticeModel build_model(const ModelSpec&);
  friend std::pair<LatticeModel, struct TruncationSet> truncate_interactions(
      const LatticeModel&, int, int, double);
  friend LatticeModel with_interaction(const LatticeModel&, Matrix);

  std::vector<SingleSitePotential> psi_;
  InteractionMatrix inter_;
  std::vector<double> field_;
  BoundaryCondition bc_;
  std::vector<double> boundary_field_;
  std::vector<double> tempered_sums_;
};

inline LatticeModel build_model(const ModelSpec& spec) {
  require(spec.n_sites >= 1, "n_sites", "need at least one site");
  require(spec.delta > 0.0, "delta", "margin must be positive");
  require(spec.alpha > 0.0, "alpha", "decay exponent must be positive");
  require(spec.c2 >= 0.0, "c2", "convexity coefficient must be nonnegative");
  require(spec.c4 >= 0.0, "c4", "convexity coefficient must be nonnegative");
  require(spec.bounded_B >= 0.0, "bounded.B", "bounded amplitude must be nonnegative");
  require(spec.bounded_B == 0.0 || spec.bounded_omega > 0.0, "bounded.omega",
          "bounded frequency must be positive");
  require(spec.field.empty() || static_cast<int>(spec.field.size()) == spec.n_sites, "field",
          "field length mismatch");
  for (double v : spec.field) require(std::isfinite(v), "field", "field must be finite");
  require(spec.collar.width >= 0, "collar.width", "collar width must be nonnegative");
  require(static_cast<int>(spec.collar.left.size()) == spec.collar.width &&
              static_cast<int>(spec.collar.right.size()) == spec.collar.width,
          "collar", "collar arrays must match the collar width");
  for (double v : spec.collar.left) require(std::isfinite(v), "collar.left", "collar values must be finite");
  for (double v : spec.collar.right) require(std::isfinite(v), "collar.right", "collar values must be finite");

  LatticeModel m;
  SingleSitePotential psi;
  psi.c4 = spec.c4;
  psi.c2 = spec.c2;
  psi.B = spec.bounded_B;
  psi.omega = spec.bounded_omega;
  m.psi_.assign(static_cast<std::size_t>(spec.n_sites), psi);

  std::vector<long> positions(static_cast<std::size_t>(spec.n_sites));
  for (int i = 0; i < spec.n_sites; ++i) positions[i] = i;
  m.inter_ = make_interaction(std::move(positions), spec.coupling_C, spec.alpha,
                              spec.sign_pattern, spec.sign_seed, spec.delta);
  m.field_ = spec.field;
  m.bc_ = spec.collar;

  const int n = spec.n_sites;
  m.boundary_field_.assign(static_cast<std::size_t>(n), 0.0);
  m.tempered_sums_.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < spec.collar.width; ++w) {
      long pos_l = -1 - w;
      long pos_r = n + w;
      double ml = m.inter_.coupling_to(i, pos_l);
      double mr = m.inter_.coupling_to(i, pos_r);
      m.boundary_field_[i] += ml * spec.collar.left[w] + mr * spec.collar.right[w];
      m.tempered_sums_[i] +=
          std::abs(ml) * std::abs(spec.collar.left[w]) + std::abs(mr) * std::abs(spec.collar.right[w]);
    }
    require(std::isfinite(m.boundary_field_[i]), "collar", "boundary field must be finite");
  }
  return m;
}

// Copy of a model with a replaced interaction matrix (same kernel metadata).
inline LatticeModel with_interaction(const LatticeModel& base, Matrix entries) {
  LatticeModel m = base;
  m.inter_.entries = std::move(entries);
  return m;
}

// ---------------------------------------------------------------------------
// doubled measure over the difference variables p

enum class DoubledVariant { Original, Attractive };

class DoubledModel {
 public:
  DoubledModel() = default;
  DoubledModel(std::vector<SingleSitePotential> psi, std::vector<double> q, Matrix couplings,
               DoubledVariant variant, double delta)
      : psi_(std::move(psi)), q_(std::move(q)), k_(std::move(couplings)), variant_(variant),
        delta_(delta) {}

  int n_sites() const { return static_cast<int>(q_.size()); }
  const std::vector<double>& q() const { return q_; }
  DoubledVariant variant() const { return variant_; }
  const Matrix& couplings() const { return k_; }
  double delta() const { return delta_; }
  const std::vector<SingleSitePotential>& potentials() const { return psi_; }

  // psi_{k,q}(p) = psi_k(q_k + p) + psi_k(q_k - p)
  double sym_potential(int k, double p) const { return psi_[k].symmetrized(q_[k], p); }

 private:
  std::vector<SingleSitePotential> psi_;
  std::vector<double> q_;
  Matrix k_;  // density is exp(-sum_k psi_{k,q}(p_k) - sum_{k,l} K_kl p_k p_l)
  DoubledVariant variant_;
  double delta_ = 1.0;
};

inline DoubledModel double_model(const LatticeModel& base, const std::vector<double>& q,
                                 DoubledVariant variant) {
  require(static_cast<int>(q.size()) == base.n_sites(), "q", "q length mismatch");
  for (double v : q) require(std::isfinite(v), "q", "q must be finite");
  const int n = base.n_sites();
  Matrix k = base.interaction().entries;
  if (variant == DoubledVariant::Attractive) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) k(a, b) = -std::abs(k(a, b));
  }
  return DoubledModel(base.potentials(), q, std::move(k), variant, base.interaction().delta);
}

// ---------------------------------------------------------------------------
// truncation of long interactions around a pair (i, j)

struct TruncationSet {
  std::vector<std::pair<int, int>> pairs;  // ordered pairs (k, l), both directions
  double dropped_mass = 0.0;               // sum over the ordered pairs of |M_kl|
  long cutoff = 0;                         // R = ceil(|i-j|^(1-eps))
};

// Drops M_kl for |k-l| >= R except when both sites lie strictly left of i or
// strictly right of j. Diagonal entries are untouched; every row's
// off-diagonal mass can only shrink, so diagonal dominance is preserved.
inline std::pair<LatticeModel, TruncationSet> truncate_interactions(const LatticeModel& model,
                                                                    int i, int j, double eps) {
  const int n = model.n_sites();
  require(i >= 0 && j < n && i < j, "i", "need 0 <= i < j < n_sites");
  require(j - i >= 2, "j", "need |i-j| >= 2");
  require(eps > 0.0 && eps < 1.0, "epsilon", "cutoff exponent must lie in (0,1)");

  TruncationSet t;
  t.cutoff = static_cast<long>(std::ceil(std::pow(static_cast<double>(j - i), 1.0 - eps)));

  LatticeModel out = model;
  Matrix& e = out.inter_.entries;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l || std::labs(k - l) < t.cutoff) continue;
      bool both_left = (k < i && l < i);
      bool both_right = (k > j && l > j);
      if (both_left || both_right) continue;
      t.pairs.emplace_back(k, l);
      t.dropped_mass += std::abs(model.interaction().entries(k, l));
      e(k, l) = 0.0;
    }
  return {std::move(out), std::move(t)};
}

// ---------------------------------------------------------------------------
// unified density view consumed by the quadrature oracle and the sampler
//
//   density(z) ~ exp(-sum_k phi_k(z_k) - sum_k d_k z_k^2 - sum_{k<l} w_kl z_k z_l)

struct GibbsDensity {
  int n = 0;
  std::function<double(int, double)> phi;  // non-quadratic per-site part (plus linear terms)
  std::vector<double> quad_diag;           // d_k
  Matrix pair_w;                           // w_kl, symmetric, zero diagonal
  std::vector<double> box;                 // per-site integration half-width
  double envelope_rate = 1.0;              // r in the tail envelope exp(-r z^2)
};

// Default integration box: max(6/sqrt(2r), 6) plus the linear-shift
// allowance, then widened until the Gaussian-envelope tail mass ratio
// erfc(L sqrt(r)) drops below 1e-12. For the lattice measure r = delta/2
// (envelope exp(-delta z^2 / 2)); the doubled quadratic form carries no
// 1/2 and gives r = delta.
inline double default_box_halfwidth(double rate, double shift) {
  double margin = std::abs(shift) / (2.0 * rate);
  double l = std::max(6.0 / std::sqrt(2.0 * rate), 6.0) + margin;
  while (std::erfc((l - margin) * std::sqrt(rate)) >= 1e-12) l *= 1.25;
  return l;
}

inline double tail_mass_ratio(double rate, double halfwidth) {
  return std::erfc(halfwidth * std::sqrt(rate));
}

inline GibbsDensity make_density(const LatticeModel& m) {
  GibbsDensity g;
  const int n = m.n_sites();
  g.n = n;
  g.quad_diag.resize(n);
  g.box.resize(n);
  g.pair_w = Matrix(n, n);
  const double delta = m.interaction().delta;
  g.envelope_rate = delta / 2.0;
  std::vector<double> lin(n);
  for (int k = 0; k < n; ++k) {
    lin[k] = m.linear_coeff(k);
    g.quad_diag[k] = 0.5 * m.interaction().entries(k, k);
    g.box[k] = default_box_halfwidth(g.envelope_rate, lin[k]);
    for (int l = 0; l < n; ++l)
      if (l != k) g.pair_w(k, l) = m.interaction().entries(k, l);
  }
  g.phi = [psi = m.potentials(), lin](int k, double z) {
    return psi[k].value(z) + lin[k] * z;
  };
  return g;
}

inline GibbsDensity make_density(const DoubledModel& m) {
  GibbsDensity g;
  const int n = m.n_sites();
  g.n = n;
  g.quad_diag.resize(n);
  g.box.resize(n);
  g.pair_w = Matrix(n, n);
  g.envelope_rate = m.delta();  // quadratic form carries no 1/2 here
  for (int k = 0; k < n; ++k) {
    g.quad_diag[k] = m.couplings()(k, k);
    g.box[k] = default_box_halfwidth(g.envelope_rate, 0.0);
    for (int l = 0; l < n; ++l)
      if (l != k) g.pair_w(k, l) = 2.0 * m.couplings()(k, l);
  }
  g.phi = [psi = m.potentials(), q = m.q()](int k, double p) {
    return psi[k].symmetrized(q[k], p);
  };
  return g;
}

// ---------------------------------------------------------------------------
// ghost extension: a +/-1 spin coupling the original and attractive variants

struct GhostModel {
  DoubledModel original;    // sigma = -1 branch
  DoubledModel attractive;  // sigma = +1 branch
  std::vector<std::pair<int, int>> omega;  // off-diagonal pairs with M_kl > 0 (k < l)
};

inline GhostModel make_ghost(const LatticeModel& base, const std::vector<double>& q) {
  GhostModel g;
  g.original = double_model(base, q, DoubledVariant::Original);
  g.attractive = double_model(base, q, DoubledVariant::Attractive);
  const int n = base.n_sites();
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      if (base.interaction().entries(k, l) > 0.0) g.omega.emplace_back(k, l);
  return g;
}

}  // namespace spinlab
