#pragma once

// Metropolis-within-Gibbs sampler for the lattice and doubled measures.
//
// Single-site Gaussian proposals, adapted by Robbins-Monro on log(sigma)
// during burn-in only; the measurement kernel is frozen. Local fields
// s_k = sum_j w_kj x_j are maintained incrementally; rows can be truncated
// at |w| <= kernel_eps, with the induced stale-field bias bounded and
// reported. Chains are independent, each owning a counter-based stream,
// so results do not depend on thread scheduling.

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "spinlab/model.hpp"
#include "spinlab/parallel.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

enum class ScanOrder { Systematic, RandomScan };

struct ChainConfig {
  std::uint64_t seed = 1;
  int n_chains = 4;
  int burn_in = 1000;
  int measure = 10000;
  int measure_every = 1;
  ScanOrder scan = ScanOrder::Systematic;
  double proposal_sigma = 1.0;
  double target_lo = 0.30;
  double target_hi = 0.45;
  double kernel_eps = 0.0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    require(n_chains >= 2, "n_chains", "need at least two chains");
    require(burn_in >= 0 && measure > 0, "measure", "need positive measurement sweeps");
    require(measure_every >= 1, "measure_every", "measurement stride must be >= 1");
    require(proposal_sigma > 0.0, "proposal_sigma", "proposal width must be positive");
    require(kernel_eps >= 0.0, "kernel_eps", "kernel truncation must be nonnegative");
  }
};

struct DivergenceError : Error {
  DivergenceError(int site, long sweep)
      : Error("chain", "chain diverged at site " + std::to_string(site) + ", sweep " +
                           std::to_string(sweep)),
        site(site), sweep(sweep) {}
  int site;
  long sweep;
};

struct PairStat {
  int i = 0, j = 0;
  double cov = 0.0;
  double se = 0.0;
  double tau_int = 0.5;
  double ess = 0.0;
  double split_rhat = 1.0;
};

struct SiteStat {
  int i = 0;
  double mean = 0.0;
  double se_mean = 0.0;
  double second_moment = 0.0;
  double se_second = 0.0;
};

struct CovarianceTable {
  std::vector<PairStat> rows;

  const PairStat* find(int i, int j) const {
    for (const auto& r : rows)
      if ((r.i == i && r.j == j) || (r.i == j && r.j == i)) return &r;
    return nullptr;
  }
};

struct ChainStats {
  std::vector<double> acceptance;  // per chain
  double max_split_rhat = 1.0;
  double min_ess = 0.0;
  bool converged = true;  // max split-chain diagnostic <= 1.05
  bool ess_ok = true;     // every observable has ESS >= 100
  bool flagged = false;
  double bias_bound = 0.0;  // max_k (skipped row mass) * mean |x|
  std::vector<SiteStat> sites;
  std::vector<double> mean_abs;  // mean |x_i| pooled, used for the bias bound
};

// One chain with its own state, fields, and random stream. Exposed so
// kernel-level tests can drive sweeps directly.
class ChainDriver {
 public:
  ChainDriver(const GibbsDensity& g, const ChainConfig& cfg, int chain_index)
      : g_(&g), cfg_(cfg), rng_(cfg.seed, static_cast<std::uint64_t>(chain_index)),
        x_(g.n, 0.0), s_(g.n, 0.0), lsig_(g.n, std::log(cfg.proposal_sigma)),
        skipped_mass_(g.n, 0.0) {
    const int n = g.n;
    nbr_index_.resize(n);
    nbr_w_.resize(n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        double w = g.pair_w(k, i);
        if (w == 0.0) continue;
        if (std::abs(w) > cfg.kernel_eps) {
          nbr_index_[k].push_back(i);
          nbr_w_[k].push_back(w);
        } else {
          skipped_mass_[k] += std::abs(w);
        }
      }
    }
    for (int k = 0; k < n; ++k) x_[k] = 0.5 * rng_.gaussian();
    refresh_fields();
  }

  void refresh_fields() {
    const int n = g_->n;
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != k) s += g_->pair_w(k, i) * x_[i];
      s_[k] = s;
    }
  }

  // One full sweep; adapt=true runs the Robbins-Monro proposal update.
  void sweep(bool adapt) {
    const int n = g_->n;
    const double gamma = adapt ? 0.6 / (1.0 + static_cast<double>(sweeps_) / 50.0) : 0.0;
    for (int step = 0; step < n; ++step) {
      int k = cfg_.scan == ScanOrder::Systematic
                  ? step
                  : static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
      double sigma = std::exp(lsig_[k]);
      double xk = x_[k];
      double xp = xk + sigma * rng_.gaussian();
      double du = g_->phi(k, xp) - g_->phi(k, xk) + g_->quad_diag[k] * (xp * xp - xk * xk) +
                  (xp - xk) * s_[k];
      bool acc = false;
      if (du <= 0.0 || rng_.uniform() < std::exp(-du)) {
        acc = true;
        if (std::abs(xp) > 10.0 * g_->box[k]) throw DivergenceError(k, sweeps_);
        double dx = xp - xk;
        x_[k] = xp;
        const auto& idx = nbr_index_[k];
        const auto& wts = nbr_w_[k];
        for (std::size_t t = 0; t < idx.size(); ++t) s_[idx[t]] += wts[t] * dx;
      }
      ++proposals_;
      accepts_ += acc ? 1 : 0;
      if (adapt) {
        lsig_[k] += gamma * ((acc ? 1.0 : 0.0) - 0.5 * (cfg_.target_lo + cfg_.target_hi));
        lsig_[k] = std::min(4.0, std::max(-8.0, lsig_[k]));
      }
    }
    ++sweeps_;
  }

  const std::vector<double>& state() const { return x_; }
  double acceptance() const { return proposals_ ? static_cast<double>(accepts_) / proposals_ : 0.0; }
  void reset_acceptance() { proposals_ = 0; accepts_ = 0; }
  double skipped_mass(int k) const { return skipped_mass_[k]; }
  double proposal_sigma(int k) const { return std::exp(lsig_[k]); }

 private:
  const GibbsDensity* g_;
  ChainConfig cfg_;
  CounterRng rng_;
  std::vector<double> x_, s_, lsig_, skipped_mass_;
  std::vector<std::vector<int>> nbr_index_;
  std::vector<std::vector<double>> nbr_w_;
  long sweeps_ = 0;
  long long proposals_ = 0, accepts_ = 0;
};

namespace detail {

struct BatchAccum {
  int n_batches = 0;
  long batch_size = 0;
  std::vector<double> sums;  // per batch
  double total = 0.0;
  double total_sq = 0.0;
  long count = 0;

  void init(int nb, long bs) {
    n_batches = nb;
    batch_size = bs;
    sums.assign(nb, 0.0);
  }
  void add(long sample_idx, double v) {
    long b = sample_idx / batch_size;
    if (b >= n_batches) return;  // tail samples beyond nb*bs are dropped everywhere
    sums[b] += v;
    total += v;
    total_sq += v * v;
    ++count;
  }
  double mean() const { return count ? total / count : 0.0; }
  double var() const {
    if (count < 2) return 0.0;
    double m = mean();
    return std::max(0.0, total_sq / count - m * m);
  }
};

inline double split_rhat(const std::vector<std::pair<double, double>>& half_mean_var,
                         long half_len) {
  // standard split-chain potential scale reduction over 2*n_chains halves
  const std::size_t m = half_mean_var.size();
  if (m < 2 || half_len < 2) return 1.0;
  double mean_all = 0.0;
  for (auto& h : half_mean_var) mean_all += h.first;
  mean_all /= static_cast<double>(m);
  double b = 0.0, w = 0.0;
  for (auto& h : half_mean_var) {
    b += (h.first - mean_all) * (h.first - mean_all);
    w += h.second;
  }
  b *= static_cast<double>(half_len) / (m - 1);
  w /= static_cast<double>(m);
  if (w <= 0.0) return 1.0;
  double var_plus = (static_cast<double>(half_len - 1) / half_len) * w + b / half_len;
  return std::sqrt(var_plus / w);
}

}  // namespace detail

struct RunResult {
  CovarianceTable table;
  ChainStats stats;
  std::vector<double> extra_means;  // one per extra observable
  std::vector<double> extra_ses;
  std::vector<double> extra_taus;
};

// Core engine: pair covariances plus optional scalar observables of the state.
inline RunResult run_chains(const GibbsDensity& g, const ChainConfig& cfg,
                            const std::vector<std::pair<int, int>>& pairs,
                            const std::vector<std::function<double(const std::vector<double>&)>>&
                                extras = {}) {
  cfg.validate();
  for (auto& pr : pairs)
    require(pr.first >= 0 && pr.first < g.n && pr.second >= 0 && pr.second < g.n, "pairs",
            "pair site out of range");

  const long samples = cfg.measure / cfg.measure_every;
  require(samples >= 4, "measure", "too few measurement samples");
  const int n_batches = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const long batch_size = std::max<long>(1, samples / n_batches);
  const long used = static_cast<long>(n_batches) * batch_size;

  std::vector<int> sites;  // union of pair endpoints
  {
    std::vector<char> seen(g.n, 0);
    for (auto& pr : pairs) {
      if (!seen[pr.first]) { seen[pr.first] = 1; sites.push_back(pr.first); }
      if (!seen[pr.second]) { seen[pr.second] = 1; sites.push_back(pr.second); }
    }
  }
  std::vector<int> site_slot(g.n, -1);
  for (std::size_t t = 0; t < sites.size(); ++t) site_slot[sites[t]] = static_cast<int>(t);

  struct ChainOut {
    std::vector<detail::BatchAccum> prod;    // per pair
    std::vector<detail::BatchAccum> single;  // per tracked site
    std::vector<detail::BatchAccum> square;  // per tracked site
    std::vector<detail::BatchAccum> extra;   // per extra observable
    double acceptance = 0.0;
    double mean_abs = 0.0;
    double max_skipped = 0.0;
  };
  std::vector<ChainOut> outs(cfg.n_chains);
  int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();

  std::exception_ptr first_error = nullptr;
  std::mutex err_mtx;
  parallel_for(cfg.n_chains, threads, [&](std::size_t c) {
    try {
      ChainDriver drv(g, cfg, static_cast<int>(c));
      for (int t = 0; t < cfg.burn_in; ++t) drv.sweep(true);
      drv.reset_acceptance();
      ChainOut& out = outs[c];
      out.prod.resize(pairs.size());
      out.single.resize(sites.size());
      out.square.resize(sites.size());
      out.extra.resize(extras.size());
      for (auto& b : out.prod) b.init(n_batches, batch_size);
      for (auto& b : out.single) b.init(n_batches, batch_size);
      for (auto& b : out.square) b.init(n_batches, batch_size);
      for (auto& b : out.extra) b.init(n_batches, batch_size);
      double abs_sum = 0.0;
      long abs_count = 0;
      long rec = 0;
      for (long t = 0; t < cfg.measure; ++t) {
        drv.sweep(false);
        if (t % cfg.measure_every) continue;
        if (rec >= used) break;
        const auto& x = drv.state();
        for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx)
          out.prod[pidx].add(rec, x[pairs[pidx].first] * x[pairs[pidx].second]);
        for (std::size_t s = 0; s < sites.size(); ++s) {
          out.single[s].add(rec, x[sites[s]]);
          out.square[s].add(rec, x[sites[s]] * x[sites[s]]);
        }
        for (std::size_t e = 0; e < extras.size(); ++e) out.extra[e].add(rec, extras[e](x));
        for (double v : x) abs_sum += std::abs(v);
        abs_count += g.n;
        ++rec;
      }
      out.acceptance = drv.acceptance();
      out.mean_abs = abs_count ? abs_sum / abs_count : 0.0;
      for (int k = 0; k < g.n; ++k) out.max_skipped = std::max(out.max_skipped, drv.skipped_mass(k));
    } catch (...) {
      std::lock_guard<std::mutex> lk(err_mtx);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  RunResult res;
  res.stats.acceptance.resize(cfg.n_chains);
  double mean_abs = 0.0;
  double max_skipped = 0.0;
  for (int c = 0; c < cfg.n_chains; ++c) {
    res.stats.acceptance[c] = outs[c].acceptance;
    mean_abs += outs[c].mean_abs / cfg.n_chains;
    max_skipped = std::max(max_skipped, outs[c].max_skipped);
  }
  res.stats.bias_bound = max_skipped * mean_abs;
  res.stats.mean_abs.assign(1, mean_abs);

  const long n_total = static_cast<long>(cfg.n_chains) * used;
  auto pooled_mean = [&](auto member, std::size_t idx) {
    double s = 0.0;
    for (auto& o : outs) s += (o.*member)[idx].total;
    return s / static_cast<double>(n_total);
  };

  // per-site statistics
  for (std::size_t s = 0; s < sites.size(); ++s) {
    SiteStat st;
    st.i = sites[s];
    st.mean = pooled_mean(&ChainOut::single, s);
    st.second_moment = pooled_mean(&ChainOut::square, s);
    double var_b_mean = 0.0, var_b_sq = 0.0;
    for (auto& o : outs) {
      for (int b = 0; b < n_batches; ++b) {
        double bm = o.single[s].sums[b] / batch_size - st.mean;
        double bq = o.square[s].sums[b] / batch_size - st.second_moment;
        var_b_mean += bm * bm;
        var_b_sq += bq * bq;
      }
    }
    int nb_total = cfg.n_chains * n_batches;
    st.se_mean = std::sqrt(var_b_mean / nb_total / std::max(1, nb_total - 1));
    st.se_second = std::sqrt(var_b_sq / nb_total / std::max(1, nb_total - 1));
    res.stats.sites.push_back(st);
  }

  // per-pair covariance, batch-means error, autocorrelation time, split-Rhat
  double worst_rhat = 1.0;
  double min_ess = 1e300;
  for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
    auto [i, j] = pairs[pidx];
    double mx = pooled_mean(&ChainOut::single, site_slot[i]);
    double my = pooled_mean(&ChainOut::single, site_slot[j]);
    double mz = pooled_mean(&ChainOut::prod, pidx);
    PairStat ps;
    ps.i = i;
    ps.j = j;
    ps.cov = mz - mx * my;

    // linearized batch values h_b = m_b(xy) - mx m_b(y) - my m_b(x) + mx my
    double hvar = 0.0;
    double hmean = ps.cov;
    std::vector<std::pair<double, double>> halves;
    long half_len = (n_batches / 2) * batch_size;
    for (auto& o : outs) {
      double h1s = 0.0, h1q = 0.0, h2s = 0.0, h2q = 0.0;
      int nb1 = n_batches / 2;
      for (int b = 0; b < n_batches; ++b) {
        double h = o.prod[pidx].sums[b] / batch_size -
                   mx * o.single[site_slot[j]].sums[b] / batch_size -
                   my * o.single[site_slot[i]].sums[b] / batch_size + mx * my;
        hvar += (h - hmean) * (h - hmean);
        if (b < nb1) { h1s += h; h1q += h * h; }
        else { h2s += h; h2q += h * h; }
      }
      int nb2 = n_batches - nb1;
      if (nb1 >= 2 && nb2 >= 2) {
        halves.push_back({h1s / nb1, std::max(0.0, h1q / nb1 - (h1s / nb1) * (h1s / nb1)) * nb1 /
                                         (nb1 - 1)});
        halves.push_back({h2s / nb2, std::max(0.0, h2q / nb2 - (h2s / nb2) * (h2s / nb2)) * nb2 /
                                         (nb2 - 1)});
      }
    }
    int nb_total = cfg.n_chains * n_batches;
    double var_bm = hvar / std::max(1, nb_total - 1);
    ps.se = std::sqrt(var_bm / nb_total);

    // tau from the raw product series: Var(mean) = 2 tau Var(z) / n
    double var_z = 0.0;
    for (auto& o : outs) var_z += o.prod[pidx].var() / cfg.n_chains;
    double var_of_mean = var_bm / nb_total;
    ps.tau_int = var_z > 0.0 ? std::max(0.5, 0.5 * var_of_mean * n_total / var_z) : 0.5;
    ps.ess = n_total / (2.0 * ps.tau_int);
    ps.split_rhat = detail::split_rhat(halves, half_len);
    worst_rhat = std::max(worst_rhat, ps.split_rhat);
    min_ess = std::min(min_ess, ps.ess);
    res.table.rows.push_back(ps);
  }

  // extra observables
  for (std::size_t e = 0; e < extras.size(); ++e) {
    double m = pooled_mean(&ChainOut::extra, e);
    double var_b = 0.0;
    double var_z = 0.0;
    for (auto& o : outs) {
      for (int b = 0; b < n_batches; ++b) {
        double d = o.extra[e].sums[b] / batch_size - m;
        var_b += d * d;
      }
      var_z += o.extra[e].var() / cfg.n_chains;
    }
    int nb_total = cfg.n_chains * n_batches;
    double var_bm = var_b / std::max(1, nb_total - 1);
    res.extra_means.push_back(m);
    res.extra_ses.push_back(std::sqrt(var_bm / nb_total));
    res.extra_taus.push_back(var_z > 0.0 ? std::max(0.5, 0.5 * (var_bm / nb_total) * n_total / var_z)
                                         : 0.5);
  }

  if (pairs.empty()) min_ess = static_cast<double>(n_total);
  res.stats.max_split_rhat = worst_rhat;
  res.stats.min_ess = min_ess;
  res.stats.converged = worst_rhat <= 1.05;
  res.stats.ess_ok = min_ess >= 100.0;
  res.stats.flagged = !(res.stats.converged && res.stats.ess_ok);
  return res;
}

inline RunResult run_chains(const LatticeModel& m, const ChainConfig& cfg,
                            const std::vector<std::pair<int, int>>& pairs) {
  GibbsDensity g = make_density(m);
  return run_chains(g, cfg, pairs);
}

inline RunResult run_chains(const DoubledModel& m, const ChainConfig& cfg,
                            const std::vector<std::pair<int, int>>& pairs) {
  GibbsDensity g = make_density(m);
  return run_chains(g, cfg, pairs);
}

// ---------------------------------------------------------------------------
// exponential moment probe: E[e^{a x_i^2}] plus E[x_i^{2k}] for k <= 4

struct MomentProbeResult {
  double exp_moment = 0.0;
  double exp_moment_se = 0.0;
  std::vector<double> even_moments;     // E[x^{2k}], k = 0..4
  std::vector<double> even_moment_ses;
};

inline MomentProbeResult moment_probe(const GibbsDensity& g, double delta, const ChainConfig& cfg,
                                      int site, double a) {
  require(site >= 0 && site < g.n, "site", "site out of range");
  require(a >= 0.0 && a <= delta / 2.0, "a", "exponent must lie in [0, delta/2]");
  std::vector<std::function<double(const std::vector<double>&)>> extras;
  extras.push_back([site, a](const std::vector<double>& x) { return std::exp(a * x[site] * x[site]); });
  for (int k = 0; k <= 4; ++k)
    extras.push_back([site, k](const std::vector<double>& x) {
      return std::pow(x[site] * x[site], static_cast<double>(k));
    });
  auto r = run_chains(g, cfg, {}, extras);
  MomentProbeResult out;
  out.exp_moment = r.extra_means[0];
  out.exp_moment_se = r.extra_ses[0];
  for (int k = 0; k <= 4; ++k) {
    out.even_moments.push_back(r.extra_means[1 + k]);
    out.even_moment_ses.push_back(r.extra_ses[1 + k]);
  }
  return out;
}

inline MomentProbeResult moment_probe(const LatticeModel& m, const ChainConfig& cfg, int site,
                                      double a) {
  GibbsDensity g = make_density(m);
  return moment_probe(g, m.interaction().delta, cfg, site, a);
}

inline MomentProbeResult moment_probe(const DoubledModel& m, const ChainConfig& cfg, int site,
                                      double a) {
  GibbsDensity g = make_density(m);
  return moment_probe(g, m.delta(), cfg, site, a);
}

}  // namespace spinlab
