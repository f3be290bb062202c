// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sgdinf/baselines.hpp"
#include "sgdinf/bench.hpp"
#include "sgdinf/inference.hpp"
#include "sgdinf/linalg.hpp"
#include "sgdinf/random_scaling.hpp"

using namespace sgdinf;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += (cond ? "" : "!") + what;
  }
};

std::string fmtd(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmte(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

const AggregateRow& row_for(const ExperimentResult& r, Method m) {
  for (const auto& row : r.metrics) {
    if (row.method == m) return row;
  }
  throw std::runtime_error("method missing from results");
}

// 1 ---------------------------------------------------------------------------
Check oracle_equivalence() {
  Check c;
  std::mt19937_64 gen(20240601);
  double worst_rs = 0.0;
  double worst_bm = 0.0;
  double worst_avg = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 1 + gen() % 10;
    const std::size_t n = 2 + gen() % 999;
    const auto path = oracle::random_path(gen, n, d);

    // recursive average and random scaling, unshifted
    RandomScalingState rs(d);
    std::vector<double> bar(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t i = 0; i < d; ++i) bar[i] += (path[t][i] - bar[i]) / double(t + 1);
      rs.update(bar);
    }
    const auto want_bar = oracle::history_average(path, 0);
    for (std::size_t i = 0; i < d; ++i) {
      worst_avg = std::max(worst_avg, std::abs(bar[i] - want_bar[i]) /
                                          std::max(1.0, std::abs(want_bar[i])));
    }
    worst_rs = std::max(worst_rs, oracle::relative_frobenius(
                                      rs.finalize(), oracle::nested_batch_scaling(path)));

    // overlapping batch means under both anchor families
    const bool arith = trial % 2 == 0;
    const std::uint64_t step = 1 + gen() % 9;
    const double a = 0.505 + double(gen() % 1000) / 1000.0 * 0.49;
    const auto rule = arith ? BatchAnchorRule::arithmetic(step) : BatchAnchorRule::for_learning_rate(a);
    const auto anchors =
        arith ? oracle::arithmetic_anchors(step, n) : oracle::power_anchors(1.0 / (1.0 - a), n);
    BatchMeansState bm(d, rule);
    for (const auto& b : path) bm.update(b);
    worst_bm = std::max(worst_bm,
                        oracle::relative_frobenius(
                            bm.finalize(want_bar),
                            oracle::direct_overlapping_batch_means(path, anchors, want_bar)));
  }
  c.require(worst_rs < 1e-8, "V rel frob " + fmte(worst_rs) + " < 1e-8");
  c.require(worst_bm < 1e-8, "batch means rel frob " + fmte(worst_bm) + " < 1e-8");
  c.require(worst_avg < 1e-12, "average rel err " + fmte(worst_avg) + " < 1e-12");
  return c;
}

// 2 ---------------------------------------------------------------------------
Check critical_values() {
  Check c;
  CriticalValueSimulation sim;
  sim.statistic = Statistic::t;
  sim.ell = 1;
  sim.paths = 200000;
  sim.grid = 2000;
  sim.seed = SeedSpec{20220101, 0};
  sim.quantiles = {0.90, 0.95, 0.975, 0.99};
  const auto est = simulate_critical_values(sim);
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double want = *CriticalValueTable::one_sided(sim.quantiles[i]);
    const double tol = sim.quantiles[i] == 0.99 ? 0.25 : 0.15;
    c.require(std::abs(est[i].value - want) <= tol,
              "q" + fmtd(sim.quantiles[i], 3) + "=" + fmtd(est[i].value, 3) + " vs " +
                  fmtd(want, 3) + " +-" + fmtd(tol, 2));
  }
  return c;
}

ExperimentConfig linear_design(double a) {
  ExperimentConfig cfg;
  cfg.model = "linear";
  cfg.d = 5;
  cfg.gamma0 = 0.5;
  cfg.a = a;
  cfg.n = 50000;
  cfg.burn_in = 0;
  cfg.replications = 400;
  cfg.level = 0.95;
  cfg.seed = 5050;
  return cfg;
}

// 3 ---------------------------------------------------------------------------
Check linear_coverage() {
  Check c;
  auto cfg = linear_design(0.505);
  cfg.methods = {Method::random_scaling, Method::plugin};
  const auto res = run_experiment(cfg);
  c.require(res.failures.empty(), std::to_string(res.failures.size()) + " failed reps");
  const auto& rs = row_for(res, Method::random_scaling);
  const auto& pi = row_for(res, Method::plugin);
  c.require(rs.coverage >= 0.915 && rs.coverage <= 0.970,
            "RS coverage " + fmtd(rs.coverage, 3) + " in [0.915, 0.970]");
  c.require(std::abs(rs.avg_length - 0.023) <= 0.2 * 0.023,
            "RS length " + fmtd(rs.avg_length) + " within 20% of 0.023");
  c.require(pi.coverage >= 0.920 && pi.coverage <= 0.975,
            "plug-in coverage " + fmtd(pi.coverage, 3) + " in [0.920, 0.975]");
  return c;
}

// 4 ---------------------------------------------------------------------------
Check batch_means_fragility() {
  Check c;
  auto cfg = linear_design(0.667);
  cfg.methods = {Method::random_scaling, Method::batch_means};
  const auto res = run_experiment(cfg);
  c.require(res.failures.empty(), std::to_string(res.failures.size()) + " failed reps");
  const double rs = row_for(res, Method::random_scaling).coverage;
  const double bm = row_for(res, Method::batch_means).coverage;
  c.require(bm <= 0.87, "batch-means coverage " + fmtd(bm, 3) + " <= 0.87");
  c.require(rs - bm >= 0.05, "RS " + fmtd(rs, 3) + " exceeds it by " + fmtd(rs - bm, 3) +
                                 " >= 0.05");
  return c;
}

// 5 ---------------------------------------------------------------------------
Check logistic_coverage() {
  Check c;
  ExperimentConfig cfg;
  cfg.model = "logistic";
  cfg.d = 5;
  cfg.gamma0 = 0.5;
  cfg.a = 0.505;
  cfg.n = 100000;
  cfg.replications = 300;
  cfg.methods = {Method::random_scaling};
  cfg.seed = 7070;
  const auto res = run_experiment(cfg);
  c.require(res.failures.empty(), std::to_string(res.failures.size()) + " failed reps");
  const auto& rs = row_for(res, Method::random_scaling);
  c.require(rs.coverage >= 0.895 && rs.coverage <= 0.960,
            "RS coverage " + fmtd(rs.coverage, 3) + " in [0.895, 0.960]");
  c.require(std::abs(rs.avg_length - 0.036) <= 0.25 * 0.036,
            "RS length " + fmtd(rs.avg_length) + " within 25% of 0.036");
  return c;
}

// 6 ---------------------------------------------------------------------------
Check scalar_speedup() {
  Check c;
  ExperimentConfig cfg;
  cfg.model = "logistic";
  cfg.d = 200;
  cfg.n = 20000;
  cfg.burn_in = default_burn_in(200);
  cfg.replications = 1;
  cfg.methods = {Method::random_scaling, Method::random_scaling_scalar};
  cfg.seed = 200;
  const auto rec = run_replication(cfg, 0);
  const auto& full = rec.results[0];
  const auto& scalar = rec.results[1];
  const double ratio = full.accumulator_seconds / scalar.accumulator_seconds;
  c.require(ratio >= 10.0, "accumulator time ratio " + fmtd(ratio, 1) + " >= 10 (full " +
                               fmtd(full.accumulator_seconds, 3) + "s, scalar " +
                               fmtd(scalar.accumulator_seconds, 4) + "s)");
  const double rel = std::abs(full.variance - scalar.variance) / std::abs(full.variance);
  c.require(rel <= 1e-10, "V11 rel diff " + fmte(rel) + " <= 1e-10");
  return c;
}

// 7 ---------------------------------------------------------------------------
SymMatrix stream_rs(const std::vector<std::vector<double>>& path, const ParamVector& shift) {
  RandomScalingState rs(shift);
  std::vector<double> bar(path.front().size(), 0.0);
  for (std::size_t t = 0; t < path.size(); ++t) {
    for (std::size_t i = 0; i < bar.size(); ++i) bar[i] += (path[t][i] - bar[i]) / double(t + 1);
    rs.update(bar);
  }
  return rs.finalize();
}

Check identities() {
  Check c;
  std::mt19937_64 gen(777);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(0.5);

  double t_wald = 0.0;
  double shift = 0.0;
  double scale = 0.0;
  double min_eig = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 8;
    const std::size_t n = 50 + 10 * trial;
    const auto path = oracle::random_path(gen, n, d);
    const auto bar = oracle::history_average(path, 0);
    const auto v = stream_rs(path, ParamVector(path.front()));

    const std::size_t j = trial % d;
    const double b0 = bar[j] + 0.2 * z(gen);
    const double t = t_statistic(bar[j], b0, v(j, j), n);
    const double w = wald_statistic(LinearRestriction::coordinate(d, j, b0), ParamVector(bar), v, n);
    t_wald = std::max(t_wald, std::abs(w - t * t) / (t * t));

    const double s = 50.0 * z(gen);
    auto moved = path;
    for (auto& b : moved) {
      for (auto& x : b) x += s;
    }
    // accumulators centred on the first iterate, as the pipelines do
    shift = std::max(shift, oracle::relative_frobenius(stream_rs(moved, ParamVector(moved.front())), v));

    const double k = 0.1 + 10.0 * std::abs(z(gen));
    auto scaled = path;
    for (auto& b : scaled) {
      for (auto& x : b) x *= k;
    }
    std::vector<double> sh = path.front();
    for (auto& x : sh) x *= k;
    auto want = v;
    want *= k * k;
    scale = std::max(scale, oracle::relative_frobenius(stream_rs(scaled, ParamVector(sh)), want));

    const double tr = std::max(1e-300, v.trace());
    min_eig = std::min(min_eig, min_eigenvalue(v) / tr);
    BatchMeansState bm(ParamVector(path.front()), BatchAnchorRule::for_learning_rate(0.6));
    for (const auto& b : path) bm.update(b);
    const auto u2 = bm.finalize(bar);
    min_eig = std::min(min_eig, min_eigenvalue(u2) / std::max(1e-300, u2.trace()));
    const auto u1 = batch_means_fixed(oracle::to_params(path), 5);
    min_eig = std::min(min_eig, min_eigenvalue(u1) / std::max(1e-300, u1.trace()));
  }
  c.require(t_wald <= 1e-12, "t^2=Wald " + fmte(t_wald));
  c.require(shift <= 1e-8, "shift " + fmte(shift));
  c.require(scale <= 1e-10, "scale " + fmte(scale));

  // plug-in sandwich PSD on real model data
  for (const char* name : {"linear", "logistic"}) {
    const std::size_t d = 6;
    auto model = make_model(name, d);
    PlugInState pi(d);
    const auto data = std::string(name) == "linear" ? generate_linear(SeedSpec{1, 1}, d, 2000)
                                                    : generate_logistic(SeedSpec{1, 1}, d, 2000);
    std::vector<double> beta(d, 0.1);
    for (const auto& o : data) pi.update(*model, beta, o);
    const auto v = pi.finalize();
    min_eig = std::min(min_eig, min_eigenvalue(v) / v.trace());
  }
  c.require(min_eig >= -1e-12, "PSD min eig/trace " + fmte(min_eig));

  // finite differences
  double worst_g = 0.0;
  double worst_h = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 7;
    auto model = make_model(trial % 2 ? "logistic" : "linear", d);
    std::vector<double> beta(d);
    std::vector<double> x(d);
    for (auto& b : beta) b = 0.5 * z(gen);
    for (auto& v : x) v = z(gen);
    const Observation obs{ParamVector(x), trial % 2 ? (coin(gen) ? 1.0 : 0.0) : z(gen)};
    std::vector<double> g(d);
    model->gradient(beta, obs, g);
    const auto h = model->hessian_contrib(ParamVector(beta), obs).dense();
    const double step = 1e-6;
    std::vector<double> gu(d);
    std::vector<double> gd(d);
    for (std::size_t i = 0; i < d; ++i) {
      auto up = beta;
      auto dn = beta;
      up[i] += step;
      dn[i] -= step;
      const double fd = (model->loss(up, obs) - model->loss(dn, obs)) / (2 * step);
      worst_g = std::max(worst_g, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
      model->gradient(up, obs, gu);
      model->gradient(dn, obs, gd);
      for (std::size_t r = 0; r < d; ++r) {
        const double fh = (gu[r] - gd[r]) / (2 * step);
        worst_h = std::max(worst_h, std::abs(fh - h[r * d + i]) / std::max(1.0, std::abs(h[r * d + i])));
      }
    }
  }
  c.require(worst_g <= 1e-6, "FD gradient " + fmte(worst_g));
  c.require(worst_h <= 1e-5, "FD Hessian " + fmte(worst_h));

  // linear SGD path scales with (y, beta_0)
  double equiv = 0.0;
  const auto data = generate_linear(SeedSpec{3, 3}, 4, 5000);
  LinearModel lin(4);
  const StepSchedule sched(0.5, 0.505);
  for (double k : {-2.5, 0.01, 40.0}) {
    SgdState a(ParamVector{0.1, -0.2, 0.3, 0.0});
    SgdState b(ParamVector{0.1 * k, -0.2 * k, 0.3 * k, 0.0});
    for (const auto& o : data) {
      a.step(lin, o, sched);
      b.step(lin, {o.x, k * o.y}, sched);
      for (std::size_t i = 0; i < 4; ++i) {
        equiv = std::max(equiv, std::abs(b.beta()[i] - k * a.beta()[i]) /
                                    (std::abs(k) * std::max(1.0, std::abs(a.beta()[i]))));
      }
    }
  }
  c.require(equiv <= 1e-12, "SGD scale equivariance " + fmte(equiv));
  return c;
}

// 8 ---------------------------------------------------------------------------
Check pivot() {
  Check c;
  const std::size_t reps = 20000;
  const std::size_t n = 2000;
  std::vector<double> ts(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(SeedSpec{8, r});
    ScalarScalingState st(0);
    double bar = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      bar += (rng.normal() - bar) / double(t);
      st.update(bar);
    }
    ts[r] = t_statistic(bar, 0.0, st.finalize(), n);
  }
  std::sort(ts.begin(), ts.end());
  const double q = sorted_quantile(ts, 0.975);
  c.require(std::abs(q - 6.747) <= 0.2, "97.5% quantile " + fmtd(q, 3) + " within 0.2 of 6.747");
  return c;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "critical-value regeneration", critical_values},
      {3, "linear coverage", linear_coverage},
      {4, "batch-means fragility", batch_means_fragility},
      {5, "logistic coverage", logistic_coverage},
      {6, "scalar scaling speed", scalar_speedup},
      {7, "identities and invariances", identities},
      {8, "pivot sanity", pivot},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& crit : all) {
    if (!wanted.empty() && !wanted.count(crit.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = crit.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%d] %s: %s (%.1fs)\n", result.ok ? "PASS" : "FAIL", crit.id, crit.name,
                result.detail.c_str(), secs);
    std::fflush(stdout);
    if (!result.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
