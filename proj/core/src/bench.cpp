#include "sgdinf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "sgdinf/inference.hpp"
#include "sgdinf/parallel.hpp"
#include "sgdinf/random_scaling.hpp"

namespace sgdinf {

// --- designs ----------------------------------------------------------------

ParamVector true_beta(std::size_t d) {
  if (d == 0) throw InvalidArgument("d must be >= 1");
  if (d == 1) return ParamVector{0.5};
  ParamVector beta(d);
  for (std::size_t j = 0; j < d; ++j) {
    beta[j] = static_cast<double>(j) / static_cast<double>(d - 1);
  }
  return beta;
}

LinearGenerator::LinearGenerator(SeedSpec seed, ParamVector beta_star,
                                 std::uint64_t count, double noise)
    : rng_(seed), beta_star_(std::move(beta_star)), remaining_(count), noise_(noise) {}

bool LinearGenerator::next(Observation& obs) {
  if (remaining_ == 0) return false;
  if (remaining_ != kUnbounded) --remaining_;
  const std::size_t d = beta_star_.size();
  if (obs.x.size() != d) obs.x = ParamVector(d);
  double mean = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    obs.x[i] = rng_.normal();
    mean += obs.x[i] * beta_star_[i];
  }
  obs.y = mean + noise_ * rng_.normal();
  return true;
}

LogisticGenerator::LogisticGenerator(SeedSpec seed, ParamVector beta_star,
                                     std::uint64_t count)
    : rng_(seed), beta_star_(std::move(beta_star)), remaining_(count) {}

bool LogisticGenerator::next(Observation& obs) {
  if (remaining_ == 0) return false;
  if (remaining_ != kUnbounded) --remaining_;
  const std::size_t d = beta_star_.size();
  if (obs.x.size() != d) obs.x = ParamVector(d);
  double index = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    obs.x[i] = rng_.normal();
    index += obs.x[i] * beta_star_[i];
  }
  obs.y = index - rng_.logistic() >= 0.0 ? 1.0 : 0.0;
  return true;
}

namespace {

std::vector<Observation> drain(ObservationSource& source, std::uint64_t count) {
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(count));
  Observation obs;
  while (source.next(obs)) out.push_back(obs);
  return out;
}

}  // namespace

std::vector<Observation> generate_linear(SeedSpec seed, std::size_t d,
                                         std::uint64_t count) {
  LinearGenerator gen(seed, true_beta(d), count);
  return drain(gen, count);
}

std::vector<Observation> generate_logistic(SeedSpec seed, std::size_t d,
                                           std::uint64_t count) {
  LogisticGenerator gen(seed, true_beta(d), count);
  return drain(gen, count);
}

// --- configuration ----------------------------------------------------------

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::random_scaling: return "random_scaling";
    case Method::random_scaling_scalar: return "random_scaling_scalar";
    case Method::plugin: return "plugin";
    case Method::batch_means: return "batch_means";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : all_methods()) {
    if (to_string(m) == text) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

std::vector<Method> all_methods() {
  return {Method::random_scaling, Method::random_scaling_scalar, Method::plugin,
          Method::batch_means};
}

std::uint64_t default_burn_in(std::size_t d) noexcept { return d <= 5 ? 0 : 1000; }

std::vector<std::uint64_t> effective_checkpoints(const ExperimentConfig& config) {
  if (config.checkpoints.empty()) return {config.n};
  return config.checkpoints;
}

void validate(const ExperimentConfig& config) {
  if (config.model != "linear" && config.model != "logistic") {
    throw InvalidArgument("unknown model '" + config.model + "'");
  }
  if (config.d == 0) throw InvalidArgument("d must be >= 1");
  StepSchedule(config.gamma0, config.a);
  if (config.n == 0) throw InvalidArgument("n must be >= 1");
  if (config.replications == 0) throw InvalidArgument("replications must be >= 1");
  if (config.methods.empty()) throw InvalidArgument("no methods selected");
  if (!(config.level > 0.0 && config.level < 1.0)) {
    throw InvalidArgument("level must lie in (0, 1)");
  }
  if (config.target_coordinate < 1 || config.target_coordinate > config.d) {
    throw InvalidArgument("target coordinate must lie in [1, d]");
  }
  if (config.burn_in >= config.n) throw InvalidArgument("burn-in must be < n");
  const auto cps = effective_checkpoints(config);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] > config.n) throw InvalidArgument("checkpoint beyond n");
    if (cps[i] <= config.burn_in) {
      throw InvalidArgument("checkpoint " + std::to_string(cps[i]) +
                            " falls inside the burn-in");
    }
    if (i > 0 && cps[i] <= cps[i - 1]) {
      throw InvalidArgument("checkpoints must be strictly increasing");
    }
  }
  if (config.source && !config.truth) {
    throw InvalidArgument("a custom source needs the true coefficients");
  }
  if (config.truth && config.truth->size() != config.d) {
    throw DimensionMismatch(config.d, config.truth->size());
  }
}

double resolve_rs_critical_value(const ExperimentConfig& config) {
  if (config.rs_critical_value) return *config.rs_critical_value;
  if (auto cv = CriticalValueTable::two_sided(config.level)) return *cv;
  CriticalValueSimulation sim;
  sim.quantiles = {one_sided_probability(config.level)};
  sim.seed = SeedSpec{config.seed, 0}.child(0xC417u);
  sim.threads = config.threads;
  return simulate_critical_values(sim).front().value;
}

// --- one replication --------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::unique_ptr<ObservationSource> make_source(const ExperimentConfig& config,
                                               SeedSpec seed,
                                               const ParamVector& truth) {
  if (config.source) return config.source(seed);
  if (config.model == "linear") {
    return std::make_unique<LinearGenerator>(seed, truth, config.n);
  }
  return std::make_unique<LogisticGenerator>(seed, truth, config.n);
}

struct MethodSlot {
  Method method;
  double accumulator_seconds = 0.0;
  double finalize_seconds = 0.0;
  std::vector<MethodResult> results;
};

}  // namespace

ReplicationRecord run_replication(const ExperimentConfig& config,
                                  std::size_t rep_index) {
  validate(config);
  const auto checkpoints = effective_checkpoints(config);
  const double rs_cv = resolve_rs_critical_value(config);
  const std::size_t d = config.d;
  const std::size_t j = config.target_coordinate - 1;
  const SeedSpec seed{config.seed, rep_index};
  const ParamVector truth = config.truth ? *config.truth : true_beta(d);
  const auto model = make_model(config.model, d);
  const StepSchedule schedule(config.gamma0, config.a);
  const BatchAnchorRule rule =
      config.batch_rule ? *config.batch_rule
                        : BatchAnchorRule::for_learning_rate(config.a);
  auto source = make_source(config, seed, truth);

  std::vector<MethodSlot> slots;
  for (Method m : config.methods) slots.push_back({m, 0.0, 0.0, {}});

  std::optional<RandomScalingState> rs;
  std::optional<ScalarScalingState> rs_scalar;
  std::optional<PlugInState> plugin;
  std::optional<BatchMeansState> batch;

  SgdState state(ParamVector(d), config.burn_in);
  double shared_seconds = 0.0;
  std::size_t next_checkpoint = 0;
  Observation obs;

  for (std::uint64_t t = 1; t <= config.n; ++t) {
    if (!source->next(obs)) {
      throw InvalidArgument("observation source ended at t=" + std::to_string(t));
    }
    bool kept;
    const auto step_start = Clock::now();
    try {
      kept = state.step(*model, obs, schedule);
    } catch (const Divergence& e) {
      throw Divergence(e.iteration(), "replication " + std::to_string(rep_index));
    }
    shared_seconds += seconds_since(step_start);

    if (kept) {
      if (state.avg_count() == 1) {
        // Centre the accumulators on the last pre-average iterate.
        const ParamVector& shift = state.previous_beta();
        rs.emplace(shift);
        rs_scalar.emplace(j, shift[j]);
        plugin.emplace(d);
        batch.emplace(shift, rule);
      }
      const auto bar = state.average().view();
      for (auto& slot : slots) {
        const auto start = Clock::now();
        switch (slot.method) {
          case Method::random_scaling: rs->update(bar); break;
          case Method::random_scaling_scalar: rs_scalar->update(bar[j]); break;
          case Method::plugin:
            plugin->update(*model, state.previous_beta().view(), obs);
            break;
          case Method::batch_means: batch->update(state.beta().view()); break;
        }
        slot.accumulator_seconds += seconds_since(start);
      }
    }

    if (next_checkpoint < checkpoints.size() && t == checkpoints[next_checkpoint]) {
      ++next_checkpoint;
      const ParamVector& bar = state.average();
      const std::uint64_t count = state.avg_count();
      for (auto& slot : slots) {
        const auto start = Clock::now();
        double variance = 0.0;
        ConfidenceInterval ci;
        switch (slot.method) {
          case Method::random_scaling:
            variance = rs->finalize()(j, j);
            ci = confidence_interval(bar[j], variance, count, config.level, rs_cv);
            break;
          case Method::random_scaling_scalar:
            variance = rs_scalar->finalize();
            ci = confidence_interval(bar[j], variance, count, config.level, rs_cv);
            break;
          case Method::plugin:
            variance = plugin->finalize()(j, j);
            ci = normal_ci(bar[j], variance, count, config.level);
            break;
          case Method::batch_means:
            variance = batch->finalize_entry(bar.view(), j);
            ci = normal_ci(bar[j], variance, count, config.level);
            break;
        }
        slot.finalize_seconds += seconds_since(start);
        slot.results.push_back({slot.method, t, ci.contains(truth[j]), bar[j],
                                variance, ci.lower, ci.upper, ci.length(),
                                shared_seconds + slot.accumulator_seconds +
                                    slot.finalize_seconds,
                                slot.accumulator_seconds});
      }
    }
  }

  ReplicationRecord record{rep_index, {}};
  for (auto& slot : slots) {
    record.results.insert(record.results.end(), slot.results.begin(),
                          slot.results.end());
  }
  return record;
}

// --- aggregation ------------------------------------------------------------

AggregateMetrics aggregate(std::span<const ReplicationRecord> records) {
  if (records.empty()) throw InvalidArgument("aggregate: no replications");
  const auto& layout = records.front().results;
  AggregateMetrics rows;
  rows.reserve(layout.size());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    double covered = 0.0;
    double length = 0.0;
    double time = 0.0;
    for (const auto& rec : records) {
      if (rec.results.size() != layout.size() ||
          rec.results[k].method != layout[k].method ||
          rec.results[k].checkpoint != layout[k].checkpoint) {
        throw InvalidArgument("aggregate: replications have different layouts");
      }
      const auto& r = rec.results[k];
      covered += r.covered ? 1.0 : 0.0;
      length += r.ci_length;
      time += r.elapsed_seconds;
    }
    const double reps = static_cast<double>(records.size());
    const double p = covered / reps;
    rows.push_back({layout[k].method, layout[k].checkpoint, records.size(), p,
                    std::sqrt(p * (1.0 - p) / reps), length / reps, time / reps});
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentConfig resolved = config;
  resolved.rs_critical_value = resolve_rs_critical_value(config);

  std::vector<std::optional<ReplicationRecord>> slots(config.replications);
  std::vector<std::string> errors(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t rep) {
    try {
      slots[rep] = run_replication(resolved, rep);
    } catch (const Divergence& e) {
      errors[rep] = e.what();
    } catch (const DegenerateScale& e) {
      errors[rep] = e.what();
    }
  });

  ExperimentResult result;
  for (std::size_t rep = 0; rep < config.replications; ++rep) {
    if (slots[rep]) {
      result.records.push_back(std::move(*slots[rep]));
    } else {
      result.failures.push_back({rep, errors[rep]});
    }
  }
  if (!result.records.empty()) result.metrics = aggregate(result.records);
  return result;
}

// --- output -----------------------------------------------------------------

void write_results_csv(std::ostream& out, const ExperimentConfig& config,
                       const AggregateMetrics& metrics, bool header,
                       bool timing) {
  if (header) out << kResultsCsvHeader << '\n';
  for (const auto& row : metrics) {
    fmt::print(out, "{},{},{},{},{},{},{},{:.4f},{:.4f},{:.6f},{:.4f},{},{}\n",
               config.model, config.d, config.gamma0, config.a,
               to_string(row.method), row.checkpoint, row.replications,
               row.coverage, row.mc_se, row.avg_length,
               timing ? row.avg_time : 0.0, config.level, config.seed);
  }
}

void write_replications_jsonl(std::ostream& out,
                              std::span<const ReplicationRecord> records) {
  for (const auto& rec : records) {
    for (const auto& r : rec.results) {
      const nlohmann::json line = {
          {"rep", rec.rep_index},
          {"method", to_string(r.method)},
          {"checkpoint", r.checkpoint},
          {"covered", r.covered},
          {"estimate", r.estimate},
          {"variance", r.variance},
          {"lower", r.lower},
          {"upper", r.upper},
          {"ci_length", r.ci_length},
          {"elapsed_seconds", r.elapsed_seconds},
          {"accumulator_seconds", r.accumulator_seconds},
      };
      out << line.dump() << '\n';
    }
  }
}

std::vector<ExperimentConfig> full_scale_designs(std::uint64_t seed) {
  struct Design {
    const char* model;
    std::size_t d;
  };
  constexpr Design designs[] = {
      {"linear", 5}, {"linear", 20}, {"logistic", 5}, {"logistic", 20},
      {"logistic", 200}};
  std::vector<ExperimentConfig> out;
  for (const auto& design : designs) {
    for (double gamma0 : {0.5, 1.0}) {
      for (double a : {0.505, 0.667}) {
        ExperimentConfig c;
        c.model = design.model;
        c.d = design.d;
        c.gamma0 = gamma0;
        c.a = a;
        c.n = 100000;
        c.burn_in = default_burn_in(design.d);
        c.checkpoints = {25000, 50000, 75000, 100000};
        c.replications = 1000;
        c.seed = seed;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace sgdinf
