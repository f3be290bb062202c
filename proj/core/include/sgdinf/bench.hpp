#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgdinf/baselines.hpp"
#include "sgdinf/core.hpp"
#include "sgdinf/rng.hpp"
#include "sgdinf/sgd.hpp"

namespace sgdinf {

// --- synthetic designs ------------------------------------------------------

/// Coefficients equi-spaced on [0, 1]; (0.5) when d = 1.
ParamVector true_beta(std::size_t d);

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

/// y = x'beta* + noise * eps, x ~ N(0, I_d), eps ~ N(0, 1).
class LinearGenerator final : public ObservationSource {
 public:
  LinearGenerator(SeedSpec seed, ParamVector beta_star,
                  std::uint64_t count = kUnbounded, double noise = 1.0);
  bool next(Observation& obs) override;

 private:
  Rng rng_;
  ParamVector beta_star_;
  std::uint64_t remaining_;
  double noise_;
};

/// y = 1(x'beta* - eps >= 0), x ~ N(0, I_d), eps standard logistic.
class LogisticGenerator final : public ObservationSource {
 public:
  LogisticGenerator(SeedSpec seed, ParamVector beta_star,
                    std::uint64_t count = kUnbounded);
  bool next(Observation& obs) override;

 private:
  Rng rng_;
  ParamVector beta_star_;
  std::uint64_t remaining_;
};

std::vector<Observation> generate_linear(SeedSpec seed, std::size_t d,
                                         std::uint64_t count);
std::vector<Observation> generate_logistic(SeedSpec seed, std::size_t d,
                                           std::uint64_t count);

// --- experiment description -------------------------------------------------

enum class Method { random_scaling, random_scaling_scalar, plugin, batch_means };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);
std::vector<Method> all_methods();

using SourceFactory =
    std::function<std::unique_ptr<ObservationSource>(SeedSpec)>;

struct ExperimentConfig {
  std::string model = "linear";
  std::size_t d = 5;
  double gamma0 = 0.5;
  double a = 0.505;
  std::uint64_t n = 100000;
  std::uint64_t burn_in = 0;
  std::vector<std::uint64_t> checkpoints;  // empty means {n}
  std::vector<Method> methods = all_methods();
  std::size_t replications = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::size_t target_coordinate = 1;  // 1-based
  unsigned threads = 0;

  /// Critical value for the random-scaling intervals; filled from the table
  /// or by simulation when empty.
  std::optional<double> rs_critical_value;
  /// Defaults to BatchAnchorRule::for_learning_rate(a).
  std::optional<BatchAnchorRule> batch_rule;
  /// Replaces the synthetic generator; `truth` must then be set as well.
  SourceFactory source;
  std::optional<ParamVector> truth;
};

/// Burn-in used by the reference designs: 0 for d <= 5, else 1000.
std::uint64_t default_burn_in(std::size_t d) noexcept;

/// Throws InvalidArgument describing the first problem found.
void validate(const ExperimentConfig& config);

std::vector<std::uint64_t> effective_checkpoints(const ExperimentConfig& config);

/// Random-scaling critical value for the configured level.
double resolve_rs_critical_value(const ExperimentConfig& config);

// --- results ----------------------------------------------------------------

struct MethodResult {
  Method method;
  std::uint64_t checkpoint;
  bool covered;
  double estimate;             // beta_bar_j
  double variance;             // V_jj or Upsilon_jj
  double lower;
  double upper;
  double ci_length;
  double elapsed_seconds;      // cumulative: shared SGD + accumulator + finalize
  double accumulator_seconds;  // cumulative accumulator updates only
};

struct ReplicationRecord {
  std::size_t rep_index;
  std::vector<MethodResult> results;  // method-major, checkpoints ascending
};

/// One SGD pass over freshly generated data with every requested method
/// attached. Divergence is rethrown with the replication index.
ReplicationRecord run_replication(const ExperimentConfig& config,
                                  std::size_t rep_index);

struct AggregateRow {
  Method method;
  std::uint64_t checkpoint;
  std::size_t replications;
  double coverage;
  double mc_se;  // sqrt(p (1 - p) / replications)
  double avg_length;
  double avg_time;
};

using AggregateMetrics = std::vector<AggregateRow>;

AggregateMetrics aggregate(std::span<const ReplicationRecord> records);

struct ReplicationFailure {
  std::size_t rep_index;
  std::string message;
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;  // successful reps, by rep_index
  std::vector<ReplicationFailure> failures;
  AggregateMetrics metrics;

  double failure_rate(std::size_t replications) const noexcept {
    return replications == 0 ? 0.0
                             : static_cast<double>(failures.size()) /
                                   static_cast<double>(replications);
  }
};

/// Runs every replication (in parallel, deterministic per-rep seeding) and
/// aggregates the successful ones.
ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kResultsCsvHeader =
    "model,d,gamma0,a,method,checkpoint,replications,coverage,mc_se,"
    "avg_length,avg_time_sec,level,seed";

/// With `timing` false the avg_time_sec column is written as 0, which makes
/// the output byte-reproducible.
void write_results_csv(std::ostream& out, const ExperimentConfig& config,
                       const AggregateMetrics& metrics, bool header = true,
                       bool timing = true);

/// One JSON object per (replication, method, checkpoint).
void write_replications_jsonl(std::ostream& out,
                              std::span<const ReplicationRecord> records);

/// Every design of the full-scale study: linear d in {5, 20}, logistic
/// d in {5, 20, 200}, gamma0 in {0.5, 1}, a in {0.505, 0.667}, n = 1e5,
/// 1000 replications, checkpoints every 25000.
std::vector<ExperimentConfig> full_scale_designs(std::uint64_t seed);

}  // namespace sgdinf
