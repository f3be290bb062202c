#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <string_view>

#include "sgdinf/bench.hpp"
#include "sgdinf/inference.hpp"
#include "sgdinf/models.hpp"
#include "sgdinf/random_scaling.hpp"
#include "sgdinf/sgd.hpp"

namespace sgdinf::cli {

namespace {

/// Thrown for bad flag values detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input line.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Field count or JSON vector length disagrees with --d.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

double parse_double(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                            field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" +
                    std::string(field) + "' as a number");
  }
  return value;
}

void parse_csv_line(std::string_view line, std::size_t d, std::size_t line_no,
                    Observation& obs) {
  std::size_t fields = 1 + static_cast<std::size_t>(
                               std::count(line.begin(), line.end(), ','));
  if (fields != d + 1) {
    throw ShapeError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(d + 1) + " fields (y,x1..xd), got " +
                     std::to_string(fields));
  }
  std::size_t pos = 0;
  for (std::size_t f = 0; f <= d; ++f) {
    const std::size_t comma = line.find(',', pos);
    const auto field = line.substr(pos, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - pos);
    const double v = parse_double(field, line_no);
    if (f == 0) {
      obs.y = v;
    } else {
      obs.x[f - 1] = v;
    }
    pos = comma + 1;
  }
}

void parse_json_line(std::string_view line, std::size_t d, std::size_t line_no,
                     Observation& obs) {
  const auto where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object() || !j.contains("y") || !j.contains("x") ||
      !j["y"].is_number() || !j["x"].is_array()) {
    throw DataError(where + R"(expected {"y": number, "x": [numbers]})");
  }
  const auto& xs = j["x"];
  if (xs.size() != d) {
    throw ShapeError(where + "expected " + std::to_string(d) +
                     " covariates, got " + std::to_string(xs.size()));
  }
  obs.y = j["y"].get<double>();
  for (std::size_t i = 0; i < d; ++i) {
    if (!xs[i].is_number()) throw DataError(where + "non-numeric covariate");
    obs.x[i] = xs[i].get<double>();
  }
  if (!std::isfinite(obs.y) || !obs.x.all_finite()) {
    throw DataError(where + "non-finite value");
  }
}

std::string format_value(double v) { return fmt::format("{:.10g}", v); }

class Reporter {
 public:
  Reporter(const InferOptions& opt, double cv) : opt_(opt), cv_(cv) {
    if (opt.coordinate) {
      scalar_.emplace(*opt.coordinate - 1);
    }
  }

  void retained(const SgdState& state) {
    if (state.avg_count() == 1) {
      const ParamVector& shift = state.previous_beta();
      if (opt_.coordinate) {
        scalar_.emplace(*opt_.coordinate - 1, shift[*opt_.coordinate - 1]);
      } else {
        full_.emplace(shift);
      }
    }
    const auto bar = state.average().view();
    if (scalar_) {
      scalar_->update(bar);
    } else {
      full_->update(bar);
    }
  }

  void report(const SgdState& state, std::ostream& out) const {
    std::vector<std::size_t> coords;
    if (opt_.coordinate) {
      coords.push_back(*opt_.coordinate - 1);
    } else {
      for (std::size_t j = 0; j < opt_.d; ++j) coords.push_back(j);
    }
    if (!state.has_average()) {
      for (std::size_t j : coords) {
        fmt::print(out, "{},{},NA,NA,NA,NA,{}\n", state.t(), j + 1, opt_.level);
      }
      return;
    }
    const ParamVector& bar = state.average();
    std::optional<SymMatrix> v;
    if (full_) v = full_->finalize();
    for (std::size_t j : coords) {
      const double vjj = v ? (*v)(j, j) : scalar_->finalize();
      const auto ci = confidence_interval(bar[j], vjj, state.avg_count(),
                                          opt_.level, cv_);
      fmt::print(out, "{},{},{},{},{},{},{}\n", state.t(), j + 1,
                 format_value(bar[j]), format_value(vjj), format_value(ci.lower),
                 format_value(ci.upper), opt_.level);
    }
  }

 private:
  const InferOptions& opt_;
  double cv_;
  std::optional<RandomScalingState> full_;
  std::optional<ScalarScalingState> scalar_;
};

// --- simulate ----------------------------------------------------------------

struct SimulateFlags {
  std::string model = "linear";
  std::size_t d = 5;
  double gamma0 = 0.5;
  double a = 0.505;
  std::uint64_t n = 100000;
  std::size_t reps = 1000;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> checkpoints;
  double level = 0.95;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> burn_in;
  unsigned threads = 0;
  std::size_t coordinate = 1;
  std::string batch_rule = "rate";
  std::string out_path;
  std::string dump_path;
  bool no_timing = false;
  bool full_scale = false;
};

ExperimentConfig to_config(const SimulateFlags& f) {
  ExperimentConfig c;
  c.model = f.model;
  c.d = f.d;
  c.gamma0 = f.gamma0;
  c.a = f.a;
  c.n = f.n;
  c.burn_in = f.burn_in ? *f.burn_in : default_burn_in(f.d);
  c.checkpoints = f.checkpoints;
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : f.methods) c.methods.push_back(parse_method(m));
  }
  c.replications = f.reps;
  c.level = f.level;
  c.seed = *f.seed;
  c.threads = f.threads;
  c.target_coordinate = f.coordinate;
  if (f.batch_rule == "odd") {
    c.batch_rule = BatchAnchorRule::arithmetic(2);
  } else if (f.batch_rule != "rate") {
    throw UsageError("--batch-rule must be 'rate' or 'odd'");
  }
  return c;
}

int cmd_simulate(const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
  std::vector<ExperimentConfig> configs;
  try {
    if (flags.full_scale) {
      configs = full_scale_designs(*flags.seed);
      for (auto& c : configs) {
        c.threads = flags.threads;
        c.level = flags.level;
      }
    } else {
      configs.push_back(to_config(flags));
    }
    for (const auto& c : configs) validate(c);
  } catch (const sgdinf::Error& e) {
    err << "simulate: " << e.what() << '\n';
    return kExitUsage;
  }

  OutputTarget target(flags.out_path, out);
  std::unique_ptr<std::ofstream> dump;
  if (!flags.dump_path.empty()) {
    dump = std::make_unique<std::ofstream>(flags.dump_path);
    if (!*dump) throw UsageError("cannot open dump file '" + flags.dump_path + "'");
  }
  err << "# avg_time_sec: shared SGD step + method accumulator + finalize; "
         "data generation excluded\n";

  int code = kExitOk;
  bool header = true;
  for (const auto& config : configs) {
    const ExperimentResult result = run_experiment(config);
    const double failure_rate = result.failure_rate(config.replications);
    if (!result.failures.empty()) {
      err << fmt::format("simulate: {} of {} replications failed ({} d={} "
                         "gamma0={} a={}); first: {}\n",
                         result.failures.size(), config.replications,
                         config.model, config.d, config.gamma0, config.a,
                         result.failures.front().message);
    }
    if (failure_rate > 0.01) code = kExitFailure;
    write_results_csv(target.stream(), config, result.metrics, header,
                      !flags.no_timing);
    header = false;
    if (dump) write_replications_jsonl(*dump, result.records);
  }
  return code;
}

// --- critvals ----------------------------------------------------------------

struct CritvalsFlags {
  std::size_t ell = 1;
  std::string statistic = "t";
  std::vector<double> quantiles{0.9, 0.95, 0.975, 0.99};
  std::size_t paths = 200000;
  std::size_t grid = 2000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out_path;
};

int cmd_critvals(const CritvalsFlags& flags, std::ostream& out, std::ostream& err) {
  CriticalValueSimulation sim;
  try {
    sim.ell = flags.ell;
    sim.statistic = parse_statistic(flags.statistic);
    sim.quantiles = flags.quantiles;
    sim.paths = flags.paths;
    sim.grid = flags.grid;
    sim.seed = SeedSpec{*flags.seed, 0};
    sim.threads = flags.threads;
    if (sim.ell < 1) throw InvalidArgument("--ell must be >= 1");
    if (sim.statistic == Statistic::t && sim.ell != 1) {
      throw InvalidArgument("--statistic t requires --ell 1");
    }
    if (sim.grid < 100) throw InvalidArgument("--grid must be >= 100");
    if (sim.paths < 1000) throw InvalidArgument("--paths must be >= 1000");
    for (double q : sim.quantiles) {
      if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("quantiles must lie in (0, 1)");
    }
  } catch (const sgdinf::Error& e) {
    err << "critvals: " << e.what() << '\n';
    return kExitUsage;
  }
  OutputTarget target(flags.out_path, out);
  const auto rows = simulate_critical_values(sim);
  write_critical_values_csv(target.stream(), rows);
  return kExitOk;
}

// --- infer -------------------------------------------------------------------

struct InferFlags {
  InferOptions options;
  std::string coordinate = "all";
  std::string format = "csv";
  std::string input_path;
};

}  // namespace

int run_infer(const InferOptions& opt, std::istream& in, std::ostream& out,
              std::ostream& err) {
  std::unique_ptr<GradientModel> model;
  std::optional<StepSchedule> schedule;
  double cv = 0.0;
  try {
    model = make_model(opt.model, opt.d);
    schedule.emplace(opt.gamma0, opt.a);
    if (opt.coordinate && (*opt.coordinate < 1 || *opt.coordinate > opt.d)) {
      throw InvalidArgument("--coordinate must lie in [1, d]");
    }
    if (!(opt.level > 0.0 && opt.level < 1.0)) {
      throw InvalidArgument("--level must lie in (0, 1)");
    }
    auto tabulated = opt.critical_value ? opt.critical_value
                                        : CriticalValueTable::two_sided(opt.level);
    if (!tabulated) {
      throw InvalidArgument(
          "level has no tabulated critical value; pass --critical-value "
          "(see the critvals subcommand)");
    }
    cv = *tabulated;
  } catch (const sgdinf::Error& e) {
    err << "infer: " << e.what() << '\n';
    return kExitUsage;
  }

  SgdState state(ParamVector(opt.d), opt.burn_in);
  Reporter reporter(opt, cv);
  Observation obs{ParamVector(opt.d), 0.0};
  std::string line;
  std::size_t line_no = 0;
  out << kInferCsvHeader << '\n';

  try {
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view view = line;
      if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
      if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
      if (opt.json) {
        parse_json_line(view, opt.d, line_no, obs);
      } else {
        parse_csv_line(view, opt.d, line_no, obs);
      }
      bool kept;
      try {
        kept = state.step(*model, obs, *schedule);
      } catch (const InvalidArgument& e) {
        throw DataError("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (kept) reporter.retained(state);
      if (opt.report_every > 0 && state.t() % opt.report_every == 0) {
        reporter.report(state, out);
      }
    }
  } catch (const ShapeError& e) {
    err << "infer: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "infer: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Divergence& e) {
    err << "infer: " << e.what() << '\n';
    return kExitFailure;
  }

  if (state.t() == 0) {
    err << "infer: no data\n";
    return kExitOk;
  }
  if (opt.report_every == 0 || state.t() % opt.report_every != 0) {
    reporter.report(state, out);
  }
  err << fmt::format("infer: processed {} observations ({} retained)\n",
                     state.t(), state.avg_count());
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Online inference for averaged SGD via random scaling"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage study");
  simulate->add_option("--model", sim.model, "linear or logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  simulate->add_option("--d", sim.d, "dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--gamma0", sim.gamma0, "step size scale");
  simulate->add_option("--a", sim.a, "step size exponent in (1/2, 1)");
  simulate->add_option("--n", sim.n, "observations per replication")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--reps", sim.reps, "replications")->check(CLI::PositiveNumber);
  simulate->add_option("--methods", sim.methods,
                       "comma list of random_scaling, random_scaling_scalar, "
                       "plugin, batch_means")
      ->delimiter(',');
  simulate->add_option("--checkpoints", sim.checkpoints, "comma list of t values")
      ->delimiter(',');
  simulate->add_option("--level", sim.level, "two-sided confidence level");
  simulate->add_option("--seed", sim.seed, "master seed")->required();
  simulate->add_option("--burn-in", sim.burn_in,
                       "iterates dropped before averaging (default 0 for d<=5, "
                       "else 1000)");
  simulate->add_option("--threads", sim.threads, "worker threads (0: all cores)");
  simulate->add_option("--coordinate", sim.coordinate, "1-based target coefficient");
  simulate->add_option("--batch-rule", sim.batch_rule,
                       "batch-means anchors: rate (m^(1/(1-a))) or odd (1,3,5,...)");
  simulate->add_option("--out", sim.out_path, "CSV output path (default stdout)");
  simulate->add_option("--dump-reps", sim.dump_path,
                       "per-replication JSON lines output path");
  simulate->add_flag("--no-timing", sim.no_timing,
                     "write 0 in avg_time_sec for byte-reproducible output");
  simulate->add_flag("--full-scale", sim.full_scale,
                     "run every reference design at full size (slow)");

  CritvalsFlags crit;
  auto* critvals = app.add_subcommand("critvals", "simulate critical values");
  critvals->add_option("--ell", crit.ell, "number of restrictions");
  critvals->add_option("--statistic", crit.statistic, "t or wald")
      ->check(CLI::IsMember({"t", "wald"}));
  critvals->add_option("--quantiles", crit.quantiles, "comma list")->delimiter(',');
  critvals->add_option("--paths", crit.paths, "simulated paths");
  critvals->add_option("--grid", crit.grid, "grid steps per path");
  critvals->add_option("--seed", crit.seed, "master seed")->required();
  critvals->add_option("--threads", crit.threads, "worker threads (0: all cores)");
  critvals->add_option("--out", crit.out_path, "CSV output path (default stdout)");

  InferFlags inf;
  auto* infer = app.add_subcommand("infer", "streaming inference on stdin or a file");
  infer->add_option("--model", inf.options.model, "linear or logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  infer->add_option("--d", inf.options.d, "dimension")->required();
  infer->add_option("--gamma0", inf.options.gamma0, "step size scale");
  infer->add_option("--a", inf.options.a, "step size exponent in (1/2, 1)");
  infer->add_option("--level", inf.options.level, "two-sided confidence level");
  infer->add_option("--report-every", inf.options.report_every,
                    "emit a report every N observations (0: final only)");
  infer->add_option("--coordinate", inf.coordinate, "1-based index or 'all'");
  infer->add_option("--burn-in", inf.options.burn_in, "iterates dropped before averaging");
  infer->add_option("--format", inf.format, "csv (y,x1,..,xd) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  infer->add_option("--critical-value", inf.options.critical_value,
                    "critical value for untabulated levels");
  infer->add_option("--input", inf.input_path, "input file (default stdin)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*critvals) return cmd_critvals(crit, out, err);

    if (inf.coordinate != "all") {
      std::size_t j = 0;
      const auto* end = inf.coordinate.data() + inf.coordinate.size();
      const auto [ptr, ec] = std::from_chars(inf.coordinate.data(), end, j);
      if (ec != std::errc{} || ptr != end) {
        throw UsageError("--coordinate must be a positive integer or 'all'");
      }
      inf.options.coordinate = j;
    }
    inf.options.json = inf.format == "json";
    if (!inf.input_path.empty() && inf.input_path != "-") {
      std::ifstream file(inf.input_path);
      if (!file) throw UsageError("cannot open input file '" + inf.input_path + "'");
      return run_infer(inf.options, file, out, err);
    }
    return run_infer(inf.options, in, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace sgdinf::cli
