#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgdinf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime failure (bad data, divergence)
inline constexpr int kExitUsage = 2;    // invalid flags

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

struct InferOptions {
  std::string model = "linear";
  std::size_t d = 1;
  double gamma0 = 0.5;
  double a = 0.505;
  double level = 0.95;
  std::uint64_t report_every = 0;  // 0: final report only
  std::optional<std::size_t> coordinate;  // 1-based; empty means all
  std::uint64_t burn_in = 0;
  bool json = false;
  std::optional<double> critical_value;
};

/// Streams observations from `in`, writing CSV reports to `out` and
/// diagnostics to `err`. Returns the process exit code. Memory use is
/// independent of the stream length.
int run_infer(const InferOptions& options, std::istream& in, std::ostream& out,
              std::ostream& err);

inline constexpr const char* kInferCsvHeader =
    "t,coordinate,beta_bar,v_jj,lower,upper,level";

}  // namespace sgdinf::cli
