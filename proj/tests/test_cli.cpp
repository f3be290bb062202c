#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "cli.hpp"
#include "sgdinf/bench.hpp"

using namespace sgdinf;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

std::vector<std::string> lines(const std::string& s) { return split(s, '\n'); }

void append_number(std::string& buf, double v) {
  char tmp[32];
  const auto [end, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
  buf.append(tmp, end);
}

std::string csv_stream(const std::vector<Observation>& data) {
  std::string buf;
  buf.reserve(data.size() * 24 * (data.front().x.size() + 1));
  for (const auto& o : data) {
    append_number(buf, o.y);
    for (std::size_t i = 0; i < o.x.size(); ++i) {
      buf.push_back(',');
      append_number(buf, o.x[i]);
    }
    buf.push_back('\n');
  }
  return buf;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"simulate", "--seed", "1", "--a", "0.4"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"simulate", "--n", "100"}).code, cli::kExitUsage);  // no seed
  EXPECT_EQ(run_cli({"simulate", "--seed", "1", "--methods", "nope"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"critvals", "--seed", "1", "--ell", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"critvals", "--ell", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"infer", "--d", "2", "--a", "1.2"}, "").code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"infer", "--d", "2", "--coordinate", "3"}, "").code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"infer", "--d", "2", "--level", "0.93"}, "").code, cli::kExitUsage);
}

TEST(Cli, SimulateOneRowPerMethodCheckpoint) {
  const auto r = run_cli({"simulate", "--seed", "3", "--reps", "1", "--n", "100", "--d", "2",
                          "--checkpoints", "50,100", "--no-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u + 4 * 2);
  EXPECT_EQ(ls[0], kResultsCsvHeader);
  EXPECT_EQ(split(ls[1], ',').size(), 13u);
}

TEST(Cli, SimulateByteIdenticalAcrossThreads) {
  const std::vector<std::string> base{"simulate", "--seed", "11", "--reps", "16", "--n", "3000",
                                      "--d", "3", "--no-timing"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto three = base;
  three.insert(three.end(), {"--threads", "3"});
  const auto a = run_cli(one);
  const auto b = run_cli(three);
  const auto c = run_cli(one);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, CritvalsCsv) {
  const auto r = run_cli({"critvals", "--seed", "2", "--paths", "2000", "--grid", "200",
                          "--quantiles", "0.9,0.975"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "statistic,ell,quantile,value,paths,grid,seed");
  EXPECT_EQ(ls[1].substr(0, 10), "t,1,0.9,3.");
}

TEST(Cli, InferCraftedIterates) {
  // x = 1 and y_t = b_{t-1} + (target_t - b_{t-1}) / gamma_t puts the
  // iterates exactly at 1, 2, 3.
  const StepSchedule sched(0.5, 0.505);
  std::string input;
  double prev = 0.0;
  for (int t = 1; t <= 3; ++t) {
    const double y = prev + (t - prev) / sched(t);
    append_number(input, y);
    input += ",1\n";
    prev = t;
  }
  const auto r = run_cli({"infer", "--d", "1"}, input);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], cli::kInferCsvHeader);
  const auto f = split(ls[1], ',');
  ASSERT_EQ(f.size(), 7u);
  EXPECT_EQ(f[0], "3");
  EXPECT_EQ(f[1], "1");
  EXPECT_NEAR(std::stod(f[2]), 2.0, 1e-9);
  EXPECT_NEAR(std::stod(f[3]), 2.0 / 9.0, 1e-9);
  const double half = 6.747 * std::sqrt(2.0 / 27.0);
  EXPECT_NEAR(std::stod(f[4]), 2.0 - half, 1e-8);
  EXPECT_NEAR(std::stod(f[5]), 2.0 + half, 1e-8);

  const auto scalar = run_cli({"infer", "--d", "1", "--coordinate", "1"}, input);
  EXPECT_EQ(scalar.out, r.out);
}

TEST(Cli, InferEmptyInput) {
  const auto r = run_cli({"infer", "--d", "3"}, "");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, std::string(cli::kInferCsvHeader) + "\n");
  EXPECT_NE(r.err.find("no data"), std::string::npos);
}

TEST(Cli, InferMalformedLine) {
  const auto r = run_cli({"infer", "--d", "2"}, "1,2,3\n1,abc,3\n");
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  const auto bad_label = run_cli({"infer", "--d", "1", "--model", "logistic"}, "0.5,1\n");
  EXPECT_EQ(bad_label.code, cli::kExitFailure);
  EXPECT_NE(bad_label.err.find("line 1"), std::string::npos);
}

TEST(Cli, InferDimensionMismatch) {
  const auto r = run_cli({"infer", "--d", "2"}, "1,2,3\n1,2\n");
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  const auto j = run_cli({"infer", "--d", "2", "--format", "json"},
                         "{\"y\":1,\"x\":[1,2]}\n{\"y\":1,\"x\":[1]}\n");
  EXPECT_EQ(j.code, cli::kExitUsage);
}

TEST(Cli, InferJsonMatchesCsv) {
  const auto data = generate_linear(SeedSpec{4, 0}, 2, 200);
  std::string json;
  for (const auto& o : data) {
    json += "{\"y\":";
    append_number(json, o.y);
    json += ",\"x\":[";
    append_number(json, o.x[0]);
    json += ",";
    append_number(json, o.x[1]);
    json += "]}\n";
  }
  const auto a = run_cli({"infer", "--d", "2", "--report-every", "50"}, csv_stream(data));
  const auto b = run_cli({"infer", "--d", "2", "--report-every", "50", "--format", "json"}, json);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 1u + 4 * 2);
}

TEST(Cli, InferReportsNaBeforeBurnIn) {
  const auto data = generate_linear(SeedSpec{5, 0}, 1, 10);
  const auto r = run_cli({"infer", "--d", "1", "--burn-in", "5", "--report-every", "5"},
                         csv_stream(data));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_NE(ls[1].find("NA"), std::string::npos);
  EXPECT_EQ(ls[2].find("NA"), std::string::npos);
}

TEST(Cli, InferCoverageOverSeeds) {
  const std::size_t d = 5;
  const std::size_t n = 100000;
  int covered = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto data = generate_linear(SeedSpec{2000 + std::uint64_t(s), 0}, d, n);
    const auto r = run_cli({"infer", "--d", "5", "--coordinate", "1"}, csv_stream(data));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto f = split(lines(r.out).back(), ',');
    const double lo = std::stod(f[4]);
    const double hi = std::stod(f[5]);
    if (lo <= 0.0 && 0.0 <= hi) ++covered;
  }
  // binomial(100, 0.95): 3 standard errors below is about 88.5
  EXPECT_GE(covered, 88);
  EXPECT_LE(covered, 100);
}
