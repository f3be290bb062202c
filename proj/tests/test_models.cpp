#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sgdinf/linalg.hpp"
#include "sgdinf/models.hpp"

using namespace sgdinf;

namespace {

const double kSigma1 = oracle::big_sigmoid(1).convert_to<double>();

void expect_vec(const ParamVector& got, std::vector<double> want, double tol = 1e-15) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << i;
}

void expect_mat(const SymMatrix& got, std::vector<double> want, double tol = 1e-15) {
  const auto dense = got.dense();
  ASSERT_EQ(dense.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(dense[i], want[i], tol) << i;
}

// Central difference of the loss, then of the analytic gradient.
std::vector<double> fd_gradient(const GradientModel& m, std::vector<double> beta,
                                const Observation& obs, double h) {
  std::vector<double> g(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    auto up = beta;
    auto dn = beta;
    up[i] += h;
    dn[i] -= h;
    g[i] = (m.loss(up, obs) - m.loss(dn, obs)) / (2 * h);
  }
  return g;
}

std::vector<double> fd_hessian(const GradientModel& m, std::vector<double> beta,
                               const Observation& obs, double h) {
  const std::size_t d = beta.size();
  std::vector<double> out(d * d);
  std::vector<double> gu(d);
  std::vector<double> gd(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto up = beta;
    auto dn = beta;
    up[j] += h;
    dn[j] -= h;
    m.gradient(up, obs, gu);
    m.gradient(dn, obs, gd);
    for (std::size_t i = 0; i < d; ++i) out[i * d + j] = (gu[i] - gd[i]) / (2 * h);
  }
  return out;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST(LinearModel, GradientExamples) {
  expect_vec(linear_gradient(ParamVector{0.0}, {ParamVector{1.0}, 1.0}), {-1.0});
  expect_vec(linear_gradient(ParamVector{1.0, 1.0}, {ParamVector{2.0, 3.0}, 0.0}),
             {10.0, 15.0});
  const ParamVector beta{0.3, -1.2, 2.0};
  const ParamVector x{1.5, 0.5, -0.25};
  const double y = dot(x.view(), beta.view());
  expect_vec(linear_gradient(beta, {x, y}), {0.0, 0.0, 0.0});
}

TEST(LinearModel, DimensionMismatchThrows) {
  LinearModel m(2);
  EXPECT_THROW(m.gradient(ParamVector{1.0, 1.0}, {ParamVector{1.0}, 0.0}),
               DimensionMismatch);
  EXPECT_THROW(m.gradient(ParamVector{1.0}, {ParamVector{1.0}, 0.0}), DimensionMismatch);
}

TEST(LinearModel, HessianAndScoreExamples) {
  expect_mat(linear_hessian_contrib({ParamVector{1.0, 0.0}, 0.0}), {1, 0, 0, 0});
  expect_mat(linear_hessian_contrib({ParamVector{1.0, 2.0}, 0.0}), {1, 2, 2, 4});
  expect_mat(linear_hessian_contrib({ParamVector{0.0, 0.0}, 0.0}), {0, 0, 0, 0});
  expect_mat(linear_score_outer(ParamVector{1.0, 2.0}, {ParamVector{1.0, 1.0}, 3.0}),
             {0, 0, 0, 0});
  expect_mat(linear_score_outer(ParamVector{0.0}, {ParamVector{1.0}, 2.0}), {4});
  expect_mat(linear_score_outer(ParamVector{0.0, 0.0}, {ParamVector{1.0, 1.0}, 1.0}),
             {1, 1, 1, 1});
}

TEST(LogisticModel, GradientExamples) {
  expect_vec(logistic_gradient(ParamVector{0.0, 0.0, 0.0}, {ParamVector{2.0, -1.0, 4.0}, 1.0}),
             {-1.0, 0.5, -2.0});
  expect_vec(logistic_gradient(ParamVector{0.0}, {ParamVector{2.0}, 0.0}), {1.0});
  EXPECT_NEAR(kSigma1 - 1.0, -0.26894, 5e-6);
  expect_vec(logistic_gradient(ParamVector{1.0}, {ParamVector{1.0}, 1.0}), {kSigma1 - 1.0});
}

TEST(LogisticModel, RejectsNonBinaryLabels) {
  EXPECT_THROW(logistic_gradient(ParamVector{0.0}, {ParamVector{1.0}, 0.5}), InvalidArgument);
  EXPECT_THROW(logistic_score_outer(ParamVector{0.0}, {ParamVector{1.0}, 2.0}),
               InvalidArgument);
}

TEST(LogisticModel, HessianAndScoreExamples) {
  expect_mat(logistic_hessian_contrib(ParamVector{0.0}, {ParamVector{2.0}, 0.0}), {1.0});
  expect_mat(logistic_hessian_contrib(ParamVector{0.3, 0.1}, {ParamVector{0.0, 0.0}, 1.0}),
             {0, 0, 0, 0});
  const double h = kSigma1 * (1 - kSigma1);
  EXPECT_NEAR(h, 0.19661, 5e-6);
  expect_mat(logistic_hessian_contrib(ParamVector{1.0}, {ParamVector{1.0}, 1.0}), {h}, 1e-15);
  expect_mat(logistic_score_outer(ParamVector{0.0}, {ParamVector{2.0}, 1.0}), {1.0});
  expect_mat(logistic_score_outer(ParamVector{0.4}, {ParamVector{0.0}, 1.0}), {0.0});
  EXPECT_NEAR(kSigma1 * kSigma1, 0.53445, 5e-6);
  expect_mat(logistic_score_outer(ParamVector{1.0}, {ParamVector{1.0}, 0.0}),
             {kSigma1 * kSigma1}, 1e-15);
}

TEST(LogisticModel, SigmoidStableAtExtremes) {
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_NEAR(sigmoid(-40.0), std::exp(-40.0), 1e-30);
  LogisticModel m(1);
  EXPECT_TRUE(std::isfinite(m.loss(std::vector<double>{800.0}, {ParamVector{1.0}, 0.0})));
}

TEST(Models, FactoryByName) {
  EXPECT_EQ(make_model("linear", 3)->dim(), 3u);
  EXPECT_EQ(make_model("logistic", 2)->name(), "logistic");
  EXPECT_THROW(make_model("probit", 2), InvalidArgument);
}

class FiniteDifference : public ::testing::TestWithParam<const char*> {};

TEST_P(FiniteDifference, GradientAndHessianAgree) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(0.5);
  const std::string name = GetParam();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 7;
    auto model = make_model(name, d);
    std::vector<double> beta(d);
    std::vector<double> x(d);
    for (auto& b : beta) b = 0.5 * z(gen);
    for (auto& v : x) v = z(gen);
    const double y = name == "linear" ? z(gen) : (coin(gen) ? 1.0 : 0.0);
    const Observation obs{ParamVector(x), y};

    std::vector<double> g(d);
    model->gradient(beta, obs, g);
    const auto fd = fd_gradient(*model, beta, obs, 1e-6);
    for (std::size_t i = 0; i < d; ++i) EXPECT_LT(rel_err(g[i], fd[i]), 1e-6);

    const auto h = model->hessian_contrib(ParamVector(beta), obs).dense();
    const auto fh = fd_hessian(*model, beta, obs, 1e-6);
    for (std::size_t i = 0; i < d * d; ++i) EXPECT_LT(rel_err(h[i], fh[i]), 1e-5);
  }
}

TEST_P(FiniteDifference, ContributionsArePsd) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  const std::string name = GetParam();
  const std::size_t d = 6;
  auto model = make_model(name, d);
  SymMatrix h(d);
  SymMatrix s(d);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> beta(d);
    std::vector<double> x(d);
    for (auto& b : beta) b = z(gen);
    for (auto& v : x) v = z(gen);
    const Observation obs{ParamVector(x), name == "linear" ? z(gen) : double(i % 2)};
    model->add_hessian_contrib(beta, obs, h);
    model->add_score_outer(beta, obs, s);
    EXPECT_GE(min_eigenvalue(model->hessian_contrib(ParamVector(beta), obs)), -1e-12);
    EXPECT_GE(min_eigenvalue(model->score_outer(ParamVector(beta), obs)), -1e-12);
  }
  EXPECT_GE(min_eigenvalue(h), -1e-10);
  EXPECT_GE(min_eigenvalue(s), -1e-10);
}

INSTANTIATE_TEST_SUITE_P(Models, FiniteDifference, ::testing::Values("linear", "logistic"));
