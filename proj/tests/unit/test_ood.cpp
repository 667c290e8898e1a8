// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "cxrt/error.hpp"
#include "cxrt/features/extract.hpp"
#include "cxrt/ood/model_file.hpp"
#include "cxrt/ood/reference_model.hpp"
#include "test_support.hpp"

using namespace cxrt;
using namespace cxrt::ood;
using cxrt::testing::Gen;

namespace {

using Matrix = std::vector<std::vector<double>>;

/// Gauss-Jordan inverse with partial pivoting.
Matrix invert(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= p;
      inv[col][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

double oracle_distance(const std::vector<double>& z, const std::vector<double>& mu, const Matrix& sigma) {
  const Matrix inv = invert(sigma);
  const std::size_t d = z.size();
  double q = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) q += (z[i] - mu[i]) * inv[i][j] * (z[j] - mu[j]);
  }
  return std::sqrt(q);
}

struct Instance {
  std::vector<double> z, mu;
  Matrix sigma;
};

Instance random_instance(Gen& g) {
  const int d = g.integer(1, 5);
  Instance in;
  Matrix a(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& row : a) {
    for (double& v : row) v = g.normal();
  }
  in.sigma.assign(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = i == j ? 0.2 : 0.0;
      for (int k = 0; k < d; ++k) s += a[i][k] * a[j][k];
      in.sigma[i][j] = s;
    }
  }
  for (int i = 0; i < d; ++i) {
    in.mu.push_back(g.normal(0, 3));
    in.z.push_back(g.normal(0, 3));
  }
  return in;
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

Eigen::MatrixXd mat(const Matrix& m, double scale = 1.0) {
  const auto d = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = scale * m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

TEST(Mahalanobis, MatchesExplicitInverseOracle) {
  Gen g(2024);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const Instance in = random_instance(g);
    const auto model = ReferenceModel::from_parts(vec(in.mu), mat(in.sigma), 0.0, 10);
    worst = std::max(worst, std::abs(model.mahalanobis(vec(in.z)) - oracle_distance(in.z, in.mu, in.sigma)));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Mahalanobis, ScaleEquivariance) {
  Gen g(77);
  for (int t = 0; t < 200; ++t) {
    const Instance in = random_instance(g);
    const double c = g.uniform(0.1, 20.0);
    const auto base = ReferenceModel::from_parts(vec(in.mu), mat(in.sigma), 0.0, 10);
    const auto scaled = ReferenceModel::from_parts(vec(in.mu), mat(in.sigma, c), 0.0, 10);
    EXPECT_NEAR(scaled.mahalanobis(vec(in.z)), base.mahalanobis(vec(in.z)) / std::sqrt(c), 1e-9);
  }
}

TEST(Mahalanobis, ZeroAtTheMeanAndDimensionChecked) {
  const auto model = ReferenceModel::from_parts(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity(), 0.0, 5);
  EXPECT_EQ(model.mahalanobis(Eigen::Vector2d(1, 2)), 0.0);
  EXPECT_DOUBLE_EQ(model.mahalanobis(Eigen::Vector2d(4, 6)), 5.0);
  EXPECT_THROW(model.mahalanobis(Eigen::Vector3d(1, 2, 3)), DataError);
  EXPECT_THROW(model.mahalanobis(Eigen::Vector2d(std::nan(""), 0)), DataError);
}

TEST(ReferenceFit, SampleCovarianceAndRidge) {
  Gen g(5);
  std::vector<Eigen::VectorXd> zs;
  for (int i = 0; i < 40; ++i) zs.push_back(Eigen::Vector3d(g.normal(), g.normal(2, 3), g.normal(-1, 0.5)));
  const auto model = ReferenceModel::fit(zs, 1e-6);
  // Independent two-pass covariance.
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& z : zs) mean += z;
  mean /= 40.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (const auto& z : zs) s += (z[i] - mean[i]) * (z[j] - mean[j]);
      EXPECT_NEAR(model.covariance()(i, j), s / 39.0, 1e-12);
    }
  }
  EXPECT_NEAR(model.ridge_lambda(), 1e-6 * model.covariance().trace() / 3.0, 1e-18);
  EXPECT_EQ(model.reference_count(), 40u);
}

TEST(ReferenceFit, SingularCovarianceIsRegularized) {
  // Rank-one reference: the second coordinate is a copy of the first.
  std::vector<Eigen::VectorXd> zs;
  for (int i = 0; i < 10; ++i) zs.push_back(Eigen::Vector2d(i, i));
  const auto model = ReferenceModel::fit(zs);
  EXPECT_GT(model.ridge_lambda(), 0.0);
  EXPECT_TRUE(std::isfinite(model.mahalanobis(Eigen::Vector2d(3, 4))));
}

TEST(ReferenceFit, ConstantReferenceUsesUnitScale) {
  std::vector<Eigen::VectorXd> zs(5, Eigen::Vector2d(1, 1));
  const auto model = ReferenceModel::fit(zs, 1e-3);
  EXPECT_NEAR(model.ridge_lambda(), 1e-3, 1e-15);
}

TEST(ReferenceFit, RejectsBadInput) {
  std::vector<Eigen::VectorXd> one{Eigen::Vector2d(1, 1)};
  EXPECT_THROW(ReferenceModel::fit(one), DataError);
  std::vector<Eigen::VectorXd> mixed{Eigen::Vector2d(1, 1), Eigen::Vector3d(1, 1, 1)};
  EXPECT_THROW(ReferenceModel::fit(mixed), DataError);
}

TEST(TauCalibration, ScoresOneToHundred) {
  std::vector<double> scores(100);
  std::iota(scores.begin(), scores.end(), 1.0);
  EXPECT_EQ(calibrate_tau(scores, 95.0), 95.0);
  EXPECT_EQ(calibrate_tau(scores, 100.0), 100.0);
  EXPECT_EQ(calibrate_tau(scores, 0.5), 1.0);
}

TEST(TauCalibration, SelfFlagFractionBound) {
  Gen g(31);
  for (int t = 0; t < 300; ++t) {
    const int n = g.integer(1, 400);
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) scores.push_back(g.coin(0.2) ? std::round(g.uniform(0, 5)) : g.uniform(0, 5));
    const double tau = calibrate_tau(scores);
    const auto flagged = std::count_if(scores.begin(), scores.end(), [&](double s) { return s > tau; });
    EXPECT_LE(static_cast<double>(flagged) / n, 0.05 + 1.0 / n);
  }
}

TEST(TauCalibration, RejectsEmptyAndBadPercentile) {
  std::vector<double> none;
  EXPECT_THROW(calibrate_tau(none), DataError);
  std::vector<double> some{1, 2};
  EXPECT_THROW(calibrate_tau(some, 0.0), DataError);
  EXPECT_THROW(calibrate_tau(some, 101.0), DataError);
}

TEST(ScoreCase, StrictlyGreaterIsOod) {
  auto model = ReferenceModel::from_parts(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 0.0, 3, 2.0);
  EXPECT_FALSE(score_case(Eigen::VectorXd::Constant(1, 2.0), model).is_ood);
  EXPECT_TRUE(score_case(Eigen::VectorXd::Constant(1, 2.0 + 1e-12), model).is_ood);
  auto uncalibrated = ReferenceModel::from_parts(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 0.0, 3);
  EXPECT_THROW(score_case(Eigen::VectorXd::Zero(1), uncalibrated), DataError);
}

TEST(ModelFile, SerializationRoundTripIsByteStable) {
  Gen g(8);
  std::vector<features::RawFeatureVector> ref;
  for (int i = 0; i < 30; ++i) {
    features::RawFeatureVector r;
    r.names = {"a", "b", "c", "zero"};
    r.values = {g.normal(), g.normal(5, 2), i % 7 == 0 ? std::optional<double>{} : std::optional<double>{g.uniform()}, 0.0};
    ref.push_back(r);
  }
  const ModelBundle bundle = fit_model_bundle(ref);
  EXPECT_EQ(bundle.catalog.retained, (std::vector<std::string>{"a", "b", "c"}));
  const std::string text = serialize_model(bundle);
  const ModelBundle back = parse_model(text);
  EXPECT_EQ(serialize_model(back), text);
  for (const auto& r : ref) EXPECT_DOUBLE_EQ(back.score(r).score, bundle.score(r).score);
  EXPECT_THROW(parse_model("{\"version\": 99}"), DataError);
}
