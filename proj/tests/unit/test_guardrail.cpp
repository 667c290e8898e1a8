// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cxrt/error.hpp"
#include "cxrt/policy/guardrail.hpp"
#include "test_support.hpp"

using namespace cxrt;
using namespace cxrt::policy;

namespace {

Thresholds thresholds(double tau_ood) {
  Thresholds th;
  th.tau_ood = tau_ood;
  return th;
}

}  // namespace

TEST(Guardrail, WorkedExamples) {
  const Thresholds th = thresholds(5.0);
  EXPECT_TRUE(evaluate_guardrail(0.70, 4.0, th).allowed.allow_accept);
  EXPECT_FALSE(evaluate_guardrail(0.59, 4.0, th).allowed.allow_accept);
  const auto ood = evaluate_guardrail(0.99, std::nextafter(5.0, 6.0), th);
  EXPECT_FALSE(ood.allowed.allow_accept);
  EXPECT_TRUE(ood.ood);
}

TEST(Guardrail, BoundariesAreInclusiveForConfidenceAndDistance) {
  const Thresholds th = thresholds(3.25);
  EXPECT_TRUE(evaluate_guardrail(th.tau_conf, th.tau_ood, th).allowed.allow_accept);
  EXPECT_FALSE(evaluate_guardrail(std::nextafter(th.tau_conf, 0.0), th.tau_ood, th).allowed.allow_accept);
  EXPECT_FALSE(evaluate_guardrail(th.tau_conf, std::nextafter(th.tau_ood, 10.0), th).allowed.allow_accept);
}

TEST(Guardrail, TruthTableOverGrid) {
  const Thresholds th = thresholds(2.5);
  int mismatches = 0;
  for (int i = 0; i <= 200; ++i) {
    const double c = 0.5 + 0.0025 * i;
    for (int j = 0; j <= 200; ++j) {
      const double m = 0.025 * j;
      const auto r = evaluate_guardrail(c, m, th);
      const bool expect = m <= th.tau_ood && c >= th.tau_conf;
      if (r.allowed.allow_accept != expect || r.ood != (m > th.tau_ood)) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(Guardrail, AcceptListedOnlyWhenAllowed) {
  cxrt::testing::Gen g(11);
  const Thresholds th = thresholds(1.0);
  for (int i = 0; i < 500; ++i) {
    const auto r = evaluate_guardrail(g.uniform(0.5, 1.0), g.uniform(0.0, 2.0), th);
    EXPECT_EQ(r.allowed.contains(Action::accept), r.allowed.allow_accept);
    EXPECT_TRUE(r.allowed.contains(Action::tta));
    EXPECT_TRUE(r.allowed.contains(Action::moe));
    EXPECT_TRUE(r.allowed.contains(Action::vlm));
  }
}

TEST(Guardrail, RejectsInvalidSignals) {
  const Thresholds th = thresholds(1.0);
  EXPECT_THROW(evaluate_guardrail(std::nan(""), 0.5, th), DataError);
  EXPECT_THROW(evaluate_guardrail(0.7, std::numeric_limits<double>::infinity(), th), DataError);
  EXPECT_THROW(evaluate_guardrail(1.2, 0.5, th), DataError);
  EXPECT_THROW(evaluate_guardrail(0.7, -0.1, th), DataError);
}

TEST(Guardrail, ThresholdValidation) {
  Thresholds th;
  th.tau_conf = 1.5;
  EXPECT_THROW(th.validate(), UsageError);
  th = Thresholds{};
  th.tau_tta = -1;
  EXPECT_THROW(th.validate(), UsageError);
  th = Thresholds{};
  EXPECT_NO_THROW(th.validate());
}
