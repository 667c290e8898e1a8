// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cxrt/features/extract.hpp"
#include "cxrt/ood/reference_model.hpp"
#include "cxrt/policy/router.hpp"
#include "cxrt/policy/toolbox.hpp"
#include "cxrt/tools/moe.hpp"
#include "cxrt/tools/tta.hpp"
#include "cxrt/tools/vlm.hpp"

using namespace cxrt;

namespace {

std::vector<Eigen::VectorXd> gaussian_cloud(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(d));
  for (auto& z : out) {
    for (int i = 0; i < d; ++i) z[i] = normal(rng);
  }
  return out;
}

Image random_image(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image im(size, size);
  for (double& v : im.values()) v = u(rng);
  return im;
}

void BM_Mahalanobis(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto ref = gaussian_cloud(4 * d, d, 1);
  const auto model = ood::ReferenceModel::fit(ref);
  const auto probes = gaussian_cloud(64, d, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.mahalanobis(probes[i++ % probes.size()]));
  }
}
BENCHMARK(BM_Mahalanobis)->Arg(16)->Arg(64)->Arg(256);

void BM_FeatureExtraction(benchmark::State& state) {
  const Image im = random_image(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::extract_features(im));
  }
}
BENCHMARK(BM_FeatureExtraction)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

// Routing only: tools return canned results, so this is the orchestration overhead per case.
void BM_RuleRouterEscalation(benchmark::State& state) {
  const auto pol = policy::RouterPolicy::from_thresholds(policy::Thresholds{});
  const std::string vlm = tools::format_vlm_block(Label::negative, "0.30", "no effusion");
  policy::FunctionToolbox box;
  box.tta_fn = [] { return tools::summarize_tta({0.2, 0.9, 0.4, 0.7}); };
  const std::vector<Label> votes = {Label::positive, Label::positive, Label::negative, Label::negative};
  box.moe_fn = [&votes](Label base) { return tools::aggregate_votes(votes, base); };
  box.vlm_fn = [&vlm] { return tools::parse_vlm_response(vlm); };
  for (auto _ : state) {
    policy::CaseSession s(policy::CaseSignals{tools::derive_confidence(0.55), 1.0, 5.0, 1e-6},
                          policy::Thresholds{});
    benchmark::DoNotOptimize(&policy::run_rule_router(s, box, pol));
  }
}
BENCHMARK(BM_RuleRouterEscalation);

}  // namespace
BENCHMARK_MAIN();
