// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/scorer.hpp"

#include <cmath>

#include "cxrt/error.hpp"

namespace cxrt::tools {

std::string_view to_string(Transport t) noexcept {
  switch (t) {
    case Transport::in_process_stub: return "in_process_stub";
    case Transport::subprocess_line_protocol: return "subprocess_line_protocol";
    case Transport::remote_http: return "remote_http";
  }
  return "unknown";
}

Image ScoringRequest::materialize() const {
  return augmentation ? apply_augmentation(record.pixels, *augmentation) : record.pixels;
}

FunctionScorer::FunctionScorer(std::string id, std::string version, ScoreFn score, CamFn cam)
    : id_(std::move(id)), version_(std::move(version)), score_(std::move(score)), cam_(std::move(cam)) {}

IntensityStubScorer::IntensityStubScorer(std::string id, double gain, double midpoint)
    : id_(std::move(id)), gain_(gain), midpoint_(midpoint) {}

double IntensityStubScorer::score(const ScoringRequest& request) {
  const Image pixels = request.materialize();
  const int r0 = pixels.rows() / 4;
  const int r1 = std::max(r0 + 1, 3 * pixels.rows() / 4);
  const int c0 = pixels.cols() / 4;
  const int c1 = std::max(c0 + 1, 3 * pixels.cols() / 4);
  double sum = 0;
  long count = 0;
  for (int r = r0; r < std::min(r1, pixels.rows()); ++r) {
    for (int c = c0; c < std::min(c1, pixels.cols()); ++c) {
      sum += pixels(r, c);
      ++count;
    }
  }
  const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return 1.0 / (1.0 + std::exp(-gain_ * (mean - midpoint_)));
}

std::optional<Image> IntensityStubScorer::cam(const CaseRecord& record) {
  constexpr int kCells = 16;
  const Image& px = record.pixels;
  if (px.rows() < kCells || px.cols() < kCells) return std::nullopt;
  Image heat(kCells, kCells);
  const int bh = px.rows() / kCells;
  const int bw = px.cols() / kCells;
  for (int i = 0; i < kCells; ++i) {
    for (int j = 0; j < kCells; ++j) {
      double sum = 0;
      for (int r = i * bh; r < (i + 1) * bh; ++r) {
        for (int c = j * bw; c < (j + 1) * bw; ++c) sum += px(r, c);
      }
      heat(i, j) = sum / (bh * bw);
    }
  }
  return heat;
}

ConfidenceSignal base_score(const CaseRecord& record, ScorerAdapter& adapter, int retries) {
  const double p = with_retries(retries, [&] { return adapter.score(ScoringRequest{record, std::nullopt, -1}); });
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw AdapterError(adapter.id() + " returned an invalid posterior");
  }
  return derive_confidence(p);
}

}  // namespace cxrt::tools
