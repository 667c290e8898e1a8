// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "cxrt/error.hpp"
#include "cxrt/quantify/cam.hpp"
#include "cxrt/quantify/lwi.hpp"
#include "cxrt/quantify/masks.hpp"
#include "cxrt/quantify/pipeline.hpp"
#include "cxrt/quantify/suppression.hpp"
#include "cxrt/tools/scorer.hpp"
#include "test_support.hpp"

using namespace cxrt;
using namespace cxrt::quantify;
using cxrt::testing::Gen;

namespace {

double oracle_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Straightforward flood-fill version of the annulus fill.
Image oracle_fill(const Image& im, const Mask& mask, const Mask* lung) {
  const int rows = im.rows(), cols = im.cols();
  Image out = im;
  Grid<int> comp(rows, cols);
  for (int& v : comp.values()) v = -1;
  int next = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask(r, c) || comp(r, c) >= 0) continue;
      std::vector<std::pair<int, int>> pixels;
      std::queue<std::pair<int, int>> q;
      q.push({r, c});
      comp(r, c) = next;
      while (!q.empty()) {
        auto [y, x] = q.front();
        q.pop();
        pixels.push_back({y, x});
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= rows || nx >= cols || !mask(ny, nx) || comp(ny, nx) >= 0) continue;
            comp(ny, nx) = next;
            q.push({ny, nx});
          }
        }
      }
      std::vector<double> ring;
      for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
          if (mask(y, x)) continue;
          bool near = false;
          for (const auto& [py, px] : pixels) {
            if ((py - y) * (py - y) + (px - x) * (px - x) <= kAnnulusRadius * kAnnulusRadius) {
              near = true;
              break;
            }
          }
          if (near) ring.push_back(im(y, x));
        }
      }
      if (ring.empty()) {
        std::vector<double> in_lung, all;
        for (int y = 0; y < rows; ++y) {
          for (int x = 0; x < cols; ++x) {
            if (mask(y, x)) continue;
            all.push_back(im(y, x));
            if (lung && (*lung)(y, x)) in_lung.push_back(im(y, x));
          }
        }
        ring = in_lung.empty() ? all : in_lung;
      }
      const double value = oracle_median(ring);
      for (const auto& [py, px] : pixels) out(py, px) = value;
      ++next;
    }
  }
  return out;
}

}  // namespace

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_EQ(median_of({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median_of({7}), 7.0);
  EXPECT_THROW(median_of({}), DataError);
  Gen g(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v;
    const int n = g.integer(1, 50);
    for (int i = 0; i < n; ++i) v.push_back(g.coin(0.3) ? 0.5 : g.uniform());
    EXPECT_EQ(median_of(v), oracle_median(v));
  }
}

TEST(Lwi, UniformTwoRegionAndRandom) {
  Image flat(8, 8);
  for (double& v : flat.values()) v = 0.25;
  Mask all(8, 8);
  for (auto& v : all.values()) v = 1;
  const auto r = compute_lwi(flat, all);
  EXPECT_EQ(r.lwi, 0.25);
  EXPECT_EQ(r.lung_pixel_count, 64);

  Image two(4, 4);
  Mask half(4, 4);
  for (int rr = 0; rr < 4; ++rr) {
    for (int c = 0; c < 4; ++c) {
      two(rr, c) = c < 2 ? 0.2 : 0.8;
      half(rr, c) = (c == 1 || c == 2) ? 1 : 0;
    }
  }
  EXPECT_NEAR(compute_lwi(two, half).lwi, 0.5, 1e-12);

  Gen g(2);
  for (int t = 0; t < 100; ++t) {
    const Image im = cxrt::testing::random_image(g, 12, 17);
    Mask m = cxrt::testing::random_mask(g, 12, 17, 0.4);
    m(0, 0) = 1;
    double sum = 0;
    long n = 0;
    for (std::size_t i = 0; i < m.values().size(); ++i) {
      if (m.values()[i]) {
        sum += im.values()[i];
        ++n;
      }
    }
    const auto rep = compute_lwi(im, m);
    EXPECT_NEAR(rep.lwi, sum / n, 1e-12);
    EXPECT_EQ(rep.lung_pixel_count, n);
  }
  EXPECT_THROW(compute_lwi(flat, Mask(8, 8)), DataError);
  EXPECT_THROW(compute_lwi(flat, Mask(4, 4)), DataError);
}

TEST(Suppression, MatchesFloodFillOracle) {
  Gen g(3);
  for (int t = 0; t < 150; ++t) {
    const int rows = g.integer(3, 24), cols = g.integer(3, 24);
    const Image im = cxrt::testing::random_image(g, rows, cols);
    Mask mask = cxrt::testing::random_mask(g, rows, cols, g.uniform(0.02, 0.5));
    mask(0, 0) = 0;
    const Mask lung = cxrt::testing::random_mask(g, rows, cols, 0.5);
    const bool use_lung = g.coin();
    const Image got = annulus_fill(im, mask, use_lung ? &lung : nullptr);
    const Image want = oracle_fill(im, mask, use_lung ? &lung : nullptr);
    ASSERT_EQ(got, want) << "trial " << t;
  }
}

TEST(Suppression, LocalityAndIdempotence) {
  Gen g(4);
  for (int t = 0; t < 50; ++t) {
    const Image im = cxrt::testing::random_image(g, 32, 32);
    Mask ribs(32, 32);
    for (int r = 4; r < 28; r += 6) {
      for (int c = 2; c < 30; ++c) ribs(r, c) = 1;
    }
    const Image once = suppress_ribs(im, ribs);
    for (std::size_t i = 0; i < im.values().size(); ++i) {
      if (!ribs.values()[i]) ASSERT_EQ(once.values()[i], im.values()[i]);
    }
    EXPECT_EQ(suppress_ribs(once, ribs), once);
  }
  Mask full(4, 4);
  for (auto& v : full.values()) v = 1;
  EXPECT_THROW(annulus_fill(Image(4, 4), full), DataError);
}

TEST(Suppression, DeviceInpaintAndFallback) {
  Gen g(5);
  const Image im = cxrt::testing::random_image(g, 16, 16);
  Mask dev(16, 16);
  for (int r = 6; r < 9; ++r) {
    for (int c = 6; c < 9; ++c) dev(r, c) = 1;
  }
  FunctionInpainter painter("p", [](const Image& image, const Mask&) {
    Image out = image;
    for (double& v : out.values()) v = 2.0;
    return out;
  });
  const auto a = suppress_devices(im, dev, &painter);
  EXPECT_EQ(a.method, "inpaint");
  EXPECT_EQ(a.fill_events, 0);
  EXPECT_EQ(a.image(7, 7), 1.0);
  EXPECT_EQ(a.image(0, 0), im(0, 0));

  FunctionInpainter broken("b", [](const Image&, const Mask&) -> Image { throw AdapterError("down"); });
  const auto b = suppress_devices(im, dev, &broken);
  EXPECT_EQ(b.method, "annulus_fill");
  EXPECT_EQ(b.fill_events, 1);
  EXPECT_TRUE(b.warning.has_value());
  EXPECT_EQ(b.image, annulus_fill(im, dev));

  FunctionInpainter wrong("w", [](const Image&, const Mask&) { return Image(3, 3); });
  EXPECT_EQ(suppress_devices(im, dev, &wrong).method, "annulus_fill");
  const auto none = suppress_devices(im, Mask(16, 16), nullptr);
  EXPECT_EQ(none.method, "none");
  EXPECT_EQ(none.image, im);
}

TEST(Cam, NormalizeAndOverlay) {
  Image raw(2, 2);
  raw(0, 0) = 2;
  raw(0, 1) = 4;
  raw(1, 0) = 6;
  raw(1, 1) = 10;
  const Image n = normalize_heatmap(raw);
  EXPECT_EQ(n(0, 0), 0.0);
  EXPECT_EQ(n(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.25);
  Image flat(3, 3);
  for (double& v : flat.values()) v = 7;
  const Image flat_norm = normalize_heatmap(flat);
  for (double v : flat_norm.values()) EXPECT_EQ(v, 0.0);

  for (double v = 0; v <= 1.0; v += 0.01) {
    for (double ch : jet(v)) {
      EXPECT_GE(ch, 0.0);
      EXPECT_LE(ch, 1.0);
    }
  }
  Gen g(6);
  const Image gray = cxrt::testing::random_image(g, 5, 7);
  const Image heat = cxrt::testing::random_image(g, 5, 7);
  const RgbImage o = overlay_heatmap(gray, heat);
  ASSERT_EQ(o.rgb.size(), 5u * 7u * 3u);
  for (std::size_t i = 0; i < gray.values().size(); ++i) {
    const auto color = jet(heat.values()[i]);
    for (std::size_t k = 0; k < 3; ++k) {
      const double want = (0.6 * gray.values()[i] + 0.4 * color[k]) * 255.0;
      EXPECT_NEAR(o.rgb[i * 3 + k], want, 0.5 + 1e-9);
    }
  }
  EXPECT_THROW(overlay_heatmap(gray, Image(2, 2)), DataError);
}

TEST(Cam, ArtifactAndUnavailable) {
  Gen g(7);
  ingestion::CaseRecord rec;
  rec.case_id = "c";
  rec.pixels = cxrt::testing::random_image(g, 32, 32);
  const auto art = make_cam_artifact(rec.pixels, cxrt::testing::random_image(g, 4, 4));
  EXPECT_EQ(art.heatmap.rows(), 32);
  EXPECT_EQ(art.native.rows(), 4);
  Image bad(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(make_cam_artifact(rec.pixels, bad), DataError);

  tools::FunctionScorer no_cam("s", "1", [](const tools::ScoringRequest&) { return 0.5; });
  const auto out = build_cam_artifact(rec, no_cam);
  EXPECT_FALSE(out.artifact.has_value());
  EXPECT_EQ(out.notes, (std::vector<std::string>{"cam_unavailable"}));
  tools::FunctionScorer nan_cam(
      "s", "1", [](const tools::ScoringRequest&) { return 0.5; },
      [bad](const ingestion::CaseRecord&) { return std::optional<Image>(bad); });
  const auto malformed = build_cam_artifact(rec, nan_cam);
  EXPECT_FALSE(malformed.artifact.has_value());
  ASSERT_EQ(malformed.notes.size(), 1u);
  EXPECT_EQ(malformed.notes.front().rfind("cam_malformed", 0), 0u);
}

TEST(Masks, SyntheticShapesAndBinarize) {
  const Mask lung = SyntheticSegmenter::lung_mask(64, 64);
  const Mask rib = SyntheticSegmenter::rib_mask(64, 64);
  long lung_n = 0;
  for (std::size_t i = 0; i < lung.values().size(); ++i) {
    lung_n += lung.values()[i];
    if (rib.values()[i]) EXPECT_TRUE(lung.values()[i]);
  }
  EXPECT_GT(lung_n, 0);
  Mask m(2, 2);
  m(0, 0) = 255;
  m(1, 1) = 3;
  const Mask b = binarize(m, 2, 2);
  EXPECT_EQ(b(0, 0), 1);
  EXPECT_EQ(b(1, 1), 1);
  EXPECT_EQ(b(0, 1), 0);
  EXPECT_THROW(binarize(m, 3, 3), DataError);
}

TEST(Pipeline, QuantificationNeverChangesTheCaseAndNotesMissingPieces) {
  Gen g(8);
  ingestion::CaseRecord rec;
  rec.case_id = "c";
  rec.pixels = cxrt::testing::random_image(g, 64, 64);
  const Image before = rec.pixels;
  QuantifyAdapters adapters;
  adapters.segmentation.lung = std::make_shared<SyntheticSegmenter>();
  tools::IntensityStubScorer scorer;
  const auto r = quantify_case(rec, adapters, &scorer);
  EXPECT_EQ(rec.pixels, before);
  ASSERT_TRUE(r.lwi.has_value());
  EXPECT_GE(r.lwi->lwi, 0.0);
  EXPECT_LE(r.lwi->lwi, 1.0);
  EXPECT_TRUE(r.cam.has_value());

  QuantifyAdapters failing;
  failing.segmentation.lung = std::make_shared<FunctionSegmenter>(
      "f", [](const ingestion::CaseRecord&, MaskTarget) -> Mask { throw AdapterError("seg down"); });
  const auto f = quantify_case(rec, failing, nullptr);
  EXPECT_FALSE(f.lwi.has_value());
  EXPECT_FALSE(f.notes.empty());
}
