// SPDX-License-Identifier: Apache-2.0
#include "cxrt/features/extract.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>

namespace cxrt::features {

std::optional<double> RawFeatureVector::get(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  return std::nullopt;
}

namespace {

inline int level_of(double v) noexcept {
  double x = v * (255.0 / kBinWidth) + 1e-9;
  if (!(x >= 0.0)) return 0;
  if (x >= kNumLevels - 1) return kNumLevels - 1;
  // The multiply can differ from the divide by an ulp; redo it near a level edge.
  const int level = static_cast<int>(x);
  const double frac = x - level;
  if (frac > 1e-6 && frac < 1.0 - 1e-6) [[likely]] return level;
  x = v * 255.0 / kBinWidth + 1e-9;
  if (!(x >= 0.0)) return 0;
  return x >= kNumLevels - 1 ? kNumLevels - 1 : static_cast<int>(x);
}

}  // namespace

int quantize_level(double v) noexcept { return level_of(v); }

const std::vector<std::string>& builtin_feature_names() {
  static const std::vector<std::string> names = {
      "original_firstorder_Mean",          "original_firstorder_Variance",
      "original_firstorder_Skewness",      "original_firstorder_Kurtosis",
      "original_firstorder_Energy",        "original_firstorder_Entropy",
      "original_firstorder_Minimum",       "original_firstorder_Maximum",
      "original_firstorder_Median",        "original_firstorder_10Percentile",
      "original_firstorder_90Percentile",  "original_firstorder_InterquartileRange",
      "original_firstorder_RobustMeanAbsoluteDeviation",
      "original_glcm_Contrast",            "original_glcm_Correlation",
      "original_glcm_JointEnergy",         "original_glcm_Idm",
  };
  return names;
}

namespace {

/// Fixed value buckets over [0, 1]; out-of-range values land in the end
/// buckets, which keeps the mapping monotone.
inline constexpr std::size_t kBuckets = 1 << 14;

inline std::size_t bucket_of(double v) noexcept {
  if (!(v > 0.0)) return 0;
  const double x = v * static_cast<double>(kBuckets);
  return x >= static_cast<double>(kBuckets - 1) ? kBuckets - 1 : static_cast<std::size_t>(static_cast<int>(x));
}

struct BucketStats {
  std::vector<std::uint32_t> count = std::vector<std::uint32_t>(kBuckets, 0);
  std::vector<double> sum = std::vector<double>(kBuckets, 0.0);
  std::vector<std::size_t> starts;  // prefix counts, size kBuckets + 1

  void finish() {
    starts.assign(kBuckets + 1, 0);
    for (std::size_t b = 0; b < kBuckets; ++b) starts[b + 1] = starts[b] + count[b];
  }
  std::size_t bucket_of_rank(std::size_t k) const {
    return static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), k) - starts.begin()) - 1;
  }
};

/// Holds the values of a few buckets, gathered in one sweep of the interior.
class BucketGather {
 public:
  template <class Visit>
  BucketGather(const BucketStats& stats, std::vector<std::size_t> wanted, Visit&& visit_interior)
      : slot_(kBuckets, -1) {
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    values_.resize(wanted.size());
    for (std::size_t w = 0; w < wanted.size(); ++w) {
      slot_[wanted[w]] = static_cast<std::int32_t>(w);
      values_[w].reserve(stats.count[wanted[w]]);
    }
    visit_interior([this](double v) {
      const std::int32_t w = slot_[bucket_of(v)];
      if (w >= 0) values_[static_cast<std::size_t>(w)].push_back(v);
    });
  }
  bool has(std::size_t b) const { return slot_[b] >= 0; }
  std::vector<double>& at(std::size_t b) { return values_[static_cast<std::size_t>(slot_[b])]; }

 private:
  std::vector<std::int32_t> slot_;
  std::vector<std::vector<double>> values_;
};

struct GlcmFeatures {
  double contrast = 0;
  double correlation = 0;
  double joint_energy = 0;
  double idm = 0;
};

using Cooccurrence = std::array<std::uint32_t, kNumLevels * kNumLevels>;

/// Directed pair counts for the four offsets in one sweep. Both ends of a
/// pair must lie inside the one-pixel-border mask.
std::array<Cooccurrence, 4> count_pairs(const Grid<std::uint8_t>& levels) {
  std::array<Cooccurrence, 4> counts{};
  const int rows = levels.rows();
  const int cols = levels.cols();
  const auto row = [&](int r) { return levels.values().data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols); };
  for (int r = 1; r <= rows - 2; ++r) {
    const std::uint8_t* here = row(r);
    const bool has_next = r + 1 <= rows - 2;
    const std::uint8_t* next = has_next ? row(r + 1) : nullptr;
    const int last = cols - 2;
    for (int c = 1; c <= last; ++c) {
      const int a = here[c] * kNumLevels;
      if (c < last) ++counts[0][static_cast<std::size_t>(a + here[c + 1])];
      if (!has_next) continue;
      ++counts[1][static_cast<std::size_t>(a + next[c])];
      if (c < last) ++counts[2][static_cast<std::size_t>(a + next[c + 1])];
      if (c > 1) ++counts[3][static_cast<std::size_t>(a + next[c - 1])];
    }
  }
  return counts;
}

/// Texture statistics of the symmetrized matrix C + C^T.
GlcmFeatures glcm_features(const Cooccurrence& directed, bool& any_pairs) {
  std::array<double, kNumLevels * kNumLevels> counts{};
  for (int i = 0; i < kNumLevels; ++i) {
    for (int j = 0; j < kNumLevels; ++j) {
      counts[static_cast<std::size_t>(i * kNumLevels + j)] =
          static_cast<double>(directed[static_cast<std::size_t>(i * kNumLevels + j)]) +
          static_cast<double>(directed[static_cast<std::size_t>(j * kNumLevels + i)]);
    }
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  any_pairs = total > 0;
  GlcmFeatures f;
  if (!any_pairs) return f;

  double mu_x = 0, mu_y = 0;
  for (int i = 0; i < kNumLevels; ++i) {
    for (int j = 0; j < kNumLevels; ++j) {
      const double p = counts[static_cast<std::size_t>(i * kNumLevels + j)] / total;
      mu_x += (i + 1) * p;
      mu_y += (j + 1) * p;
    }
  }
  double var_x = 0, var_y = 0, cross = 0;
  for (int i = 0; i < kNumLevels; ++i) {
    for (int j = 0; j < kNumLevels; ++j) {
      const double p = counts[static_cast<std::size_t>(i * kNumLevels + j)] / total;
      if (p == 0) continue;
      const double d = i - j;
      f.contrast += d * d * p;
      f.joint_energy += p * p;
      f.idm += p / (1.0 + d * d);
      var_x += (i + 1 - mu_x) * (i + 1 - mu_x) * p;
      var_y += (j + 1 - mu_y) * (j + 1 - mu_y) * p;
      cross += (i + 1) * (j + 1) * p;
    }
  }
  const double denom = std::sqrt(var_x) * std::sqrt(var_y);
  f.correlation = denom > 0 ? (cross - mu_x * mu_y) / denom : 0.0;
  return f;
}

}  // namespace

RawFeatureVector extract_features(const Image& image) {
  const int rows = image.rows();
  const int cols = image.cols();

  RawFeatureVector out;
  out.names = builtin_feature_names();
  out.values.assign(out.names.size(), std::nullopt);
  if (rows <= 2 || cols <= 2) return out;  // no interior: every feature missing

  const auto row_ptr = [&](int r) {
    return image.values().data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
  };
  const auto visit_interior = [&](auto&& f) {
    for (int r = 1; r < rows - 1; ++r) {
      const double* row = row_ptr(r);
      for (int c = 1; c < cols - 1; ++c) f(row[c]);
    }
  };

  // Sweep 1: levels, histogram, extrema, shifted power sums, bucket stats.
  Grid<std::uint8_t> levels(rows, cols);
  std::array<std::size_t, kNumLevels> histogram{};
  BucketStats buckets;
  const double pivot = image(1, 1);
  double sum = 0, energy = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double lo = image(1, 1), hi = image(1, 1);
  for (int r = 0; r < rows; ++r) {
    const double* row = row_ptr(r);
    std::uint8_t* lrow = levels.values().data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
    if (r == 0 || r == rows - 1) {
      for (int c = 0; c < cols; ++c) lrow[c] = static_cast<std::uint8_t>(level_of(row[c]));
      continue;
    }
    lrow[0] = static_cast<std::uint8_t>(level_of(row[0]));
    lrow[cols - 1] = static_cast<std::uint8_t>(level_of(row[cols - 1]));
    for (int c = 1; c < cols - 1; ++c) {
      const double v = row[c];
      const int level = level_of(v);
      lrow[c] = static_cast<std::uint8_t>(level);
      ++histogram[static_cast<std::size_t>(level)];
      sum += v;
      energy += v * v;
      const double d = v - pivot;
      const double d2 = d * d;
      s1 += d;
      s2 += d2;
      s3 += d2 * d;
      s4 += d2 * d2;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      const std::size_t b = bucket_of(v);
      ++buckets.count[b];
      buckets.sum[b] += v;
    }
  }
  buckets.finish();

  const std::size_t count = static_cast<std::size_t>(rows - 2) * static_cast<std::size_t>(cols - 2);
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  // Central moments from sums shifted by the pivot: e = mean - pivot.
  const double e = s1 / n;
  const double m2 = std::max(0.0, s2 / n - e * e);
  const double m3 = s3 / n - 3 * e * s2 / n + 2 * e * e * e;
  const double m4 = s4 / n - 4 * e * s3 / n + 6 * e * e * s2 / n - 3 * e * e * e * e;
  const double skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;

  double entropy = 0;
  for (std::size_t hcount : histogram) {
    if (hcount == 0) continue;
    const double p = static_cast<double>(hcount) / n;
    entropy -= p * std::log2(p);
  }

  // Sweep 2: exact percentiles at position (n-1)*q/100, linear interpolation.
  static constexpr double kQuantiles[] = {10, 25, 50, 75, 90};
  std::vector<std::size_t> wanted;
  for (double q : kQuantiles) {
    const auto r = static_cast<std::size_t>(std::floor((n - 1.0) * q / 100.0));
    wanted.push_back(buckets.bucket_of_rank(r));
    if (r + 1 < count) wanted.push_back(buckets.bucket_of_rank(r + 1));
  }
  BucketGather gather(buckets, wanted, visit_interior);
  const auto kth = [&](std::size_t k) {
    const std::size_t b = buckets.bucket_of_rank(k);
    auto& vals = gather.at(b);
    const auto nth = vals.begin() + static_cast<std::ptrdiff_t>(k - buckets.starts[b]);
    std::nth_element(vals.begin(), nth, vals.end());
    return *nth;
  };
  std::array<double, 5> pct{};
  for (std::size_t i = 0; i < pct.size(); ++i) {
    const double pos = (n - 1.0) * kQuantiles[i] / 100.0;
    const auto r = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(r);
    const double a = kth(r);
    pct[i] = frac == 0.0 || r + 1 >= count ? a : a + frac * (kth(r + 1) - a);
  }
  const double p10 = pct[0], p25 = pct[1], median = pct[2], p75 = pct[3], p90 = pct[4];

  // Robust mean absolute deviation over [p10, p90]. Buckets strictly inside
  // contribute through their sums; edge buckets were gathered.
  const std::size_t b10 = bucket_of(p10);
  const std::size_t b90 = bucket_of(p90);
  const auto edge_values = [&](std::size_t b, auto&& f) {
    if (!gather.has(b)) return;  // holds no values
    for (double v : gather.at(b)) {
      if (v >= p10 && v <= p90) f(v);
    }
  };
  double robust_sum = 0;
  std::size_t robust_n = 0;
  const auto add = [&](double v) {
    robust_sum += v;
    ++robust_n;
  };
  edge_values(b10, add);
  if (b90 != b10) edge_values(b90, add);
  for (std::size_t b = b10 + 1; b < b90; ++b) {
    robust_sum += buckets.sum[b];
    robust_n += buckets.count[b];
  }
  const double robust_mean = robust_sum / static_cast<double>(robust_n);

  const std::size_t bm = bucket_of(robust_mean);
  double robust_mad = 0;
  const auto add_abs = [&](double v) { robust_mad += std::abs(v - robust_mean); };
  edge_values(b10, add_abs);
  if (b90 != b10) edge_values(b90, add_abs);
  for (std::size_t b = b10 + 1; b < b90; ++b) {
    if (b == bm) continue;
    const double delta = buckets.sum[b] - static_cast<double>(buckets.count[b]) * robust_mean;
    robust_mad += b > bm ? delta : -delta;
  }
  if (bm > b10 && bm < b90) {
    if (gather.has(bm)) {
      for (double v : gather.at(bm)) add_abs(v);
    } else {
      visit_interior([&](double v) {
        if (bucket_of(v) == bm) add_abs(v);
      });
    }
  }
  robust_mad /= static_cast<double>(robust_n);

  // Offsets (0,1), (1,0), (1,1), (1,-1).
  GlcmFeatures glcm;
  int used = 0;
  const auto pairs = count_pairs(levels);
  for (const auto& directed : pairs) {
    bool any = false;
    const GlcmFeatures f = glcm_features(directed, any);
    if (!any) continue;
    glcm.contrast += f.contrast;
    glcm.correlation += f.correlation;
    glcm.joint_energy += f.joint_energy;
    glcm.idm += f.idm;
    ++used;
  }
  if (used > 0) {
    glcm.contrast /= used;
    glcm.correlation /= used;
    glcm.joint_energy /= used;
    glcm.idm /= used;
  }

  out.values = {mean,     m2,       skewness,  kurtosis,     energy, entropy,
                lo,       hi,       median, p10,       p90,    p75 - p25,
                robust_mad, glcm.contrast, glcm.correlation, glcm.joint_energy, glcm.idm};
  if (used == 0) {
    for (std::size_t i = 13; i < out.values.size(); ++i) out.values[i] = std::nullopt;
  }
  return out;
}

}  // namespace cxrt::features
