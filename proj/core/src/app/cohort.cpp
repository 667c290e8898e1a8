// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "cxrt/app/stub_behavior.hpp"
#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/image_io.hpp"
#include "cxrt/ingestion/case_record.hpp"
#include "cxrt/tools/vlm.hpp"

namespace cxrt::app {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kBandEps = 1e-9;

bool probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

/// Zero-sum offsets of growing magnitude, +a, -a, +2a, -2a, ...
std::vector<double> spread(double mu, double amp, int k) {
  std::vector<double> out(static_cast<std::size_t>(k), mu);
  for (int i = 0; i + 1 < k; i += 2) {
    const double step = amp * (1.0 + (i / 2) % 4) / 4.0;
    out[static_cast<std::size_t>(i)] = mu + step;
    out[static_cast<std::size_t>(i + 1)] = mu - step;
  }
  return out;
}

std::vector<int> exact_subset(std::mt19937_64& rng, int n, int count) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(std::clamp(count, 0, n)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

bool contains(const std::vector<int>& sorted, int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

double band_noise(const ReliabilityBand& b) { return 0.02 + 0.06 * (1.0 - (b.c_lo + b.c_hi) / 2.0) * 2.0; }

void write_png(const fs::path& path, const Gray8& image) { write_file_atomic(path.string(), encode_png(image)); }

}  // namespace

std::string ReliabilityBand::name() const { return "c" + fixed(c_lo, 2) + "-" + fixed(c_hi, 2); }

std::vector<ReliabilityBand> SyntheticCohortSpec::default_bands() {
  return {{0.5, 0.7, 0.70, 1.0, 0.2}, {0.7, 0.9, 0.90, 1.0, 0.5}, {0.9, 1.0, 0.98, 2.0, 0.8}};
}

void SyntheticCohortSpec::validate() const {
  if (n_cases < 1) throw UsageError("cohort: n_cases must be >= 1");
  if (reference_cases < 2) throw UsageError("cohort: reference_cases must be >= 2");
  if (image_size < 32) throw UsageError("cohort: image_size must be >= 32");
  if (tta_k < 2) throw UsageError("cohort: tta_k must be >= 2");
  for (double v : {positive_fraction, ood_fraction, tta_failure_fraction, vlm_garbage_fraction}) {
    if (!probability(v)) throw UsageError("cohort: fractions must lie in [0,1]");
  }
  if (bands.empty()) throw UsageError("cohort: at least one reliability band is required");
  double expected_lo = 0.5;
  for (const auto& b : bands) {
    if (!probability(b.p_correct) || !probability(b.tta_stable)) {
      throw UsageError("cohort: band probabilities must lie in [0,1]");
    }
    if (!(b.weight > 0) || !std::isfinite(b.weight)) throw UsageError("cohort: band weights must be positive");
    if (!(b.c_hi > b.c_lo)) throw UsageError("cohort: band " + b.name() + " is empty");
    if (std::abs(b.c_lo - expected_lo) > kBandEps) {
      throw UsageError("cohort: bands must be sorted and contiguous from 0.5 (gap or overlap at " + fixed(expected_lo, 3) + ")");
    }
    expected_lo = b.c_hi;
  }
  if (std::abs(expected_lo - 1.0) > kBandEps) throw UsageError("cohort: bands must end at 1.0");
}

ordered_json SyntheticCohortSpec::to_json() const {
  ordered_json b = ordered_json::array();
  for (const auto& band : bands) {
    b.push_back({{"c_lo", band.c_lo},
                 {"c_hi", band.c_hi},
                 {"p_correct", band.p_correct},
                 {"weight", band.weight},
                 {"tta_stable", band.tta_stable}});
  }
  return {{"n_cases", n_cases},
          {"positive_fraction", positive_fraction},
          {"bands", std::move(b)},
          {"ood_fraction", ood_fraction},
          {"seed", seed},
          {"reference_cases", reference_cases},
          {"image_size", image_size},
          {"tta_k", tta_k},
          {"tta_failure_fraction", tta_failure_fraction},
          {"vlm_garbage_fraction", vlm_garbage_fraction}};
}

SyntheticCohortSpec SyntheticCohortSpec::from_json(const json& j) {
  SyntheticCohortSpec s;
  try {
    s.n_cases = j.value("n_cases", s.n_cases);
    s.positive_fraction = j.value("positive_fraction", s.positive_fraction);
    s.ood_fraction = j.value("ood_fraction", s.ood_fraction);
    s.seed = j.value("seed", s.seed);
    s.reference_cases = j.value("reference_cases", s.reference_cases);
    s.image_size = j.value("image_size", s.image_size);
    s.tta_k = j.value("tta_k", s.tta_k);
    s.tta_failure_fraction = j.value("tta_failure_fraction", s.tta_failure_fraction);
    s.vlm_garbage_fraction = j.value("vlm_garbage_fraction", s.vlm_garbage_fraction);
    if (j.contains("bands")) {
      s.bands.clear();
      for (const auto& b : j.at("bands")) {
        ReliabilityBand band;
        band.c_lo = b.at("c_lo").get<double>();
        band.c_hi = b.at("c_hi").get<double>();
        band.p_correct = b.at("p_correct").get<double>();
        band.weight = b.value("weight", 1.0);
        band.tta_stable = b.value("tta_stable", 0.5);
        s.bands.push_back(band);
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("cohort spec: ") + e.what());
  }
  s.validate();
  return s;
}

ordered_json CohortSummary::to_json() const {
  return {{"n_cases", n_cases},
          {"positives", positives},
          {"ood", ood},
          {"planted_correct", planted_correct},
          {"expected_accuracy", expected_accuracy()},
          {"tta_failures", tta_failures},
          {"vlm_garbage", vlm_garbage},
          {"reference_cases", reference_cases}};
}

Gray8 synthesize_radiograph(std::mt19937_64& rng, int size, double noise, bool opacity) {
  std::normal_distribution<double> gauss(0.0, noise);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double brightness = 0.05 * (unit(rng) - 0.5);
  // Blob centre inside one lung field.
  const double side = unit(rng) < 0.5 ? 0.30 : 0.70;
  const double by = 0.5 + 0.35 * 0.30 * (2.0 * unit(rng) - 1.0);
  const double bx = side + 0.35 * 0.14 * (2.0 * unit(rng) - 1.0);
  const double bs = 0.05 + 0.03 * unit(rng);
  Gray8 out(size, size);
  for (int r = 0; r < size; ++r) {
    const double y = (r + 0.5) / size;
    for (int c = 0; c < size; ++c) {
      const double x = (c + 0.5) / size;
      double v = 0.45 + 0.15 * y + brightness;
      for (double cx : {0.30, 0.70}) {
        const double dy = (y - 0.5) / 0.30;
        const double dx = (x - cx) / 0.14;
        const double e = dy * dy + dx * dx;
        if (e <= 1.0) v -= 0.22 * (1.0 - 0.5 * e);
      }
      if (opacity) {
        const double d2 = ((y - by) * (y - by) + (x - bx) * (x - bx)) / (bs * bs);
        v += 0.30 * std::exp(-0.5 * d2);
      }
      out(r, c) = to_byte(v + gauss(rng));
    }
  }
  return out;
}

Gray8 synthesize_shifted(std::mt19937_64& rng, int size) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.05);
  const int cell = 3 + static_cast<int>(unit(rng) * 4.0);
  const double phase = unit(rng);
  Gray8 out(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const bool dark = ((r / cell) + (c / cell)) % 2 == 0;
      const double field = 1.0 - (0.45 + 0.15 * (r + 0.5) / size);
      const double v = 0.3 * field + 0.7 * (dark ? 0.05 + 0.1 * phase : 0.95 - 0.1 * phase);
      out(r, c) = to_byte(v + gauss(rng));
    }
  }
  return out;
}

CohortSummary generate_cohort(const SyntheticCohortSpec& spec, const fs::path& out_dir) {
  spec.validate();
  const fs::path ref_dir = out_dir / "reference";
  const fs::path case_dir = out_dir / "cases";
  fs::create_directories(ref_dir);
  fs::create_directories(case_dir);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CohortSummary summary;
  summary.n_cases = spec.n_cases;
  summary.reference_cases = spec.reference_cases;

  std::vector<double> cumulative;
  double total_weight = 0.0;
  for (const auto& b : spec.bands) cumulative.push_back(total_weight += b.weight);
  const auto pick_band = [&]() -> const ReliabilityBand& {
    const double u = unit(rng) * total_weight;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return spec.bands[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), spec.bands.size() - 1)];
  };

  for (int i = 0; i < spec.reference_cases; ++i) {
    const ReliabilityBand& band = pick_band();
    const Gray8 img = synthesize_radiograph(rng, spec.image_size, band_noise(band), i % 2 == 1);
    char name[32];
    std::snprintf(name, sizeof name, "ref_%04d.png", i);
    write_png(ref_dir / name, img);
  }

  const int n = spec.n_cases;
  const auto positives = exact_subset(rng, n, static_cast<int>(std::lround(n * spec.positive_fraction)));
  const auto ood = exact_subset(rng, n, static_cast<int>(std::lround(n * spec.ood_fraction)));
  const auto tta_fail = exact_subset(rng, n, static_cast<int>(std::lround(n * spec.tta_failure_fraction)));
  const auto garbage = exact_subset(rng, n, static_cast<int>(std::lround(n * spec.vlm_garbage_fraction)));

  std::map<std::string, StubCase> behavior;
  std::string labels = "case_id,label,file\n";
  for (int i = 0; i < n; ++i) {
    StubCase sc;
    sc.truth = contains(positives, i) ? Label::positive : Label::negative;
    sc.ood = contains(ood, i);
    const ReliabilityBand& band = pick_band();
    sc.band = band.name();
    sc.planted_correct = unit(rng) < band.p_correct;
    sc.predicted = sc.planted_correct ? sc.truth : opposite(sc.truth);
    double c = band.c_lo + (band.c_hi - band.c_lo) * unit(rng);
    c = std::clamp(c, 0.5 + 1e-3, 1.0);
    sc.p = sc.predicted == Label::positive ? c : 1.0 - c;

    const bool pos = sc.predicted == Label::positive;
    if (contains(tta_fail, i)) {
      sc.tta.reset();
    } else if (unit(rng) < band.tta_stable) {
      sc.tta = spread(pos ? 0.9 : 0.1, 0.02, spec.tta_k);
    } else {
      sc.tta = spread(pos ? 0.6 : 0.4, 0.15, spec.tta_k);
    }

    const double agree = pos ? 0.8 : 0.2;
    const double disagree = 1.0 - agree;
    const double m = unit(rng);
    const int dissent = m < 0.5 ? 0 : (m < 0.8 ? 1 : 2);
    sc.moe.assign(4, agree);
    for (int d = 0; d < dissent; ++d) sc.moe[static_cast<std::size_t>(3 - d)] = disagree;

    if (contains(garbage, i)) {
      sc.vlm = "The image suggests " + std::string(pos ? "edema" : "no edema") + ".";
    } else {
      sc.vlm = tools::format_vlm_block(sc.predicted, pos ? "0.80" : "0.20",
                                       pos ? "perihilar haze with interstitial markings" : "clear lung fields");
    }

    const Gray8 img = sc.ood ? synthesize_shifted(rng, spec.image_size)
                             : synthesize_radiograph(rng, spec.image_size, band_noise(band), sc.truth == Label::positive);
    const auto bytes = encode_png(img);
    const std::string case_id = ingestion::content_case_id(bytes);
    char name[32];
    std::snprintf(name, sizeof name, "case_%04d.png", i);
    sc.file = name;
    write_file_atomic((case_dir / name).string(), bytes);
    labels += case_id + "," + std::string(to_string(sc.truth)) + "," + sc.file + "\n";

    summary.positives += sc.truth == Label::positive;
    summary.ood += sc.ood;
    summary.planted_correct += sc.planted_correct;
    summary.tta_failures += !sc.tta.has_value();
    summary.vlm_garbage += contains(garbage, i);
    if (!behavior.emplace(case_id, std::move(sc)).second) {
      throw DataError("cohort: duplicate case content for " + std::string(name));
    }
  }

  write_file_atomic((out_dir / "labels.csv").string(), labels);
  StubBehavior(std::move(behavior)).save((out_dir / "stub_behavior.json").string());
  const ordered_json meta = {{"spec", spec.to_json()}, {"summary", summary.to_json()}};
  write_file_atomic((out_dir / "cohort.json").string(), meta.dump(2) + "\n");
  return summary;
}

}  // namespace cxrt::app
