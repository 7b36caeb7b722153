#include "pilotopt/pilot_patterns.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pilotopt/rng.hpp"

namespace pilotopt {

namespace {

// Nearest integer, ties (x.5) rounding up.
int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void check_kappa_range(int kappa, double upper, const char* who) {
  if (kappa < 0 || static_cast<double>(kappa) > upper)
    throw std::invalid_argument(std::string(who) + ": kappa out of range [0, " +
                                std::to_string(upper) + "], got " + std::to_string(kappa));
}

// Places a 1-based pilot slot, clamping and collapsing as needed.
void place(PilotMask& mask, int channel, double raw_slot, RenderReport* report) {
  int slot = round_half_up(raw_slot);
  const int N = mask.block_length();
  if (slot > N || slot < 1) {
    slot = std::clamp(slot, 1, N);
    if (report)
      report->events.push_back({RenderReport::Event::Kind::kClamped, channel, raw_slot, slot});
  }
  if (mask.at(channel, slot - 1)) {
    if (report)
      report->events.push_back({RenderReport::Event::Kind::kCollapsed, channel, raw_slot, slot});
    return;
  }
  mask.set(channel, slot - 1);
}

}  // namespace

std::vector<Violation> validate(const UnstructuredDistribution& d, int num_channels,
                                int block_length) {
  std::vector<Violation> v;
  const int total = num_channels * block_length;
  std::unordered_set<int> seen;
  for (std::size_t l = 0; l < d.positions.size(); ++l) {
    const int p = d.positions[l];
    if (p < 1 || p > total)
      v.push_back({"position", -1, static_cast<double>(p),
                   "position " + std::to_string(p) + " out of range [1, " + std::to_string(total) + "]"});
    else if (!seen.insert(p).second)
      v.push_back({"position", -1, static_cast<double>(p),
                   "duplicate position " + std::to_string(p)});
  }
  return v;
}

std::vector<Violation> validate(const StructuredDistribution& d, int num_channels,
                                int block_length) {
  std::vector<Violation> v;
  const int kappa = d.pilots_per_channel;
  if (kappa < 0 || kappa > block_length)
    v.push_back({"kappa", -1, static_cast<double>(kappa), "kappa out of range [0, N]"});
  if (kappa < 2) return v;  // offsets/spacings unused below kappa = 2
  if (static_cast<int>(d.offset.size()) != num_channels ||
      static_cast<int>(d.spacing.size()) != num_channels) {
    v.push_back({"size", -1, 0.0, "offset/spacing size must equal the channel count"});
    return v;
  }
  for (int i = 0; i < num_channels; ++i) {
    if (d.offset[i] < 2.0)
      v.push_back({"delta", i, d.offset[i], "delta must satisfy delta >= 2"});
    if (d.spacing[i] < 1.0)
      v.push_back({"tau", i, d.spacing[i], "tau must satisfy tau >= 1"});
    // Last explicit pilot sits at delta + tau*(kappa-2); slot 1 supplies the
    // kappa-th pilot.
    const double last = d.offset[i] + d.spacing[i] * (kappa - 2);
    if (last > static_cast<double>(block_length))
      v.push_back({"span", i, last, "delta + tau*(kappa-2) exceeds N"});
  }
  return v;
}

PilotMask unstructured_to_mask(const UnstructuredDistribution& d, int num_channels,
                               int block_length) {
  auto violations = validate(d, num_channels, block_length);
  if (!violations.empty()) {
    std::string msg = "unstructured_to_mask: invalid distribution:";
    for (const auto& v : violations) msg += " [" + v.message + "]";
    throw InvalidPilotDistribution(msg, std::move(violations));
  }
  return PilotMask::from_positions(num_channels, block_length, d.positions);
}

PilotMask structured_to_mask(const StructuredDistribution& d, int num_channels,
                             int block_length, RenderReport* report) {
  const int kappa = d.pilots_per_channel;
  if (kappa < 0 || kappa > block_length)
    throw std::invalid_argument("structured_to_mask: kappa out of range [0, N]");
  PilotMask mask(num_channels, block_length);
  if (kappa == 0) return mask;  // empty mask, no slot-1 pilots either
  if (kappa >= 2 && (static_cast<int>(d.offset.size()) != num_channels ||
                     static_cast<int>(d.spacing.size()) != num_channels))
    throw std::invalid_argument("structured_to_mask: offset/spacing size mismatch");

  for (int i = 0; i < num_channels; ++i) {
    mask.set(i, 0);  // implied pilot in the initial slot of every channel
    for (int m = 0; m + 2 <= kappa; ++m)
      place(mask, i, d.offset[i] + m * d.spacing[i], report);
  }
  return mask;
}

StructuredDistribution heuristic_s1(int kappa, int num_channels, int block_length) {
  check_kappa_range(kappa, block_length, "heuristic_s1");
  StructuredDistribution d{kappa, {}, {}};
  if (kappa == 0) return d;
  const double tau = static_cast<double>(block_length) / kappa;
  d.offset.assign(num_channels, 1.0 + tau);
  d.spacing.assign(num_channels, tau);
  return d;
}

StructuredDistribution heuristic_s2(int kappa, int num_channels, int block_length) {
  check_kappa_range(kappa, block_length / 2.0, "heuristic_s2");
  StructuredDistribution d{kappa, {}, {}};
  if (kappa == 0) return d;
  const double tau = static_cast<double>(block_length) / (kappa - 0.5);
  d.offset.resize(num_channels);
  d.spacing.assign(num_channels, tau);
  for (int i = 1; i <= num_channels; ++i)
    d.offset[i - 1] = (i % 2 == 0) ? 1.0 + tau : 1.0 + tau / 2.0;
  return d;
}

StructuredDistribution heuristic_s3(int kappa, int num_channels, int block_length) {
  check_kappa_range(kappa, static_cast<double>(block_length) / num_channels, "heuristic_s3");
  StructuredDistribution d{kappa, {}, {}};
  if (kappa == 0) return d;
  const double tau = block_length / (kappa - 1.0 + 1.0 / num_channels);
  d.offset.resize(num_channels);
  d.spacing.assign(num_channels, tau);
  for (int i = 1; i <= num_channels; ++i)
    d.offset[i - 1] = 1.0 + i * tau / num_channels;
  return d;
}

StructuredDistribution heuristic_s4(int kappa, int num_channels, int block_length) {
  check_kappa_range(kappa, static_cast<double>(block_length) / num_channels, "heuristic_s4");
  StructuredDistribution d{kappa, {}, {}};
  if (kappa == 0) return d;
  const double tau = block_length / (kappa - 1.0 + 1.0 / num_channels);
  d.offset.resize(num_channels);
  d.spacing.assign(num_channels, tau);
  for (int i = 1; i <= num_channels; ++i) {
    // Cyclic shift with polarization spreading: v = (1, 3, 2, 4) for M = 4.
    const double v = (2.0 * i + (num_channels - 1) * (i % 2 == 0 ? 1.0 : -1.0) + num_channels + 1.0) / 4.0;
    d.offset[i - 1] = 1.0 + v * tau / num_channels;
  }
  return d;
}

PilotMask heuristic_s5(int kappa, int num_channels, int block_length, RenderReport* report) {
  check_kappa_range(kappa, static_cast<double>(block_length) / num_channels, "heuristic_s5");
  PilotMask mask(num_channels, block_length);
  if (kappa == 0) return mask;
  const int dense_count = num_channels * kappa - num_channels + 1;
  const double tau = static_cast<double>(block_length) / dense_count;
  for (int m = 0; m < dense_count; ++m) place(mask, 0, 1.0 + m * tau, report);
  for (int i = 1; i < num_channels; ++i) mask.set(i, 0);
  return mask;
}

PilotMask random_distribution(int kappa, int num_channels, int block_length,
                              std::uint64_t seed) {
  check_kappa_range(kappa, block_length, "random_distribution");
  Rng rng(seed);
  PilotMask mask(num_channels, block_length);
  std::vector<int> slots(block_length);
  for (int i = 0; i < num_channels; ++i) {
    // Partial Fisher-Yates: the first kappa entries become the sample.
    for (int k = 0; k < block_length; ++k) slots[k] = k;
    for (int k = 0; k < kappa; ++k) {
      const int j = static_cast<int>(rng.uniform_int(k, block_length - 1));
      std::swap(slots[k], slots[j]);
      mask.set(i, slots[k]);
    }
  }
  return mask;
}

const char* family_name(PatternFamily f) {
  switch (f) {
    case PatternFamily::kS1: return "s1";
    case PatternFamily::kS2: return "s2";
    case PatternFamily::kS3: return "s3";
    case PatternFamily::kS4: return "s4";
    case PatternFamily::kS5: return "s5";
    case PatternFamily::kRandom: return "u-rnd";
  }
  return "?";
}

std::optional<PatternFamily> family_from_name(std::string_view name) {
  if (name == "s1") return PatternFamily::kS1;
  if (name == "s2") return PatternFamily::kS2;
  if (name == "s3") return PatternFamily::kS3;
  if (name == "s4") return PatternFamily::kS4;
  if (name == "s5") return PatternFamily::kS5;
  if (name == "u-rnd" || name == "random") return PatternFamily::kRandom;
  return std::nullopt;
}

PilotMask build_family_mask(PatternFamily f, int kappa, int num_channels, int block_length,
                            std::uint64_t seed, RenderReport* report) {
  switch (f) {
    case PatternFamily::kS1:
      return structured_to_mask(heuristic_s1(kappa, num_channels, block_length), num_channels, block_length, report);
    case PatternFamily::kS2:
      return structured_to_mask(heuristic_s2(kappa, num_channels, block_length), num_channels, block_length, report);
    case PatternFamily::kS3:
      return structured_to_mask(heuristic_s3(kappa, num_channels, block_length), num_channels, block_length, report);
    case PatternFamily::kS4:
      return structured_to_mask(heuristic_s4(kappa, num_channels, block_length), num_channels, block_length, report);
    case PatternFamily::kS5:
      return heuristic_s5(kappa, num_channels, block_length, report);
    case PatternFamily::kRandom:
      return random_distribution(kappa, num_channels, block_length, seed);
  }
  throw std::invalid_argument("build_family_mask: unknown family");
}

int max_kappa(PatternFamily f, int num_channels, int block_length) {
  switch (f) {
    case PatternFamily::kS1:
    case PatternFamily::kRandom:
      return block_length;
    case PatternFamily::kS2:
      return block_length / 2;
    case PatternFamily::kS3:
    case PatternFamily::kS4:
    case PatternFamily::kS5:
      return block_length / num_channels;
  }
  return 0;
}

}  // namespace pilotopt
