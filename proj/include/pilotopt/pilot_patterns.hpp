#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pilotopt/pilot_mask.hpp"

namespace pilotopt {

// Pilot distribution given as a flat list of distinct 1-based positions in
// [1, M*N] (see PilotMask for the position-to-grid mapping).
struct UnstructuredDistribution {
  std::vector<int> positions;
};

// Per-channel "initial pilot at slot 1, then kappa-1 equispaced pilots":
// channel i gets pilots at slot 1 and at offset[i] + m*spacing[i] for
// m = 0..kappa-2 (1-based, rounded to nearest when rendering). Offsets and
// spacings stay real-valued because the heuristic constructions produce
// non-integers; the optimizer searches integers only.
struct StructuredDistribution {
  int pilots_per_channel = 0;   // kappa, including the slot-1 pilot
  std::vector<double> offset;   // delta_i, one per channel
  std::vector<double> spacing;  // tau_i, one per channel
};

struct Violation {
  std::string field;
  int channel = -1;  // -1 when not channel-specific
  double value = 0.0;
  std::string message;
};

class InvalidPilotDistribution : public std::invalid_argument {
 public:
  InvalidPilotDistribution(const std::string& what, std::vector<Violation> v)
      : std::invalid_argument(what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// Rounding/clamping events produced while rendering a structured family to a
// mask. A position that rounds past N is clamped to N; positions landing on
// an existing pilot collapse into it.
struct RenderReport {
  struct Event {
    enum class Kind { kClamped, kCollapsed };
    Kind kind;
    int channel;          // 0-based
    double raw_position;  // 1-based, before rounding
    int rendered_slot;    // 1-based, after rounding/clamping
  };
  std::vector<Event> events;
};

// Strict invariant checks. For structured distributions these are the
// optimizer-side constraints (delta >= 2, tau >= 1, every pilot position
// within the block, i.e. delta + tau*(kappa-2) <= N); heuristic
// constructions may violate them through rounding and are rendered leniently
// instead (see structured_to_mask).
std::vector<Violation> validate(const UnstructuredDistribution& d, int num_channels, int block_length);
std::vector<Violation> validate(const StructuredDistribution& d, int num_channels, int block_length);

// Throws InvalidPilotDistribution listing every out-of-range or duplicate
// position.
PilotMask unstructured_to_mask(const UnstructuredDistribution& d, int num_channels, int block_length);

// Lenient rendering: nearest-integer rounding (ties away from half, i.e.
// x.5 rounds up), clamping into [1, N], duplicate collapse, all reported
// through `report` when given. Throws only on structural errors (size
// mismatch, kappa out of [0, N], nonpositive spacing with kappa >= 3).
PilotMask structured_to_mask(const StructuredDistribution& d, int num_channels, int block_length,
                             RenderReport* report = nullptr);

// Heuristic constructions. All take the per-channel pilot budget kappa
// (pilot rate kappa/N) and are defined for 0 <= kappa <= N (S1),
// <= N/2 (S2), <= N/M (S3, S4, S5); kappa = 0 yields an empty mask.
StructuredDistribution heuristic_s1(int kappa, int num_channels, int block_length);
StructuredDistribution heuristic_s2(int kappa, int num_channels, int block_length);
StructuredDistribution heuristic_s3(int kappa, int num_channels, int block_length);
StructuredDistribution heuristic_s4(int kappa, int num_channels, int block_length);
// S5 is not expressible as a StructuredDistribution: channel 1 carries
// M*kappa - M + 1 equispaced pilots from slot 1, the others a single slot-1
// pilot.
PilotMask heuristic_s5(int kappa, int num_channels, int block_length,
                       RenderReport* report = nullptr);

// kappa pilots per channel, positions sampled uniformly without replacement
// from {1..N}, independently across channels.
PilotMask random_distribution(int kappa, int num_channels, int block_length, std::uint64_t seed);

enum class PatternFamily { kS1, kS2, kS3, kS4, kS5, kRandom };

const char* family_name(PatternFamily f);
std::optional<PatternFamily> family_from_name(std::string_view name);

// Renders any family at the given kappa; `seed` is used by kRandom only.
PilotMask build_family_mask(PatternFamily f, int kappa, int num_channels, int block_length,
                            std::uint64_t seed = 0, RenderReport* report = nullptr);

// Largest legal kappa for a family (N for S1, N/2 for S2, N/M for S3-S5,
// N for random).
int max_kappa(PatternFamily f, int num_channels, int block_length);

}  // namespace pilotopt
