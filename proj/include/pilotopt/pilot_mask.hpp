#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pilotopt {

// Boolean pilot grid over the M x N channel-time symbol block. Linear
// positions are 1-based and run down the columns: position p maps to
// channel (p-1) mod M and time slot floor((p-1)/M), i.e. p = k*M + i + 1
// for 0-based (i, k).
class PilotMask {
 public:
  PilotMask() = default;
  PilotMask(int num_channels, int block_length)
      : M_(num_channels), N_(block_length),
        grid_(static_cast<std::size_t>(num_channels) * block_length, 0) {}

  int num_channels() const { return M_; }
  int block_length() const { return N_; }

  bool at(int channel, int slot) const { return grid_[idx(channel, slot)] != 0; }
  void set(int channel, int slot, bool pilot = true) { grid_[idx(channel, slot)] = pilot ? 1 : 0; }

  int count() const;
  int count_in_channel(int channel) const;
  double pilot_rate() const {
    return M_ * N_ == 0 ? 0.0 : static_cast<double>(count()) / (static_cast<double>(M_) * N_);
  }

  std::vector<int> positions() const;  // sorted 1-based linear positions
  static PilotMask from_positions(int num_channels, int block_length,
                                  std::span<const int> positions_1based);

  // One '0'/'1' row per channel, newline-terminated.
  std::string to_text_grid() const;
  static PilotMask from_text_grid(const std::string& text);

  nlohmann::json to_json() const;  // {"M": ..., "N": ..., "positions": [...]}
  static PilotMask from_json(const nlohmann::json& j);

  // Stable key for fitness caching and equality-by-content checks.
  const std::vector<std::uint8_t>& cells() const { return grid_; }
  std::string canonical_key() const;

  bool operator==(const PilotMask&) const = default;

 private:
  std::size_t idx(int channel, int slot) const {
    return static_cast<std::size_t>(slot) * M_ + channel;
  }

  int M_ = 0, N_ = 0;
  std::vector<std::uint8_t> grid_;  // column-major: slot-major blocks of M
};

}  // namespace pilotopt
