#include "pilotopt/pilot_mask.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pilotopt {

int PilotMask::count() const {
  return static_cast<int>(std::count(grid_.begin(), grid_.end(), std::uint8_t{1}));
}

int PilotMask::count_in_channel(int channel) const {
  int n = 0;
  for (int k = 0; k < N_; ++k) n += grid_[idx(channel, k)];
  return n;
}

std::vector<int> PilotMask::positions() const {
  std::vector<int> p;
  p.reserve(static_cast<std::size_t>(count()));
  for (std::size_t q = 0; q < grid_.size(); ++q)
    if (grid_[q]) p.push_back(static_cast<int>(q) + 1);
  return p;  // grid_ is stored in linear-position order, so already sorted
}

PilotMask PilotMask::from_positions(int num_channels, int block_length,
                                    std::span<const int> positions_1based) {
  PilotMask m(num_channels, block_length);
  const int total = num_channels * block_length;
  for (int p : positions_1based) {
    if (p < 1 || p > total)
      throw std::out_of_range("PilotMask::from_positions: position " + std::to_string(p) +
                              " outside [1, " + std::to_string(total) + "]");
    if (m.grid_[static_cast<std::size_t>(p) - 1])
      throw std::invalid_argument("PilotMask::from_positions: duplicate position " +
                                  std::to_string(p));
    m.grid_[static_cast<std::size_t>(p) - 1] = 1;
  }
  return m;
}

std::string PilotMask::to_text_grid() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(M_) * (N_ + 1));
  for (int i = 0; i < M_; ++i) {
    for (int k = 0; k < N_; ++k) s.push_back(at(i, k) ? '1' : '0');
    s.push_back('\n');
  }
  return s;
}

PilotMask PilotMask::from_text_grid(const std::string& text) {
  std::vector<std::string> rows;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty()) rows.push_back(cur);
      cur.clear();
    } else if (ch == '0' || ch == '1') {
      cur.push_back(ch);
    } else if (ch != '\r' && ch != ' ') {
      throw std::invalid_argument("PilotMask::from_text_grid: unexpected character");
    }
  }
  if (!cur.empty()) rows.push_back(cur);
  if (rows.empty()) throw std::invalid_argument("PilotMask::from_text_grid: empty grid");
  const int M = static_cast<int>(rows.size());
  const int N = static_cast<int>(rows[0].size());
  PilotMask m(M, N);
  for (int i = 0; i < M; ++i) {
    if (static_cast<int>(rows[i].size()) != N)
      throw std::invalid_argument("PilotMask::from_text_grid: ragged rows");
    for (int k = 0; k < N; ++k) m.set(i, k, rows[i][k] == '1');
  }
  return m;
}

nlohmann::json PilotMask::to_json() const {
  return nlohmann::json{{"M", M_}, {"N", N_}, {"positions", positions()}};
}

PilotMask PilotMask::from_json(const nlohmann::json& j) {
  const int M = j.at("M").get<int>();
  const int N = j.at("N").get<int>();
  const auto pos = j.at("positions").get<std::vector<int>>();
  return from_positions(M, N, pos);
}

std::string PilotMask::canonical_key() const {
  std::string key;
  key.reserve(grid_.size() / 8 + 16);
  key.append(std::to_string(M_));
  key.push_back('x');
  key.append(std::to_string(N_));
  key.push_back(':');
  std::uint8_t acc = 0;
  int nbits = 0;
  for (std::uint8_t b : grid_) {
    acc = static_cast<std::uint8_t>((acc << 1) | b);
    if (++nbits == 8) {
      key.push_back(static_cast<char>(acc));
      acc = 0;
      nbits = 0;
    }
  }
  if (nbits) key.push_back(static_cast<char>(acc << (8 - nbits)));
  return key;
}

}  // namespace pilotopt
