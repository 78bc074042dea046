#pragma once

#include <random>
#include <string>
#include <vector>

#include "gscore/ingest.hpp"
#include "gscore/rng.hpp"

namespace gscore::fixtures {

inline StatLine constant_line(double value) {
  StatLine l;
  for (auto& v : l.counting) v = value;
  for (auto& s : l.shots) s = {value * 0.4, value};
  return l;
}

inline PlayerHistory make_history(const std::string& id, const std::vector<StatLine>& lines) {
  PlayerHistory h{id, {}};
  int w = 0;
  for (const auto& l : lines) h.weeks.push_back({id, w++, false, l});
  return h;
}

// Players with random per-player means and noisy weeks; every category has
// positive spread so no denominator is degenerate.
inline std::vector<PlayerHistory> random_pool(std::uint64_t seed, int players = 30, int weeks = 12) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> mean(1.0, 20.0);
  std::uniform_real_distribution<double> rate(0.3, 0.9);
  std::uniform_real_distribution<double> attempts(4.0, 20.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<PlayerHistory> out;
  for (int p = 0; p < players; ++p) {
    std::array<double, kCountingCount> m{};
    for (auto& v : m) v = mean(rng);
    const std::array<double, 2> r{rate(rng), rate(rng)};
    const std::array<double, 2> a{attempts(rng), attempts(rng)};
    PlayerHistory h{"p" + std::to_string(p), {}};
    for (int w = 0; w < weeks; ++w) {
      PlayerWeek pw{h.player_id, w, false, {}};
      for (std::size_t c = 0; c < kCountingCount; ++c) {
        pw.line.counting[c] = std::max(0.0, m[c] + 2.0 * noise(rng));
      }
      for (std::size_t k = 0; k < 2; ++k) {
        const double att = std::round(std::max(0.0, a[k] + 3.0 * noise(rng)));
        const double made = std::round(std::clamp(att * (r[k] + 0.1 * noise(rng)), 0.0, att));
        pw.line.shots[k] = {made, att};
      }
      h.weeks.push_back(pw);
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace gscore::fixtures
