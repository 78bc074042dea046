#pragma once

// Brute-force reference computations. They share no code with the library's
// moment or probability functions: matchups are sampled directly from the
// player-week table and summarised with plain sums.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gscore/ingest.hpp"
#include "gscore/rng.hpp"

namespace gscore::oracle {

// Every player draws weeks from normal(m_q, s) with the same s, so each
// player's week-to-week spread is close to the pool's.
inline std::vector<PlayerHistory> normal_counting_pool(std::uint64_t seed, int players, int weeks,
                                                       double mean_centre, double mean_sd,
                                                       double week_sd) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<PlayerHistory> out;
  for (int p = 0; p < players; ++p) {
    const double m = mean_centre + mean_sd * z(rng);
    PlayerHistory h{"q" + std::to_string(p), {}};
    for (int w = 0; w < weeks; ++w) {
      PlayerWeek pw{h.player_id, w, false, {}};
      for (auto& v : pw.line.counting) v = std::max(0.0, m + week_sd * z(rng));
      for (auto& s : pw.line.shots) s = {std::clamp(5.0 + z(rng), 0.0, 10.0), 10.0};
      h.weeks.push_back(std::move(pw));
    }
    out.push_back(std::move(h));
  }
  return out;
}

// Shooting pool with attempts CV well under 0.5. The last player is an
// above-average shooter at roughly average volume.
inline std::vector<PlayerHistory> shooting_pool(std::uint64_t seed, int players, int weeks) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<PlayerHistory> out;
  for (int p = 0; p < players; ++p) {
    const bool star = p == players - 1;
    const double attempts = star ? 10.0 : 10.0 * (1.0 + 0.15 * z(rng));
    const double rate = star ? 0.60 : 0.47 + 0.04 * z(rng);
    PlayerHistory h{"s" + std::to_string(p), {}};
    for (int w = 0; w < weeks; ++w) {
      PlayerWeek pw{h.player_id, w, false, {}};
      for (auto& v : pw.line.counting) v = 1.0 + 0.1 * w;
      for (auto& s : pw.line.shots) {
        const double att = std::max(1.0, attempts * (1.0 + 0.1 * z(rng)));
        const double r = std::clamp(rate + 0.08 * z(rng), 0.0, 1.0);
        s = {att * r, att};
      }
      h.weeks.push_back(std::move(pw));
    }
    out.push_back(std::move(h));
  }
  return out;
}

struct CountingEstimate {
  double win_rate = 0.0;
  long samples = 0;
};

// Team A = player `p` + (N - 1) random (player, week) draws; team B = N
// random draws. Returns A's empirical win rate in `c` (ties count half).
inline CountingEstimate counting_win_rate(const std::vector<PlayerHistory>& pool, std::size_t p,
                                          Category c, int n, long samples, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> player(0, pool.size() - 1);
  auto draw = [&](const PlayerHistory& h) {
    std::uniform_int_distribution<std::size_t> week(0, h.weeks.size() - 1);
    return h.weeks[week(rng)].line.count(c);
  };
  double wins = 0.0;
  for (long s = 0; s < samples; ++s) {
    double a = draw(pool[p]);
    for (int i = 1; i < n; ++i) a += draw(pool[player(rng)]);
    double b = 0.0;
    for (int i = 0; i < n; ++i) b += draw(pool[player(rng)]);
    if (c == Category::turnovers) std::swap(a, b);
    wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return {wins / static_cast<double>(samples), samples};
}

struct DifferentialEstimate {
  double mean = 0.0;
  double variance = 0.0;
  long samples = 0;
};

// Empirical moments of (team B rate) - (team A rate) with the same team
// construction as counting_win_rate.
inline DifferentialEstimate percentage_differential(const std::vector<PlayerHistory>& pool,
                                                    std::size_t p, Category c, int n, long samples,
                                                    std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> player(0, pool.size() - 1);
  auto add = [&](const PlayerHistory& h, double& made, double& att) {
    std::uniform_int_distribution<std::size_t> week(0, h.weeks.size() - 1);
    const Shots& s = h.weeks[week(rng)].line.shooting(c);
    made += s.made;
    att += s.attempted;
  };
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    double am = 0.0, aa = 0.0, bm = 0.0, ba = 0.0;
    add(pool[p], am, aa);
    for (int i = 1; i < n; ++i) add(pool[player(rng)], am, aa);
    for (int i = 0; i < n; ++i) add(pool[player(rng)], bm, ba);
    const double d = bm / ba - am / aa;
    sum += d;
    sum_sq += d * d;
  }
  const double m = sum / static_cast<double>(samples);
  return {m, sum_sq / static_cast<double>(samples) - m * m, samples};
}

}  // namespace gscore::oracle
